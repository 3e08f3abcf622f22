"""Built-in reference curves.

Analytic entries return a :class:`~oscmate.curves.Curve`; synthesised
entries return a :class:`~oscmate.curves.SampledCurve` integrated on the
requested grid. Every entry also records the closed-form curvature and
torsion it is expected to have, so tests can check it.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .curves import Curve, SampledCurve, arclength_reparametrize, sample_curve, synthesize_from_curvatures
from .errors import InvalidParams, UnknownName
from .numerics import Grid

DEFAULT_SAMPLES = 2001


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    parameters: Dict[str, float]
    builder: Callable
    expected: Dict[str, Callable] = field(default_factory=dict)
    window: Tuple[float, float] = (-1.0, 1.0)
    synthesized: bool = False
    description: str = ""

    def resolve(self, params: Optional[dict]) -> dict:
        params = dict(params or {})
        unknown = set(params) - set(self.parameters)
        if unknown:
            raise InvalidParams(f"{self.name}: unknown parameter(s) {sorted(unknown)}")
        return {**self.parameters, **{k: float(v) for k, v in params.items()}}


# -- analytic curves --------------------------------------------------------

def _circular_helix(p, grid=None):
    r, h = p["r"], p["h"]
    if r <= 0:
        raise InvalidParams("circular_helix: r must be positive")
    c = np.hypot(r, h)

    def m(s):
        u = np.asarray(s, dtype=float) / c
        return np.stack([r * np.cos(u), r * np.sin(u), h * u], axis=-1)

    def d1(s):
        u = np.asarray(s, dtype=float) / c
        return np.stack([-r * np.sin(u) / c, r * np.cos(u) / c, np.full_like(u, h / c)], axis=-1)

    def d2(s):
        u = np.asarray(s, dtype=float) / c
        return np.stack([-r * np.cos(u) / c**2, -r * np.sin(u) / c**2, np.zeros_like(u)], axis=-1)

    def d3(s):
        u = np.asarray(s, dtype=float) / c
        return np.stack([r * np.sin(u) / c**3, -r * np.cos(u) / c**3, np.zeros_like(u)], axis=-1)

    return Curve(m, (-1e4, 1e4), (d1, d2, d3), unit_speed=True, name="circular_helix")


def _planar_circle(p, grid=None):
    r = p["r"]
    if r <= 0:
        raise InvalidParams("planar_circle: r must be positive")

    def m(s):
        u = np.asarray(s, dtype=float) / r
        return np.stack([r * np.cos(u), r * np.sin(u), np.zeros_like(u)], axis=-1)

    def d(k):
        def dk(s):
            u = np.asarray(s, dtype=float) / r
            ph = u + k * np.pi / 2
            sc = r ** (1 - k)
            return np.stack([sc * np.cos(ph), sc * np.sin(ph), np.zeros_like(u)], axis=-1)
        return dk

    return Curve(m, (-1e4, 1e4), (d(1), d(2), d(3)), unit_speed=True, name="planar_circle")


_A = 1 / np.sqrt(2.0)
_BW = np.sqrt(2.0)


def _paper_helix_derivative(n):
    # y + iz = (cos t + i a sin t) exp(-i b t); Leibniz rule on the product
    def g(t, k):
        k %= 4
        c, s = np.cos(t), np.sin(t)
        base = [(c, _A * s), (-s, _A * c), (-c, -_A * s), (s, -_A * c)][k]
        return base[0] + 1j * base[1]

    def dn(t):
        t = np.asarray(t, dtype=float)
        e = np.exp(-1j * _BW * t)
        w = sum(
            float(math.comb(n, k)) * g(t, n - k) * (-1j * _BW) ** k for k in range(n + 1)
        ) * e
        x = _A * np.sin(t + n * np.pi / 2)
        return np.stack([x, w.real, w.imag], axis=-1)

    return dn


def _paper_spherical_helix(p, grid=None):
    return Curve(
        _paper_helix_derivative(0),
        (-np.pi / 2, np.pi / 2),
        tuple(_paper_helix_derivative(k) for k in (1, 2, 3)),
        unit_speed=False,
        name="paper_spherical_helix",
    )


# -- synthesised curves -----------------------------------------------------

def _grid_for(entry_window, grid):
    if grid is None:
        return Grid.uniform(entry_window[0], entry_window[1], DEFAULT_SAMPLES)
    return grid if isinstance(grid, Grid) else Grid(grid)


def _salkowski_profiles(p):
    k0 = p["kappa0"]
    if k0 <= 0:
        raise InvalidParams("salkowski: kappa0 must be positive")
    return (lambda s: k0 + 0.0 * np.asarray(s, dtype=float)), (lambda s: 1.0 / np.cos(k0 * np.asarray(s, dtype=float)))


def _rectifying_profiles(p):
    a, b, t0 = p["a"], p["b"], p["tau0"]
    if a <= 0:
        raise InvalidParams("rectifying_base: a must be positive (kappa = a/(a^2+(s+b)^2) > 0)")
    if t0 == 0:
        raise InvalidParams("rectifying_base: tau0 must be non-zero")
    return (lambda s: a / (a * a + (np.asarray(s, dtype=float) + b) ** 2)), (lambda s: t0 + 0.0 * np.asarray(s, dtype=float))


def _random_profiles(p):
    seed = p.get("seed")
    if seed is None or not float(seed).is_integer():
        raise InvalidParams("random_frenet: an integer seed is required")
    rng = np.random.default_rng(int(seed))
    ka, kw, kp = rng.uniform(0.05, 0.2, 3), rng.uniform(0.3, 2.0, 3), rng.uniform(0, 2 * np.pi, 3)
    ta, tw, tp = rng.uniform(0.2, 0.8, 3), rng.uniform(0.3, 2.0, 3), rng.uniform(0, 2 * np.pi, 3)
    t_off = rng.uniform(-0.5, 0.5)

    def kappa(s):
        s = np.asarray(s, dtype=float)[..., None]
        return 1.0 + np.sum(ka * np.sin(kw * s + kp), axis=-1)

    def tau(s):
        s = np.asarray(s, dtype=float)[..., None]
        return t_off + np.sum(ta * np.sin(tw * s + tp), axis=-1)

    return kappa, tau


def _synth(profiles, name, window):
    def build(p, grid=None):
        kappa, tau = profiles(p)
        return synthesize_from_curvatures(kappa, tau, _grid_for(window, grid), name=name)
    return build


def _expected_from(profiles):
    def kap(p):
        return profiles(p)[0]

    def tor(p):
        return profiles(p)[1]
    return {"kappa": kap, "tau": tor}


def _helix_expected():
    def kap(p):
        return lambda s: p["r"] / (p["r"] ** 2 + p["h"] ** 2) + 0.0 * np.asarray(s, dtype=float)

    def tor(p):
        return lambda s: p["h"] / (p["r"] ** 2 + p["h"] ** 2) + 0.0 * np.asarray(s, dtype=float)
    return {"kappa": kap, "tau": tor}


CATALOG: Dict[str, CatalogEntry] = {}


def _register(entry):
    CATALOG[entry.name] = entry


_register(CatalogEntry(
    "circular_helix", {"r": 1.0, "h": 1.0}, _circular_helix, _helix_expected(),
    window=(-3.0, 3.0),
    description="unit-speed (r cos(s/c), r sin(s/c), h s/c), c = sqrt(r^2+h^2)",
))
_register(CatalogEntry(
    "paper_spherical_helix", {}, _paper_spherical_helix,
    {"kappa": lambda p: (lambda s: 1 / np.sqrt(1 - np.asarray(s) ** 2)),
     "tau": lambda p: (lambda s: -1 / np.sqrt(1 - np.asarray(s) ** 2))},
    window=(-0.9, 0.9),
    description="spherical helix on the unit sphere, parameter t with s = sin t",
))
_register(CatalogEntry(
    "planar_circle", {"r": 1.0}, _planar_circle,
    {"kappa": lambda p: (lambda s: 1 / p["r"] + 0.0 * np.asarray(s)),
     "tau": lambda p: (lambda s: 0.0 * np.asarray(s))},
    window=(-3.0, 3.0),
    description="circle of radius r in the xy-plane (torsion 0)",
))
_register(CatalogEntry(
    "salkowski", {"kappa0": 1.0}, _synth(_salkowski_profiles, "salkowski", (-1.2, 1.2)),
    _expected_from(_salkowski_profiles), window=(-1.2, 1.2), synthesized=True,
    description="kappa = kappa0, tau = sec(kappa0 s)",
))
_register(CatalogEntry(
    "rectifying_base", {"a": 1.0, "b": 0.0, "tau0": 1.0},
    _synth(_rectifying_profiles, "rectifying_base", (-2.0, 2.0)),
    _expected_from(_rectifying_profiles), window=(-2.0, 2.0), synthesized=True,
    description="kappa = a/(a^2+(s+b)^2), tau = tau0",
))
_register(CatalogEntry(
    "random_frenet", {"seed": None}, _synth(_random_profiles, "random_frenet", (-2.0, 2.0)),
    _expected_from(_random_profiles), window=(-2.0, 2.0), synthesized=True,
    description="seeded smooth positive kappa and smooth tau (seed required)",
))


def get_entry(name: str) -> CatalogEntry:
    try:
        return CATALOG[name]
    except KeyError:
        raise UnknownName(f"unknown catalog curve {name!r}; known: {', '.join(CATALOG)}") from None


def catalog_curve(name: str, params: Optional[dict] = None, grid=None):
    """Build a catalog curve: a ``Curve`` (analytic) or ``SampledCurve`` (synthesised)."""
    entry = get_entry(name)
    p = entry.resolve(params)
    if entry.synthesized:
        return entry.builder(p, grid)
    return entry.builder(p)


def expected_profiles(name: str, params: Optional[dict] = None):
    """Closed-form ``(kappa(s), tau(s))`` of a catalog entry."""
    entry = get_entry(name)
    p = entry.resolve(params)
    return entry.expected["kappa"](p), entry.expected["tau"](p)


def sampled_catalog_curve(name: str, params: Optional[dict] = None, s_min: Optional[float] = None,
                          s_max: Optional[float] = None, samples: int = DEFAULT_SAMPLES) -> SampledCurve:
    """Catalog curve sampled on a uniform arc-length grid.

    Non-unit-speed entries are reparametrised with arc length zero at
    parameter 0.
    """
    entry = get_entry(name)
    lo = entry.window[0] if s_min is None else s_min
    hi = entry.window[1] if s_max is None else s_max
    grid = Grid.uniform(lo, hi, samples)
    built = catalog_curve(name, params, grid)
    if isinstance(built, SampledCurve):
        return built
    if not built.unit_speed:
        t_lo, t_hi = built.domain
        margin = 1e-6 * (t_hi - t_lo)
        tgrid = Grid.uniform(t_lo + margin, t_hi - margin, 4001)
        origin = 0.0 if t_lo < 0.0 < t_hi else None
        built = arclength_reparametrize(built, tgrid, origin=origin)
    return sample_curve(built, grid, name=name)


def parse_curve_spec(text: str):
    """``"name:k=v,k=v"`` -> ``(name, {k: v})``."""
    name, _, rest = text.partition(":")
    params = {}
    for item in filter(None, (x.strip() for x in rest.split(","))):
        key, eq, value = item.partition("=")
        if not eq:
            raise InvalidParams(f"malformed curve parameter {item!r} (want key=value)")
        try:
            params[key.strip()] = float(value)
        except ValueError:
            raise InvalidParams(f"parameter {key.strip()!r} is not a number: {value!r}") from None
    get_entry(name.strip()).resolve(params)
    return name.strip(), params
