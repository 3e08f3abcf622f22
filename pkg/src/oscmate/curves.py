"""Curves, sampled Frenet apparatus, arc-length reparametrisation, synthesis
from prescribed curvature/torsion, indicatrices and the alternative frame.

Conventions follow the classical Frenet-Serret system for a unit-speed
curve: ``T' = kN``, ``N' = -kT + tB``, ``B' = -tN`` with ``t = -<B', N>``.
"""

from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import PchipInterpolator

from . import numerics as nm
from .errors import (
    DegenerateIndicatrix,
    Irregular,
    NonFiniteValue,
    NonMonotoneStations,
    NonPositiveKappa,
    NotFrenet,
    OutOfDomain,
    ZeroSpeedFrame,
)

KAPPA_MIN = 1e-9

_GL_NODES, _GL_WEIGHTS = leggauss(8)
_FD_OFFSETS = np.arange(-3, 4, dtype=float)


def _vec(a):
    return np.asarray(a, dtype=float)


@dataclass(frozen=True)
class Curve:
    """A parametric space curve ``t -> R^3``.

    ``map`` and the optional ``derivatives`` (orders 1, 2, 3 in that
    order) must accept numpy arrays of parameter values and return arrays
    of shape ``(..., 3)``. Missing derivatives are estimated with 7-point
    central differences of step ``fd_step``.
    """

    map: Callable
    domain: tuple
    derivatives: tuple = ()
    unit_speed: bool = False
    name: str = "curve"
    fd_step: float = 1e-2

    def __call__(self, t):
        return _vec(self.map(_vec(t)))

    @property
    def analytic(self) -> bool:
        return len(self.derivatives) >= 3

    def derivative(self, t, order: int):
        t = _vec(t)
        if order <= len(self.derivatives):
            return _vec(self.derivatives[order - 1](t))
        h = self.fd_step
        lo, hi = self.domain
        # shift the 7-point window inward near the ends of the domain
        centre = np.clip(t, lo + 3 * h, hi - 3 * h) if hi - lo > 6 * h else t
        shift = np.round((t - centre) / h, 12)
        acc = 0.0
        for sh in np.unique(shift):
            w = nm.fd_weights(sh * h, _FD_OFFSETS * h, order)
            part = sum(wj * self(t - sh * h + off * h) for wj, off in zip(w, _FD_OFFSETS))
            acc = acc + np.where(np.expand_dims(shift == sh, -1), part, 0.0) if np.ndim(t) else part
        return acc

    def check_domain(self, t):
        lo, hi = self.domain
        t = _vec(t)
        tol = 1e-12 * max(1.0, abs(lo), abs(hi))
        if np.any(t < lo - tol) or np.any(t > hi + tol):
            raise OutOfDomain(f"parameter outside domain [{lo}, {hi}]")


@dataclass(frozen=True)
class ReparametrizedCurve(Curve):
    """Unit-speed curve obtained from :func:`arclength_reparametrize`."""

    s_of_t: Optional[Callable] = None
    t_of_s: Optional[Callable] = None
    source: Optional[Curve] = None


@dataclass(frozen=True)
class FrenetSample:
    s: float
    position: np.ndarray
    T: np.ndarray
    N: np.ndarray
    B: np.ndarray
    kappa: float
    tau: float


class AlternativeFrame(NamedTuple):
    N: np.ndarray
    C: np.ndarray
    W: np.ndarray
    f: float
    g: float


def _intervals(s, valid):
    """Collapse runs of invalid stations into ``(lo, hi)`` station intervals."""
    out = []
    i, n = 0, len(valid)
    while i < n:
        if valid[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and not valid[j + 1]:
            j += 1
        out.append((float(s[i]), float(s[j])))
        i = j + 1
    return out


@dataclass(frozen=True)
class SampledCurve:
    """Frenet apparatus on a grid of arc-length stations.

    Stored column-wise. Stations that fail Frenet regularity keep their
    position but carry NaN curvature, torsion (and, where undefined,
    frame); they are listed in ``excluded`` as closed station intervals.
    """

    name: str
    s: np.ndarray
    position: np.ndarray
    T: np.ndarray
    N: np.ndarray
    B: np.ndarray
    kappa: np.ndarray
    tau: np.ndarray
    theta0: Optional[float] = None
    theta: Optional[np.ndarray] = None
    excluded: list = field(default_factory=list)

    def __post_init__(self):
        if self.s.size > 1 and not np.all(np.diff(self.s) > 0):
            raise NonMonotoneStations(f"{self.name}: stations must be strictly increasing")
        if not self.excluded and not np.all(self.valid):
            object.__setattr__(self, "excluded", _intervals(self.s, self.valid))

    def __len__(self):
        return self.s.size

    @property
    def valid(self) -> np.ndarray:
        return np.isfinite(self.kappa) & np.isfinite(self.tau)

    def sample(self, i: int) -> FrenetSample:
        return FrenetSample(
            float(self.s[i]), self.position[i], self.T[i], self.N[i], self.B[i],
            float(self.kappa[i]), float(self.tau[i]),
        )

    @property
    def samples(self):
        return [self.sample(i) for i in np.flatnonzero(self.valid)]

    def restrict(self, mask) -> "SampledCurve":
        """Sub-curve on the stations selected by ``mask`` (or index array)."""
        idx = np.arange(len(self))[mask]
        return replace(
            self,
            s=self.s[idx], position=self.position[idx], T=self.T[idx], N=self.N[idx],
            B=self.B[idx], kappa=self.kappa[idx], tau=self.tau[idx],
            theta=None if self.theta is None else self.theta[idx], excluded=[],
        )


# -- Frenet apparatus -------------------------------------------------------

def _apparatus(d1, d2, d3, unit_speed, kappa_min):
    """Vectorised Frenet apparatus from the first three derivatives.

    Returns ``T, N, B, kappa, tau, ok`` where ``ok`` flags regular stations.
    """
    d1, d2, d3 = np.atleast_2d(d1), np.atleast_2d(d2), np.atleast_2d(d3)
    speed = np.linalg.norm(d1, axis=1)
    cross = np.cross(d1, d2)
    cn = np.linalg.norm(cross, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        if unit_speed:
            T = d1.copy()
            kappa = np.linalg.norm(d2, axis=1)
            N = d2 / kappa[:, None]
            B = np.cross(T, N)
        else:
            T = d1 / speed[:, None]
            kappa = cn / speed**3
            B = cross / cn[:, None]
            N = np.cross(B, T)
        tau = np.einsum("ij,ij->i", cross, d3) / cn**2
    ok = (speed > 0) & (kappa > kappa_min) & np.isfinite(tau)
    return T, N, B, kappa, tau, ok


def frenet_apparatus(curve: Curve, s: float, kappa_min: float = KAPPA_MIN) -> FrenetSample:
    """Frenet frame, curvature and torsion of ``curve`` at parameter ``s``.

    Raises :class:`NotFrenet` where the curvature drops to ``kappa_min``.
    """
    curve.check_domain(s)
    t = np.array([float(s)])
    d1, d2, d3 = (curve.derivative(t, k) for k in (1, 2, 3))
    T, N, B, kappa, tau, ok = _apparatus(d1, d2, d3, curve.unit_speed, kappa_min)
    if not ok[0]:
        raise NotFrenet(f"{curve.name}: curvature {kappa[0]:.3g} <= {kappa_min:g} at s={s}")
    pos = np.atleast_2d(curve(t))[0]
    return FrenetSample(float(s), pos, T[0], N[0], B[0], float(kappa[0]), float(tau[0]))


def sample_curve(curve: Curve, grid, name: Optional[str] = None,
                 kappa_min: float = KAPPA_MIN) -> SampledCurve:
    """Frenet apparatus of ``curve`` at every grid station.

    Non-Frenet stations are excluded rather than aborting the run. Raises
    :class:`NotFrenet` only if no station is regular.
    """
    s = _vec(grid)
    curve.check_domain(s)
    d1, d2, d3 = (np.atleast_2d(curve.derivative(s, k)) for k in (1, 2, 3))
    T, N, B, kappa, tau, ok = _apparatus(d1, d2, d3, curve.unit_speed, kappa_min)
    if not ok.any():
        raise NotFrenet(f"{curve.name}: no station has curvature above {kappa_min:g}")
    kappa = np.where(ok, kappa, np.nan)
    tau = np.where(ok, tau, np.nan)
    T, N, B = (np.where(ok[:, None], v, np.nan) for v in (T, N, B))
    return SampledCurve(name or curve.name, s, np.atleast_2d(curve(s)), T, N, B, kappa, tau)


def apparatus_from_points(stations, positions, name: str = "points",
                          kappa_min: float = KAPPA_MIN) -> SampledCurve:
    """Frenet apparatus recomputed from positions alone by finite differences.

    Parametrisation-invariant formulas, so ``stations`` need not be arc
    length. This is the independent oracle for formula-derived curvatures.
    """
    s = _vec(stations)
    P = _vec(positions)
    d1, d2, d3 = (nm.derivative(s, P, k) for k in (1, 2, 3))
    T, N, B, kappa, tau, ok = _apparatus(d1, d2, d3, False, kappa_min)
    kappa = np.where(ok, kappa, np.nan)
    tau = np.where(ok, tau, np.nan)
    return SampledCurve(name, s, P, T, N, B, kappa, tau)


def curvatures_from_frames(sampled: SampledCurve):
    """``k = <T', N>`` and ``t = -<B', N>`` with stencil derivatives of the frame."""
    ok = sampled.valid
    dT = nm.piecewise_derivative(sampled.s, sampled.T, ok)
    dB = nm.piecewise_derivative(sampled.s, sampled.B, ok)
    kappa = np.einsum("ij,ij->i", dT, sampled.N)
    tau = -np.einsum("ij,ij->i", dB, sampled.N)
    return kappa, tau


def frenet_residuals(sampled: SampledCurve):
    """Norms of ``T' - kN``, ``N' + kT - tB`` and ``B' + tN`` per station."""
    ok = sampled.valid
    k = sampled.kappa[:, None]
    t = sampled.tau[:, None]
    dT, dN, dB = (nm.piecewise_derivative(sampled.s, v, ok) for v in (sampled.T, sampled.N, sampled.B))
    r1 = np.linalg.norm(dT - k * sampled.N, axis=1)
    r2 = np.linalg.norm(dN + k * sampled.T - t * sampled.B, axis=1)
    r3 = np.linalg.norm(dB + t * sampled.N, axis=1)
    return r1, r2, r3


# -- arc length -------------------------------------------------------------

def arclength_reparametrize(curve: Curve, grid, origin: Optional[float] = None,
                            tol: float = 1e-13) -> ReparametrizedCurve:
    """Unit-speed reparametrisation of ``curve``.

    ``grid`` discretises the original parameter; ``origin`` is the
    parameter value assigned arc length zero (default: first station).
    ``s(t)`` is tabulated by Simpson quadrature of the speed and refined
    between stations with 8-point Gauss-Legendre; ``t(s)`` starts from a
    monotone interpolant and is polished by Newton steps until
    ``|s(t) - s| < tol``.
    """
    tg = _vec(grid)
    curve.check_domain(tg)

    def speed(t):
        return np.linalg.norm(np.atleast_2d(curve.derivative(_vec(t), 1)), axis=-1)

    sp = speed(tg)
    if not np.all(np.isfinite(sp)) or np.any(sp <= 1e-12 * np.max(sp)):
        raise Irregular(f"{curve.name}: speed vanishes on the grid")
    table = nm.cumulative_integral(speed, tg, 0.0)

    def s_raw(t):
        t = np.atleast_1d(_vec(t))
        i = np.clip(np.searchsorted(tg, t, side="right") - 1, 0, tg.size - 2)
        a = tg[i]
        half = 0.5 * (t - a)
        nodes = a[:, None] + half[:, None] * (_GL_NODES[None, :] + 1.0)
        v = speed(nodes.ravel()).reshape(nodes.shape)
        return table[i] + half * (v @ _GL_WEIGHTS)

    offset = 0.0 if origin is None else float(s_raw(origin)[0])
    s_table = table - offset

    def s_of_t(t):
        out = s_raw(t) - offset
        return out if np.ndim(t) else float(out[0])

    guess = PchipInterpolator(s_table, tg)
    lo_t, hi_t = tg[0], tg[-1]

    def t_of_s(s):
        s1 = np.atleast_1d(_vec(s))
        t = np.clip(guess(s1), lo_t, hi_t)
        for _ in range(30):
            err = s_raw(t) - offset - s1
            if np.max(np.abs(err)) < tol:
                break
            t = np.clip(t - err / speed(t), lo_t, hi_t)
        return t if np.ndim(s) else float(t[0])

    def pos(s):
        return curve(t_of_s(s))

    derivs = ()
    if len(curve.derivatives) >= 3:
        def _parts(s):
            t = np.atleast_1d(t_of_s(s))
            u, ut, utt = (np.atleast_2d(curve.derivative(t, k)) for k in (1, 2, 3))
            v = np.linalg.norm(u, axis=1)[:, None]
            vt = np.einsum("ij,ij->i", u, ut)[:, None] / v
            return u, ut, utt, v, vt

        def _shape(s, arr):
            return arr if np.ndim(s) else arr[0]

        def d1(s):
            u, _, _, v, _ = _parts(s)
            return _shape(s, u / v)

        def d2(s):
            u, ut, _, v, vt = _parts(s)
            return _shape(s, ut / v**2 - u * vt / v**3)

        def d3(s):
            u, ut, utt, v, vt = _parts(s)
            vtt = (np.einsum("ij,ij->i", ut, ut)[:, None] + np.einsum("ij,ij->i", u, utt)[:, None]) / v \
                - vt**2 / v
            out = utt / v**3 - 3 * ut * vt / v**4 - u * vtt / v**4 + 3 * u * vt**2 / v**5
            return _shape(s, out)

        derivs = (d1, d2, d3)

    return ReparametrizedCurve(
        map=pos, domain=(float(s_table[0]), float(s_table[-1])), derivatives=derivs,
        unit_speed=True, name=curve.name, fd_step=curve.fd_step,
        s_of_t=s_of_t, t_of_s=t_of_s, source=curve,
    )


# -- synthesis --------------------------------------------------------------

def _orthonormalize(y):
    T = y[3:6] / np.linalg.norm(y[3:6])
    N = y[6:9] - (y[6:9] @ T) * T
    N /= np.linalg.norm(N)
    return np.concatenate([y[:3], T, N, np.cross(T, N)])


def synthesize_from_curvatures(kappa: Callable, tau: Callable, grid,
                               initial_frame: Optional[Sequence] = None,
                               initial_position=(0.0, 0.0, 0.0),
                               name: str = "synthesized") -> SampledCurve:
    """Integrate the Frenet system for prescribed ``kappa(s)``, ``tau(s)``.

    RK4 on the 12-dimensional state (position, T, N, B) with Gram-Schmidt
    re-orthonormalisation after every step. The returned sample carries
    the prescribed curvature and torsion at the stations.
    """
    s = _vec(grid)
    if initial_frame is None:
        initial_frame = np.eye(3)
    F = _vec(initial_frame)
    if not np.allclose(F @ F.T, np.eye(3), atol=1e-9) or np.linalg.det(F) < 0:
        raise ValueError("initial frame must be orthonormal and right-handed")

    def evaluate(x):
        k = float(kappa(x))
        t = float(tau(x))
        if not (np.isfinite(k) and np.isfinite(t)):
            raise NonFiniteValue(f"non-finite curvature at s={x!r}", station=x)
        if k <= 0:
            raise NonPositiveKappa(f"kappa({x!r}) = {k!r} is not positive")
        return k, t

    def field_(x, y):
        k, t = evaluate(x)
        T, N, B = y[3:6], y[6:9], y[9:12]
        return np.concatenate([T, k * N, -k * T + t * B, -t * N])

    y0 = np.concatenate([_vec(initial_position), F[0], F[1], F[2]])
    Y = nm.ode_rk4(field_, s, y0, project=_orthonormalize)
    kv = np.array([evaluate(x)[0] for x in s])
    tv = np.array([evaluate(x)[1] for x in s])
    return SampledCurve(name, s, Y[:, :3], Y[:, 3:6], Y[:, 6:9], Y[:, 9:12], kv, tv)


# -- indicatrices -----------------------------------------------------------

def indicatrix(sampled: SampledCurve, which: str) -> SampledCurve:
    """Spherical curve traced by the T, N or B field, on its own arc length.

    First derivatives come from the Frenet formulas; higher ones from
    stencils of that first derivative. Stations where the field is
    stationary are excluded.
    """
    which = which.upper()
    k = sampled.kappa[:, None]
    t = sampled.tau[:, None]
    if which == "T":
        V, dV = sampled.T, k * sampled.N
    elif which == "N":
        V, dV = sampled.N, -k * sampled.T + t * sampled.B
    elif which == "B":
        V, dV = sampled.B, -t * sampled.N
    else:
        raise ValueError("which must be 'T', 'N' or 'B'")
    ok = sampled.valid
    speed = np.linalg.norm(dV, axis=1)
    moving = ok & (speed > KAPPA_MIN)
    if not moving.any():
        raise DegenerateIndicatrix(f"{which}-indicatrix of {sampled.name} is a single point")
    if not moving[ok].all():
        raise DegenerateIndicatrix(f"{which} is stationary on part of {sampled.name}")
    V = V[ok]
    dV = dV[ok]
    s = sampled.s[ok]
    d2 = nm.derivative(s, dV, 1)
    d3 = nm.derivative(s, dV, 2)
    T, N, B, kap, tor, good = _apparatus(dV, d2, d3, False, KAPPA_MIN)
    arc = nm.cumulative_integral_samples(s, speed[ok]) if s.size >= 4 else s - s[0]
    kap = np.where(good, kap, np.nan)
    tor = np.where(good, tor, np.nan)
    return SampledCurve(f"{which}-indicatrix of {sampled.name}", arc, V, T, N, B, kap, tor)


# -- alternative frame ------------------------------------------------------

def sigma_from(kappa, tau, kappa_prime, tau_prime):
    """``k^2 (t/k)' / (k^2 + t^2)^(3/2)`` written as ``(k t' - t k') / (k^2+t^2)^(3/2)``."""
    return (kappa * tau_prime - tau * kappa_prime) / (kappa**2 + tau**2) ** 1.5


def alternative_frame(sample: FrenetSample, kappa_prime: float, tau_prime: float) -> AlternativeFrame:
    """Alternative frame ``{N, C, W}`` with ``N' = fC, C' = -fN + gW, W' = -gC``."""
    k, t = sample.kappa, sample.tau
    f = float(np.hypot(k, t))
    if f == 0.0:
        raise ZeroSpeedFrame("kappa = tau = 0: Darboux vector undefined")
    W = (t * sample.T + k * sample.B) / f
    C = np.cross(W, sample.N)
    g = float(sigma_from(k, t, kappa_prime, tau_prime) * f)
    return AlternativeFrame(sample.N, C, W, f, g)
