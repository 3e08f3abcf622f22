"""Numerical kernel: finite-difference stencils, quadrature, RK4 stepping,
constancy/affine detection and sphere fitting.

Everything here is a pure function of its inputs and works on plain numpy
arrays. Profiles are 1-D arrays indexed by station; vector profiles are
``(n, k)`` arrays.
"""

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from .errors import NonFiniteValue, NonMonotoneStations, TooFewSamples

MIN_STATIONS = 5
# relative tolerance on station spacing for treating a grid as uniform
_UNIFORM_RTOL = 1e-9


@dataclass(frozen=True)
class Grid:
    """Strictly increasing parameter stations (at least five)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < MIN_STATIONS:
            raise TooFewSamples(f"grid needs at least {MIN_STATIONS} stations, got {v.size}")
        if not np.all(np.isfinite(v)):
            raise NonFiniteValue("grid contains non-finite stations")
        if np.any(np.diff(v) <= 0):
            raise NonMonotoneStations("grid stations must be strictly increasing")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def uniform(cls, lo: float, hi: float, n: int) -> "Grid":
        return cls(np.linspace(lo, hi, int(n)))

    @classmethod
    def with_step(cls, lo: float, hi: float, h: float) -> "Grid":
        n = int(round((hi - lo) / h)) + 1
        return cls(np.linspace(lo, hi, n))

    def __len__(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    @property
    def is_uniform(self) -> bool:
        return is_uniform(self.values)

    @property
    def step(self) -> Optional[float]:
        if not self.is_uniform:
            return None
        return float((self.values[-1] - self.values[0]) / (self.values.size - 1))


class FitResult(NamedTuple):
    coefficients: np.ndarray
    residual_rms: float
    rank_deficient: bool


class ConstancyResult(NamedTuple):
    is_constant: bool
    level: float
    spread: float


class SphereFit(NamedTuple):
    center: np.ndarray
    radius: float
    residual_rms: float
    degenerate: bool


def is_uniform(stations) -> bool:
    d = np.diff(np.asarray(stations, dtype=float))
    return bool(np.all(np.abs(d - d.mean()) <= _UNIFORM_RTOL * abs(d.mean())))


def _as_stations(stations, minimum=MIN_STATIONS):
    x = np.asarray(stations, dtype=float)
    if x.ndim != 1 or x.size < minimum:
        raise TooFewSamples(f"need at least {minimum} stations, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise NonFiniteValue("non-finite station")
    if np.any(np.diff(x) <= 0):
        raise NonMonotoneStations("stations must be strictly increasing")
    return x


def fd_weights(x0: float, xs, order: int) -> np.ndarray:
    """Finite-difference weights for the ``order``-th derivative at ``x0``.

    Fornberg's recursion (Math. Comp. 51, 1988) on arbitrary nodes ``xs``.
    """
    xs = np.asarray(xs, dtype=float)
    n = xs.size
    c = np.zeros((n, order + 1))
    c1 = 1.0
    c4 = xs[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, order)
        c2 = 1.0
        c5 = c4
        c4 = xs[i] - x0
        for j in range(i):
            c3 = xs[i] - xs[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, order]


def _stencil_width(order):
    # 5 points: O(h^4) central for orders 1-2; 7 points keep order 3 at O(h^4)
    return 5 if order <= 2 else 7


def _window(i, n, width):
    start = min(max(i - width // 2, 0), n - width)
    return start, start + width


def derivative_stencil(stations, values, index: int, order: int = 1):
    """Derivative estimate at a single station.

    Central 5-point stencil on interior stations (4th order on uniform
    spacing); at the two stations nearest each end the window is shifted
    to stay inside the grid, giving a one-sided stencil.
    """
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    x = _as_stations(stations)
    y = np.asarray(values, dtype=float)
    if y.shape[0] != x.size:
        raise ValueError("stations and values differ in length")
    if not -x.size <= index < x.size:
        raise IndexError(index)
    index %= x.size
    width = _stencil_width(order)
    if x.size < width:
        raise TooFewSamples(f"order-{order} stencil needs {width} stations")
    lo, hi = _window(index, x.size, width)
    if not np.all(np.isfinite(y[lo:hi])):
        raise NonFiniteValue("non-finite value inside stencil", station=x[index])
    w = fd_weights(x[index], x[lo:hi], order)
    return np.tensordot(w, y[lo:hi], axes=1)


def derivative(stations, values, order: int = 1) -> np.ndarray:
    """Derivative profile at every station (vectorised :func:`derivative_stencil`)."""
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    x = _as_stations(stations)
    y = np.asarray(values, dtype=float)
    n = x.size
    width = _stencil_width(order)
    if n < width:
        raise TooFewSamples(f"order-{order} stencil needs {width} stations")
    out = np.empty_like(y)
    half = width // 2
    if is_uniform(x):
        h = (x[-1] - x[0]) / (n - 1)
        unit = np.arange(width, dtype=float)
        wc = fd_weights(float(half), unit, order) / h**order
        # interior: sliding window
        acc = np.zeros_like(y[half:n - half])
        for j in range(width):
            acc = acc + wc[j] * y[j:n - width + 1 + j]
        out[half:n - half] = acc
        for i in list(range(half)) + list(range(n - half, n)):
            lo, hi = _window(i, n, width)
            w = fd_weights(float(i - lo), unit, order) / h**order
            out[i] = np.tensordot(w, y[lo:hi], axes=1)
    else:
        for i in range(n):
            lo, hi = _window(i, n, width)
            w = fd_weights(x[i], x[lo:hi], order)
            out[i] = np.tensordot(w, y[lo:hi], axes=1)
    return out


def _evaluate(f: Callable, points: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(f(points), dtype=float)
        if vals.shape[:1] == points.shape:
            return vals
    except (TypeError, ValueError):
        pass
    return np.array([f(p) for p in points], dtype=float)


def cumulative_integral(f: Callable, grid, init: float = 0.0) -> np.ndarray:
    """``F(s_i) = init + int_{s_0}^{s_i} f`` by composite Simpson.

    ``f`` is evaluated at the stations and at every interval midpoint, so
    the rule is 4th order on uniform and non-uniform grids alike.
    """
    x = _as_stations(grid, minimum=2)
    mids = 0.5 * (x[:-1] + x[1:])
    fx = _evaluate(f, x)
    fm = _evaluate(f, mids)
    bad = ~np.isfinite(fx)
    if bad.any():
        raise NonFiniteValue("non-finite integrand", station=float(x[np.argmax(bad)]))
    if not np.all(np.isfinite(fm)):
        raise NonFiniteValue("non-finite integrand", station=float(mids[np.argmax(~np.isfinite(fm))]))
    h = np.diff(x)
    pieces = h / 6.0 * (fx[:-1] + 4.0 * fm + fx[1:])
    return init + np.concatenate([[0.0], np.cumsum(pieces)])


def _interval_weights(offsets) -> np.ndarray:
    """Weights integrating the interpolant through ``offsets`` over [0, 1]."""
    offsets = np.asarray(offsets, dtype=float)
    w = np.empty(offsets.size)
    for j, o in enumerate(offsets):
        others = np.delete(offsets, j)
        basis = np.polynomial.Polynomial.fromroots(others) / np.prod(o - others)
        anti = basis.integ()
        w[j] = anti(1.0) - anti(0.0)
    return w


def cumulative_integral_samples(stations, values, init: float = 0.0) -> np.ndarray:
    """Running integral of sampled values.

    Uniform grids integrate the local quintic interpolant over each
    interval (O(h^6); cubic with fewer than six stations); non-uniform
    grids fall back to the trapezoid rule.
    """
    x = _as_stations(stations, minimum=4)
    y = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(y)):
        raise NonFiniteValue("non-finite integrand")
    if not is_uniform(x):
        pieces = 0.5 * np.diff(x) * (y[:-1] + y[1:])
        return init + np.concatenate([[0.0], np.cumsum(pieces)])
    n = x.size
    h = (x[-1] - x[0]) / (n - 1)
    m = 6 if n >= 6 else 4
    left = np.arange(n - 1)
    start = np.clip(left - (m // 2 - 1), 0, n - m)
    pieces = np.zeros(n - 1)
    for shift in np.unique(start - left):
        sel = start - left == shift
        w = _interval_weights(np.arange(m) + shift)
        idx = start[sel][:, None] + np.arange(m)
        pieces[sel] = y[idx] @ w
    return init + np.concatenate([[0.0], np.cumsum(pieces * h)])


def rk4_step(field, s, y, h):
    k1 = field(s, y)
    k2 = field(s + 0.5 * h, y + 0.5 * h * k1)
    k3 = field(s + 0.5 * h, y + 0.5 * h * k2)
    k4 = field(s + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def ode_rk4(field: Callable, grid, y0, project: Optional[Callable] = None) -> np.ndarray:
    """Classical RK4 trajectory on the grid stations.

    ``project`` (optional) maps each new state back onto a constraint
    manifold after every step, e.g. re-orthonormalising a frame.
    """
    x = _as_stations(grid, minimum=2)
    y = np.array(y0, dtype=float)
    if not np.all(np.isfinite(y)):
        raise NonFiniteValue("non-finite initial state", station=float(x[0]))
    out = np.empty((x.size,) + y.shape)
    out[0] = y
    for i in range(x.size - 1):
        y = rk4_step(field, x[i], y, x[i + 1] - x[i])
        if project is not None:
            y = project(y)
        if not np.all(np.isfinite(y)):
            raise NonFiniteValue(
                f"non-finite state after station {x[i]!r}", station=float(x[i])
            )
        out[i + 1] = y
    return out


def constancy_test(values, tol_rel: float = 1e-6, tol_abs: float = 0.0) -> ConstancyResult:
    v = np.asarray(values, dtype=float).ravel()
    if v.size < MIN_STATIONS:
        raise TooFewSamples(f"constancy test needs {MIN_STATIONS} values, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise NonFiniteValue("non-finite value in constancy test")
    level = float(np.median(v))
    spread = float(v.max() - v.min())
    ok = spread <= tol_abs + tol_rel * max(1.0, abs(level))
    return ConstancyResult(bool(ok), level, spread)


def affine_fit(features, target) -> FitResult:
    """Least-squares solve of ``features @ c = target``.

    When the normal matrix is singular to 1e-10 relative the minimum-norm
    solution is returned with ``rank_deficient`` set.
    """
    A = np.asarray(features, dtype=float)
    y = np.asarray(target, dtype=float).ravel()
    if A.ndim != 2 or A.shape[0] != y.size:
        raise ValueError("features must be (rows, unknowns) matching target")
    if A.shape[0] < A.shape[1]:
        raise TooFewSamples("fewer rows than unknowns")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(y))):
        raise NonFiniteValue("non-finite input to affine fit")
    sv = np.linalg.svd(A, compute_uv=False)
    # eigenvalues of A^T A are sv**2
    rank_deficient = bool(sv[0] == 0 or (sv[-1] / sv[0]) ** 2 < 1e-10)
    rcond = 1e-5 if rank_deficient else None
    coef, *_ = np.linalg.lstsq(A, y, rcond=rcond)
    resid = A @ coef - y
    return FitResult(coef, float(np.sqrt(np.mean(resid**2))), rank_deficient)


def sphere_fit(points) -> SphereFit:
    """Algebraic least-squares sphere through 3-D points.

    Solves ``|p|^2 = 2 c.p + k`` linearly, ``r^2 = k + |c|^2``. Coplanar
    or collinear input is flagged ``degenerate`` and the best-effort
    minimum-norm solution returned.
    """
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or P.shape[1] != 3 or P.shape[0] < 4:
        raise TooFewSamples("sphere fit needs at least 4 points in 3-D")
    if not np.all(np.isfinite(P)):
        raise NonFiniteValue("non-finite point in sphere fit")
    # centring keeps the linear system well conditioned far from the origin
    shift = P.mean(axis=0)
    Q = P - shift
    sv = np.linalg.svd(Q, compute_uv=False)
    scale = sv[0] if sv[0] > 0 else 1.0
    degenerate = bool(sv[-1] / scale < 1e-9)
    A = np.column_stack([2.0 * Q, np.ones(len(Q))])
    b = np.sum(Q**2, axis=1)
    sol, *_ = np.linalg.lstsq(A, b, rcond=1e-12 if not degenerate else 1e-8)
    c = sol[:3]
    r = float(np.sqrt(max(sol[3] + c @ c, 0.0)))
    d = np.linalg.norm(Q - c, axis=1)
    rms = float(np.sqrt(np.mean((d - r) ** 2)))
    return SphereFit(c + shift, r, rms, degenerate)


def segments(valid, signs=None, min_length: int = MIN_STATIONS):
    """Maximal runs of valid stations (and, if given, of constant sign).

    Returns a list of ``slice`` objects; runs shorter than ``min_length``
    are dropped.
    """
    valid = np.asarray(valid, dtype=bool)
    key = np.zeros(valid.size) if signs is None else np.sign(np.asarray(signs, dtype=float))
    out = []
    start = None
    for i in range(valid.size + 1):
        brk = (
            i == valid.size
            or not valid[i]
            or (start is not None and key[i] != key[start])
        )
        if start is not None and brk:
            if i - start >= min_length:
                out.append(slice(start, i))
            start = None
        if i < valid.size and valid[i] and start is None:
            start = i
    return out


def piecewise_derivative(stations, values, valid=None, signs=None, order: int = 1) -> np.ndarray:
    """Derivative taken separately on each valid segment; NaN elsewhere."""
    x = np.asarray(stations, dtype=float)
    y = np.asarray(values, dtype=float)
    if valid is None:
        valid = np.isfinite(y) if y.ndim == 1 else np.all(np.isfinite(y), axis=1)
    out = np.full_like(y, np.nan)
    for seg in segments(valid, signs, min_length=_stencil_width(order)):
        out[seg] = derivative(x[seg], y[seg], order)
    return out


def sup_relative_error(values, reference) -> float:
    """``max|values - reference| / max|reference|`` over finite entries."""
    a = np.asarray(values, dtype=float)
    b = np.asarray(reference, dtype=float)
    ok = np.isfinite(a) & np.isfinite(b)
    if a.ndim > 1:
        ok = np.all(ok, axis=tuple(range(1, a.ndim)))
    scale = np.max(np.abs(b[ok]))
    return float(np.max(np.abs(a[ok] - b[ok])) / (scale if scale > 0 else 1.0))
