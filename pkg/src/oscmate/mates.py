"""Osculating mates: construction, curvature formulas in both directions,
position-vector decomposition and the OT (osculating-type) variant.

The mate of a unit-speed Frenet curve with frame ``{T, N, B}`` is

    beta(s) = int (sin(theta) T + cos(theta) N) ds,   theta = theta0 + int kappa ds

with frame ``Tb = sin(theta) T + cos(theta) N``, ``Nb = B``,
``Bb = cos(theta) T - sin(theta) N`` and curvatures
``kappa_bar = eps * tau cos(theta)``, ``tau_bar = tau sin(theta)``, the sign
``eps`` chosen per sub-interval so that ``kappa_bar > 0``.
"""

from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from . import numerics as nm
from .curves import FrenetSample, SampledCurve, apparatus_from_points, sigma_from
from .errors import DegenerateMate, NegativeKappaRecovered, NotFrenet, ZeroDenominator

DELTA_MIN = 1e-6


class EpsilonInterval(NamedTuple):
    lo: float
    hi: float
    sign: int


@dataclass(frozen=True)
class MateResult:
    mate: SampledCurve
    base: SampledCurve
    kappa_bar: np.ndarray
    tau_bar: np.ndarray
    epsilon1: List[EpsilonInterval]
    eps: np.ndarray
    theta: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    theta0: float

    @property
    def s(self):
        return self.mate.s

    @property
    def valid(self):
        return self.eps != 0


@dataclass(frozen=True)
class PositionDecomposition:
    a1: np.ndarray
    a2: np.ndarray
    a3: np.ndarray
    h: np.ndarray
    d: np.ndarray
    dd_prime: np.ndarray
    reconstruction_error: float
    residual_a3_h: float
    residual_a2: float
    residual_a2_printed: float


class InverseCurvatures(NamedTuple):
    kappa: np.ndarray
    tau: np.ndarray
    tau_sign: np.ndarray
    ambiguous: bool
    plane: bool


def _default_s_ref(s):
    return 0.0 if s[0] <= 0.0 <= s[-1] else float(s[0])


def theta_profile(sampled: SampledCurve, theta0: float = 0.0, s_ref: Optional[float] = None) -> np.ndarray:
    """``theta(s) = theta0 + int_{s_ref}^{s} kappa``.

    ``s_ref`` defaults to arc length 0 when the grid spans it, else to the
    first station, so ``theta0`` is the angle at the arc-length origin.
    """
    s = sampled.s
    if not np.all(np.isfinite(sampled.kappa)):
        raise NotFrenet(f"{sampled.name}: curvature missing at some stations")
    F = nm.cumulative_integral_samples(s, sampled.kappa)
    if s_ref is None:
        s_ref = _default_s_ref(s)
    hit = np.flatnonzero(np.isclose(s, s_ref, rtol=0, atol=1e-12 * max(1.0, abs(s_ref))))
    F_ref = F[hit[0]] if hit.size else float(CubicSpline(s, F)(s_ref))
    return theta0 + F - F_ref


def _frame(T, N, theta):
    c, sn = np.cos(theta), np.sin(theta)
    if np.ndim(theta):
        c, sn = c[:, None], sn[:, None]
    return sn * T + c * N, c * T - sn * N


def mate_frame(sample: FrenetSample, theta: float):
    """``(Tb, Nb, Bb)`` of the mate at one station."""
    Tb, Bb = _frame(sample.T, sample.N, theta)
    return Tb, sample.B.copy(), Bb


def mate_curvatures(kappa, tau, theta):
    """Signed ``tau cos(theta)``, ``tau sin(theta)`` and the sign schedule.

    Returns ``(kappa_bar, tau_bar, eps)``; ``kappa_bar = |tau cos(theta)|``.
    """
    raw = np.asarray(tau) * np.cos(theta)
    eps = np.sign(raw).astype(int)
    return np.abs(raw), np.asarray(tau) * np.sin(theta), eps


def _schedule(s, eps) -> List[EpsilonInterval]:
    out = []
    start = None
    for i in range(s.size + 1):
        if start is not None and (i == s.size or eps[i] != eps[start]):
            if eps[start] != 0:
                out.append(EpsilonInterval(float(s[start]), float(s[i - 1]), int(eps[start])))
            start = None
        if i < s.size and start is None:
            start = i
    return out


def osculating_mate(sampled: SampledCurve, theta0: float = 0.0, origin=(0.0, 0.0, 0.0),
                    s_ref: Optional[float] = None, delta_min: float = DELTA_MIN) -> MateResult:
    """Construct the osculating mate of a sampled Frenet curve.

    Positions are integrated with RK4 from ``beta(s_0) = origin``; the
    tangent field between stations comes from a cubic spline through the
    station values of ``Tb``. Stations with ``|tau cos(theta)| < delta_min``
    are excluded and split the sign schedule.
    """
    if not np.all(sampled.valid):
        raise NotFrenet(f"{sampled.name}: base curve has non-Frenet stations {sampled.excluded}")
    s = sampled.s
    tau = sampled.tau
    if np.all(np.abs(tau) < delta_min):
        raise DegenerateMate(f"{sampled.name} is planar (torsion vanishes): its mate has zero curvature")
    theta = theta_profile(sampled, theta0, s_ref)
    Tb, Bb = _frame(sampled.T, sampled.N, theta)
    kb, tb, eps = mate_curvatures(sampled.kappa, tau, theta)
    eps = np.where(kb < delta_min, 0, eps)
    if not np.any(eps):
        raise DegenerateMate(f"{sampled.name}: tau cos(theta) vanishes at every station")
    kb = np.where(eps != 0, kb, np.nan)
    tb = np.where(eps != 0, tb, np.nan)

    spline = CubicSpline(s, Tb)
    beta = nm.ode_rk4(lambda x, y: spline(x), s, np.asarray(origin, dtype=float))

    # Frenet normal is eps*B (kappa_bar > 0 forces the sign); Eq.-style Nb = B on eps = 0
    sgn = np.where(eps != 0, eps, 1)[:, None]
    mate = SampledCurve(
        f"osculating mate of {sampled.name}", s, beta, Tb, sgn * sampled.B, sgn * Bb, kb, tb,
        theta0=float(theta0), theta=theta,
    )
    return MateResult(
        mate=mate, base=sampled, kappa_bar=kb, tau_bar=tb, epsilon1=_schedule(s, eps), eps=eps,
        theta=theta, x1=np.sin(theta), x2=np.cos(theta), theta0=float(theta0),
    )


def inverse_curvatures(stations, kappa_bar, tau_bar, epsilon1=None, theta=None,
                       tol: float = 1e-6) -> InverseCurvatures:
    """Recover the base curvature and torsion from the mate's.

    ``kappa = eps k_b^2 (t_b/k_b)' / (k_b^2 + t_b^2)``, evaluated as
    ``eps (k_b t_b' - t_b k_b') / (k_b^2 + t_b^2)``; ``|tau| = sqrt(k_b^2 + t_b^2)``.
    The torsion sign is fixed by ``kappa_bar = eps tau cos(theta)`` when
    ``theta`` is given; otherwise the + branch is returned and flagged
    ambiguous. Derivatives are taken per constant-sign segment.
    """
    s = np.asarray(stations, dtype=float)
    kb = np.asarray(kappa_bar, dtype=float)
    tb = np.asarray(tau_bar, dtype=float)
    if epsilon1 is None:
        eps = np.ones(s.size, dtype=int)
    else:
        eps = np.broadcast_to(np.asarray(epsilon1), s.shape).astype(int)
    valid = np.isfinite(kb) & np.isfinite(tb) & (eps != 0)
    if np.any(kb[valid] <= 0):
        raise ValueError("kappa_bar must be positive on valid stations")
    denom = kb**2 + tb**2
    if np.any(denom[valid] == 0):
        raise ZeroDenominator("kappa_bar^2 + tau_bar^2 vanishes")
    dk = nm.piecewise_derivative(s, kb, valid, eps)
    dt = nm.piecewise_derivative(s, tb, valid, eps)
    kappa = eps * (kb * dt - tb * dk) / denom
    size = np.sqrt(denom)
    if theta is None:
        sign = np.ones(s.size)
        ambiguous = True
    else:
        th = np.asarray(theta, dtype=float)
        c, sn = np.cos(th), np.sin(th)
        # tau = kappa_bar / (eps cos) where cos is well away from zero, else tau_bar / sin
        sign = np.where(np.abs(c) >= np.abs(sn), eps * np.sign(c), np.sign(tb * sn))
        ambiguous = False
    tau = sign * size
    ok = np.isfinite(kappa)
    scale = np.max(np.abs(kappa[ok])) if ok.any() else 0.0
    plane = bool(ok.any() and scale <= tol)
    if not plane and np.any(kappa[ok] < -tol * max(1.0, scale)):
        raise NegativeKappaRecovered("recovered curvature is negative: inconsistent sign schedule")
    return InverseCurvatures(kappa, tau, sign, ambiguous, plane)


def invert_mate(result: MateResult) -> InverseCurvatures:
    return inverse_curvatures(result.s, result.kappa_bar, result.tau_bar, result.eps, result.theta)


def position_decomposition(mate: MateResult, base: Optional[SampledCurve] = None,
                           center=(0.0, 0.0, 0.0), delta_min: float = DELTA_MIN) -> PositionDecomposition:
    """Express ``beta - center`` in the base frame and check the ``h`` identities.

    ``h = ((d d')' - 1) / (tau cos(theta))`` must equal the B-coefficient
    ``a3``, and the N-coefficient must equal ``-h'/tau``. The printed
    alternative ``a2 = -(h'/tau)(d d')'`` is checked too; its residual is
    reported separately.
    """
    base = mate.base if base is None else base
    if base.s.size != mate.s.size or not np.allclose(base.s, mate.s):
        raise ValueError("mate and base must share the grid")
    s = mate.s
    rel = mate.mate.position - np.asarray(center, dtype=float)
    a1 = np.einsum("ij,ij->i", rel, base.T)
    a2 = np.einsum("ij,ij->i", rel, base.N)
    a3 = np.einsum("ij,ij->i", rel, base.B)
    d = np.linalg.norm(rel, axis=1)
    recon = a1[:, None] * base.T + a2[:, None] * base.N + a3[:, None] * base.B
    recon_err = float(np.max(np.linalg.norm(recon - rel, axis=1)))

    dd = np.einsum("ij,ij->i", rel, mate.mate.T)  # d d' = <beta - c, beta'>
    tc = base.tau * np.cos(mate.theta)
    ok = np.abs(tc) >= delta_min
    ddd = nm.piecewise_derivative(s, dd, ok, np.sign(tc))
    with np.errstate(divide="ignore", invalid="ignore"):
        h = np.where(ok, (ddd - 1.0) / tc, np.nan)
        dh = nm.piecewise_derivative(s, h, np.isfinite(h), np.sign(tc))
        a2_h = -dh / base.tau
        a2_printed = -dh / base.tau * ddd

    def worst(x):
        x = np.abs(x[np.isfinite(x)])
        return float(x.max()) if x.size else float("nan")

    return PositionDecomposition(
        a1=a1, a2=a2, a3=a3, h=h, d=d, dd_prime=dd, reconstruction_error=recon_err,
        residual_a3_h=worst(a3 - h), residual_a2=worst(a2 - a2_h),
        residual_a2_printed=worst(a2 - a2_printed),
    )


@dataclass(frozen=True)
class OTValidation:
    """Checks run on an OT-osculating mate built from the closed formula."""

    rectifying_residual: float
    mate_consistency_residual: float
    mate_consistency_fd: float
    tan_theta_fit: nm.FitResult
    tan_theta_affine: bool
    ratio_fit: nm.FitResult
    ratio_fit_fd: nm.FitResult
    darboux_residual: float
    consistent: bool
    tol: float

    def as_dict(self):
        def fit(f):
            return {"coefficients": [float(c) for c in f.coefficients],
                    "residual_rms": f.residual_rms, "rank_deficient": f.rank_deficient}
        return {
            "rectifying_residual": self.rectifying_residual,
            "mate_consistency_residual": self.mate_consistency_residual,
            "mate_consistency_fd": self.mate_consistency_fd,
            "tan_theta_fit": fit(self.tan_theta_fit),
            "tan_theta_affine": self.tan_theta_affine,
            "ratio_fit": fit(self.ratio_fit),
            "ratio_fit_fd": fit(self.ratio_fit_fd),
            "darboux_residual": self.darboux_residual,
            "consistent": self.consistent,
            "status": "OK" if self.consistent else "FAILED",
            "tol": self.tol,
        }


def _affine_in_s(s, y):
    ok = np.isfinite(y)
    return nm.affine_fit(np.column_stack([s[ok], np.ones(ok.sum())]), y[ok])


def ot_osculating_mate(sampled: SampledCurve, a: float, b: float, theta0: float = 0.0,
                       s_ref: Optional[float] = None, tol: float = 1e-6) -> Tuple[SampledCurve, OTValidation]:
    """Evaluate the closed-form OT-osculating mate

        beta = [(s+b) sin(theta) + a cos(theta)] T + [(s+b) cos(theta) - a sin(theta)] N

    literally, then check whether it really is an osculating mate and a
    rectifying curve. Its derivative equals ``sin(theta) T + cos(theta) N``
    only when ``(s+b) cos(theta) = a sin(theta)``, i.e. when ``tan(theta)`` is
    the affine function ``(s+b)/a``; the validation reports how far from
    that the input is.
    """
    if a == 0:
        raise ValueError("a must be non-zero")
    if not np.all(sampled.valid):
        raise NotFrenet(f"{sampled.name}: base curve has non-Frenet stations")
    s = sampled.s
    theta = theta_profile(sampled, theta0, s_ref)
    c, sn = np.cos(theta), np.sin(theta)
    zeta = s + b
    m = zeta * sn + a * c
    n = zeta * c - a * sn
    beta = m[:, None] * sampled.T + n[:, None] * sampled.N
    fd = apparatus_from_points(s, beta, name=f"OT-osculating mate of {sampled.name}")
    out = SampledCurve(fd.name, s, beta, fd.T, fd.N, fd.B, fd.kappa, fd.tau,
                       theta0=float(theta0), theta=theta)

    rect = np.abs(np.einsum("ij,ij->i", beta, fd.N))
    rect_res = float(np.nanmax(rect))
    mate_res = float(np.max(np.abs(n) * np.abs(sampled.tau)))
    Tb, Bb = _frame(sampled.T, sampled.N, theta)
    dbeta = nm.derivative(s, beta, 1)
    mate_fd = float(np.max(np.linalg.norm(dbeta - Tb, axis=1)))

    with np.errstate(divide="ignore", invalid="ignore"):
        tan = np.where(np.abs(c) > DELTA_MIN, sn / c, np.nan)
        kb, tb, eps = mate_curvatures(sampled.kappa, sampled.tau, theta)
        ratio = np.where(kb > DELTA_MIN, tb / kb, np.nan)
        ratio_fd = fd.tau / fd.kappa
    tan_fit = _affine_in_s(s, tan)
    affine = tan_fit.residual_rms < tol and abs(tan_fit.coefficients[0]) > tol
    ratio_fit = _affine_in_s(s, ratio)
    ratio_fit_fd = _affine_in_s(s, ratio_fd)

    # beta parallel to the modified Darboux vector (tb/kb) Tb + Bb of the mate
    with np.errstate(invalid="ignore", divide="ignore"):
        darboux = (eps * tan)[:, None] * Tb + eps[:, None] * Bb
        dres = np.linalg.norm(np.cross(beta, darboux), axis=1) / (
            np.linalg.norm(beta, axis=1) * np.linalg.norm(darboux, axis=1))
    darboux_res = float(np.nanmax(dres)) if np.isfinite(dres).any() else float("nan")

    validation = OTValidation(
        rectifying_residual=rect_res, mate_consistency_residual=mate_res,
        mate_consistency_fd=mate_fd, tan_theta_fit=tan_fit, tan_theta_affine=bool(affine),
        ratio_fit=ratio_fit, ratio_fit_fd=ratio_fit_fd, darboux_residual=darboux_res,
        consistent=bool(mate_res < tol), tol=tol,
    )
    return out, validation


def mate_sigma(result: MateResult) -> np.ndarray:
    """``sigma`` of the mate from its formula curvatures, per sign segment."""
    s = result.s
    ok = result.valid
    dk = nm.piecewise_derivative(s, result.kappa_bar, ok, result.eps)
    dt = nm.piecewise_derivative(s, result.tau_bar, ok, result.eps)
    return sigma_from(result.kappa_bar, result.tau_bar, dk, dt)


class OracleComparison(NamedTuple):
    kappa_rel: float
    tau_rel: float
    compared: int
    oracle: SampledCurve


def oracle_comparison(result: MateResult, guard: float = 0.05, edge: int = 3) -> OracleComparison:
    """Formula curvatures of the mate against curvatures recomputed from its
    integrated positions by finite differences.

    Errors are sup-norm relative. The finite-difference torsion loses
    accuracy like ``1/kappa_bar^2`` near inflections of the mate, so
    stations with ``kappa_bar < guard * max(kappa_bar)`` are left out, as
    are the ``edge`` stations at each end where the third-derivative
    stencil is one-sided.
    """
    fd = apparatus_from_points(result.s, result.mate.position, name="finite-difference oracle")
    kb = result.kappa_bar
    ok = result.valid & np.isfinite(kb)
    ok &= kb >= guard * np.nanmax(kb)
    ok &= np.isfinite(fd.kappa) & np.isfinite(fd.tau)
    ok[:edge] = False
    ok[ok.size - edge:] = False
    return OracleComparison(
        nm.sup_relative_error(fd.kappa[ok], kb[ok]),
        nm.sup_relative_error(fd.tau[ok], result.tau_bar[ok]),
        int(ok.sum()), fd,
    )
