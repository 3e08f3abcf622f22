"""Numerical verdicts for the special curve classes.

Every verdict is decided from the ``(s, kappa, tau)`` profiles alone by a
constancy test or a least-squares fit, and carries the statistics it was
decided on. Derivatives are stencil derivatives taken separately on each
maximal run of valid stations (and of constant sign, when a sign schedule
is supplied), so nothing is differentiated across an excluded point.

Notation: ``p = 1/kappa``, ``q = 1/tau``,
``sigma = kappa^2 (tau/kappa)' / (kappa^2 + tau^2)^(3/2)`` and, with
``f = sqrt(kappa^2 + tau^2)`` and ``g = sigma f``,
``mu = (f^2 + g^2)^(3/2) / (f^2 (g/f)')``.
"""

from dataclasses import dataclass, field
from typing import Dict, NamedTuple, Optional

import numpy as np

from . import numerics as nm
from .curves import SampledCurve, sigma_from
from .errors import InsufficientSamples
from .mates import MateResult, mate_sigma

MIN_CLASSIFY = 20
CLASSES = (
    "plane", "general_helix", "slant_helix", "c_slant_helix", "spherical", "rectifying",
    "bertrand", "mannheim", "salkowski", "anti_salkowski",
)


@dataclass(frozen=True)
class Tolerances:
    """Decision tolerances: a spread or residual passes when it is at most
    ``tol_abs + tol_rel * max(1, scale)``.

    ``tol_rel`` applies to quantities formed from the profiles directly
    (``tau/kappa``, ``kappa/(kappa^2+tau^2)``, fits); ``tol_rel_fd`` to
    quantities that need stencil derivatives of the profiles (``sigma``,
    ``mu``, the spherical functions).
    """

    tol_rel: float = 1e-6
    tol_abs: float = 1e-9
    tol_rel_fd: float = 1e-3

    def bound(self, scale: float = 1.0) -> float:
        return self.tol_abs + self.tol_rel * max(1.0, abs(scale))

    @property
    def fd(self) -> "Tolerances":
        return Tolerances(self.tol_rel_fd, self.tol_abs, self.tol_rel_fd)


@dataclass(frozen=True)
class Verdict:
    verdict: bool
    witness: dict
    tolerance_used: float
    deferred: bool = False

    def as_dict(self):
        return {"verdict": self.verdict, "witness": to_jsonable(self.witness),
                "tolerance_used": self.tolerance_used, "deferred": self.deferred}


@dataclass(frozen=True)
class ClassificationReport:
    name: str
    verdicts: Dict[str, Verdict]
    stations: int
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __getitem__(self, key) -> bool:
        return self.verdicts[key].verdict

    def as_dict(self):
        return {
            "name": self.name,
            "stations": self.stations,
            "tolerances": {"tol_rel": self.tolerances.tol_rel, "tol_abs": self.tolerances.tol_abs,
                           "tol_rel_fd": self.tolerances.tol_rel_fd},
            "verdicts": {k: v.as_dict() for k, v in self.verdicts.items()},
        }


class IndicatrixCurvatures(NamedTuple):
    kappa_ind: np.ndarray
    tau_ind: np.ndarray


class SphericalResidual(NamedTuple):
    residual: np.ndarray
    domain_violation: np.ndarray


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {k: to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)) and not hasattr(obj, "_fields"):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, nm.FitResult):
        return {"coefficients": [float(c) for c in obj.coefficients],
                "residual_rms": obj.residual_rms, "rank_deficient": obj.rank_deficient}
    if isinstance(obj, nm.ConstancyResult):
        return {"is_constant": obj.is_constant, "level": obj.level, "spread": obj.spread}
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if np.isfinite(obj) else None
    return obj


def _finite_max(x) -> float:
    x = np.abs(np.asarray(x, dtype=float))
    x = x[np.isfinite(x)]
    return float(x.max()) if x.size else float("nan")


def _d(s, y, valid, signs, order=1):
    return nm.piecewise_derivative(s, y, valid, signs, order)


# -- profiles ---------------------------------------------------------------

def sigma_profile(stations, kappa, tau, signs=None) -> np.ndarray:
    """Slant-helix function ``sigma`` with per-segment stencil derivatives."""
    s = np.asarray(stations, dtype=float)
    k = np.asarray(kappa, dtype=float)
    t = np.asarray(tau, dtype=float)
    ok = np.isfinite(k) & np.isfinite(t)
    return sigma_from(k, t, _d(s, k, ok, signs), _d(s, t, ok, signs))


def inverse_mu_profile(stations, kappa, tau, signs=None) -> np.ndarray:
    """``1/mu = sigma' / (f (1 + sigma^2)^(3/2))``; finite wherever ``sigma`` is."""
    s = np.asarray(stations, dtype=float)
    sig = sigma_profile(s, kappa, tau, signs)
    f = np.hypot(kappa, tau)
    dsig = _d(s, sig, np.isfinite(sig), signs)
    return dsig / (f * (1 + sig**2) ** 1.5)


def mu_profile(stations, kappa, tau, signs=None, den_tol: float = 1e-3) -> np.ndarray:
    """C-slant function ``mu``; NaN where ``f^2 (g/f)'`` vanishes.

    The denominator counts as vanishing below ``den_tol * max(1, max f^2)``;
    it holds a second stencil derivative, so the default threshold sits at
    the finite-difference tolerance rather than at round-off.
    """
    s = np.asarray(stations, dtype=float)
    sig = sigma_profile(s, kappa, tau, signs)
    f = np.hypot(kappa, tau)
    den = f**2 * _d(s, sig, np.isfinite(sig), signs)
    scale = max(1.0, _finite_max(f**2)) if np.isfinite(f).any() else 1.0
    ok = np.isfinite(den) & (np.abs(den) > den_tol * scale)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(ok, (f**2 + (sig * f) ** 2) ** 1.5 / den, np.nan)


def spherical_profiles(stations, kappa, tau, signs=None, tau_min: float = 1e-9):
    """``(p^2 + (p'q)^2, (p'q)' + p/q)``; NaN where ``|tau| <= tau_min``."""
    s = np.asarray(stations, dtype=float)
    k = np.asarray(kappa, dtype=float)
    t = np.asarray(tau, dtype=float)
    ok = np.isfinite(k) & np.isfinite(t) & (np.abs(t) > tau_min)
    sg = np.sign(t) if signs is None else np.sign(t) * np.asarray(signs)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(ok, 1 / k, np.nan)
        q = np.where(ok, 1 / t, np.nan)
    pq = _d(s, p, ok, sg) * q
    first = p**2 + pq**2
    second = _d(s, pq, np.isfinite(pq), sg) + p / q
    return first, second


# -- verdicts ---------------------------------------------------------------

def _constancy(values, tol: Tolerances):
    v = np.asarray(values, dtype=float)
    v = v[np.isfinite(v)]
    if v.size < MIN_CLASSIFY:
        return None
    return nm.constancy_test(v, tol.tol_rel, tol.tol_abs)


def _const_verdict(values, tol: Tolerances, **extra) -> Verdict:
    c = _constancy(values, tol)
    if c is None:
        return Verdict(False, {"reason": "too few finite stations", **extra}, tol.bound(), deferred=True)
    return Verdict(c.is_constant, {"constancy": c, **extra}, tol.bound(c.level))


def classify_profiles(stations, kappa, tau, tolerances: Optional[Tolerances] = None,
                      signs=None, name: str = "curve") -> ClassificationReport:
    """Classify from curvature and torsion samples.

    ``signs`` optionally marks sign segments (e.g. a mate's sign schedule)
    that derivatives must not cross.
    """
    tol = tolerances or Tolerances()
    s = np.asarray(stations, dtype=float)
    k = np.asarray(kappa, dtype=float)
    t = np.asarray(tau, dtype=float)
    ok = np.isfinite(k) & np.isfinite(t)
    if signs is not None:
        ok &= np.asarray(signs) != 0
    n = int(ok.sum())
    if n < MIN_CLASSIFY:
        raise InsufficientSamples(f"{name}: {n} valid stations, need {MIN_CLASSIFY}")
    k = np.where(ok, k, np.nan)
    t = np.where(ok, t, np.nan)
    seg = None if signs is None else np.asarray(signs)
    out: Dict[str, Verdict] = {}

    kmax = _finite_max(k)
    tmax = _finite_max(t)
    bound = tol.bound(kmax)
    out["plane"] = Verdict(bool(tmax <= bound), {"max_abs_tau": tmax}, bound)

    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = t / k
    out["general_helix"] = _const_verdict(ratio, tol, quantity="tau/kappa")

    sig = sigma_profile(s, k, t, seg)
    out["slant_helix"] = _const_verdict(sig, tol.fd, quantity="sigma")

    mu = mu_profile(s, k, t, seg)
    inv_mu = inverse_mu_profile(s, k, t, seg)
    cm = _constancy(mu, tol.fd)
    ci = _constancy(inv_mu, tol.fd)
    if cm is None:
        out["c_slant_helix"] = Verdict(
            False, {"reason": "mu denominator vanishes at most stations", "inverse_mu": ci},
            tol.fd.bound(), deferred=True)
    else:
        out["c_slant_helix"] = Verdict(cm.is_constant, {"constancy": cm, "inverse_mu": ci},
                                       tol.fd.bound(cm.level))

    first, second = spherical_profiles(s, k, t, seg)
    c1 = _constancy(first, tol.fd)
    if c1 is None:
        out["spherical"] = Verdict(False, {"reason": "torsion vanishes"}, tol.fd.bound(), deferred=True)
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            scale = _finite_max(t / k)
        res = _finite_max(second)
        b = tol.fd.bound(scale)
        radius = float(np.sqrt(c1.level)) if c1.level > 0 else float("nan")
        out["spherical"] = Verdict(
            bool(c1.is_constant and res <= b),
            {"p2_plus_pq2": c1, "radius": radius, "ode_residual": res,
             "characterizations_agree": bool(c1.is_constant == (res <= b))},
            b)

    fin = np.isfinite(ratio)
    rfit = nm.affine_fit(np.column_stack([s[fin], np.ones(fin.sum())]), ratio[fin])
    scale = _finite_max(ratio)
    b = tol.bound(scale)
    slope_ok = abs(rfit.coefficients[0]) * (s[fin][-1] - s[fin][0]) > b
    out["rectifying"] = Verdict(bool(rfit.residual_rms <= b and slope_ok),
                                {"fit": rfit, "quantity": "tau/kappa = c0 s + c1"}, b)

    bfit = nm.affine_fit(np.column_stack([k[ok], t[ok]]), np.ones(n))
    b = tol.bound()
    # a kappa + b tau = 1 with a = 0 only says tau is constant, which is not Bertrand
    a_ok = abs(bfit.coefficients[0]) * kmax > b
    out["bertrand"] = Verdict(bool(bfit.residual_rms <= b and a_ok),
                              {"fit": bfit, "family": bfit.rank_deficient,
                               "quantity": "a kappa + b tau = 1"}, b)

    with np.errstate(divide="ignore", invalid="ignore"):
        lam = k / (k**2 + t**2)
    cl = _constancy(lam, tol)
    out["mannheim"] = Verdict(bool(cl.is_constant and abs(cl.level) > tol.bound()),
                              {"constancy": cl, "quantity": "kappa/(kappa^2+tau^2)"},
                              tol.bound(cl.level))

    ck = _constancy(k, tol)
    ct = _constancy(t, tol)
    out["salkowski"] = Verdict(bool(ck.is_constant and not ct.is_constant),
                               {"kappa": ck, "tau": ct}, tol.bound(ck.level))
    out["anti_salkowski"] = Verdict(bool(ct.is_constant and not ck.is_constant),
                                    {"kappa": ck, "tau": ct}, tol.bound(ct.level))
    return ClassificationReport(name, out, n, tol)


def classify_report(sampled: SampledCurve, tolerances: Optional[Tolerances] = None,
                    signs=None) -> ClassificationReport:
    """Classify a sampled Frenet curve (see :func:`classify_profiles`)."""
    return classify_profiles(sampled.s, sampled.kappa, sampled.tau, tolerances, signs, sampled.name)


def _combine(name, reports, spans, tol) -> ClassificationReport:
    """Merge per-segment reports: a class holds when it holds on every segment."""
    out = {}
    for cls in CLASSES:
        vs = [r.verdicts[cls] for r in reports]
        decided = [v for v in vs if not v.deferred]
        witness = dict(vs[0].witness)
        witness["segments"] = [{"lo": lo, "hi": hi, "sign": sg, "verdict": v.verdict,
                                "deferred": v.deferred, "witness": v.witness}
                               for (lo, hi, sg), v in zip(spans, vs)]
        out[cls] = Verdict(bool(decided) and all(v.verdict for v in decided), witness,
                           max(v.tolerance_used for v in vs), deferred=not decided)
    return ClassificationReport(name, out, sum(r.stations for r in reports), tol)


def classify_mate(result: MateResult, tolerances: Optional[Tolerances] = None) -> ClassificationReport:
    """Classify a mate from its formula curvatures.

    Where the sign schedule has several intervals the mate stops being a
    Frenet curve at each switch (``kappa_bar = 0``), so every interval
    with at least ``MIN_CLASSIFY`` stations is classified on its own and
    a class holds when it holds on all of them. Per-interval witnesses are
    listed under ``segments``.
    """
    tol = tolerances or Tolerances()
    name = result.mate.name
    if len(result.epsilon1) <= 1:
        return classify_profiles(result.s, result.kappa_bar, result.tau_bar, tol, result.eps, name)
    reports, spans = [], []
    for iv in result.epsilon1:
        sel = (result.s >= iv.lo) & (result.s <= iv.hi)
        if sel.sum() < MIN_CLASSIFY:
            continue
        reports.append(classify_profiles(result.s[sel], result.kappa_bar[sel], result.tau_bar[sel],
                                         tol, result.eps[sel], name))
        spans.append((iv.lo, iv.hi, iv.sign))
    if not reports:
        raise InsufficientSamples(f"{name}: no sign interval has {MIN_CLASSIFY} stations")
    return _combine(name, reports, spans, tol)


# -- spherical mate residual ------------------------------------------------

def mate_spherical_residual(sampled: SampledCurve, theta, radius: float,
                            tol: float = 1e-9) -> SphericalResidual:
    """Residual of ``(tau cos x)' = +- tau^2 sin x cos x sqrt(a^2 tau^2 cos^2 x - 1)``.

    The sign branch is chosen pointwise to minimise the residual. Stations
    where ``a^2 tau^2 cos^2 x < 1 - tol`` lie outside the square-root
    domain: they are flagged and get NaN.
    """
    s = sampled.s
    x = np.asarray(theta, dtype=float)
    t = sampled.tau
    tc = t * np.cos(x)
    disc = radius**2 * tc**2 - 1.0
    bad = disc < -tol
    ok = np.isfinite(tc)
    lhs = _d(s, tc, ok, np.sign(tc))
    rhs = t**2 * np.sin(x) * np.cos(x) * np.sqrt(np.clip(disc, 0.0, None))
    res = np.minimum(np.abs(lhs - rhs), np.abs(lhs + rhs))
    return SphericalResidual(np.where(bad, np.nan, res), bad)


# -- indicatrices -----------------------------------------------------------

def indicatrix_curvatures(stations, kappa_bar, tau_bar, which: str, convention: str = "printed",
                          signs=None, tau_min: float = 1e-9) -> IndicatrixCurvatures:
    """Curvature and torsion of the T, N or B indicatrix from ``(kappa_bar, tau_bar)``.

    ``convention="printed"`` evaluates the classical closed forms as they
    are usually quoted, in which the N and B cases coincide::

        T:    f/k,  (k t' - t k') / (k f^2)
        N, B: f/t,  (k t' - t k') / (t f^2)

    ``convention="geometric"`` returns the curvatures of the actual
    spherical curves traced by the frame fields (T as above)::

        N:    sqrt(1 + sigma^2),  sigma' / (f (1 + sigma^2))
        B:    f/t,  -(k t' - t k') / (t f^2)

    with ``f = sqrt(k^2 + t^2)``. The B curvature is signed: it is taken
    along the orientation ``d s_B = t ds``, so its absolute value is the
    Frenet curvature of the traced curve; torsion does not depend on the
    orientation. Stations with ``|t| <= tau_min`` get NaN
    wherever ``t`` divides.
    """
    which = which.upper()
    if which not in ("T", "N", "B"):
        raise ValueError("which must be 'T', 'N' or 'B'")
    if convention not in ("printed", "geometric"):
        raise ValueError("convention must be 'printed' or 'geometric'")
    s = np.asarray(stations, dtype=float)
    k = np.asarray(kappa_bar, dtype=float)
    t = np.asarray(tau_bar, dtype=float)
    ok = np.isfinite(k) & np.isfinite(t)
    f2 = k**2 + t**2
    f = np.sqrt(f2)
    w = k * _d(s, t, ok, signs) - t * _d(s, k, ok, signs)
    with np.errstate(divide="ignore", invalid="ignore"):
        tt = np.where(np.abs(t) > tau_min, t, np.nan)
        if which == "T":
            return IndicatrixCurvatures(f / k, w / (k * f2))
        if which == "N" and convention == "geometric":
            sig = w / f**3
            dsig = _d(s, sig, np.isfinite(sig), signs)
            return IndicatrixCurvatures(np.sqrt(1 + sig**2), dsig / (f * (1 + sig**2)))
        sign = -1.0 if (which == "B" and convention == "geometric") else 1.0
        return IndicatrixCurvatures(f / tt, sign * w / (tt * f2))


def _ratio(ic: IndicatrixCurvatures):
    with np.errstate(divide="ignore", invalid="ignore"):
        return ic.tau_ind / ic.kappa_ind


@dataclass(frozen=True)
class EquivalenceReport:
    """Indicatrix identities and class equivalences between a base and its mate.

    ``residual_*`` are max-norm residuals of the identities
    ``tau_T/kappa_T = eps kappa/|tau|``, ``tau_N/kappa_N = -eps sgn(tau) sigma``
    and ``tau_B/kappa_B = -eps kappa/|tau|`` (geometric indicatrices);
    ``*_printed`` use ``kappa/tau`` and ``-sigma`` instead, which agree
    where ``eps tau > 0``.
    """

    residual_T: float
    residual_N: float
    residual_B: float
    residual_T_printed: float
    residual_N_printed: float
    residual_B_printed: float
    residual_T_sigma_bar: float
    residual_B_sigma_bar: float
    helix_pair: tuple
    slant_pair: tuple

    def as_dict(self):
        return to_jsonable(self.__dict__)


def equivalence_report(base: SampledCurve, mate: MateResult,
                       tolerances: Optional[Tolerances] = None) -> EquivalenceReport:
    tol = tolerances or Tolerances()
    s = mate.s
    eps = mate.eps
    ok = mate.valid
    kb = np.where(ok, mate.kappa_bar, np.nan)
    tb = np.where(ok, mate.tau_bar, np.nan)
    k, t = base.kappa, base.tau
    sig_bar = mate_sigma(mate)
    sig = sigma_profile(base.s, k, t)

    rT = _ratio(indicatrix_curvatures(s, kb, tb, "T", "geometric", eps))
    rN = _ratio(indicatrix_curvatures(s, kb, tb, "N", "geometric", eps))
    rB = _ratio(indicatrix_curvatures(s, kb, tb, "B", "geometric", eps))
    with np.errstate(divide="ignore", invalid="ignore"):
        gen = eps * k / np.abs(t)
        printed = eps * k / t
    sgn = eps * np.sign(t)

    helix_base = classify_report(base, tol)
    mate_rep = classify_mate(mate, tol)
    c_slant = mate_rep.verdicts["c_slant_helix"]
    if c_slant.deferred and c_slant.witness.get("inverse_mu") is not None:
        # mu is infinite; constancy of 1/mu still decides the class
        mate_cs = bool(c_slant.witness["inverse_mu"].is_constant)
    else:
        mate_cs = c_slant.verdict
    return EquivalenceReport(
        residual_T=_finite_max(rT - gen), residual_N=_finite_max(rN + sgn * sig),
        residual_B=_finite_max(rB + gen),
        residual_T_printed=_finite_max(rT - printed), residual_N_printed=_finite_max(rN + sig),
        residual_B_printed=_finite_max(rB + printed),
        residual_T_sigma_bar=_finite_max(rT - sig_bar), residual_B_sigma_bar=_finite_max(rB + sig_bar),
        helix_pair=(helix_base["general_helix"], mate_rep["slant_helix"]),
        slant_pair=(helix_base["slant_helix"], mate_cs),
    )


# -- relations between base and mate classes -------------------------------

def _branch_min(a, b):
    return np.minimum(np.abs(a), np.abs(b))


def mate_relations(mate: MateResult, tolerances: Optional[Tolerances] = None) -> dict:
    """Residual reports for the base/mate class relations.

    Keys:

    ``bertrand_mate``
        constancy of ``(p q')^2 + q^2`` (base ``p, q``) against the direct
        affine fit ``a kappa_bar + b tau_bar = 1`` on the mate.
    ``bertrand_base``
        with ``(c1, c2)`` fitted on the base, the residual of
        ``eps c1 sigma_bar +- c2 - 1/sqrt(kappa_bar^2 + tau_bar^2)``.
    ``mannheim_mate``
        constancy of ``eps cos(theta)/tau`` against the mate's Mannheim verdict.
    ``mannheim_base``
        printed residual ``eps f_bar sigma_bar^3 - l (1 + sigma_bar^2)`` and
        the residual of ``sigma_bar - eps l f_bar (1 + sigma_bar^2)``, with
        ``l`` the base Mannheim level.
    ``mannheim_corollary``
        constancy of ``kappa_bar/tau`` against the base Mannheim verdict.
    ``salkowski_sec``
        for a Salkowski base, fitted ``(e1, e2, e3)`` and the relative
        residual of ``tau - eps e3 sec(e1 s + e2)``.
    ``salkowski_ode`` / ``anti_salkowski_ode``
        relative residuals of ``eps e4 tau_bar'' - 2 c tau_bar tau_bar'`` and
        ``eps e5 kappa_bar'' + 2 c kappa_bar kappa_bar'``.
    """
    tol = tolerances or Tolerances()
    base = mate.base
    s = mate.s
    eps = mate.eps
    ok = mate.valid
    k, t = base.kappa, base.tau
    kb = np.where(ok, mate.kappa_bar, np.nan)
    tb = np.where(ok, mate.tau_bar, np.nan)
    fb = np.hypot(kb, tb)
    sig_bar = mate_sigma(mate)
    base_rep = classify_report(base, tol)
    mate_rep = classify_mate(mate, tol)
    out = {}

    with np.errstate(divide="ignore", invalid="ignore"):
        p, q = 1 / k, np.where(np.abs(t) > 1e-9, 1 / t, np.nan)
    pq = p * _d(s, q, np.isfinite(q), np.sign(t))
    c_b = _constancy(pq**2 + q**2, tol.fd)
    printed = bool(c_b is not None and c_b.is_constant and abs(c_b.level) > tol.bound())
    out["bertrand_mate"] = {
        "printed_criterion": c_b, "printed_verdict": printed,
        "direct": mate_rep.verdicts["bertrand"].witness["fit"],
        "direct_verdict": mate_rep["bertrand"],
        "agree": printed == mate_rep["bertrand"],
    }

    bfit = base_rep.verdicts["bertrand"].witness["fit"]
    c1, c2 = (float(c) for c in bfit.coefficients)
    r10 = _branch_min(eps * c1 * sig_bar + c2 - 1 / fb, eps * c1 * sig_bar - c2 - 1 / fb)
    out["bertrand_base"] = {"base_verdict": base_rep["bertrand"], "c1": c1, "c2": c2,
                            "residual": _finite_max(r10)}

    with np.errstate(divide="ignore", invalid="ignore"):
        m1 = eps * np.cos(mate.theta) / t
    c_m1 = _constancy(np.where(ok, m1, np.nan), tol)
    m1_verdict = bool(c_m1.is_constant and abs(c_m1.level) > tol.bound())
    out["mannheim_mate"] = {"criterion": c_m1, "criterion_verdict": m1_verdict,
                            "direct_verdict": mate_rep["mannheim"],
                            "agree": m1_verdict == mate_rep["mannheim"]}

    lam = base_rep.verdicts["mannheim"].witness["constancy"].level
    out["mannheim_base"] = {
        "base_verdict": base_rep["mannheim"], "lambda": lam,
        "residual_printed": _finite_max(eps * fb * sig_bar**3 - lam * (1 + sig_bar**2)),
        "residual_corrected": _finite_max(sig_bar - eps * lam * fb * (1 + sig_bar**2)),
    }

    with np.errstate(divide="ignore", invalid="ignore"):
        cor = kb / t
    c_cor = _constancy(np.abs(cor), tol)
    cor_verdict = bool(c_cor is not None and c_cor.is_constant)
    out["mannheim_corollary"] = {"criterion": c_cor, "criterion_verdict": cor_verdict,
                                 "base_verdict": base_rep["mannheim"],
                                 "agree": cor_verdict == base_rep["mannheim"]}

    if base_rep["salkowski"]:
        e1 = base_rep.verdicts["salkowski"].witness["kappa"].level
        e2 = float(np.median(mate.theta - e1 * s))
        e3 = float(np.nanmedian(kb))
        with np.errstate(divide="ignore", invalid="ignore"):
            model = eps * e3 / np.cos(e1 * s + e2)
        out["salkowski_sec"] = {"e1": e1, "e2": e2, "e3": e3,
                                "residual": nm.sup_relative_error(np.where(ok, model, np.nan), t)}
    if base_rep["salkowski"] and mate_rep["salkowski"]:
        c = base_rep.verdicts["salkowski"].witness["kappa"].level
        e4 = mate_rep.verdicts["salkowski"].witness["kappa"].level
        d1 = _d(s, tb, ok, eps)
        d2 = _d(s, tb, ok, eps, 2)
        a, b = eps * e4 * d2, 2 * c * tb * d1
        out["salkowski_ode"] = {"e4": e4, "c": c,
                                "residual": _finite_max(a - b) / max(_finite_max(a), _finite_max(b), 1e-300)}
    if base_rep["salkowski"] and mate_rep["anti_salkowski"]:
        c = base_rep.verdicts["salkowski"].witness["kappa"].level
        e5 = mate_rep.verdicts["anti_salkowski"].witness["tau"].level
        d1 = _d(s, kb, ok, eps)
        d2 = _d(s, kb, ok, eps, 2)
        a, b = eps * e5 * d2, 2 * c * kb * d1
        out["anti_salkowski_ode"] = {"e5": e5, "c": c,
                                     "residual": _finite_max(a + b) / max(_finite_max(a), _finite_max(b), 1e-300)}
    return out
