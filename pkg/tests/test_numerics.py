import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oscmate import numerics as nm
from oscmate.errors import NonFiniteValue, NonMonotoneStations, TooFewSamples


# -- grid -------------------------------------------------------------------

def test_grid_rejects_short_nonmonotone_and_nonfinite():
    with pytest.raises(TooFewSamples):
        nm.Grid([0, 1, 2, 3])
    with pytest.raises(NonMonotoneStations):
        nm.Grid([0, 1, 1, 2, 3])
    with pytest.raises(NonFiniteValue):
        nm.Grid([0, 1, 2, 3, np.inf])


def test_grid_uniform_step():
    g = nm.Grid.with_step(0.0, 1.0, 1e-3)
    assert len(g) == 1001
    assert g.is_uniform
    assert g.step == pytest.approx(1e-3)
    assert nm.Grid([0, 1, 3, 4, 5]).step is None


# -- differentiation --------------------------------------------------------

def test_fd_weights_central_second_difference():
    assert np.allclose(nm.fd_weights(0.0, [-1.0, 0.0, 1.0], 2), [1, -2, 1])
    assert np.allclose(nm.fd_weights(0.0, [-1.0, 0.0, 1.0], 1), [-0.5, 0, 0.5])


def test_square_first_derivative_exact():
    s = np.linspace(0, 2, 21)
    i = int(np.argmin(abs(s - 1)))
    assert nm.derivative_stencil(s, s**2, i, 1) == pytest.approx(2.0, abs=1e-12)


def test_constant_first_derivative_zero():
    s = np.linspace(-1, 1, 11)
    assert np.allclose(nm.derivative(s, np.full(11, 3.7), 1), 0.0, atol=1e-12)


def test_sine_second_derivative_at_zero():
    s = np.arange(-50, 51) * 1e-2
    assert abs(nm.derivative_stencil(s, np.sin(s), 50, 2)) < 1e-7


def test_third_derivative_of_sine():
    s = np.linspace(0, 1, 201)
    err = nm.derivative(s, np.sin(s), 3) + np.cos(s)
    assert np.max(np.abs(err)) < 1e-5


def test_vector_values_differentiate_columnwise():
    s = np.linspace(0, 1, 50)
    Y = np.column_stack([s**2, np.sin(s)])
    D = nm.derivative(s, Y, 1)
    assert np.allclose(D[:, 0], 2 * s, atol=1e-9)
    assert np.allclose(D[:, 1], np.cos(s), atol=1e-7)


def test_stencil_errors():
    with pytest.raises(TooFewSamples):
        nm.derivative_stencil([0, 1, 2, 3], [0, 1, 2, 3], 0)
    with pytest.raises(NonMonotoneStations):
        nm.derivative_stencil([0, 2, 1, 3, 4], [0, 1, 2, 3, 4], 2)
    with pytest.raises(NonFiniteValue):
        nm.derivative_stencil(range(5), [0, 1, np.nan, 3, 4], 2)
    with pytest.raises(ValueError):
        nm.derivative_stencil(range(5), range(5), 2, order=4)


def test_one_sided_ends_converge():
    errs = []
    for n in (101, 201):
        s = np.linspace(0, 1, n)
        errs.append(abs(nm.derivative(s, np.exp(s), 1)[0] - 1.0))
    assert errs[1] < errs[0] / 8


@given(
    coeffs=st.lists(st.floats(-3, 3), min_size=5, max_size=5),
    h=st.floats(1e-2, 0.2),
    n=st.integers(7, 30),
)
def test_quartics_reproduced_on_uniform_grids(coeffs, h, n):
    s = np.arange(n) * h
    p = np.polynomial.Polynomial(coeffs)
    for order in (1, 2):
        exact = p.deriv(order)(s)
        scale = max(1.0, np.max(np.abs(p(s)))) / h**order
        assert np.max(np.abs(nm.derivative(s, p(s), order) - exact)) < 1e-9 * scale


@given(st.lists(st.floats(0.05, 1.0), min_size=8, max_size=20))
def test_nonuniform_grids_reproduce_quartics(gaps):
    s = np.concatenate([[0.0], np.cumsum(gaps)])
    p = np.polynomial.Polynomial([0.3, -1.0, 0.5, 0.2, -0.1])
    d = nm.derivative(s, p(s), 1)
    assert np.allclose(d, p.deriv()(s), atol=1e-7 * max(1, np.max(np.abs(p(s)))) / min(gaps))


# -- quadrature -------------------------------------------------------------

def test_integral_of_zero_is_init():
    g = nm.Grid.uniform(0, 1, 11)
    assert np.all(nm.cumulative_integral(lambda s: 0.0 * s, g, 2.5) == 2.5)


def test_integral_of_one_is_identity():
    g = nm.Grid.uniform(0, 1, 11)
    assert np.allclose(nm.cumulative_integral(lambda s: np.ones_like(s), g), g.values, atol=1e-15)


def test_arcsine_quadrature():
    g = nm.Grid.with_step(-0.9, 0.9, 1e-3)
    F = nm.cumulative_integral(lambda s: 1 / np.sqrt(1 - s**2), g, math.asin(-0.9))
    assert np.max(np.abs(F - np.arcsin(g.values))) < 1e-8


def test_scalar_only_integrand_falls_back_to_pointwise():
    g = nm.Grid.uniform(0, 1, 21)
    F = nm.cumulative_integral(lambda s: math.cos(s), g)
    assert np.allclose(F, np.sin(g.values), atol=1e-9)


def test_nonfinite_integrand_reports_station():
    g = nm.Grid.uniform(-1, 1, 11)
    with pytest.raises(NonFiniteValue) as info:
        nm.cumulative_integral(lambda s: 1 / s, g)
    assert info.value.station == pytest.approx(0.0)


def test_sample_quadrature_sixth_order():
    errs = []
    for n in (101, 201):
        s = np.linspace(0, 2, n)
        errs.append(np.max(np.abs(nm.cumulative_integral_samples(s, np.cos(s)) - np.sin(s))))
    assert errs[1] < errs[0] / 40


def test_sample_quadrature_exact_for_quintics():
    s = np.linspace(-1, 2, 13)
    p = np.polynomial.Polynomial([0.5, -1, 2, 0.3, -0.7, 0.2])
    P = p.integ()
    assert np.allclose(nm.cumulative_integral_samples(s, p(s)), P(s) - P(s[0]), atol=1e-12)


def test_sample_quadrature_nonuniform_trapezoid():
    s = np.array([0, 0.1, 0.3, 0.35, 0.8, 1.0])
    F = nm.cumulative_integral_samples(s, 2 * s)
    assert np.allclose(F, s**2, atol=0.02)


@given(st.floats(0.2, 3.0), st.integers(0, 4))
def test_integral_of_derivative_recovers_function(a, k):
    g = nm.Grid.uniform(0, 1, 101)
    F = nm.cumulative_integral(lambda s: a * np.cos(a * s + k), g, math.sin(k))
    assert np.max(np.abs(F - np.sin(a * g.values + k))) < 1e-8


# -- RK4 --------------------------------------------------------------------

def test_rk4_zero_field_constant():
    g = nm.Grid.uniform(0, 1, 11)
    Y = nm.ode_rk4(lambda s, y: np.zeros_like(y), g, [1.0, -2.0])
    assert np.all(Y == [1.0, -2.0])


def test_rk4_exponential():
    g = nm.Grid.with_step(0, 1, 1e-3)
    Y = nm.ode_rk4(lambda s, y: y, g, [1.0])
    assert abs(Y[-1, 0] - math.e) < 1e-10


def test_rk4_rotation_preserves_norm():
    g = nm.Grid.with_step(0, 1, 1e-3)
    Y = nm.ode_rk4(lambda s, y: np.array([-y[1], y[0]]), g, [1.0, 0.0])
    assert np.max(np.abs(np.linalg.norm(Y, axis=1) - 1)) < 1e-9


def test_rk4_global_error_fourth_order():
    errs = []
    for h in (0.1, 0.05):
        g = nm.Grid.with_step(0, 1, h)
        errs.append(abs(nm.ode_rk4(lambda s, y: -2 * y, g, [1.0])[-1, 0] - math.exp(-2)))
    assert 12 < errs[0] / errs[1] < 20


def test_rk4_reports_last_good_station():
    g = nm.Grid.uniform(0, 2, 21)
    with pytest.raises(NonFiniteValue) as info:
        nm.ode_rk4(lambda s, y: y / (1.05 - s) ** 2 if s < 1.05 else np.full_like(y, np.inf), g, [1.0])
    assert 0.9 <= info.value.station <= 1.1


def test_rk4_projection_applied():
    g = nm.Grid.uniform(0, 1, 6)
    Y = nm.ode_rk4(lambda s, y: np.ones_like(y), g, [0.0, 0.0], project=lambda y: y / 2)
    assert np.allclose(Y[1], [0.1, 0.1])


# -- constancy and fits -----------------------------------------------------

def test_constancy_examples():
    assert tuple(nm.constancy_test([1, 1, 1, 1, 1])) == (True, 1.0, 0.0)
    assert tuple(nm.constancy_test([1, 2, 3, 4, 5], tol_rel=1e-6)) == (False, 3.0, 4.0)


def test_constancy_errors():
    with pytest.raises(TooFewSamples):
        nm.constancy_test([1, 1])
    with pytest.raises(NonFiniteValue):
        nm.constancy_test([1, 1, np.nan, 1, 1])


@given(
    values=st.lists(st.floats(1.0, 10.0), min_size=5, max_size=30),
    c=st.floats(1.0, 1e3),
    tol_abs=st.floats(0.0, 2.0),
)
def test_constancy_scale_covariance(values, c, tol_abs):
    # the relative term uses max(1, |level|), so covariance needs |level| >= 1 before and after
    a = nm.constancy_test(values, 1e-3, tol_abs)
    b = nm.constancy_test(np.asarray(values) * c, 1e-3, tol_abs * c)
    assert a.is_constant == b.is_constant
    assert b.level == pytest.approx(c * a.level)


def test_affine_fit_rank_deficient_minimum_norm():
    fit = nm.affine_fit(np.full((50, 2), 0.5), np.ones(50))
    assert fit.rank_deficient
    assert np.allclose(fit.coefficients, [1, 1])
    assert fit.residual_rms < 1e-12


def test_affine_fit_identity_rows():
    fit = nm.affine_fit([[1, 0], [0, 1]], [1, 1])
    assert not fit.rank_deficient
    assert np.allclose(fit.coefficients, [1, 1])
    assert fit.residual_rms < 1e-15


def test_affine_fit_detects_absent_relation():
    s = np.linspace(-2, 2, 200)
    k = 1 / (1 + s**2)
    t = np.sin(3 * s)
    assert nm.affine_fit(np.column_stack([k, t]), np.ones_like(s)).residual_rms > 1e-2


def test_affine_fit_errors():
    with pytest.raises(TooFewSamples):
        nm.affine_fit([[1, 2, 3]], [1])
    with pytest.raises(NonFiniteValue):
        nm.affine_fit([[1, np.nan], [0, 1]], [1, 1])


def _sphere_points(n, rng):
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1)[:, None]


def test_sphere_fit_unit_sphere(rng):
    f = nm.sphere_fit(_sphere_points(20, rng))
    assert np.allclose(f.center, 0, atol=1e-10)
    assert f.radius == pytest.approx(1, abs=1e-10)
    assert f.residual_rms < 1e-10
    assert not f.degenerate


def test_sphere_fit_translated(rng):
    f = nm.sphere_fit(_sphere_points(20, rng) + [5, 0, 0])
    assert np.allclose(f.center, [5, 0, 0], atol=1e-9)


def test_sphere_fit_flags_coplanar(rng):
    P = _sphere_points(20, rng)
    P[:, 2] = 0.0
    assert nm.sphere_fit(P).degenerate


@given(
    shift=st.tuples(*[st.floats(-50, 50)] * 3),
    angles=st.tuples(*[st.floats(0, 2 * np.pi)] * 3),
    radius=st.floats(0.1, 10),
)
def test_sphere_fit_equivariance(shift, angles, radius):
    rng = np.random.default_rng(3)
    P = radius * _sphere_points(30, rng)
    a, b, c = angles
    Rz = np.array([[np.cos(a), -np.sin(a), 0], [np.sin(a), np.cos(a), 0], [0, 0, 1]])
    Rx = np.array([[1, 0, 0], [0, np.cos(b), -np.sin(b)], [0, np.sin(b), np.cos(b)]])
    Ry = np.array([[np.cos(c), 0, np.sin(c)], [0, 1, 0], [-np.sin(c), 0, np.cos(c)]])
    Q = P @ (Rz @ Rx @ Ry).T + np.asarray(shift)
    f = nm.sphere_fit(Q)
    assert f.radius == pytest.approx(radius, rel=1e-8)
    assert np.allclose(f.center, shift, atol=1e-7 * max(1, radius))


# -- segments ---------------------------------------------------------------

def test_segments_split_on_invalid_and_sign():
    valid = np.ones(20, bool)
    valid[7] = False
    signs = np.where(np.arange(20) < 14, 1, -1)
    segs = nm.segments(valid, signs)
    assert [(s.start, s.stop) for s in segs] == [(0, 7), (8, 14), (14, 20)]


def test_piecewise_derivative_skips_kink():
    s = np.linspace(-1, 1, 201)
    y = np.abs(s)
    d = nm.piecewise_derivative(s, y, signs=np.sign(s))
    ok = np.isfinite(d)
    assert np.allclose(d[ok], np.sign(s[ok]), atol=1e-10)
    assert not ok[100]


def test_sup_relative_error():
    assert nm.sup_relative_error([1.0, 2.0, np.nan], [1.0, 2.2, 5.0]) == pytest.approx(0.2 / 2.2)
