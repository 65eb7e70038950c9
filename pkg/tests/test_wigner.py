import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from tunneltime import (
    GaussianWignerState,
    InvalidParameterError,
    NormalizationError,
    StepTestDistribution,
    free_marginal,
    first_moment,
    make_rectangular,
    moments,
    phase_space_grid,
)


def test_moments_recover_parameters():
    s = GaussianWignerState(p0=2.0, q0=-3.0, dp0=0.1, dq0=7.0)
    q, p = phase_space_grid(s, 801, 801, extent=10.0)
    rho = s.density(q[:, None], p[None, :])
    P0, dp, Q0, dq = moments(q, p, rho)
    assert (P0, dp, Q0, dq) == pytest.approx((2.0, 0.1, -3.0, 7.0), rel=1e-8)


def test_moments_of_a_mixture():
    a = GaussianWignerState(p0=4.0, q0=0.0, dp0=0.3, dq0=2.0)
    b = GaussianWignerState(p0=6.0, q0=0.0, dp0=0.3, dq0=2.0)
    q = np.linspace(-25, 25, 801)
    p = np.linspace(1.0, 9.0, 1601)
    rho = 0.5 * a.density(q[:, None], p[None, :]) + 0.5 * b.density(q[:, None], p[None, :])
    P0, dp, _, _ = moments(q, p, rho)
    assert P0 == pytest.approx(5.0, rel=1e-9)
    assert dp**2 == pytest.approx(0.3**2 + 1.0, rel=1e-8)


def test_moments_reject_unnormalized():
    s = GaussianWignerState(p0=2.0, q0=0.0, dp0=0.1, dq0=7.0)
    q, p = phase_space_grid(s)
    with pytest.raises(NormalizationError) as err:
        moments(q, p, 2 * s.density(q[:, None], p[None, :]))
    assert err.value.integral == pytest.approx(2.0, rel=1e-6)


def test_parameter_validation():
    with pytest.raises(InvalidParameterError):
        GaussianWignerState(p0=1.0, q0=0.0, dp0=0.01, dq0=10.0)  # below 1/2
    with pytest.raises(InvalidParameterError):
        GaussianWignerState(p0=1.0, q0=0.0, dp0=0.3, dq0=10.0)
    with pytest.warns(UserWarning):
        GaussianWignerState(p0=1.0, q0=0.0, dp0=0.15, dq0=10.0)
    assert GaussianWignerState.pure(1.0, 0.0, 25.0).is_pure
    with pytest.raises(InvalidParameterError):
        free_marginal(GaussianWignerState.pure(1.0, 0.0, 25.0), -1.0, 0.0)


def test_prepared_outside_barrier():
    b = make_rectangular(1.0, 2.0)
    GaussianWignerState.pure(1.0, -30.0, 25.0).check_prepared(b)
    with pytest.raises(InvalidParameterError):
        GaussianWignerState.pure(1.0, -20.0, 25.0).check_prepared(b)


def _marginal_by_quadrature(s, t, q, weight=lambda p: 1.0):
    f = lambda p: weight(p) * s.density(q - p * t / s.mass, p)  # noqa: E731
    lo, hi = s.p0 - 12 * s.dp0, s.p0 + 12 * s.dp0
    return quad(f, lo, hi, epsabs=1e-17, epsrel=1e-11, limit=200)[0]


@pytest.mark.parametrize("t", [0.0, 50.0, 800.0])
def test_free_marginal_and_first_moment_by_quadrature(t):
    s = GaussianWignerState(p0=1.0, q0=-40.0, dp0=0.03, dq0=20.0, mass=1.3)
    for q in s.center(t) + s.width(t) * np.array([-2.0, -0.3, 0.0, 1.1]):
        assert free_marginal(s, t, q) == pytest.approx(_marginal_by_quadrature(s, t, q), rel=1e-9)
        m = _marginal_by_quadrature(s, t, q, weight=lambda p: p - s.p0)
        assert first_moment(s, t, q) == pytest.approx(m, rel=1e-8, abs=1e-16)


def test_step_distribution_by_quadrature():
    st_ = StepTestDistribution(p0=1.0, q0=0.0, dp0=0.05, smoothing=0.5)
    t = 100.0
    for q in (95.0, 100.0, 103.0):
        f = lambda p, w=1.0: st_.density(q - p * t, p)  # noqa: E731
        ref = quad(f, 0.4, 1.6, epsrel=1e-12, limit=200)[0]
        assert st_.free_marginal(t, q) == pytest.approx(ref, rel=1e-9)
        g = lambda p: (p - 1.0) * st_.density(q - p * t, p)  # noqa: E731
        ref_m = quad(g, 0.4, 1.6, epsrel=1e-12, limit=200)[0]
        assert st_.first_moment(t, q) == pytest.approx(ref_m, rel=1e-8)
    h = 1e-4
    q = 101.0
    num = (st_.free_marginal(t, q + h) - st_.free_marginal(t, q - h)) / (2 * h)
    assert st_.free_marginal_dq(t, q) == pytest.approx(num, rel=1e-7)


@settings(max_examples=50, deadline=None)
@given(
    p0=st.floats(0.5, 5.0),
    ratio=st.floats(0.002, 0.09),
    mix=st.floats(1.0, 3.0),
    t=st.floats(0.0, 1e4),
    m=st.floats(0.3, 3.0),
)
def test_free_marginal_normalized_with_variance_law(p0, ratio, mix, t, m):
    dp0 = ratio * p0
    s = GaussianWignerState(p0=p0, q0=0.0, dp0=dp0, dq0=0.5 * mix / dp0, mass=m)
    width = s.width(t)
    q = s.center(t) + width * np.linspace(-12, 12, 4001)
    vals = s.free_marginal(t, q)
    assert np.trapezoid(vals, q) == pytest.approx(1.0, rel=1e-10)
    mean = np.trapezoid(q * vals, q)
    var = np.trapezoid((q - mean) ** 2 * vals, q)
    assert var == pytest.approx(s.dq0**2 + (t * dp0 / m) ** 2, rel=1e-10)
    # the first moment integrates to zero: free motion conserves <p>
    assert abs(np.trapezoid(s.first_moment(t, q), q)) < 1e-12 * dp0
