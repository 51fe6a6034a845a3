import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wavepackets.errors import InvalidParameterError
from wavepackets.params import (
    DimensionlessFrame,
    PhysicalParams,
    derive_frequencies,
    effective_momentum,
    from_dimensionless,
    to_dimensionless,
)


def make(k0=20.0, a0=0.003, **kw):
    return PhysicalParams(k0=k0, a0=a0, t0=kw.pop("t0", 0.8), epsilon=kw.pop("epsilon", k0 * a0), **kw)


def test_fig1_group_velocity(fig1_params):
    omega0, c_g = derive_frequencies(fig1_params)
    assert omega0 == pytest.approx(14.007, abs=5e-4)
    assert c_g == pytest.approx(0.350, abs=5e-4)
    assert c_g == pytest.approx(0.35, rel=5e-3)


def test_unit_dispersion():
    p = PhysicalParams(k0=1.0, a0=0.01, t0=1.0, epsilon=0.01, g=1.0)
    assert derive_frequencies(p) == (1.0, 0.5)


def test_k0_5():
    omega0, c_g = derive_frequencies(make(k0=5.0, a0=0.01))
    assert omega0 == pytest.approx(7.0036, abs=5e-5)
    assert c_g == pytest.approx(0.70036, abs=5e-6)


@pytest.mark.parametrize("field,value", [("k0", 0.0), ("k0", -1.0), ("g", 0.0), ("a0", -0.1), ("t0", 0.0)])
def test_non_positive_rejected(field, value):
    kw = dict(k0=20.0, a0=0.003, t0=0.8, epsilon=0.06, g=9.81)
    kw[field] = value
    with pytest.raises(InvalidParameterError):
        PhysicalParams(**kw)


def test_epsilon_must_match_steepness():
    with pytest.raises(InvalidParameterError, match="inconsistent"):
        PhysicalParams(k0=20.0, a0=0.003, t0=0.8, epsilon=0.061)


def test_epsilon_bounds():
    with pytest.raises(InvalidParameterError):
        make(a0=0.02)  # epsilon = 0.4
    with pytest.warns(RuntimeWarning):
        make(a0=0.01)  # epsilon = 0.2


def test_effective_momentum_examples(fig1_params, fig2_params):
    assert effective_momentum(fig1_params) == 0.0
    assert effective_momentum(fig1_params.replace(Omega0=2.0)) == pytest.approx(2.380, abs=5e-4)
    assert effective_momentum(fig2_params.replace(Omega0=-4.0)) == pytest.approx(-2.380, abs=5e-4)


@given(st.floats(-10, 10, allow_nan=False))
def test_momentum_is_odd(omega):
    p = make()
    assert effective_momentum(p.replace(Omega0=-omega)) == -effective_momentum(p.replace(Omega0=omega))


@given(st.floats(1.0, 100.0), st.floats(0.5, 20.0))
def test_dispersion_relation_exact(k0, g):
    p = PhysicalParams(k0=k0, a0=0.05 / k0, t0=1.0, epsilon=0.05, g=g)
    assert p.omega0 ** 2 - k0 * g == pytest.approx(0.0, abs=4 * np.finfo(float).eps * k0 * g)


def test_frame_scales(fig1_frame):
    p = fig1_frame.params
    assert fig1_frame.tau0 == p.epsilon * p.omega0 * p.t0
    assert fig1_frame.xi_s == fig1_frame.tau0 ** 2 / 4


def test_to_dimensionless_examples(fig1_frame):
    assert to_dimensionless(fig1_frame, 0.0, 0.0) == (0.0, 0.0)
    xi, _ = to_dimensionless(fig1_frame, 5.0, 0.0)
    assert xi == pytest.approx(0.36, rel=1e-12)
    _, tau = to_dimensionless(fig1_frame, 0.0, 0.8)
    assert tau == pytest.approx(-0.6723, abs=5e-5)


def test_from_dimensionless_examples(fig1_frame):
    assert from_dimensionless(fig1_frame, 0.0, 0.0) == (0.0, 0.0)
    x, t = from_dimensionless(fig1_frame, 0.36, 0.0)
    assert x == pytest.approx(5.0, rel=1e-12)
    assert t == pytest.approx(5.0 / fig1_frame.params.c_g, rel=1e-12)
    assert t == pytest.approx(14.29, rel=1e-3)
    x, t = from_dimensionless(fig1_frame, *to_dimensionless(fig1_frame, 3.7, 1.2))
    assert x == pytest.approx(3.7, rel=1e-12) and t == pytest.approx(1.2, rel=1e-12)


@settings(max_examples=200)
@given(
    k0=st.floats(1.0, 100.0),
    eps=st.floats(0.01, 0.14),
    t0=st.floats(0.1, 5.0),
    x=st.floats(0.01, 50.0),
    t=st.floats(0.01, 200.0),
)
def test_round_trip(k0, eps, t0, x, t):
    frame = DimensionlessFrame(PhysicalParams(k0=k0, a0=eps / k0, t0=t0, epsilon=eps))
    x2, t2 = from_dimensionless(frame, *to_dimensionless(frame, x, t))
    assert math.isclose(x2, x, rel_tol=1e-12)
    # t is recovered as a difference of x/c_g and tau/(eps w0); bound by the larger term
    scale = max(abs(t), x / frame.params.c_g)
    assert abs(t2 - t) <= 1e-12 * scale


def test_tau_decreasing_in_t(fig2_frame):
    t = np.linspace(-5, 5, 101)
    _, tau = to_dimensionless(fig2_frame, 1.0, t)
    assert np.all(np.diff(tau) < 0)
