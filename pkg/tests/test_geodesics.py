import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from homlin.geodesics import (DomainError, GeodesicState, KGroupMetric, causal_character, closed_form,
                              closed_form_deviation, derive_connection, geodesic_rhs, initial_value, integrate,
                              metric_character, singular_time, timelike_constants, torsion_residual)


def test_connection_table():
    nab = derive_connection()
    # nabla_A A = 0, nabla_A V = 0, nabla_V A = -V, nabla_V V = -A
    assert np.allclose(nab[0, 0], [0, 0])
    assert np.allclose(nab[0, 1], [0, 0])
    assert np.allclose(nab[1, 0], [0, -1])
    assert np.allclose(nab[1, 1], [-1, 0])
    assert torsion_residual() < 1e-15


def test_connection_metric_compatible():
    k = KGroupMetric(bracket=1.3, gAA=2.0, gVV=-0.5, gAV=0.2)
    nab = derive_connection(k)
    g = k.metric()
    # g(nabla_i e_j, e_l) + g(e_j, nabla_i e_l) = 0 for a left-invariant metric
    low = np.einsum("ijk,kl->ijl", nab, g)
    assert np.max(np.abs(low + low.transpose(0, 2, 1))) < 1e-14
    assert torsion_residual(k) < 1e-14


def test_rhs_examples():
    assert geodesic_rhs((0.0, 1.0)) == (1.0, 0.0)
    assert geodesic_rhs((1.0, 1.0)) == (1.0, 1.0)
    assert geodesic_rhs(GeodesicState(2.0, 0.0)) == (0.0, 0.0)


@settings(max_examples=30, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5))
def test_rhs_from_connection(a, b):
    got = geodesic_rhs((a, b), derive_connection())
    want = geodesic_rhs((a, b))
    assert np.allclose(got, want, atol=1e-12 * (1 + a * a + b * b))


def test_closed_form_examples():
    assert np.allclose(closed_form("spacelike", 0, 0.0).vector(), [0, 1])
    assert np.allclose(closed_form("null", 0, 0.5).vector(), [2, 2])
    assert np.allclose(closed_form("timelike", 0.6, 0.0).vector(), [1, 0.6])
    assert np.allclose(closed_form("timelike", 0.6, 0.0, sign=-1).vector(), [-1, -0.6])


@pytest.mark.parametrize("kind,r,sign", [("spacelike", 0, 1), ("null", 0, 1), ("timelike", 0.6, 1),
                                         ("timelike", 0.3, -1), ("null", 0, -1)])
def test_closed_form_solves_ode(kind, r, sign):
    h = 1e-6
    for t in np.linspace(-0.4, 0.4, 9):
        y0 = closed_form(kind, r, t - h, sign).vector()
        y1 = closed_form(kind, r, t + h, sign).vector()
        deriv = (y1 - y0) / (2 * h)
        y = closed_form(kind, r, t, sign).vector()
        assert np.allclose(deriv, geodesic_rhs(y), rtol=1e-6, atol=1e-6)


def test_domain_errors():
    with pytest.raises(DomainError) as e:
        closed_form("spacelike", 0, 1.6)
    assert np.isclose(e.value.singular_time, np.pi / 2)
    with pytest.raises(DomainError):
        closed_form("null", 0, 1.0)
    s, k = timelike_constants(0.6)
    with pytest.raises(DomainError):
        closed_form("timelike", 0.6, -k / s - 0.01, sign=-1)
    with pytest.raises(DomainError):
        timelike_constants(1.2)


def test_singular_times():
    s, k = timelike_constants(0.6)
    assert np.isclose(s, 0.8) and np.isclose(np.tanh(k), 0.8)
    assert singular_time("spacelike", 0, "forward") == pytest.approx(np.pi / 2)
    assert singular_time("spacelike", 0, "backward") == pytest.approx(-np.pi / 2)
    assert singular_time("null", 0, "backward") is None
    assert singular_time("timelike", 0.6, "backward", sign=-1) == pytest.approx(-k / s)
    assert singular_time("timelike", 0.6, "forward", sign=-1) is None


def test_causal_labels():
    assert causal_character(initial_value("spacelike")) == "spacelike"
    assert causal_character(initial_value("null")) == "null"
    assert causal_character(initial_value("timelike", 0.6)) == "timelike"
    assert metric_character((0.0, 1.0)) == "timelike"
    assert metric_character((1.0, 0.0)) == "spacelike"


@pytest.mark.parametrize("kind,r,sign,direction", [("spacelike", 0, 1, "forward"), ("spacelike", 0, 1, "backward"),
                                                   ("null", 0, 1, "forward"), ("timelike", 0.6, -1, "backward"),
                                                   ("timelike", 0.6, 1, "forward")])
def test_blowup_brackets_escape(kind, r, sign, direction):
    traj, rep = integrate(initial_value(kind, r, sign), direction)
    assert rep.detected
    t_star = singular_time(kind, r, direction, sign)
    assert rep.t_low <= t_star <= rep.t_high
    assert rep.bracket_width <= 1e-4
    assert abs(rep.escape_time_estimate - t_star) < 1e-3
    assert closed_form_deviation(traj, kind, r, sign) < 1e-6
    assert traj.drift_regular < 1e-8


def test_complete_directions():
    traj, rep = integrate(initial_value("null"), "backward", t_max=50)
    assert not rep.detected
    assert np.isclose(traj.t[-1], -50)
    assert closed_form_deviation(traj, "null", 0) < 1e-6


def test_stationary():
    traj, rep = integrate(GeodesicState(1.0, 0.0), "forward", t_max=100)
    assert not rep.detected
    assert np.allclose(traj.y[:, -1], [1, 0])
    assert traj.drift == 0


def test_reflection_rule():
    """Reversing the initial velocity gives gamma(t) -> -gamma(-t)."""
    a, _ = integrate(initial_value("timelike", 0.6, 1), "forward", t_max=0.5)
    b, _ = integrate(initial_value("timelike", 0.6, -1), "backward", t_max=0.5)
    for t, y in zip(b.t, b.y.T):
        ref = closed_form("timelike", 0.6, -t)
        assert np.allclose(y, -ref.vector(), atol=1e-8)
    assert a.t[-1] == pytest.approx(0.5)


def test_bad_arguments():
    with pytest.raises(ValueError):
        integrate(initial_value("null"), "sideways")
    with pytest.raises(ValueError):
        integrate(initial_value("null"), tol=0)
    with pytest.raises(ValueError):
        closed_form("lightlike", 0, 0.0)
