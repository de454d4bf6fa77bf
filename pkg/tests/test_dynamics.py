import io
import math

import numpy as np
import pytest

from inerton_lab import IntegrationError, ParticleParams, SpinPolarization, UsageError, derive_scales
from inerton_lab import dynamics
from inerton_lab.dynamics import KinematicState, Tolerance


@pytest.fixture
def system(params):
    return dynamics.build_eom(params, SpinPolarization.Up)


def test_initial_state(system, params):
    s = system.initial_state()
    assert s.vector().tolist() == [0.0, params.v0, 0.0, params.c, 0.0, params.v0, 0.0, params.c]
    down = dynamics.build_eom(params, SpinPolarization.Down).initial_state()
    assert down.Xidot == -params.v0 and down.xidot == -params.c


def test_rhs_at_start(system):
    # the particle decelerates, the cloud starts at zero acceleration
    d = system.rhs(0.0, system.initial_state().vector())
    assert d[1] < 0
    assert d[3] == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("pol", list(SpinPolarization))
def test_five_periods_match_closed_form(params, pol):
    system = dynamics.build_eom(params, pol)
    traj = dynamics.integrate(system, t_end=5 * system.T)
    report = dynamics.verify_against_analytic(traj)
    assert report.passed, "\n".join(report.lines())
    assert len(traj.collisions) == 5
    assert traj.integrator_meta["arcs"] == 5


@pytest.mark.parametrize("r", [1, 4, 9])
def test_inerton_arcs(params, r):
    system = dynamics.build_eom(params, SpinPolarization.Down, r)
    traj = dynamics.integrate(system, t_end=2 * system.T)
    assert dynamics.verify_against_analytic(traj).max_rel < 1e-8


def test_last_inerton_has_no_dynamics(params):
    with pytest.raises(Exception, match="zero speed or lifetime"):
        dynamics.build_eom(params, SpinPolarization.Up, params.N)


def test_collision_left_limits(system, params):
    traj = dynamics.integrate(system, t_end=10 * system.T)
    for k, s in enumerate(traj.collisions, start=1):
        assert s.t == pytest.approx(k * system.T)
        assert s.Xdot == pytest.approx(params.v0, rel=1e-8)
        assert s.xdot == pytest.approx(-params.c, rel=1e-8)


def test_partial_final_arc(system):
    traj = dynamics.integrate(system, t_end=2.5 * system.T)
    assert traj.times[-1] == pytest.approx(2.5 * system.T)
    assert len(traj.collisions) == 2
    assert len(list(traj.arcs())) == 3


def test_cloud_position_continuous(system):
    traj = dynamics.integrate(system, t_end=5 * system.T, samples_per_arc=256)
    q = traj.column("x")
    jumps = np.max(np.abs(np.diff(q)))
    sc = system.arc_scales
    # a smooth curve sampled on the grid moves at most c*dt between samples
    assert jumps <= sc.c * (traj.times[1] - traj.times[0]) * (1 + 1e-6)


def test_tolerance_validation():
    with pytest.raises(Exception):
        Tolerance(abs=-1.0)


def test_bad_usage(system):
    with pytest.raises(UsageError):
        dynamics.integrate(system, t_end=0.0)
    with pytest.raises(UsageError):
        dynamics.integrate(system, samples_per_arc=1)
    with pytest.raises(UsageError):
        dynamics.integrate(system, init=KinematicState(*[0.0] * 8, t=1.0))


def test_empty_trajectory_rejected():
    with pytest.raises(UsageError):
        dynamics.verify_against_analytic(None)


def test_non_default_initial_conditions_flagged(system):
    init = KinematicState(0.0, 0.4, 0.0, 1.0, 0.0, 0.5, 0.0, 1.0)
    traj = dynamics.integrate(system, init=init)
    assert traj.integrator_meta["non_default_initial_conditions"]
    assert not dynamics.verify_against_analytic(traj).passed


def test_integration_failure_reports_state(system, monkeypatch):
    class Failed:
        status = -1
        message = "step size too small"
        nfev = 3
        t = np.array([0.0, 1.0])
        y = np.zeros((8, 2))

    monkeypatch.setattr(dynamics, "solve_ivp", lambda *a, **k: Failed())
    with pytest.raises(IntegrationError) as info:
        dynamics.integrate(system)
    assert info.value.last_state is not None


def test_csv_is_deterministic(system):
    a = dynamics.integrate(system, t_end=2 * system.T).to_csv()
    b = dynamics.integrate(system, t_end=2 * system.T).to_csv()
    assert a == b
    assert a.splitlines()[0] == "t,X,Xdot,x,xdot,Xi,Xidot,xi,xidot"
    buf = io.StringIO()
    dynamics.integrate(system, t_end=2 * system.T).to_csv(buf)
    assert buf.getvalue() == a


@pytest.mark.parametrize("value", [0.1, 1 / 3, 1e-300, 6.283185307179586])
def test_format_float_round_trips(value):
    text = dynamics.format_float(value)
    assert float(text) == value
    assert len(text.replace("-", "").replace(".", "").split("e")[0].lstrip("0")) <= 17


def test_tilde_round_trip(params):
    s = KinematicState(0.3, 0.2, 1.0, 0.7, -0.1, 0.4, 2.0, -0.5)
    xt, xit = dynamics.tilde_transform(s, params)
    assert dynamics.tilde_inverse(xt, s.X, params) == pytest.approx(s.xdot, rel=1e-15)
    assert dynamics.tilde_inverse(xit, s.Xi, params) == pytest.approx(s.xidot, rel=1e-15)


def test_closed_form_trajectory_passes(system):
    traj = dynamics.trajectory_from_closed_form(system, 3 * system.T)
    assert dynamics.verify_against_analytic(traj).max_rel == 0.0


def test_free_m0_flag():
    p = ParticleParams(m0=0.1, free_m0=True)
    traj = dynamics.integrate(dynamics.build_eom(p, SpinPolarization.Up))
    assert traj.integrator_meta["free_m0"]
