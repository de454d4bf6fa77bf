import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from inerton_lab import DomainError, ParticleParams, SpinPolarization, derive_scales
from inerton_lab import quadrature
from inerton_lab import trajectory as tr


@pytest.fixture
def scales():
    return derive_scales(ParticleParams())


def test_polarization_values():
    assert SpinPolarization.Up.e_alpha == 1
    assert SpinPolarization.Down.e_alpha == -1
    assert SpinPolarization.parse("DOWN") is SpinPolarization.Down
    with pytest.raises(ValueError):
        SpinPolarization.parse("sideways")


def test_start_values(scales):
    X, Xd = tr.particle_state(0.0, scales)
    q, qd = tr.cloud_state(0.0, scales)
    assert (X, Xd, q, qd) == (0.0, scales.v0, 0.0, scales.c)


def test_half_period(scales):
    T = scales.T
    X, Xd = tr.particle_state(T / 2, scales)
    q, qd = tr.cloud_state(T / 2, scales)
    assert Xd == pytest.approx(0.0, abs=1e-15)
    assert q == pytest.approx(scales.Lambda / math.pi, rel=1e-15)
    assert qd == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("n", range(1, 11))
def test_speed_renewed_at_collisions(scales, n):
    _, Xd = tr.particle_state(n * scales.T, scales)
    assert Xd == pytest.approx(scales.v0, rel=1e-12)


def test_positions_continuous_across_collisions(scales):
    T = scales.T
    for n in range(1, 6):
        before = n * T * (1 - 1e-10)
        X0, Xd0 = tr.particle_state(before, scales)
        X1, Xd1 = tr.particle_state(n * T, scales)
        q0, _ = tr.cloud_state(before, scales)
        q1, _ = tr.cloud_state(n * T, scales)
        assert X1 == pytest.approx(X0, rel=1e-9)
        assert Xd1 == pytest.approx(Xd0, rel=1e-8)
        assert q1 == pytest.approx(q0, abs=1e-8 * scales.Lambda)


def test_cloud_velocity_jumps_at_collisions(scales):
    # q is continuous but qdot flips from -c to +c
    T = scales.T
    _, before = tr.cloud_state(T * (1 - 1e-9), scales)
    _, after = tr.cloud_state(T, scales)
    assert before == pytest.approx(-scales.c, rel=1e-12)
    assert after == pytest.approx(scales.c, rel=1e-12)


def test_position_after_one_period(scales):
    X, _ = tr.particle_state(scales.T, scales)
    assert X == pytest.approx(scales.lambda_ * (1 - 2 / math.pi), rel=1e-14)


def test_mean_speed_by_quadrature(scales):
    mean = quadrature.integrate(lambda t: tr.particle_state(t, scales)[1], 0.0, scales.T, 4096) / scales.T
    assert mean == pytest.approx(scales.v0 * (1 - 2 / math.pi), rel=1e-12)


def test_position_is_integral_of_speed(scales):
    t_end = 3.7 * scales.T
    X_end, _ = tr.particle_state(t_end, scales)
    edges = [0, scales.T, 2 * scales.T, 3 * scales.T, t_end]
    total = sum(quadrature.integrate(lambda t: tr.particle_state(t, scales)[1], a, b, 2048)
                for a, b in zip(edges[:-1], edges[1:]))
    assert total == pytest.approx(X_end, rel=1e-12)


def test_oscillation_component_amplitude(scales):
    t = np.linspace(0, 4 * scales.T, 4001)
    osc = tr.oscillation_component(t, scales)
    assert np.max(np.abs(osc)) == pytest.approx(scales.lambda_ / math.pi, rel=1e-12)


def test_intrinsic_mirrors_spatial(scales):
    t = np.linspace(0, 3 * scales.T, 101)
    X, Xd = tr.particle_state(t, scales)
    for pol in SpinPolarization:
        Xi, Xid = tr.intrinsic_state(t, pol, scales)
        np.testing.assert_array_equal(Xi, pol.e_alpha * X)
        np.testing.assert_array_equal(Xid, pol.e_alpha * Xd)


def test_negative_time_rejected(scales):
    with pytest.raises(DomainError):
        tr.particle_state(-1.0, scales)


def test_period_index_snaps():
    T = 0.1
    assert int(tr.period_index(3 * T * (1 - 1e-15), T)) == 3
    assert int(tr.period_index(2.5 * T, T)) == 2


def test_inerton_family(scales):
    fam = tr.inerton_family(scales)
    N = scales.params.N
    assert len(fam) == N + 1
    assert fam[0].v0r == scales.v0 and fam[0].Tr == scales.T
    assert fam[N].Tr == 0.0
    assert fam[N].v0r == pytest.approx(0.0, abs=1e-15)
    for idx in fam[:-1]:
        assert idx.lambda_r == pytest.approx(idx.v0r * idx.Tr)
        assert idx.c == pytest.approx(scales.c, rel=1e-14)


def test_inerton_state_domain(scales):
    fam = tr.inerton_family(scales)
    idx = fam[3]
    with pytest.raises(DomainError, match="within T_r"):
        tr.inerton_state(idx.Tr * 1.01, idx, SpinPolarization.Up)
    with pytest.raises(DomainError):
        tr.inerton_state(0.0, fam[-1], SpinPolarization.Up)
    with pytest.raises(DomainError):
        tr.InertonIndex.from_scales(scales.params.N + 1, scales)


def test_inerton_zero_matches_particle(scales):
    idx = tr.inerton_family(scales)[0]
    t = np.linspace(0, scales.T, 50)
    Xi, Xid, xi, xid = tr.inerton_state(t, idx, SpinPolarization.Down)
    X, Xd = tr.intrinsic_state(t, SpinPolarization.Down, scales)
    np.testing.assert_allclose(Xi, X, rtol=1e-13, atol=1e-13)
    np.testing.assert_allclose(Xid, Xd, rtol=1e-13, atol=1e-13)


@given(st.floats(min_value=0, max_value=50))
def test_speed_bounds(frac):
    scales = derive_scales(ParticleParams())
    _, Xd = tr.particle_state(frac * scales.T, scales)
    q, qd = tr.cloud_state(frac * scales.T, scales)
    assert -1e-15 <= Xd <= scales.v0
    assert 0 <= q <= scales.Lambda / math.pi * (1 + 1e-15)
    assert abs(qd) <= scales.c


def test_proper_time(scales):
    assert tr.proper_time(scales.lambda_ * (1 - 2 / math.pi), scales) == pytest.approx(scales.T)
