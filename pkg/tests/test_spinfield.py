import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from inerton_lab import DomainError, SpinPolarization, UsageError
from inerton_lab import spinfield
from inerton_lab.spinfield import FieldConfig


def test_ground_energy_unit_field():
    cfg = FieldConfig(B=1.0)
    sol = spinfield.landau_ground_state(cfg)
    assert sol.epsilon == pytest.approx(0.5, rel=1e-6)
    assert sol.norm() == pytest.approx(1.0, rel=1e-12)


@given(B=st.floats(1e-3, 1e3), e=st.floats(0.1, 10), M=st.floats(0.1, 10))
@settings(max_examples=10, deadline=None)
def test_ground_energy_scales_with_field(B, e, M):
    cfg = FieldConfig(B=B, e=e, M=M)
    sol = spinfield.landau_ground_state(cfg, n_points=1001)
    assert sol.epsilon == pytest.approx(e * B / (2 * M), rel=1e-6)


def test_eigenvector_is_gaussian():
    sol = spinfield.landau_ground_state(FieldConfig(B=1.0))
    assert spinfield.gaussian_distance(sol) <= 1e-4


def test_excited_levels_are_odd_integers():
    _, vals, _ = spinfield.oscillator_levels(n_points=2001, n_levels=4)
    np.testing.assert_allclose(vals, [1, 3, 5, 7], rtol=1e-6)


def test_second_order_convergence():
    slope, dq, err = spinfield.convergence_order(order=2)
    assert slope == pytest.approx(2.0, abs=0.2)
    assert np.all(np.diff(err) < 0)


def test_three_point_stencil_underestimates():
    sol = spinfield.landau_ground_state(FieldConfig(B=1.0), order=2)
    assert sol.dimensionless_eigenvalue < 1.0
    assert abs(sol.dimensionless_eigenvalue - 1) < 1e-5


def test_weak_field_bound():
    # both stencils err low, so the discrete energy never exceeds the closed form
    for B in (1e-8, 1e-4):
        cfg = FieldConfig(B=B)
        assert spinfield.landau_ground_state(cfg).epsilon <= cfg.level_spacing


def test_zero_field():
    with pytest.raises(DomainError):
        spinfield.landau_ground_state(FieldConfig(B=0.0))
    rows = spinfield.field_table([0.0])
    assert rows[0][1] == 0.0


@pytest.mark.parametrize("kwargs", [dict(n_points=200), dict(n_points=2000), dict(Q_max=5.0), dict(order=6)])
def test_grid_validation(kwargs):
    with pytest.raises(UsageError):
        spinfield.oscillator_levels(**kwargs)


def test_field_validation():
    with pytest.raises(DomainError):
        FieldConfig(B=-1.0)
    with pytest.raises(DomainError):
        FieldConfig(B=1.0, M=0.0)


def test_normalization_constant():
    cfg = FieldConfig(B=4.0, e=2.0, hbar=0.5)
    assert cfg.normalization == pytest.approx(2.0)


@pytest.mark.parametrize("pol,sign", [(SpinPolarization.Up, 1), (SpinPolarization.Down, -1)])
def test_spin_shift(pol, sign):
    cfg = FieldConfig(B=2.0, e=1.0, hbar=1.0, M=1.0)
    eps, S3 = spinfield.spin_energy_shift(cfg, pol)
    assert S3 == sign * 0.5
    assert eps == sign * cfg.e * cfg.B / cfg.M / 2
    assert abs(eps) == pytest.approx(cfg.level_spacing)


def test_renormalized_spectrum():
    cfg = FieldConfig(B=1.0)
    up = spinfield.renormalize_spectrum(2.0, cfg, SpinPolarization.Up)
    down = spinfield.renormalize_spectrum(2.0, cfg, SpinPolarization.Down)
    assert up - down == pytest.approx(2 * cfg.level_spacing)
    with pytest.raises(DomainError):
        spinfield.renormalize_spectrum(-1.0, cfg, SpinPolarization.Up)


def test_field_table_columns():
    (B, eps, closed, up, down), = spinfield.field_table([3.0])
    assert (B, closed, up, down) == (3.0, 1.5, 1.5, -1.5)
    assert eps == pytest.approx(closed, rel=1e-6)


def test_gaussian_normalized():
    Q = np.linspace(-10, 10, 20001)
    g = spinfield.ground_state_gaussian(Q)
    assert np.sum(g**2) * (Q[1] - Q[0]) == pytest.approx(1.0, rel=1e-10)
    assert g[10000] == pytest.approx(math.pi ** -0.25)
