import math

import pytest
from hypothesis import given, strategies as st

from inerton_lab import DomainError, ParticleParams, derive_scales, relativistic_mass, singularity_balance

EPS = 2.220446049250313e-16


@pytest.mark.parametrize("M0,v0,c,expected", [
    (1.0, 0.0, 1.0, 1.0),
    (1.0, 0.6, 1.0, 1.25),
    (2.0, 0.8, 1.0, 10 / 3),
])
def test_relativistic_mass_values(M0, v0, c, expected):
    assert relativistic_mass(M0, v0, c) == pytest.approx(expected, rel=4 * EPS)


@pytest.mark.parametrize("M0,v0", [(1.0, 1.0), (1.0, 1.5), (0.0, 0.5), (-1.0, 0.5)])
def test_relativistic_mass_rejects(M0, v0):
    with pytest.raises(DomainError):
        relativistic_mass(M0, v0, 1.0)


def test_superluminal_message():
    with pytest.raises(DomainError, match="superluminal input"):
        ParticleParams(v0=1.5)


@pytest.mark.parametrize("kwargs", [dict(v0=0.0), dict(v0=-0.1), dict(M0=0.0), dict(h=0.0),
                                    dict(c=-1.0), dict(N=0), dict(N=2.5), dict(v0=float("nan"))])
def test_params_rejects(kwargs):
    with pytest.raises(DomainError):
        ParticleParams(**kwargs)


def test_m0_tied_and_free():
    p = ParticleParams(M0=2.0, v0=0.5)
    assert p.m0 == pytest.approx(0.5)
    assert not p.m0_is_free
    with pytest.raises(DomainError):
        ParticleParams(m0=0.3)
    q = ParticleParams(m0=0.3, free_m0=True)
    assert q.m0_is_free


def test_derived_example_h1():
    sc = derive_scales(ParticleParams(M0=1.0, v0=0.5, c=1.0, h=1.0))
    M = 1 / math.sqrt(0.75)
    assert sc.M == pytest.approx(M, rel=1e-15)
    assert sc.lambda_ == pytest.approx(1 / (M * 0.5), rel=1e-15)
    assert sc.lambda_ == pytest.approx(1.7320508075688772, rel=1e-15)


def test_period_and_frequencies(params):
    sc = derive_scales(params)
    assert sc.T == pytest.approx(sc.lambda_ / params.v0, rel=EPS)
    assert sc.omega == pytest.approx(math.pi / sc.T, rel=EPS)
    assert sc.nu == pytest.approx(1 / (2 * sc.T), rel=EPS)
    assert sc.nu == pytest.approx(sc.kinetic_energy / params.h, rel=4 * EPS)


def test_compton_scale_has_length_form(params):
    sc = derive_scales(params)
    assert sc.lambdaTilde0 == pytest.approx(params.h / (params.M0 * params.c), rel=EPS)
    # the contracted scale equals h/(M c)
    assert sc.lambdaTildeV0 == pytest.approx(params.h / (sc.M * params.c), rel=4 * EPS)


velocities = st.floats(min_value=1e-3, max_value=0.999, allow_nan=False)
masses = st.floats(min_value=1e-3, max_value=1e3)


@given(v0=velocities, M0=masses, h=st.floats(min_value=1e-2, max_value=1e2))
def test_scale_identities(v0, M0, h):
    p = ParticleParams(M0=M0, v0=v0, h=h)
    sc = derive_scales(p)
    assert sc.lambda_ * sc.M * v0 == pytest.approx(h, rel=8 * EPS)
    assert sc.Lambda * v0 == pytest.approx(sc.lambda_ * p.c, rel=8 * EPS)
    assert sc.lambda_ * v0 == pytest.approx(sc.lambdaTildeV0 * p.c, rel=8 * EPS)
    assert sc.Lambda == pytest.approx(sc.lambdaTildeV0 / v0**2, rel=8 * EPS)
    assert sc.lambdaTildeV0 / sc.lambdaTilde0 == pytest.approx(math.sqrt(1 - v0**2), rel=8 * EPS)


@given(a=velocities, b=velocities)
def test_monotonicity(a, b):
    if a == b:
        return
    lo, hi = sorted((a, b))
    assert relativistic_mass(1.0, lo, 1.0) < relativistic_mass(1.0, hi, 1.0)
    assert derive_scales(ParticleParams(v0=lo)).lambda_ > derive_scales(ParticleParams(v0=hi)).lambda_


def test_singularity_balance_rest_limit():
    bal = singularity_balance(ParticleParams(v0=1e-6))
    assert bal.omega_k0 == pytest.approx(1.0, rel=EPS)
    assert abs(bal.residual_rest) <= 4 * EPS
    assert bal.k0 * 1.0 == pytest.approx(bal.omega_k0, rel=4 * EPS)


def test_singularity_balance_moving():
    p = ParticleParams(v0=0.6)
    bal = singularity_balance(p)
    assert bal.omega_kv0 == pytest.approx(1.25, rel=4 * EPS)
    assert abs(bal.residual_moving) <= 4 * EPS
    assert bal.nu_rel * p.h == pytest.approx(derive_scales(p).M * p.c**2, rel=4 * EPS)
    assert abs(bal.nu_rel_residual) <= 4 * EPS * bal.nu_rel


def test_as_dict_keys(params):
    d = derive_scales(params).as_dict()
    assert set(d) == {"M", "m", "lambda", "T", "omega", "nu", "Lambda", "lambdaTilde0",
                      "lambdaTildeV0", "nuRel"}
