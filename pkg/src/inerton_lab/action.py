"""Hamiltonians, Hamilton-Jacobi oscillator orbits and action-angle quantization."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import quadrature
from .core import ParticleParams, derive_scales
from .dynamics import KinematicState, tilde_inverse, tilde_transform
from .errors import DomainError, UsageError
from .trajectory import SpinPolarization


@dataclass(frozen=True)
class HamiltonianParts:
    """Energy split of the particle + cloud system for one polarization.

    ``H_coordinate`` and ``H_momentum`` are the two closed expressions of the
    total Hamiltonian (coordinate form and momentum form). They coincide only
    on states where the square-root factor of the relativistic Lagrangian
    equals ``sqrt(1 - v0^2/c^2)``; see :func:`on_shell_state`.
    """

    H_part: float
    H_cloud: float
    H_renorm: float
    H_total: float
    H_coordinate: float
    H_momentum: float
    momenta: dict

    @property
    def form_mismatch(self) -> float:
        return (self.H_coordinate - self.H_momentum) / abs(self.H_momentum)


def momenta(state: KinematicState, params: ParticleParams) -> dict:
    sc = derive_scales(params)
    xt, xit = tilde_transform(state, params)
    return {
        "p": sc.M * state.Xdot,
        "ptilde": sc.m * xt,
        "pi_alpha": sc.M * state.Xidot,
        "pitilde_alpha": sc.m * xit,
    }


def hamiltonians(state: KinematicState, pol: SpinPolarization, params: ParticleParams) -> HamiltonianParts:
    sc = derive_scales(params)
    M, m, w, c, v0, M0 = sc.M, sc.m, sc.omega, params.c, params.v0, params.M0
    e = pol.e_alpha
    mom = momenta(state, params)
    p, pt, pa, pta = mom["p"], mom["ptilde"], mom["pi_alpha"], mom["pitilde_alpha"]
    coupling = 2.0 * w * math.sqrt(m * M0) * v0 * (state.x + e * state.xi)

    h_part = p**2 / (2 * M) + M * w**2 * state.X**2 / 2 + pa**2 / (2 * M) + M * w**2 * state.Xi**2 / 2
    h_cloud = pt**2 / (2 * m) + pta**2 / (2 * m) + coupling
    h_renorm = (M0 * c) ** 2 / (2 * M) + M * c**2 / 2
    h_coord = M * w**2 * state.X**2 + M * w**2 * state.Xi**2 + coupling + M * c**2
    h_mom = p**2 / M + pt**2 / m + pa**2 / M + pta**2 / m + (M0 * c) ** 2 / M
    return HamiltonianParts(
        H_part=h_part,
        H_cloud=h_cloud,
        H_renorm=h_renorm,
        H_total=h_part + h_cloud + h_renorm,
        H_coordinate=h_coord,
        H_momentum=h_mom,
        momenta=mom,
    )


def on_shell_state(rng: np.random.Generator, params: ParticleParams, pol: SpinPolarization,
                   max_tries: int = 1000) -> KinematicState:
    """Random state on which the coordinate and momentum forms must agree.

    Positions and all velocities but ``xdot`` are drawn at the natural scales
    (``lambda``, ``Lambda``, ``v0``, ``c``); ``xdot`` is then solved so that the
    kinetic part of the reduced Lagrangian equals ``M v0^2``.
    """
    sc = derive_scales(params)
    M, m, w, c, v0, M0 = sc.M, sc.m, sc.omega, params.c, params.v0, params.M0
    e = pol.e_alpha
    for _ in range(max_tries):
        X, Xi = rng.uniform(-1, 1, 2) * sc.lambda_ / math.pi
        x, xi = rng.uniform(-1, 1, 2) * sc.Lambda / math.pi
        Xdot, Xidot = rng.uniform(-1, 1, 2) * v0
        xitilde = rng.uniform(-1, 1) * c
        rest = (M * w**2 * (X**2 + Xi**2) + 2 * w * math.sqrt(m * M0) * v0 * (x + e * xi)
                + M * c**2 - (M0 * c) ** 2 / M
                - M * Xdot**2 - M * Xidot**2 - m * xitilde**2)
        if rest > 0:
            xtilde = math.sqrt(rest / m) * rng.choice((-1.0, 1.0))
            xdot = tilde_inverse(xtilde, X, params)
            xidot = tilde_inverse(xitilde, Xi, params)
            return KinematicState(X=X, Xdot=Xdot, x=x, xdot=xdot, Xi=Xi, Xidot=Xidot, xi=xi, xidot=xidot)
    raise RuntimeError("could not draw an on-shell state")


def energy_function(state: KinematicState, pol: SpinPolarization, params: ParticleParams) -> float:
    """Conserved energy of the coupled equations of motion.

    Legendre transform of the particle-cloud Lagrangian in its own velocities
    ``(Xdot, xdot, Xidot, xidot)``, scaled by the frozen square-root factor::

        M Xdot^2/2 + m xdot^2/2 + omega sqrt(m M) v0 x  + (same for Xi, xi with e_alpha)

    Constant along every inter-collision arc when ``m0 = M0 v0^2/c^2``.
    """
    sc = derive_scales(params)
    M, m, w, v0 = sc.M, sc.m, sc.omega, params.v0
    e = pol.e_alpha
    g = w * math.sqrt(m * M) * v0
    spatial = M * state.Xdot**2 / 2 + m * state.xdot**2 / 2 + g * state.x
    intrinsic = M * state.Xidot**2 / 2 + m * state.xidot**2 / 2 + g * e * state.xi
    return spatial + intrinsic


def hj_oscillator(E, M, omega, t):
    """Orbit ``X = sqrt(2E/(M w^2)) sin(w t)``, ``p = sqrt(2ME) cos(w t)``."""
    if not (E > 0 and M > 0 and omega > 0):
        raise DomainError("E, M and omega must all be positive")
    t = np.asarray(t, dtype=float)
    X = math.sqrt(2 * E / (M * omega**2)) * np.sin(omega * t)
    p = math.sqrt(2 * M * E) * np.cos(omega * t)
    return X, p


@dataclass(frozen=True)
class ActionResult:
    J: float
    iota: float
    iota_up: float
    iota_down: float
    closed_form: float

    @property
    def relative_error(self) -> float:
        return abs(self.J - self.closed_form) / self.closed_form


def _loop_integral(E, M, omega, T, n, sign):
    # integrand p dX/dt along the orbit, each half-period on its own panels
    amp = math.sqrt(2 * E / (M * omega**2))
    pmax = math.sqrt(2 * M * E)

    def integrand(t):
        p = sign * pmax * np.cos(omega * t)
        Xdot = sign * amp * omega * np.cos(omega * t)
        return p * Xdot

    return (quadrature.integrate(integrand, 0.0, T, n)
            + quadrature.integrate(integrand, T, 2 * T, n))


def action_over_period(E: float, T: float, quadrature_n: int = 10_000, M: float = 1.0) -> ActionResult:
    """Closed-orbit action over the period ``2T`` by composite Gauss-Legendre quadrature.

    ``quadrature_n`` is the node count per half-period. The result does not
    depend on ``M``; the intrinsic action is computed for both polarizations.
    """
    if not (E > 0 and T > 0):
        raise DomainError("E and T must be positive")
    if quadrature_n < quadrature.PANEL_ORDER:
        raise UsageError(f"quadrature_n must be >= {quadrature.PANEL_ORDER}, got {quadrature_n}")
    omega = math.pi / T
    J = _loop_integral(E, M, omega, T, quadrature_n, 1.0)
    iota_up = _loop_integral(E, M, omega, T, quadrature_n, SpinPolarization.Up.e_alpha)
    iota_down = _loop_integral(E, M, omega, T, quadrature_n, SpinPolarization.Down.e_alpha)
    return ActionResult(J=J, iota=iota_up, iota_up=iota_up, iota_down=iota_down, closed_form=E * 2 * T)


def piecewise_action(params: ParticleParams, quadrature_n: int = 10_000) -> float:
    """``M * integral(Xdot^2)`` over ``2T`` along the piecewise trajectory; a diagnostic.

    Differs from the oscillator value ``E * 2T``; the exact ratio is
    ``3 - 8/pi``.
    """
    sc = derive_scales(params)
    v0, T = params.v0, sc.T

    def integrand(t):
        return sc.M * (v0 * (1 - np.abs(np.sin(math.pi * t / T)))) ** 2

    return quadrature.integrate(integrand, 0, T, quadrature_n) + quadrature.integrate(integrand, T, 2 * T, quadrature_n)


@dataclass(frozen=True)
class Quantization:
    lambda_check: float
    nu_check: float
    E: float
    J: float
    p0: float

    def __iter__(self):
        return iter((self.lambda_check, self.nu_check))


def quantize_relations(M: float, v0: float, h: float) -> Quantization:
    """Set the action per period to ``h``: ``lambda = h/(M v0)`` and ``nu = E/h``."""
    if not (M > 0 and v0 > 0 and h > 0):
        raise DomainError("M, v0 and h must be positive")
    E = 0.5 * M * v0**2
    return Quantization(lambda_check=h / (M * v0), nu_check=E / h, E=E, J=h, p0=M * v0)


def quantize(params: ParticleParams) -> Quantization:
    return quantize_relations(derive_scales(params).M, params.v0, params.h)


def derive_table(params: ParticleParams, quadrature_n: int = 10_000) -> list[tuple[str, float, str]]:
    """Rows ``(name, value, relation)`` for the main derived quantities."""
    sc = derive_scales(params)
    E = sc.kinetic_energy
    act = action_over_period(E, sc.T, quadrature_n, M=sc.M)
    return [
        ("lambda", sc.lambda_, "de Broglie relation lambda = h/(M v0)"),
        ("T", sc.T, "collision period T = lambda/v0"),
        ("omega", sc.omega, "cyclic frequency omega = pi/T"),
        ("nu", sc.nu, "frequency nu = 1/(2T) = E/h"),
        ("Lambda", sc.Lambda, "cloud amplitude Lambda = lambda c/v0"),
        ("J", act.J, "action over 2T, J = E*2T"),
        ("iota", act.iota, "intrinsic action over 2T, polarization independent"),
        ("E", E, "oscillator energy E = M v0^2/2"),
    ]
