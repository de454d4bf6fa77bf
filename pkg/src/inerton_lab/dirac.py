"""Linearized total Hamiltonian: the 4x4 Dirac matrix, its spectrum, frequency identities."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import TWO_PI, ParticleParams, derive_scales, singularity_balance
from .errors import DomainError

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
_I2 = np.eye(2, dtype=complex)
_Z2 = np.zeros((2, 2), dtype=complex)

# Dirac-Pauli representation
BETA = np.block([[_I2, _Z2], [_Z2, -_I2]])
ALPHA = tuple(np.block([[_Z2, s], [s, _Z2]]) for s in PAULI)


@dataclass(frozen=True)
class DiracMatrix:
    entries: np.ndarray
    p: np.ndarray
    M0: float
    c: float

    @property
    def energy(self) -> float:
        """``sqrt(c^2 |p|^2 + M0^2 c^4)``."""
        return math.sqrt(self.c**2 * float(self.p @ self.p) + self.M0**2 * self.c**4)

    def square_residual(self) -> float:
        """Largest entry of ``H^2 - E^2 I``, relative to ``E^2``."""
        H = self.entries
        E2 = self.energy**2
        return float(np.max(np.abs(H @ H - E2 * np.eye(4)))) / E2

    def hermiticity_residual(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))


def dirac_hamiltonian(p, M0: float, c: float = 1.0) -> DiracMatrix:
    """``c (alpha . p) + beta M0 c^2``."""
    if M0 < 0:
        raise DomainError(f"rest mass must be non-negative, got {M0!r}")
    p = np.asarray(p, dtype=float).reshape(3)
    H = c * sum(pi * a for pi, a in zip(p, ALPHA)) + M0 * c**2 * BETA
    return DiracMatrix(entries=H, p=p, M0=float(M0), c=float(c))


def dirac_spectrum(H: DiracMatrix) -> np.ndarray:
    """Ascending eigenvalues ``(-E, -E, +E, +E)``."""
    try:
        return np.linalg.eigvalsh(H.entries)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError(f"eigen-solve failed: {exc}") from exc


def clifford_residuals() -> dict[str, float]:
    """Largest deviation from ``{a_i, a_j} = 2 delta_ij``, ``{a_i, b} = 0``, ``b^2 = 1``."""
    I4 = np.eye(4)
    anti = max(
        float(np.max(np.abs(ALPHA[i] @ ALPHA[j] + ALPHA[j] @ ALPHA[i] - 2 * (i == j) * I4)))
        for i in range(3) for j in range(3)
    )
    mixed = max(float(np.max(np.abs(a @ BETA + BETA @ a))) for a in ALPHA)
    beta_sq = float(np.max(np.abs(BETA @ BETA - I4)))
    return {"alpha_alpha": anti, "alpha_beta": mixed, "beta_beta": beta_sq}


def particle_total_hamiltonian(p, pi, M0: float, M: float, c: float) -> float:
    """Total particle energy without inertons, ``p^2/M + pi^2/M + (M0 c)^2/M``.

    Note the kinetic terms carry no factor 1/2 in this form.
    """
    p = np.atleast_1d(np.asarray(p, float))
    pi = np.atleast_1d(np.asarray(pi, float))
    return float(p @ p / M + pi @ pi / M + (M0 * c) ** 2 / M)


def particle_total_energy_root(p, pi, M0: float, c: float) -> float:
    """``sqrt(c^2 p^2 + c^2 pi^2 + M0^2 c^4)``."""
    p = np.atleast_1d(np.asarray(p, float))
    pi = np.atleast_1d(np.asarray(pi, float))
    return math.sqrt(c**2 * (p @ p) + c**2 * (pi @ pi) + M0**2 * c**4)


@dataclass(frozen=True)
class FrequencyReport:
    nu_rel: float
    omega_kv0_over_2pi: float
    mass_energy_over_h: float
    residual: float

    @property
    def relative_residual(self) -> float:
        return abs(self.residual) / self.mass_energy_over_h


def frequency_equivalence(params: ParticleParams) -> FrequencyReport:
    sc = derive_scales(params)
    bal = singularity_balance(params)
    p = sc.M * params.v0
    c, h = params.c, params.h
    nu_rel = math.sqrt(p**2 * c**2 + params.M0**2 * c**4) / h
    mc2_h = sc.M * c**2 / h
    omega_2pi = bal.omega_kv0 / TWO_PI
    residual = max(abs(nu_rel - mc2_h), abs(nu_rel - omega_2pi), key=abs)
    return FrequencyReport(nu_rel=nu_rel, omega_kv0_over_2pi=omega_2pi, mass_energy_over_h=mc2_h,
                           residual=residual)
