"""Intrinsic degree of freedom in a uniform magnetic field.

The generalized intrinsic momenta obey ``[Pi_1, Pi_2] = i e hbar B``, so the
intrinsic energy operator reduces to ``(e hbar B / 2M)(P^2 + Q^2)`` in the
dimensionless pair ``Q, P = i d/dQ``. The ground level of that oscillator is
the spin energy ``e hbar B / 2M``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, eig_banded, eigh_tridiagonal

from .errors import DomainError, UsageError
from .trajectory import SpinPolarization

# central-difference weights for -d^2/dQ^2 (offsets 0, 1, 2), times 1/dQ^2
_STENCILS = {
    2: (2.0, -1.0),
    4: (30.0 / 12.0, -16.0 / 12.0, 1.0 / 12.0),
}


@dataclass(frozen=True)
class FieldConfig:
    B: float
    e: float = 1.0
    hbar: float = 1.0
    M: float = 1.0

    def __post_init__(self):
        if self.B < 0:
            raise DomainError(f"field induction must be non-negative, got {self.B!r}")
        if not (self.e > 0 and self.hbar > 0 and self.M > 0):
            raise DomainError("e, hbar and M must be positive")

    @property
    def normalization(self) -> float:
        """``C = sqrt(e hbar B)``, the scale of the dimensionless pair ``Q, P``."""
        return math.sqrt(self.e * self.hbar * self.B)

    @property
    def level_spacing(self) -> float:
        """Prefactor ``e hbar B / 2M`` of ``P^2 + Q^2``."""
        return self.e * self.hbar * self.B / (2.0 * self.M)


@dataclass(frozen=True)
class OscillatorSolution:
    epsilon: float
    chi: np.ndarray
    grid: np.ndarray
    n_points: int
    Q_max: float
    dimensionless_eigenvalue: float
    order: int

    @property
    def dQ(self) -> float:
        return float(self.grid[1] - self.grid[0])

    def norm(self) -> float:
        return float(np.sum(np.abs(self.chi) ** 2) * self.dQ)


def ground_state_gaussian(Q):
    return math.pi ** -0.25 * np.exp(-np.asarray(Q, float) ** 2 / 2)


def oscillator_levels(n_points: int = 2001, Q_max: float = 10.0, n_levels: int = 1, order: int = 4):
    """Lowest ``n_levels`` eigenpairs of the discretised ``P^2 + Q^2``.

    Uses central differences of the given ``order`` (2 or 4) on a uniform grid
    with zero Dirichlet data just outside ``[-Q_max, Q_max]``.
    """
    if n_points < 201 or n_points % 2 == 0:
        raise UsageError(f"n_points must be odd and >= 201, got {n_points}")
    if Q_max < 8:
        raise UsageError(f"Q_max must be >= 8, got {Q_max}")
    if order not in _STENCILS:
        raise UsageError(f"stencil order must be one of {sorted(_STENCILS)}, got {order}")
    Q = np.linspace(-Q_max, Q_max, n_points)
    h2 = (Q[1] - Q[0]) ** 2
    w = _STENCILS[order]
    try:
        if order == 2:
            vals, vecs = eigh_tridiagonal(
                w[0] / h2 + Q**2, np.full(n_points - 1, w[1] / h2),
                select="i", select_range=(0, n_levels - 1),
            )
        else:
            bands = np.zeros((len(w), n_points))
            bands[0] = w[0] / h2 + Q**2
            for k in range(1, len(w)):
                bands[k, :-k] = w[k] / h2
            vals, vecs = eig_banded(bands, lower=True, select="i", select_range=(0, n_levels - 1))
    except (LinAlgError, ValueError) as exc:
        raise ArithmeticError(f"eigen-solve failed: {exc}") from exc
    dQ = Q[1] - Q[0]
    vecs = vecs / np.sqrt(np.sum(vecs**2, axis=0) * dQ)
    # fix the sign so the largest-magnitude entry of each eigenvector is positive
    pivot = vecs[np.argmax(np.abs(vecs), axis=0), np.arange(vecs.shape[1])]
    vecs = vecs * np.sign(pivot)
    return Q, vals, vecs


def landau_ground_state(cfg: FieldConfig, n_points: int = 2001, Q_max: float = 10.0,
                        order: int = 4) -> OscillatorSolution:
    if not cfg.B > 0:
        raise DomainError("the ground state needs a positive field")
    Q, vals, vecs = oscillator_levels(n_points, Q_max, 1, order)
    lam = float(vals[0])
    return OscillatorSolution(
        epsilon=cfg.level_spacing * lam,
        chi=vecs[:, 0],
        grid=Q,
        n_points=n_points,
        Q_max=Q_max,
        dimensionless_eigenvalue=lam,
        order=order,
    )


def gaussian_distance(sol: OscillatorSolution) -> float:
    """Discrete L2 distance between the eigenvector and ``pi^(-1/4) exp(-Q^2/2)``."""
    diff = sol.chi - ground_state_gaussian(sol.grid)
    return float(np.sqrt(np.sum(diff**2) * sol.dQ))


def convergence_order(n_points_seq=(201, 401, 801, 1601), Q_max: float = 10.0, order: int = 2):
    """Least-squares slope of ``log|lambda_0 - 1|`` against ``log dQ``."""
    dq, err = [], []
    for n in n_points_seq:
        Q, vals, _ = oscillator_levels(n, Q_max, 1, order)
        dq.append(Q[1] - Q[0])
        err.append(abs(vals[0] - 1.0))
    slope = np.polyfit(np.log(dq), np.log(err), 1)[0]
    return float(slope), np.array(dq), np.array(err)


@dataclass(frozen=True)
class SpinShift:
    epsilon_signed: float
    S3: float

    def __iter__(self):
        return iter((self.epsilon_signed, self.S3))


def spin_energy_shift(cfg: FieldConfig, pol: SpinPolarization) -> SpinShift:
    """Spin projection ``S3 = e_alpha hbar/2`` and the energy ``(e B/M) S3``."""
    S3 = pol.e_alpha * cfg.hbar / 2.0
    return SpinShift(epsilon_signed=cfg.e * cfg.B / cfg.M * S3, S3=S3)


def renormalize_spectrum(E: float, cfg: FieldConfig, pol: SpinPolarization) -> float:
    """Shift a spatial energy level by the spin energy, ``E + (e B/M) S3``."""
    if E < 0:
        raise DomainError(f"energy must be non-negative, got {E!r}")
    return E + spin_energy_shift(cfg, pol).epsilon_signed


def field_table(B_values, e: float = 1.0, hbar: float = 1.0, M: float = 1.0,
                n_points: int = 2001, Q_max: float = 10.0):
    """Rows ``(B, epsilon_numeric, epsilon_closed, eps_up, eps_down)``."""
    rows = []
    for B in B_values:
        cfg = FieldConfig(B=B, e=e, hbar=hbar, M=M)
        eps = landau_ground_state(cfg, n_points, Q_max).epsilon if B > 0 else 0.0
        rows.append((
            B, eps, cfg.level_spacing,
            spin_energy_shift(cfg, SpinPolarization.Up).epsilon_signed,
            spin_energy_shift(cfg, SpinPolarization.Down).epsilon_signed,
        ))
    return rows
