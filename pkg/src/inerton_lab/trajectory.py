"""Closed-form trajectories of the particle, its inertons and the inerton cloud.

All evaluators accept scalars or numpy arrays of times and return arrays of
the same shape (0-d arrays for scalar input). The particle moves along one
axis; the cloud displacement is the scalar transverse component.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import DerivedScales
from .errors import DomainError

# relative snapping tolerance for floor(t/T) at collision instants
PERIOD_SNAP_RTOL = 1e-12


class SpinPolarization(enum.Enum):
    """Phase index of the intrinsic pulsation: convex forward (Up) or backward (Down)."""

    Up = "up"
    Down = "down"

    @property
    def e_alpha(self) -> int:
        return 1 if self is SpinPolarization.Up else -1

    @classmethod
    def parse(cls, text: str) -> "SpinPolarization":
        key = str(text).strip().lower()
        for pol in cls:
            if pol.value == key or pol.name.lower() == key:
                return pol
        if key in ("+1", "1", "+"):
            return cls.Up
        if key in ("-1", "-"):
            return cls.Down
        raise DomainError(f"unknown polarization {text!r} (use 'up' or 'down')")


Up = SpinPolarization.Up
Down = SpinPolarization.Down


@dataclass(frozen=True)
class ArcScales:
    """Minimal set of scales the closed forms need: speed, period, light speed, amplitudes.

    :class:`~inerton_lab.core.DerivedScales` satisfies the same interface; this
    type covers the r-th inerton, whose period and speed are reduced.
    """

    v0: float
    T: float
    c: float

    @property
    def lambda_(self) -> float:
        return self.v0 * self.T

    @property
    def Lambda(self) -> float:
        return self.c * self.T

    @property
    def mean_speed(self) -> float:
        return self.v0 * (1.0 - 2.0 / math.pi)


def period_index(t, T: float):
    """``floor(t/T)`` with collision instants snapped to the nearest integer.

    Times within ``PERIOD_SNAP_RTOL`` (relative) of ``n*T`` are assigned to the
    period starting at ``n*T``.
    """
    ratio = np.asarray(t, dtype=float) / T
    nearest = np.rint(ratio)
    snap = np.abs(ratio - nearest) <= PERIOD_SNAP_RTOL * np.maximum(1.0, np.abs(ratio))
    return np.where(snap, nearest, np.floor(ratio)).astype(np.int64)


def _check_time(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        raise DomainError("time must be finite and non-negative")
    return t


def particle_state(t, scales: DerivedScales):
    """Position and speed of the particle at proper time ``t``.

    The speed drops from ``v0`` to zero and recovers within each collision
    period ``T``; the position is the continuous integral of that speed.
    """
    t = _check_time(t)
    v0, T = scales.v0, scales.T
    n = period_index(t, T)
    phase = math.pi * t / T
    sign = np.where(n % 2 == 0, 1.0, -1.0)
    Xdot = v0 * (1.0 - np.abs(np.sin(phase)))
    X = v0 * t + (v0 * T / math.pi) * (sign * np.cos(phase) - (1.0 + 2.0 * n))
    return X, Xdot


def intrinsic_state(t, pol: SpinPolarization, scales: DerivedScales):
    X, Xdot = particle_state(t, scales)
    e = pol.e_alpha
    return e * X, e * Xdot


def cloud_state(t, scales: DerivedScales):
    """Transverse displacement ``q`` and velocity ``qdot`` of the inerton cloud.

    ``q`` is continuous; ``qdot`` is right-continuous and jumps from ``-c``
    to ``+c`` at every collision ``t = nT`` as the cloud is re-emitted.
    """
    t = _check_time(t)
    c, T, Lam = scales.c, scales.T, scales.Lambda
    n = period_index(t, T)
    phase = math.pi * t / T
    sign = np.where(n % 2 == 0, 1.0, -1.0)
    q = (Lam / math.pi) * np.abs(np.sin(phase))
    qdot = sign * c * np.cos(phase)
    return q, qdot


def oscillation_component(t, scales: DerivedScales):
    """The cosine part of the particle position, ``X - v0 t + (lambda/pi)(1 + 2n)``.

    Its amplitude is ``lambda/pi``, the same as the Hamilton-Jacobi oscillator
    amplitude ``sqrt(2E/(M omega^2))``.
    """
    X, _ = particle_state(t, scales)
    n = period_index(t, scales.T)
    return X - scales.v0 * np.asarray(t, float) + (scales.lambda_ / math.pi) * (1.0 + 2.0 * n)


def proper_time(length, scales: DerivedScales):
    """Convert path length to proper time using the mean speed, ``t = l / v_bar``."""
    return np.asarray(length, dtype=float) / scales.mean_speed


@dataclass(frozen=True)
class InertonIndex:
    """Kinematic constants of the r-th inerton emitted in one collision period."""

    r: int
    N: int
    v0r: float
    Tr: float
    lambda_r: float
    Lambda_r: float

    @classmethod
    def from_scales(cls, r: int, scales: DerivedScales) -> "InertonIndex":
        N = scales.params.N
        if int(r) != r or not 0 <= r <= N:
            raise DomainError(f"inerton index must be an integer in [0, {N}], got {r!r}")
        r = int(r)
        v0r = scales.v0 * (1.0 - math.sin(math.pi * r / (2 * N)))
        Tr = scales.T * (1.0 - r / N)
        return cls(r=r, N=N, v0r=v0r, Tr=Tr, lambda_r=v0r * Tr, Lambda_r=scales.c * Tr)

    @property
    def c(self) -> float:
        return self.Lambda_r / self.Tr if self.Tr > 0 else math.nan

    def arc_scales(self, c: float) -> ArcScales:
        return ArcScales(v0=self.v0r, T=self.Tr, c=c)


def inerton_family(scales: DerivedScales) -> list[InertonIndex]:
    return [InertonIndex.from_scales(r, scales) for r in range(scales.params.N + 1)]


def inerton_state(t_r, idx: InertonIndex, pol: SpinPolarization, c: float | None = None):
    """Intrinsic state of the r-th inerton: ``(Xi_r, Xidot_r, xi_r, xidot_r)``.

    Valid only on ``0 <= t_r <= Tr``. ``c`` defaults to ``Lambda_r/Tr``.
    """
    t_r = np.asarray(t_r, dtype=float)
    Tr = idx.Tr
    if Tr <= 0:
        raise DomainError("the last inerton (r = N) has zero lifetime; solution valid only within T_r")
    if np.any(t_r < 0) or np.any(t_r > Tr * (1.0 + PERIOD_SNAP_RTOL)):
        raise DomainError(f"solution valid only within T_r: t_r must lie in [0, {Tr!r}]")
    if c is None:
        c = idx.c
    e = pol.e_alpha
    phase = math.pi * t_r / Tr
    Xidot = e * idx.v0r * (1.0 - np.sin(phase))
    Xi = e * (idx.v0r * t_r + (idx.v0r * Tr / math.pi) * (np.cos(phase) - 1.0))
    xidot = e * c * np.cos(phase)
    xi = e * (idx.Lambda_r / math.pi) * np.sin(phase)
    return Xi, Xidot, xi, xidot
