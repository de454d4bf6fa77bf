"""Harmonic lattice of the singular region around the particle.

Nearest-neighbour chain/lattice with Lagrangian
``sum m zeta_dot^2/2 - sum gamma (zeta_n - zeta_{n-a})^2 / 2``. The closed
dispersion used for the coherent mode is::

    omega^2(k) = (4/m) sum_{b,b'} gamma_{bb'} sin^2(k_{b'} a)

Direct diagonalisation of the dynamical matrix yields
``(4 gamma/m) sin^2(k a / 2)`` instead, i.e. the closed form evaluated at
``k/2``. :func:`oracle_comparison` applies that mapping explicitly and
reports the residual.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import quadrature
from .errors import DomainError, UsageError

MAX_CHAIN_SITES = 4096
# eigenvalues below this fraction of the largest are roundoff around the zero mode
_ZERO_MODE_RTOL = 1e-12


@dataclass(frozen=True)
class LatticeSpec:
    N: int
    m: float
    gamma: np.ndarray
    a: float
    dimension: int = 1

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise DomainError(f"site count must be an integer >= 2, got {self.N!r}")
        if not self.m > 0:
            raise DomainError(f"site mass must be positive, got {self.m!r}")
        if not self.a > 0:
            raise DomainError(f"lattice constant must be positive, got {self.a!r}")
        if self.dimension not in (1, 3):
            raise DomainError(f"dimension must be 1 or 3, got {self.dimension!r}")
        g = np.atleast_2d(np.asarray(self.gamma, dtype=float))
        if g.shape != (self.dimension, self.dimension):
            raise DomainError(f"gamma must be {self.dimension}x{self.dimension}, got shape {g.shape}")
        if not np.allclose(g, g.T, rtol=1e-12, atol=0):
            raise DomainError("elasticity tensor must be symmetric")
        if np.min(np.linalg.eigvalsh(g)) < -1e-12 * max(1.0, np.max(np.abs(g))):
            raise DomainError("elasticity tensor must be positive semi-definite")
        if self.dimension == 3 and np.any(g - np.diag(np.diag(g))):
            raise DomainError("only diagonal elasticity tensors are supported in 3D")
        g.setflags(write=False)
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "N", int(self.N))

    @classmethod
    def chain(cls, N: int, gamma: float = 1.0, m: float = 1.0, a: float = 1.0) -> "LatticeSpec":
        return cls(N=N, m=m, gamma=np.array([[gamma]]), a=a, dimension=1)

    @property
    def total_mass(self) -> float:
        return self.N * self.m

    @property
    def gamma_sum(self) -> float:
        return float(np.sum(self.gamma))

    def allowed_k(self) -> np.ndarray:
        """Wave numbers ``2 pi j / (N a)``, ``j = 0..N-1``, of the periodic chain."""
        return 2.0 * math.pi * np.arange(self.N) / (self.N * self.a)


@dataclass(frozen=True)
class ModeState:
    k: float
    A_k: complex
    P_k: complex
    omega_k: float

    def __post_init__(self):
        if self.omega_k < 0:
            raise DomainError("mode frequency must be non-negative")


def dispersion(k, spec: LatticeSpec):
    """Coherent-mode frequency ``sqrt((4/m) sum gamma_{bb'} sin^2(k_{b'} a))``.

    ``k`` is a scalar (1D) or a 3-vector, or an array of those.
    """
    k = np.asarray(k, dtype=float)
    if spec.dimension == 1:
        s2 = np.sin(k * spec.a) ** 2
        w2 = 4.0 / spec.m * spec.gamma[0, 0] * s2
    else:
        if k.shape[-1] != 3:
            raise DomainError("3D dispersion needs k vectors of length 3")
        s2 = np.sin(k * spec.a) ** 2
        # sum over b of gamma_{b b'} weights each direction b'
        w2 = 4.0 / spec.m * (s2 @ spec.gamma.sum(axis=0))
    return np.sqrt(np.maximum(w2, 0.0))


@dataclass(frozen=True)
class LongwaveReport:
    c_formula: float
    c_slope: float
    k_probe: float

    @property
    def ratio(self) -> float:
        return self.c_slope / self.c_formula


def longwave_speed(spec: LatticeSpec, k_probe: float = 1e-6) -> LongwaveReport:
    """Sound speed ``a sqrt(N sum(gamma) / m_total)`` and the small-k slope of :func:`dispersion`.

    The two differ by a factor 2 for a chain (``2 a sqrt(gamma/m)`` vs
    ``a sqrt(gamma/m)``); both are reported.
    """
    c_formula = spec.a * math.sqrt(spec.N * spec.gamma_sum / spec.total_mass)
    if spec.dimension == 1:
        k = k_probe
    else:
        k = np.array([k_probe, 0.0, 0.0])
    c_slope = float(dispersion(k, spec)) / k_probe
    return LongwaveReport(c_formula=c_formula, c_slope=c_slope, k_probe=k_probe)


def dynamical_matrix(spec: LatticeSpec) -> np.ndarray:
    """Mass-normalised second derivative of the chain potential, periodic closure."""
    if spec.dimension != 1:
        raise UsageError("the dynamical-matrix oracle covers 1D chains only")
    N = spec.N
    if N > MAX_CHAIN_SITES:
        raise UsageError(f"chain too long for dense diagonalisation ({N} > {MAX_CHAIN_SITES})")
    g = spec.gamma[0, 0]
    D = np.zeros((N, N))
    # each bond (n-1, n) contributes gamma (zeta_n - zeta_{n-1})^2 / 2
    for n in range(N):
        left = (n - 1) % N
        D[n, n] += g
        D[left, left] += g
        D[n, left] -= g
        D[left, n] -= g
    return D / spec.m


def chain_eigenmodes(spec: LatticeSpec) -> np.ndarray:
    """Sorted normal-mode frequencies of the periodic chain by dense diagonalisation."""
    D = dynamical_matrix(spec)
    try:
        w2 = np.linalg.eigvalsh(D)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError(f"diagonalisation failed: {exc}") from exc
    w2[np.abs(w2) <= _ZERO_MODE_RTOL * np.max(np.abs(w2))] = 0.0
    if np.any(w2 < 0):
        raise ArithmeticError("dynamical matrix has a negative eigenvalue")
    return np.sort(np.sqrt(w2))


@dataclass(frozen=True)
class OracleComparison:
    numeric: np.ndarray
    formula_at_k: np.ndarray
    formula_mapped: np.ndarray
    max_rel_mismatch_mapped: float
    max_rel_mismatch_unmapped: float
    mapping: str = "numeric(k) = dispersion(k/2)"


def _rel_mismatch(a, b) -> float:
    scale = np.where(np.abs(b) > 0, np.abs(b), 1.0)
    return float(np.max(np.abs(a - b) / scale))


def oracle_comparison(spec: LatticeSpec) -> OracleComparison:
    numeric = chain_eigenmodes(spec)
    k = spec.allowed_k()
    at_k = np.sort(dispersion(k, spec))
    mapped = np.sort(dispersion(k / 2.0, spec))
    return OracleComparison(
        numeric=numeric,
        formula_at_k=at_k,
        formula_mapped=mapped,
        max_rel_mismatch_mapped=_rel_mismatch(numeric, mapped),
        max_rel_mismatch_unmapped=_rel_mismatch(numeric, at_k),
    )


def coherent_substitution(spec: LatticeSpec, k: float, A: complex = 1.0):
    """Kinetic and potential coefficients after inserting ``zeta_n = A exp(i k n a)``.

    Returns ``(mass_coeff, stiffness_coeff)`` with ``L = mass |A_dot|^2/2 -
    stiffness |A|^2/2``, summed site by site over the periodic chain.
    """
    if spec.dimension != 1:
        raise UsageError("coherent substitution is implemented for chains")
    n = np.arange(spec.N)
    zeta = A * np.exp(1j * k * n * spec.a)
    bonds = zeta - np.roll(zeta, 1)
    mass = spec.total_mass
    stiffness = spec.gamma[0, 0] * float(np.sum(np.abs(bonds) ** 2)) / abs(A) ** 2
    return mass, stiffness


def mode_count(spec: LatticeSpec, route: str) -> int:
    """Number of independent collective amplitudes.

    ``standard``: one per allowed k (and branch); ``coherent``: a single
    amplitude ``A_k`` shared by every site.
    """
    if route == "standard":
        return spec.N * spec.dimension
    if route == "coherent":
        return 1
    raise UsageError(f"unknown route {route!r}; use 'standard' or 'coherent'")


def coherent_mode_energy(mode: ModeState, spec: LatticeSpec) -> float:
    """``|P|^2/(2 m_total) + m_total omega^2 |A|^2 / 2``."""
    ms = spec.total_mass
    return abs(mode.P_k) ** 2 / (2 * ms) + ms * mode.omega_k**2 * abs(mode.A_k) ** 2 / 2


def harmonic_orbit(A0: float, omega: float, mass: float, t):
    """``A = A0 cos(w t)``, ``P = -mass A0 w sin(w t)``."""
    t = np.asarray(t, float)
    return A0 * np.cos(omega * t), -mass * A0 * omega * np.sin(omega * t)


@dataclass(frozen=True)
class ModeQuantization:
    J: float
    J_quadrature: float
    E_check: float
    quantized: bool

    @property
    def quadrature_rel_error(self) -> float:
        return abs(self.J_quadrature - self.J) / self.J if self.J else abs(self.J_quadrature)


def quantize_mode(E_k: float, omega_k: float, hbar: float, mass: float = 1.0,
                  quadrature_n: int = 4096) -> ModeQuantization:
    """Action per period ``J = E/(omega/2pi)`` and the quantized energy ``hbar omega``.

    ``J`` is also integrated as ``closed-loop integral of P dA`` along the
    harmonic orbit with energy ``E_k``; ``mass`` drops out.
    """
    if E_k < 0:
        raise DomainError("mode energy must be non-negative")
    if not omega_k > 0:
        raise DomainError("mode frequency must be positive")
    J = E_k / (omega_k / (2 * math.pi))
    period = 2 * math.pi / omega_k
    A0 = math.sqrt(2 * E_k / (mass * omega_k**2))

    def integrand(t):
        _, P = harmonic_orbit(A0, omega_k, mass, t)
        A_dot = -A0 * omega_k * np.sin(omega_k * t)
        return P * A_dot

    half = period / 2
    J_quad = (quadrature.integrate(integrand, 0.0, half, quadrature_n)
              + quadrature.integrate(integrand, half, period, quadrature_n))
    E_check = hbar * omega_k
    return ModeQuantization(
        J=J, J_quadrature=J_quad, E_check=E_check,
        quantized=math.isclose(J, 2 * math.pi * hbar, rel_tol=4 * np.finfo(float).eps),
    )


def dispersion_table(spec: LatticeSpec):
    """Rows ``(k, omega_formula, omega_numeric)`` over the allowed wave numbers.

    ``omega_numeric`` is the dynamical-matrix frequency of the mode with wave
    number ``k``, i.e. ``2 sqrt(gamma/m) |sin(k a/2)|`` from the eigenvalues.
    """
    k = spec.allowed_k()
    D = dynamical_matrix(spec)
    n = np.arange(spec.N)
    rows = []
    for kj in k:
        # Rayleigh quotient of the plane wave gives the eigenvalue belonging to kj
        v = np.exp(1j * kj * n * spec.a)
        w2 = float(np.real(np.vdot(v, D @ v) / np.vdot(v, v)))
        rows.append((float(kj), float(dispersion(kj, spec)), math.sqrt(max(w2, 0.0))))
    return rows
