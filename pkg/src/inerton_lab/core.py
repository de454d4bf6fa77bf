"""Particle parameters and the derived length, time and frequency scales.

Everything here is a pure function of an immutable :class:`ParticleParams`.
Natural units are the default (``c = 1``, ``h = 2*pi``, ``M0 = 1``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError

TWO_PI = 2.0 * math.pi

# relative tolerance used to accept a user-supplied cloud mass as "consistent"
_M0_MATCH_RTOL = 1e-12


def lorentz_factor(v0: float, c: float) -> float:
    """Return ``1/sqrt(1 - v0^2/c^2)``; rejects ``|v0| >= c``."""
    if c <= 0:
        raise DomainError(f"speed of light must be positive, got {c!r}")
    if not abs(v0) < c:
        raise DomainError(f"superluminal input: v0={v0!r} >= c={c!r}")
    return 1.0 / math.sqrt(1.0 - (v0 / c) ** 2)


def relativistic_mass(M0: float, v0: float, c: float) -> float:
    """Relativistic mass ``M0/sqrt(1 - v0^2/c^2)``.

    >>> relativistic_mass(1.0, 0.6, 1.0)
    1.25
    """
    if not M0 > 0:
        raise DomainError(f"rest mass must be positive, got {M0!r}")
    if v0 < 0:
        raise DomainError(f"speed must be non-negative, got {v0!r}")
    return M0 * lorentz_factor(v0, c)


@dataclass(frozen=True)
class ParticleParams:
    """Rest masses, initial speed and constants of one particle + inerton cloud.

    The cloud rest mass is tied to the particle by ``m0 = M0 v0^2 / c^2``;
    this is the only value for which the particle-cloud coupling of the
    Lagrangian reproduces the ``(pi/T)(v0/c)`` coupling of the equations of
    motion. Pass ``free_m0=True`` to accept any positive ``m0`` (the result
    is then flagged as exploratory via :attr:`m0_is_free`).
    """

    M0: float = 1.0
    v0: float = 0.5
    c: float = 1.0
    h: float = TWO_PI
    N: int = 10
    m0: float | None = None
    free_m0: bool = field(default=False, repr=False)

    def __post_init__(self):
        for name in ("M0", "v0", "c", "h"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise DomainError(f"{name} must be a finite number, got {value!r}")
        if self.M0 <= 0:
            raise DomainError(f"M0 must be positive, got {self.M0!r}")
        if self.c <= 0:
            raise DomainError(f"c must be positive, got {self.c!r}")
        if self.h <= 0:
            raise DomainError(f"h must be positive, got {self.h!r}")
        if isinstance(self.N, bool) or int(self.N) != self.N or self.N < 1:
            raise DomainError(f"N must be an integer >= 1, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))
        if self.v0 >= self.c:
            raise DomainError(f"superluminal input: v0={self.v0!r} >= c={self.c!r}")
        if self.v0 <= 0:
            raise DomainError(
                f"v0 must be strictly positive (lambda and T diverge at rest), got {self.v0!r}"
            )

        tied = self.M0 * self.v0**2 / self.c**2
        if self.m0 is None:
            object.__setattr__(self, "m0", tied)
        elif self.free_m0:
            if not self.m0 > 0:
                raise DomainError(f"m0 must be positive, got {self.m0!r}")
        elif not math.isclose(self.m0, tied, rel_tol=_M0_MATCH_RTOL):
            raise DomainError(
                f"m0={self.m0!r} differs from M0*v0^2/c^2={tied!r}; "
                "pass free_m0=True for an exploratory run"
            )

    @property
    def beta(self) -> float:
        return self.v0 / self.c

    @property
    def hbar(self) -> float:
        return self.h / TWO_PI

    @property
    def m0_is_free(self) -> bool:
        return self.free_m0 and not math.isclose(
            self.m0, self.M0 * self.v0**2 / self.c**2, rel_tol=_M0_MATCH_RTOL
        )


@dataclass(frozen=True)
class DerivedScales:
    """Scales derived from :class:`ParticleParams`.

    ``lambda_`` is the de Broglie spatial period, ``T`` the time between
    collisions, ``Lambda`` the inerton cloud amplitude, and the two
    ``lambdaTilde*`` values the rest and contracted sizes of the singular
    region around the particle.
    """

    params: ParticleParams
    M: float
    m: float
    lambda_: float
    T: float
    omega: float
    nu: float
    Lambda: float
    lambdaTilde0: float
    lambdaTildeV0: float
    nuRel: float

    @property
    def v0(self) -> float:
        return self.params.v0

    @property
    def c(self) -> float:
        return self.params.c

    @property
    def mean_speed(self) -> float:
        """Mean particle speed along the trajectory, ``v0 (1 - 2/pi)``."""
        return self.params.v0 * (1.0 - 2.0 / math.pi)

    @property
    def kinetic_energy(self) -> float:
        """Initial kinetic energy ``M v0^2 / 2`` of the oscillator."""
        return 0.5 * self.M * self.params.v0**2

    def as_dict(self) -> dict[str, float]:
        return {
            "M": self.M,
            "m": self.m,
            "lambda": self.lambda_,
            "T": self.T,
            "omega": self.omega,
            "nu": self.nu,
            "Lambda": self.Lambda,
            "lambdaTilde0": self.lambdaTilde0,
            "lambdaTildeV0": self.lambdaTildeV0,
            "nuRel": self.nuRel,
        }


def derive_scales(params: ParticleParams) -> DerivedScales:
    M0, m0, v0, c, h = params.M0, params.m0, params.v0, params.c, params.h
    gamma = lorentz_factor(v0, c)
    M = M0 * gamma
    m = m0 * gamma
    lam = h / (M * v0)
    T = lam / v0
    # Compton-type length; the dimensionally consistent form h/(M0 c)
    lam_tilde0 = h / (M0 * c)
    lam_tilde_v0 = lam_tilde0 * math.sqrt(1.0 - (v0 / c) ** 2)
    p = M * v0
    nu_rel = math.sqrt(p**2 * c**2 + M0**2 * c**4) / h
    return DerivedScales(
        params=params,
        M=M,
        m=m,
        lambda_=lam,
        T=T,
        omega=math.pi / T,
        nu=1.0 / (2.0 * T),
        Lambda=lam * c / v0,
        lambdaTilde0=lam_tilde0,
        lambdaTildeV0=lam_tilde_v0,
        nuRel=nu_rel,
    )


@dataclass(frozen=True)
class SingularityBalance:
    omega_k0: float
    omega_kv0: float
    residual_rest: float
    residual_moving: float
    k0: float
    nu_rel: float
    nu_rel_residual: float


def singularity_balance(params: ParticleParams) -> SingularityBalance:
    """Energy balance of the singular region at rest and in motion.

    ``hbar*omega_k0 = M0 c^2`` at rest and ``hbar*omega_kv0 = M c^2`` in
    motion; the residuals are expected to vanish up to rounding. The
    relativistic frequency ``nu_rel`` is compared against ``omega_kv0/2pi``.
    """
    scales = derive_scales(params)
    c, hbar = params.c, params.hbar
    rest = params.M0 * c**2
    moving = scales.M * c**2
    omega_k0 = rest / hbar
    omega_kv0 = moving / hbar
    # wave number of the rest oscillator, k0 = 2 pi / lambdaTilde0, so c k0 = omega_k0
    k0 = TWO_PI / scales.lambdaTilde0
    return SingularityBalance(
        omega_k0=omega_k0,
        omega_kv0=omega_kv0,
        residual_rest=hbar * omega_k0 - rest,
        residual_moving=hbar * omega_kv0 - moving,
        k0=k0,
        nu_rel=scales.nuRel,
        nu_rel_residual=scales.nuRel - omega_kv0 / TWO_PI,
    )
