"""Particle / inerton-cloud mechanics with numerical cross-checks."""
from .core import DerivedScales, ParticleParams, derive_scales, relativistic_mass, singularity_balance
from .errors import (
    ConfigError,
    DomainError,
    InertonLabError,
    IntegrationError,
    NumericalBlowupError,
    UsageError,
)
from .trajectory import SpinPolarization

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DerivedScales",
    "DomainError",
    "InertonLabError",
    "IntegrationError",
    "NumericalBlowupError",
    "ParticleParams",
    "SpinPolarization",
    "UsageError",
    "derive_scales",
    "relativistic_mass",
    "singularity_balance",
]
