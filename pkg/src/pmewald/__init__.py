"""FFT-accelerated Ewald summation with 0 to 3 periodic directions."""

from .core import (
    ConfigurationError,
    ParticleSystem,
    Periodicity,
    SEParams,
    SingularConfigurationError,
    energy,
    generate_random_system,
    load_particles,
    relative_rms_error,
    save_particles,
    total_potential,
)
from .params import auto_params
from .realspace import real_space_sum, self_term
from .sekspace import se_kspace

__all__ = [
    "ConfigurationError",
    "ParticleSystem",
    "Periodicity",
    "SEParams",
    "SingularConfigurationError",
    "auto_params",
    "energy",
    "generate_random_system",
    "load_particles",
    "real_space_sum",
    "relative_rms_error",
    "save_particles",
    "se_kspace",
    "self_term",
    "total_potential",
]
