"""Energy-aware SSB beam-sweep simulator for RedCap UEs in an indoor factory."""

from .array import array_gain, gain_at_offset
from .energy import PowerModel, energy_per_time, sweep_energy, ue_power
from .rng import RandomStream
from .scenario import (
    Codebook,
    ConfigError,
    SystemConfig,
    UEState,
    build_codebook,
    sample_deployment,
    sweep_size,
)
from .timing import BurstConfig, SweepTiming, beam_management_time, last_burst_duration

__version__ = "0.1.0"

__all__ = [
    "BurstConfig",
    "Codebook",
    "ConfigError",
    "PowerModel",
    "RandomStream",
    "SweepTiming",
    "SystemConfig",
    "UEState",
    "array_gain",
    "beam_management_time",
    "build_codebook",
    "energy_per_time",
    "gain_at_offset",
    "last_burst_duration",
    "sample_deployment",
    "sweep_energy",
    "sweep_size",
    "ue_power",
]
