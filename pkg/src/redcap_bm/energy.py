"""UE receive-side power and beam-sweep energy."""
from __future__ import annotations

from dataclasses import dataclass

from .timing import BurstConfig, ssb_duration, sweep_size


@dataclass(frozen=True)
class PowerModel:
    """RF front-end power draw of a RedCap UE, all components in watts."""

    p_lna: float = 20e-3
    p_ps: float = 30e-3
    p_mixer: float = 19e-3
    p_lo: float = 5e-3
    p_lpf: float = 14e-3
    p_bb: float = 5e-3
    p_adc: float = 200e-3
    p_combiner: float = 0.0
    n_ue: int = 2

    def __post_init__(self):
        for name in ("p_lna", "p_ps", "p_mixer", "p_lo", "p_lpf", "p_bb", "p_adc", "p_combiner"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if int(self.n_ue) != self.n_ue or self.n_ue < 1:
            raise ValueError("n_ue must be a positive integer")

    @property
    def p_rf(self) -> float:
        return self.p_mixer + self.p_lo + self.p_lpf + self.p_bb


def ue_power(pm: PowerModel) -> float:
    """Total receive power of the UE in watts."""
    return pm.n_ue * (pm.p_lna + pm.p_ps) + pm.p_rf + pm.p_combiner + 2 * pm.p_adc


def sweep_energy(n_gnb: int, pm: PowerModel, numerology: int) -> float:
    """Energy in joules spent by the UE listening to one full sweep."""
    return sweep_size(n_gnb) * ue_power(pm) * ssb_duration(numerology)


def energy_per_time(pm: PowerModel, cfg: BurstConfig) -> float:
    """Average SSB reception power in watts for a burst configuration."""
    return ue_power(pm) * ssb_duration(cfg.numerology) * cfg.n_ss / cfg.t_ss
