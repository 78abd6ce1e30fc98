"""Scenario configuration, UE deployment and the gNB boresight codebook."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .energy import PowerModel
from .rng import RandomStream
from .timing import NUMEROLOGIES, sweep_size

MAX_RESAMPLES = 10**6

PLACEMENTS = ("uniform-area", "uniform-annulus")
LOS_MODES = ("blend", "bernoulli")
LOS_DISTANCES = ("2d", "3d")
FADING_LAWS = ("rayleigh", "amplitude", "none")
MISDETECTION_RULES = ("best", "at-peak", "trial")


class ConfigError(ValueError):
    """Invalid or degenerate scenario configuration."""


@dataclass(frozen=True)
class SystemConfig:
    """Scenario, radio and power parameters.

    Lengths in metres, frequencies in Hz, powers in dBm, gains and
    thresholds in dB. Defaults reproduce the InF-SH RedCap setup
    (20 x 20 x 25 m hall, 28 GHz, 50 MHz, 18 dBm).
    """

    length: float = 20.0
    width: float = 20.0
    height: float = 25.0
    h_gnb: float = 25.0
    h_ue: float = 1.5
    clutter_size: float = 10.0
    clutter_height: float = 5.0
    clutter_density: float = 0.2
    num_ues: int = 50
    carrier_freq: float = 28e9
    bandwidth: float = 50e6
    tx_power_dbm: float = 18.0
    snr_threshold_db: float = 7.0
    noise_psd_dbm_hz: float = -174.0
    noise_figure_db: float = 9.0
    numerology: int = 4
    g_ue_db: float = 0.0
    power: PowerModel = field(default_factory=PowerModel)
    seed: int = 0
    speed: float = 1.0
    # modelling switches for the under-specified parts of the model
    placement: str = "uniform-area"
    d_min: float = 1.0
    shadowing: bool = False
    los_mode: str = "blend"
    los_distance: str = "2d"
    mobility_distance: str = "2d"
    fading: str = "rayleigh"
    gain_exponent: int = 1
    cap_at_gain_peak: bool = True
    misdetection_rule: str = "best"

    def __post_init__(self):
        for name in ("length", "width", "height", "h_gnb", "h_ue", "clutter_size", "clutter_height"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0")
        if not 0 < self.clutter_density < 1:
            raise ConfigError("clutter_density must be in (0, 1)")
        if not self.h_ue < self.clutter_height < self.h_gnb:
            raise ConfigError("heights must satisfy h_ue < clutter_height < h_gnb")
        if self.h_gnb > self.height:
            raise ConfigError("h_gnb must not exceed the hall height")
        if int(self.num_ues) != self.num_ues or self.num_ues < 1:
            raise ConfigError("num_ues must be a positive integer")
        if not self.bandwidth > 0 or not self.carrier_freq > 0:
            raise ConfigError("bandwidth and carrier_freq must be > 0")
        if self.numerology not in NUMEROLOGIES:
            raise ConfigError(f"numerology must be one of {NUMEROLOGIES}")
        if self.speed < 0:
            raise ConfigError("speed must be >= 0")
        if not self.d_min > 0:
            raise ConfigError("d_min must be > 0")
        if self.gain_exponent not in (1, 2):
            raise ConfigError("gain_exponent must be 1 or 2")
        for name, allowed in (
            ("placement", PLACEMENTS),
            ("los_mode", LOS_MODES),
            ("los_distance", LOS_DISTANCES),
            ("mobility_distance", LOS_DISTANCES),
            ("fading", FADING_LAWS),
            ("misdetection_rule", MISDETECTION_RULES),
        ):
            if getattr(self, name) not in allowed:
                raise ConfigError(f"{name} must be one of {allowed}")

    @property
    def height_gap(self) -> float:
        return self.h_gnb - self.h_ue

    @property
    def g_ue(self) -> float:
        return 10 ** (self.g_ue_db / 10)

    @property
    def max_radius(self) -> float:
        return math.hypot(self.length / 2, self.width / 2)


@dataclass(frozen=True)
class UEState:
    d: float
    phi: float
    speed: float
    d3d: float

    def __post_init__(self):
        if not self.d > 0:
            raise ValueError("d must be > 0")
        if not 0 <= self.phi < 2 * math.pi:
            raise ValueError("phi must lie in [0, 2*pi)")


@dataclass(frozen=True, eq=False)
class Codebook:
    n_gnb: int
    beamwidth: float
    angles: np.ndarray

    @property
    def size(self) -> int:
        return len(self.angles)


def build_codebook(n_gnb: int) -> Codebook:
    if int(n_gnb) != n_gnb or not 2 <= n_gnb <= 64:
        raise ValueError(f"N_gNB must be an integer in [2, 64], got {n_gnb!r}")
    n_gnb = int(n_gnb)
    width = 2.0 / n_gnb
    angles = np.arange(sweep_size(n_gnb)) * width
    angles.setflags(write=False)
    return Codebook(n_gnb, width, angles)


def draw_positions(config: SystemConfig, stream: RandomStream) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``num_ues`` horizontal positions as (distance, azimuth) arrays."""
    k = config.num_ues
    if config.placement == "uniform-annulus":
        r_max = min(config.length, config.width) / 2
        if config.d_min >= r_max:
            raise ConfigError("d_min leaves no room for UEs inside the hall")
        d = np.sqrt(stream.uniform(config.d_min**2, r_max**2, k))
        phi = stream.uniform(0.0, 2 * np.pi, k)
        return d, phi

    hx, hy = config.length / 2, config.width / 2
    x = stream.uniform(-hx, hx, k)
    y = stream.uniform(-hy, hy, k)
    d = np.hypot(x, y)
    bad = np.flatnonzero(d < config.d_min)
    redraws = 0
    while bad.size:
        redraws += bad.size
        if redraws > MAX_RESAMPLES:
            raise ConfigError("UE placement rejected too often; d_min is degenerate for this hall")
        x[bad] = stream.uniform(-hx, hx, bad.size)
        y[bad] = stream.uniform(-hy, hy, bad.size)
        d[bad] = np.hypot(x[bad], y[bad])
        bad = bad[d[bad] < config.d_min]
    phi = np.mod(np.arctan2(y, x), 2 * np.pi)
    # mod can round up to exactly 2*pi for tiny negative angles
    phi[phi >= 2 * np.pi] = 0.0
    return d, phi


def sample_deployment(config: SystemConfig, stream: RandomStream) -> list[UEState]:
    d, phi = draw_positions(config, stream)
    d3d = np.sqrt(config.height_gap**2 + d**2)
    return [UEState(float(a), float(b), config.speed, float(c)) for a, b, c in zip(d, phi, d3d)]
