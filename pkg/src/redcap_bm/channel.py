"""InF-SH link model: LoS probability, path loss, fading and the blended SNR."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import RandomStream

# InF shadow-fading standard deviations in dB (used only when shadowing is on)
SHADOW_SIGMA_LOS_DB = 4.3
SHADOW_SIGMA_NLOS_DB = 5.9


def db_to_linear(x):
    return 10.0 ** (np.asarray(x, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(x)


def los_probability(d_2d, d_c: float, r: float):
    """InF-SH LoS probability ``exp(-d / k_sub)`` with ``k_sub = -d_c / ln(1 - r)``."""
    k_sub = -d_c / np.log1p(-r)
    p = np.exp(-np.asarray(d_2d, dtype=float) / k_sub)
    return p if p.ndim else float(p)


def path_loss_db(d_3d, f_c: float, los: bool):
    """InF path loss in dB. NLoS uses the InF-SH curve, floored at the LoS value."""
    d = np.asarray(d_3d, dtype=float)
    if np.any(d < 1.0):
        raise ValueError("path loss is defined for d_3D >= 1 m")
    f_ghz = f_c / 1e9
    pl = 31.84 + 21.50 * np.log10(d) + 19.00 * np.log10(f_ghz)
    if not los:
        pl = np.maximum(pl, 32.4 + 23.0 * np.log10(d) + 20.0 * np.log10(f_ghz))
    return pl if pl.ndim else float(pl)


def noise_power_dbm(config) -> float:
    return config.noise_psd_dbm_hz + 10 * np.log10(config.bandwidth) + config.noise_figure_db


@dataclass(frozen=True)
class FadingDraw:
    """Small-scale power gains of the LoS and NLoS branches for one UE.

    The shadowing and LoS-state variates are always drawn so that switching
    those options on or off keeps the other random numbers unchanged.
    """

    los_gain: float
    nlos_gain: float
    los_shadow: float = 0.0
    nlos_shadow: float = 0.0
    los_uniform: float = 0.5

    def __post_init__(self):
        if self.los_gain < 0 or self.nlos_gain < 0:
            raise ValueError("fading gains must be >= 0")


def draw_fading(stream: RandomStream, k: int) -> np.ndarray:
    """Draw ``k`` fading records as a ``(k, 5)`` array.

    Columns: LoS gain, NLoS gain (unit-mean exponential, i.e. |CN(0,1)|^2),
    two standard normals for shadowing, one uniform for the LoS state.
    """
    out = np.empty((k, 5))
    out[:, :2] = stream.exponential((k, 2))
    out[:, 2:4] = stream.normal((k, 2))
    out[:, 4] = stream.uniform(0.0, 1.0, k)
    return out


def sample_fading(stream: RandomStream) -> FadingDraw:
    return FadingDraw(*(float(v) for v in draw_fading(stream, 1)[0]))


def sample_fadings(stream: RandomStream, k: int) -> list[FadingDraw]:
    return [FadingDraw(*(float(v) for v in row)) for row in draw_fading(stream, k)]


def fading_array(fadings) -> np.ndarray:
    return np.array(
        [[f.los_gain, f.nlos_gain, f.los_shadow, f.nlos_shadow, f.los_uniform] for f in fadings],
        dtype=float,
    ).reshape(-1, 5)


def _apply_law(h, law):
    if law == "rayleigh":
        return h
    if law == "amplitude":
        return np.sqrt(h)
    return np.ones_like(h)


def channel_gain(d, d3d, fading: np.ndarray, config):
    """Linear SNR per unit transmit power and unit gNB array gain.

    ``d`` and ``d3d`` are arrays of horizontal and 3D distances; ``fading``
    has the layout returned by :func:`draw_fading` on its last axis.
    """
    d = np.asarray(d, dtype=float)
    d3d = np.asarray(d3d, dtype=float)
    pl_los = path_loss_db(d3d, config.carrier_freq, los=True)
    pl_nlos = path_loss_db(d3d, config.carrier_freq, los=False)
    if config.shadowing:
        pl_los = pl_los + SHADOW_SIGMA_LOS_DB * fading[..., 2]
        pl_nlos = pl_nlos + SHADOW_SIGMA_NLOS_DB * fading[..., 3]
    h_los = _apply_law(fading[..., 0], config.fading) * db_to_linear(-pl_los)
    h_nlos = _apply_law(fading[..., 1], config.fading) * db_to_linear(-pl_nlos)
    p_los = los_probability(d3d if config.los_distance == "3d" else d,
                            config.clutter_size, config.clutter_density)
    if config.los_mode == "bernoulli":
        mixed = np.where(fading[..., 4] < p_los, h_los, h_nlos)
    else:
        mixed = h_los * p_los + h_nlos * (1 - p_los)
    noise_mw = db_to_linear(noise_power_dbm(config))
    return mixed * config.g_ue / noise_mw


def snr(ue, gain_gnb: float, fading: FadingDraw, config) -> float:
    """Linear SNR of one UE excluding the transmit power."""
    f = fading_array([fading])[0]
    return float(channel_gain(ue.d, ue.d3d, f, config)) * gain_gnb
