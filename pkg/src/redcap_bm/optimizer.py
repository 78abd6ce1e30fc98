"""Minimal antenna count meeting every UE's SNR constraint, per trial."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .array import gain_at_offset
from .channel import channel_gain, db_to_linear, fading_array, linear_to_db
from .mobility import initial_offset, mobility_offset, total_offset
from .scenario import build_codebook
from .timing import BurstConfig, beam_management_time


@dataclass(frozen=True)
class TrialOutcome:
    feasible: bool
    n_star: int | None
    margins_db: tuple[float, ...]
    misdetected: float
    n_peak: int


class _Trial:
    """Per-trial geometry and channel, with the N-independent parts cached."""

    def __init__(self, ues, fadings, config):
        if len(ues) != len(fadings):
            raise ValueError("need one fading draw per UE")
        self.config = config
        self.d = np.array([u.d for u in ues])
        self.phi = np.array([u.phi for u in ues])
        self.speed = np.array([u.speed for u in ues])
        d3d = np.array([u.d3d for u in ues])
        self.d_motion = d3d if config.mobility_distance == "3d" else self.d
        self.base = channel_gain(self.d, d3d, fading_array(fadings), config)
        self.p_t = float(db_to_linear(config.tx_power_dbm))
        self.tau = float(db_to_linear(config.snr_threshold_db))

    def gains(self, n, cfg):
        cb = build_codebook(n)
        t_bm = beam_management_time(cb.size, cfg)
        theta = total_offset(initial_offset(self.phi, cb), mobility_offset(self.speed, t_bm, self.d_motion))
        return gain_at_offset(n, theta, self.config.gain_exponent)

    def snrs(self, n, cfg):
        return self.p_t * self.base * self.gains(n, cfg)

    def n_peak(self, cfg):
        means = [np.mean(self.gains(n, cfg)) for n in cfg.candidates]
        return cfg.candidates[int(np.argmax(means))]

    def admissible(self, cfg):
        if not self.config.cap_at_gain_peak:
            return list(cfg.candidates)
        cap = self.n_peak(cfg)
        return [n for n in cfg.candidates if n <= cap]


def evaluate_candidate(n, ues, fadings, config, cfg: BurstConfig) -> np.ndarray:
    """Linear received SNR (transmit power included) of every UE at ``n`` antennas."""
    return _Trial(ues, fadings, config).snrs(n, cfg)


def gain_peak_antennas(ues, fadings, config, cfg: BurstConfig) -> int:
    """Antenna count maximizing the UE-averaged array gain; ties go to the smaller count."""
    return _Trial(ues, fadings, config).n_peak(cfg)


def _misdetection(trial, cfg, admissible, n_peak):
    rule = trial.config.misdetection_rule
    if rule == "at-peak":
        return float(np.mean(trial.snrs(n_peak, cfg) < trial.tau))
    if rule == "trial":
        # the whole trial counts as one miss when any UE is lost at every N
        return float(all(np.any(trial.snrs(n, cfg) < trial.tau) for n in admissible))
    return min(float(np.mean(trial.snrs(n, cfg) < trial.tau)) for n in admissible)


def misdetection_fraction(ues, fadings, config, cfg: BurstConfig) -> float:
    trial = _Trial(ues, fadings, config)
    n_peak = trial.n_peak(cfg)
    return _misdetection(trial, cfg, trial.admissible(cfg), n_peak)


def solve_trial(ues, fadings, config, cfg: BurstConfig) -> TrialOutcome:
    """Scan antenna counts upward and stop at the first one serving every UE.

    Sweep energy grows strictly with the antenna count, so the first
    feasible count is the energy minimizer.
    """
    trial = _Trial(ues, fadings, config)
    n_peak = trial.n_peak(cfg)
    admissible = trial.admissible(cfg)
    for n in admissible:
        s = trial.snrs(n, cfg)
        if np.all(s >= trial.tau):
            margins = tuple(float(m) for m in linear_to_db(s / trial.tau))
            missed = 0.0
            if config.misdetection_rule == "at-peak":
                missed = _misdetection(trial, cfg, admissible, n_peak)
            return TrialOutcome(True, n, margins, missed, n_peak)
    return TrialOutcome(False, None, (), _misdetection(trial, cfg, admissible, n_peak), n_peak)
