"""Initial, motion-induced and total angular offsets at sweep completion."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import Codebook, build_codebook
from .timing import BurstConfig, beam_management_time

TWO_PI = 2 * np.pi


@dataclass(frozen=True)
class OffsetBreakdown:
    initial: float
    motion: float
    total: float


def initial_offset(phi, codebook: Codebook):
    """Signed offset from each azimuth to its nearest boresight.

    Positive when the UE sits counterclockwise of the boresight. Distances
    wrap around 2*pi; ties go to the lower-index boresight.
    """
    phi = np.asarray(phi, dtype=float)
    width, size = codebook.beamwidth, codebook.size
    lo = np.minimum(np.floor(phi / width), size - 1)
    below = phi - lo * width
    # the boresight after ``lo``; past the last one it is boresight 0 at 2*pi
    wraps = lo + 1 >= size
    above = phi - np.where(wraps, TWO_PI, (lo + 1) * width)
    pick_above = np.where(wraps, np.abs(above) <= np.abs(below), np.abs(above) < np.abs(below))
    out = np.where(pick_above, above, below)
    return out if out.ndim else float(out)


def mobility_offset(v, t_bm, d_k):
    d_k = np.asarray(d_k, dtype=float)
    if np.any(d_k <= 0):
        raise ValueError("d_k must be > 0")
    out = np.asarray(v, dtype=float) * t_bm / d_k
    return out if out.ndim else float(out)


def total_offset(theta_i, theta_v):
    out = np.abs(np.asarray(theta_v, dtype=float) + theta_i)
    return out if out.ndim else float(out)


def offset_breakdown(ue, n_gnb: int, cfg: BurstConfig) -> OffsetBreakdown:
    cb = build_codebook(n_gnb)
    t_bm = beam_management_time(cb.size, cfg)
    th_i = initial_offset(ue.phi, cb)
    th_v = mobility_offset(ue.speed, t_bm, ue.d)
    return OffsetBreakdown(th_i, th_v, total_offset(th_i, th_v))
