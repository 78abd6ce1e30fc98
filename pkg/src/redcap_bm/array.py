"""Uniform linear array gain toward a UE offset from the beam boresight."""
from __future__ import annotations

import numpy as np

_SERIES_BELOW = 1e-8


def array_gain(n: int, theta, exponent: int = 1):
    """Array gain magnitude ``|sin(n*u) / sin(u)|`` with ``u = pi/2 * sin(theta)``.

    Peaks at ``n`` on boresight. Where ``sin(u)`` vanishes the ratio is
    replaced by its series expansion, which covers every removable
    singularity and not only ``theta = 0``. ``exponent=2`` squares the
    result (field-gain reading).
    """
    theta = np.asarray(theta, dtype=float)
    u = 0.5 * np.pi * np.sin(theta)
    den = np.sin(u)
    small = np.abs(den) < _SERIES_BELOW
    safe = np.where(small, 1.0, den)
    g = np.abs(np.sin(n * u) / safe)
    if np.any(small):
        eps = u - np.pi * np.round(u / np.pi)
        series = n * (1.0 - (n * n - 1.0) * eps * eps / 6.0)
        g = np.where(small, np.abs(series), g)
    g = np.minimum(g, n)
    if exponent != 1:
        g = g**exponent
    return g if g.ndim else float(g)


def wrap_angle(theta):
    """Wrap angles into (-pi, pi]."""
    theta = np.asarray(theta, dtype=float)
    w = np.pi - np.mod(np.pi - theta, 2 * np.pi)
    return w if w.ndim else float(w)


def gain_at_offset(n: int, theta_total, exponent: int = 1):
    return array_gain(n, wrap_angle(theta_total), exponent)
