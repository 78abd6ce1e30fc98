"""SSB, burst and sweep time arithmetic for 5G NR numerologies."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

N_SS_VALUES = (8, 16, 32, 64)
T_SS_VALUES_MS = (5, 10, 20, 40, 80, 160)
NUMEROLOGIES = (0, 1, 2, 3, 4)

SYMBOL_US_AT_N0 = 71.45
SYMBOLS_PER_SSB = 4
SYMBOLS_PER_SLOT = 14  # normal cyclic prefix


def sweep_size(n_gnb: int) -> int:
    """Number of SSBs needed to sweep the full azimuth, ``ceil(pi * N)``."""
    return math.ceil(math.pi * n_gnb)


def _check_numerology(n):
    if n not in NUMEROLOGIES:
        raise ValueError(f"numerology must be one of {NUMEROLOGIES}, got {n!r}")


@dataclass(frozen=True)
class BurstConfig:
    """Beam-management knobs: SSBs per burst, burst period and numerology.

    ``t_ss_ms`` is kept in milliseconds because the allowed periods are
    integers in ms; ``t_ss`` gives seconds.
    """

    n_ss: int = 8
    t_ss_ms: int = 20
    numerology: int = 4
    candidates: tuple[int, ...] = field(default=tuple(range(2, 65)))

    def __post_init__(self):
        if self.n_ss not in N_SS_VALUES:
            raise ValueError(f"N_SS must be one of {N_SS_VALUES}, got {self.n_ss!r}")
        if self.t_ss_ms not in T_SS_VALUES_MS:
            raise ValueError(f"T_SS must be one of {T_SS_VALUES_MS} ms, got {self.t_ss_ms!r}")
        _check_numerology(self.numerology)
        cands = tuple(int(c) for c in self.candidates)
        if not cands or any(c < 2 or c > 64 for c in cands) or list(cands) != sorted(set(cands)):
            raise ValueError("candidates must be a strictly increasing subset of 2..64")
        object.__setattr__(self, "candidates", cands)

    @property
    def t_ss(self) -> float:
        return self.t_ss_ms / 1000.0


@dataclass(frozen=True)
class SweepTiming:
    t_symb: float
    t_ssb: float
    t_slot: float
    n_last: int
    t_last: float
    t_bm: float


def symbol_duration_exact(n: int) -> Fraction:
    """OFDM symbol duration in seconds as an exact rational."""
    _check_numerology(n)
    return Fraction(str(SYMBOL_US_AT_N0)) / 2**n / 10**6


def symbol_duration(n: int) -> float:
    """OFDM symbol duration in seconds."""
    return float(symbol_duration_exact(n))


def ssb_duration(n: int) -> float:
    return float(SYMBOLS_PER_SSB * symbol_duration_exact(n))


def slot_duration(n: int) -> float:
    return float(SYMBOLS_PER_SLOT * symbol_duration_exact(n))


def burst_count(s_d: int, n_ss: int) -> int:
    return -(-s_d // n_ss)


def last_burst_size(s_d: int, n_ss: int) -> int:
    """Number of SSBs sent in the final (possibly partial) burst."""
    if s_d < 1:
        raise ValueError("S_D must be >= 1")
    return s_d - n_ss * (burst_count(s_d, n_ss) - 1)


def last_burst_symbols(n_last: int) -> int:
    """Duration of the last burst in OFDM symbols, two SSBs per slot."""
    if n_last % 2 == 0:
        return n_last // 2 * SYMBOLS_PER_SLOT - 2
    return n_last // 2 * SYMBOLS_PER_SLOT + 6


def last_burst_duration(s_d: int, n_ss: int, n: int) -> float:
    return float(last_burst_symbols(last_burst_size(s_d, n_ss)) * symbol_duration_exact(n))


def beam_management_time(s_d: int, cfg: BurstConfig) -> float:
    """Delay from the first SSB to the end of a full sweep of ``s_d`` beams."""
    full = burst_count(s_d, cfg.n_ss) - 1
    return cfg.t_ss * full + last_burst_duration(s_d, cfg.n_ss, cfg.numerology)


def sweep_timing(s_d: int, cfg: BurstConfig) -> SweepTiming:
    n = cfg.numerology
    n_last = last_burst_size(s_d, cfg.n_ss)
    return SweepTiming(
        t_symb=symbol_duration(n),
        t_ssb=ssb_duration(n),
        t_slot=slot_duration(n),
        n_last=n_last,
        t_last=last_burst_duration(s_d, cfg.n_ss, n),
        t_bm=beam_management_time(s_d, cfg),
    )


def single_burst_limit(n_ss: int) -> int:
    """Largest antenna count whose sweep fits in one burst."""
    limit = 1
    for n in range(2, 65):
        if sweep_size(n) <= n_ss:
            limit = n
    return limit
