"""Monte Carlo engine, aggregate statistics and feasibility regions.

All trials of a run draw from streams derived from ``(seed, trial index)``,
and every grid cell of a sweep reuses the same trials (common random
numbers), so cell-to-cell differences come from the parameters only.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .array import gain_at_offset
from .channel import channel_gain, db_to_linear, draw_fading, sample_fadings
from .energy import energy_per_time, sweep_energy
from .mobility import initial_offset, total_offset
from .rng import RandomStream
from .scenario import SystemConfig, UEState, build_codebook, draw_positions
from .timing import T_SS_VALUES_MS, BurstConfig, beam_management_time

log = logging.getLogger(__name__)

Z95 = 1.959963984540054
MAX_SPEED = 25.0


class InfeasibleRecommendation(Exception):
    """No burst configuration keeps every UE detectable at the requested speed."""


@dataclass(eq=False)
class TrialBatch:
    """Deployment and fading draws for a block of trials, shape ``(trials, K)``."""

    seed: int
    d: np.ndarray
    phi: np.ndarray
    d3d: np.ndarray
    fading: np.ndarray

    @property
    def trials(self) -> int:
        return self.d.shape[0]


def sample_trial(config: SystemConfig, seed: int, index: int):
    """UEs and fading draws of one trial; identical to row ``index`` of a batch."""
    stream = RandomStream.for_trial(seed, index)
    d, phi = draw_positions(config, stream)
    d3d = np.sqrt(config.height_gap**2 + d**2)
    ues = [UEState(float(a), float(b), config.speed, float(c)) for a, b, c in zip(d, phi, d3d)]
    return ues, sample_fadings(stream, config.num_ues)


def draw_batch(config: SystemConfig, trials: int, seed: int) -> TrialBatch:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    k = config.num_ues
    d = np.empty((trials, k))
    phi = np.empty((trials, k))
    fading = np.empty((trials, k, 5))
    for i in range(trials):
        stream = RandomStream.for_trial(seed, i)
        d[i], phi[i] = draw_positions(config, stream)
        fading[i] = draw_fading(stream, k)
    d3d = np.sqrt(config.height_gap**2 + d**2)
    return TrialBatch(seed, d, phi, d3d, fading)


@dataclass(eq=False)
class CellScan:
    """Per-antenna-count results of one (burst config, speed) cell.

    Arrays are indexed ``[candidate, trial]``; ``fails`` has a trailing
    axis over the requested (P_T, tau) pairs.
    """

    candidates: tuple[int, ...]
    mean_gain: np.ndarray
    mean_theta: np.ndarray
    fails: np.ndarray
    num_ues: int


def scan_cell(batch: TrialBatch, config: SystemConfig, cfg: BurstConfig, speed: float,
              pairs, base=None) -> CellScan:
    if base is None:
        base = channel_gain(batch.d, batch.d3d, batch.fading, config)
    pt_lin = {pt: float(db_to_linear(pt)) for pt, _ in pairs}
    scaled = {pt: lin * base for pt, lin in pt_lin.items()}
    taus = [float(db_to_linear(tau)) for _, tau in pairs]
    n_c, n_t = len(cfg.candidates), batch.trials
    d_motion = batch.d3d if config.mobility_distance == "3d" else batch.d
    mean_gain = np.empty((n_c, n_t))
    mean_theta = np.empty((n_c, n_t))
    fails = np.empty((n_c, n_t, len(pairs)), dtype=np.int32)
    for i, n in enumerate(cfg.candidates):
        cb = build_codebook(n)
        t_bm = beam_management_time(cb.size, cfg)
        theta = total_offset(initial_offset(batch.phi, cb), speed * t_bm / d_motion)
        g = gain_at_offset(n, theta, config.gain_exponent)
        mean_gain[i] = g.mean(axis=1)
        mean_theta[i] = theta.mean(axis=1)
        for j, (pt, _) in enumerate(pairs):
            fails[i, :, j] = np.count_nonzero(scaled[pt] * g < taus[j], axis=1)
    return CellScan(cfg.candidates, mean_gain, mean_theta, fails, batch.d.shape[1])


@dataclass(eq=False)
class MCStats:
    trials: int
    n_feasible: int
    mean_n_star: float | None
    n_star_ci: float | None
    misdetection_probability: float
    misdetection_ci: float
    infeasible_fraction: float
    infeasible_ci: float
    candidates: tuple[int, ...]
    mean_theta: np.ndarray
    mean_gain: np.ndarray
    mean_energy: float | None
    energy_per_time: float
    n_star: np.ndarray
    misdetected: np.ndarray
    n_peak: np.ndarray


def _mean_ci(x):
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        return None, None
    if x.size == 1:
        return float(x[0]), 0.0
    return float(x.mean()), float(Z95 * x.std(ddof=1) / math.sqrt(x.size))


def solve_scan(scan: CellScan, config: SystemConfig, cfg: BurstConfig, pair_index: int) -> MCStats:
    """Vectorized upward scan over antenna counts for every trial of a cell."""
    cands = np.asarray(scan.candidates)
    fails = scan.fails[:, :, pair_index]
    n_t = fails.shape[1]
    cols = np.arange(n_t)
    peak_idx = np.argmax(scan.mean_gain, axis=0)
    if config.cap_at_gain_peak:
        admissible = np.arange(len(cands))[:, None] <= peak_idx[None, :]
    else:
        admissible = np.ones_like(fails, dtype=bool)
    ok = (fails == 0) & admissible
    feasible = ok.any(axis=0)
    n_star = np.where(feasible, cands[np.argmax(ok, axis=0)], 0)
    if config.misdetection_rule == "at-peak":
        missed = fails[peak_idx, cols] / scan.num_ues
    elif config.misdetection_rule == "trial":
        missed = (~feasible).astype(float)
    else:
        missed = np.where(admissible, fails, np.iinfo(np.int32).max).min(axis=0) / scan.num_ues

    served = n_star[feasible]
    mean_n, ci_n = _mean_ci(served)
    mis, mis_ci = _mean_ci(missed)
    p_inf = 1.0 - feasible.mean()
    energy = None
    if served.size:
        table = {int(n): sweep_energy(int(n), config.power, cfg.numerology) for n in np.unique(served)}
        energy = float(np.mean([table[int(n)] for n in served]))
    return MCStats(
        trials=n_t,
        n_feasible=int(feasible.sum()),
        mean_n_star=mean_n,
        n_star_ci=ci_n,
        misdetection_probability=mis,
        misdetection_ci=mis_ci,
        infeasible_fraction=float(p_inf),
        infeasible_ci=float(Z95 * math.sqrt(p_inf * (1 - p_inf) / n_t)),
        candidates=scan.candidates,
        mean_theta=scan.mean_theta.mean(axis=1),
        mean_gain=scan.mean_gain.mean(axis=1),
        mean_energy=energy,
        energy_per_time=energy_per_time(config.power, cfg),
        n_star=n_star,
        misdetected=missed,
        n_peak=cands[peak_idx],
    )


def run_monte_carlo(config: SystemConfig, cfg: BurstConfig, trials: int, seed: int | None = None,
                    batch: TrialBatch | None = None) -> MCStats:
    seed = config.seed if seed is None else seed
    if batch is None:
        batch = draw_batch(config, trials, seed)
    pair = [(config.tx_power_dbm, config.snr_threshold_db)]
    return solve_scan(scan_cell(batch, config, cfg, config.speed, pair), config, cfg, 0)


@dataclass(eq=False)
class Curves:
    candidates: tuple[int, ...]
    mean_theta: np.ndarray
    mean_gain: np.ndarray
    n_peak: int


def offset_and_gain_curves(config: SystemConfig, cfg: BurstConfig, v: float, trials: int,
                           seed: int | None = None, batch: TrialBatch | None = None) -> Curves:
    """Average offset and array gain versus antenna count at speed ``v``."""
    seed = config.seed if seed is None else seed
    if batch is None:
        batch = draw_batch(config, trials, seed)
    scan = scan_cell(batch, config, cfg, v, [])
    gain = scan.mean_gain.mean(axis=1)
    return Curves(cfg.candidates, scan.mean_theta.mean(axis=1), gain,
                  cfg.candidates[int(np.argmax(gain))])


def _burst(n_ss, t_ms, config, candidates):
    if candidates is None:
        return BurstConfig(n_ss, t_ms, config.numerology)
    return BurstConfig(n_ss, t_ms, config.numerology, tuple(candidates))


def _map(fn, items, threads):
    if threads and threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def sweep(config: SystemConfig, n_ss_list, t_ss_list, v_list, p_t_list, tau_list, trials: int,
          seed: int | None = None, threads: int = 1, candidates=None):
    """Evaluate every (N_SS, T_SS, v) cell for all (P_T, tau) pairs on shared trials.

    Returns a list of ``(n_ss, t_ss_ms, v, p_t, tau, MCStats)`` in a fixed order.
    """
    seed = config.seed if seed is None else seed
    batch = draw_batch(config, trials, seed)
    base = channel_gain(batch.d, batch.d3d, batch.fading, config)
    pairs = [(float(pt), float(tau)) for pt in p_t_list for tau in tau_list]
    cells = [(n_ss, t, v) for n_ss in n_ss_list for t in t_ss_list for v in v_list]

    def run(cell):
        n_ss, t, v = cell
        cfg = _burst(n_ss, t, config, candidates)
        log.info("cell N_SS=%d T_SS=%d ms v=%g", n_ss, t, v)
        scan = scan_cell(batch, config, cfg, v, pairs, base)
        return [(n_ss, t, v, pt, tau, solve_scan(scan, config, cfg, j)) for j, (pt, tau) in enumerate(pairs)]

    return [row for rows in _map(run, cells, threads) for row in rows]


@dataclass(frozen=True)
class GridPoint:
    v: float
    t_ss_ms: int
    product: float
    infeasible_fraction: float
    feasible: bool


@dataclass(frozen=True)
class FeasibilityEntry:
    n_ss: int
    tau_db: float
    p_t_dbm: float
    bound: float | None
    evidence: tuple[GridPoint, ...]
    monotone: bool


def _product_key(v, t_ms):
    return round(v * t_ms / 1000.0, 9)


def region_bound(evidence) -> tuple[float | None, bool]:
    """Largest tested product whose smaller products all pass, plus a monotonicity flag."""
    groups = {}
    for p in evidence:
        groups.setdefault(_product_key(p.v, p.t_ss_ms), []).append(p.feasible)
    bound = None
    for product in sorted(groups):
        flags = groups[product]
        if any(flags):
            bound = product
        if not all(flags):
            break
    seen_fail, monotone = False, True
    for product in sorted(groups):
        if seen_fail and any(groups[product]):
            monotone = False
        seen_fail = seen_fail or not all(groups[product])
    return bound, monotone


def feasibility_region(config: SystemConfig, n_ss_list, tau_list, p_t: float, v_grid, t_ss_grid,
                       trials: int, seed: int | None = None, epsilon: float = 1e-3,
                       lookahead: int = 2, threads: int = 1, candidates=None) -> list[FeasibilityEntry]:
    """Largest supported ``v * T_SS`` per (N_SS, tau) at transmit power ``p_t``.

    Cells are visited in increasing product order. A cell passes when its
    infeasible-trial fraction is at most ``epsilon``. Evaluation for an
    N_SS stops ``lookahead`` cells past the first failure of every tau;
    those extra cells only serve the monotonicity check.
    """
    v_grid = [float(v) for v in v_grid]
    if not v_grid or not t_ss_grid or not tau_list or not n_ss_list:
        raise ValueError("grids must be non-empty")
    if any(v <= 0 or v > MAX_SPEED for v in v_grid):
        raise ValueError(f"speeds must lie in (0, {MAX_SPEED}] m/s")
    seed = config.seed if seed is None else seed
    batch = draw_batch(config, trials, seed)
    base = channel_gain(batch.d, batch.d3d, batch.fading, config)
    pairs = [(float(p_t), float(tau)) for tau in tau_list]
    cells = sorted(((v, int(t)) for v in v_grid for t in t_ss_grid), key=lambda c: (_product_key(*c), c[0]))

    def for_n_ss(n_ss):
        evidence = [[] for _ in pairs]
        first_fail = [None] * len(pairs)
        for idx, (v, t) in enumerate(cells):
            if all(f is not None and idx > f + lookahead for f in first_fail):
                break
            cfg = _burst(n_ss, t, config, candidates)
            scan = scan_cell(batch, config, cfg, v, pairs, base)
            for j in range(len(pairs)):
                st = solve_scan(scan, config, cfg, j)
                ok = st.infeasible_fraction <= epsilon
                evidence[j].append(GridPoint(v, t, v * t / 1000.0, st.infeasible_fraction, ok))
                if not ok and first_fail[j] is None:
                    first_fail[j] = idx
            log.info("region N_SS=%d v=%g T_SS=%d: %s", n_ss, v, t,
                     " ".join(f"{e[-1].infeasible_fraction:.4f}" for e in evidence))
        out = []
        for (pt, tau), ev in zip(pairs, evidence):
            bound, monotone = region_bound(ev)
            out.append(FeasibilityEntry(n_ss, tau, pt, bound, tuple(ev), monotone))
        return out

    return [e for entries in _map(for_n_ss, list(n_ss_list), threads) for e in entries]


@dataclass(frozen=True)
class Recommendation:
    n_ss: int
    t_ss_ms: int
    energy_per_time: float


def recommend_config(region, v: float, config: SystemConfig | None = None,
                     t_ss_grid=T_SS_VALUES_MS) -> Recommendation:
    """Smallest N_SS that admits a feasible period at speed ``v``, with its longest period.

    ``region`` holds the entries of a single (tau, P_T) pair.
    """
    config = config or SystemConfig()
    for entry in sorted(region, key=lambda e: e.n_ss):
        if entry.bound is None:
            continue
        ok = [t for t in t_ss_grid if _product_key(v, t) <= entry.bound + 1e-12]
        if ok:
            t = max(ok)
            cfg = BurstConfig(entry.n_ss, t, config.numerology)
            return Recommendation(entry.n_ss, t, energy_per_time(config.power, cfg))
    raise InfeasibleRecommendation(f"no feasible (N_SS, T_SS) at v={v} m/s")


def with_overrides(config: SystemConfig, **kw) -> SystemConfig:
    return replace(config, **kw)
