"""Command-line entry point: ``redcap-bm <subcommand> [options]``.

Every subcommand writes a CSV whose leading ``#`` lines carry the seed and
the fully resolved configuration, so a run can be repeated from its output.
Progress goes to stderr; stdout only carries the short machine-readable
summary of ``recommend``.
"""
from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
import time
from dataclasses import dataclass, field, replace

from . import __version__
from .configfile import ParsedConfig, emit_config, parse_config, parse_overrides, resolved_items
from .scenario import ConfigError
from .simulation import (
    InfeasibleRecommendation,
    draw_batch,
    feasibility_region,
    offset_and_gain_curves,
    recommend_config,
    sweep,
)
from .timing import N_SS_VALUES, T_SS_VALUES_MS, BurstConfig

log = logging.getLogger("redcap_bm")

SEED_ENV = "REDCAP_BM_SEED"
DEFAULT_TRIALS = 10_000
DEFAULT_REGION_SPEEDS = (0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 10.0, 15.0, 20.0, 25.0)

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_RUNTIME = 0, 2, 3, 4

STATS_COLUMNS = (
    "n_ss", "t_ss_ms", "v_mps", "p_t_dbm", "tau_db", "trials", "n_feasible",
    "mean_n_star", "n_star_ci95", "misdetection_probability", "misdetection_ci95",
    "infeasible_fraction", "infeasible_ci95", "mean_sweep_energy_j", "energy_per_time_w",
)


@dataclass
class RunManifest:
    """What was run, with which inputs, and where the results went."""

    subcommand: str
    parsed: ParsedConfig
    seed: int
    trials: int
    threads: int = 1
    output: str = ""
    outputs: list[str] = field(default_factory=list)
    elapsed_s: float = 0.0
    version: str = __version__

    def header_lines(self):
        yield f"# seed={self.seed}"
        yield f"# trials={self.trials}"
        yield f"# subcommand={self.subcommand}"
        yield f"# version={self.version}"
        for name, value in resolved_items(self.parsed):
            yield f"# {name} = {value}"


def _cell(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_csv(path, manifest: RunManifest, columns, rows):
    with open(path, "w", newline="") as fh:
        for line in manifest.header_lines():
            fh.write(line + "\n")
        w = csv.writer(fh)
        w.writerow(columns)
        for row in rows:
            w.writerow([_cell(x) for x in row])
    manifest.outputs.append(str(path))
    log.info("wrote %s", path)


def read_csv(path):
    """Rows of a CSV written by this tool as dicts of strings, ``#`` lines skipped."""
    with open(path, newline="") as fh:
        return list(csv.DictReader(line for line in fh if not line.startswith("#")))


def _axis(values, default):
    return tuple(values) if values is not None else tuple(default)


def _stats_row(n_ss, t, v, pt, tau, st):
    return (n_ss, t, float(v), float(pt), float(tau), st.trials, st.n_feasible, st.mean_n_star,
            st.n_star_ci, st.misdetection_probability, st.misdetection_ci, st.infeasible_fraction,
            st.infeasible_ci, st.mean_energy, st.energy_per_time)


def cmd_simulate(m: RunManifest, out):
    cfg, ax = m.parsed.config, m.parsed.axes
    rows = sweep(cfg, [_axis(ax.n_ss, (8,))[0]], [_axis(ax.t_ss, (20,))[0]], [cfg.speed],
                 [cfg.tx_power_dbm], [cfg.snr_threshold_db], m.trials, m.seed, candidates=ax.n_gnb)
    write_csv(out, m, STATS_COLUMNS, (_stats_row(*r) for r in rows))
    return EXIT_OK


def cmd_sweep(m: RunManifest, out):
    cfg, ax = m.parsed.config, m.parsed.axes
    rows = sweep(cfg, _axis(ax.n_ss, N_SS_VALUES), _axis(ax.t_ss, T_SS_VALUES_MS),
                 _axis(ax.v, (cfg.speed,)), _axis(ax.p_t, (cfg.tx_power_dbm,)),
                 _axis(ax.tau, (cfg.snr_threshold_db,)), m.trials, m.seed, m.threads, ax.n_gnb)
    write_csv(out, m, STATS_COLUMNS, (_stats_row(*r) for r in rows))
    return EXIT_OK


def cmd_curves(m: RunManifest, out):
    cfg, ax = m.parsed.config, m.parsed.axes
    batch = draw_batch(cfg, m.trials, m.seed)
    rows = []
    for n_ss in _axis(ax.n_ss, (8,)):
        for t in _axis(ax.t_ss, (20,)):
            burst = BurstConfig(n_ss, t, cfg.numerology, _axis(ax.n_gnb, BurstConfig().candidates))
            for v in _axis(ax.v, (cfg.speed,)):
                c = offset_and_gain_curves(cfg, burst, v, m.trials, batch=batch)
                for n, th, g in zip(c.candidates, c.mean_theta, c.mean_gain):
                    rows.append((n_ss, t, float(v), n, float(th), float(g), c.n_peak))
    cols = ("n_ss", "t_ss_ms", "v_mps", "n_gnb", "mean_offset_rad", "mean_gain", "n_peak")
    write_csv(out, m, cols, rows)
    return EXIT_OK


def _region(m: RunManifest, v_grid, n_ss_list):
    cfg, ax = m.parsed.config, m.parsed.axes
    eps = 1e-3 if ax.epsilon is None else ax.epsilon
    entries = []
    for pt in _axis(ax.p_t, (cfg.tx_power_dbm,)):
        entries += feasibility_region(cfg, n_ss_list, _axis(ax.tau, (cfg.snr_threshold_db,)), pt,
                                      v_grid, _axis(ax.t_ss, T_SS_VALUES_MS), m.trials, m.seed,
                                      epsilon=eps, threads=m.threads, candidates=ax.n_gnb)
    return entries


def cmd_region(m: RunManifest, out):
    ax = m.parsed.axes
    entries = _region(m, _axis(ax.v, DEFAULT_REGION_SPEEDS), _axis(ax.n_ss, N_SS_VALUES))
    write_csv(out, m, ("n_ss", "tau_db", "p_t_dbm", "bound_m", "monotone"),
              ((e.n_ss, float(e.tau_db), float(e.p_t_dbm), e.bound, e.monotone) for e in entries))
    stem, ext = os.path.splitext(str(out))
    grid = ((e.n_ss, float(e.tau_db), float(e.p_t_dbm), g.v, g.t_ss_ms, g.product,
             g.infeasible_fraction, g.feasible) for e in entries for g in e.evidence)
    write_csv(f"{stem}_grid{ext or '.csv'}", m,
              ("n_ss", "tau_db", "p_t_dbm", "v_mps", "t_ss_ms", "product_m", "infeasible_fraction",
               "feasible"), grid)
    return EXIT_OK


def cmd_recommend(m: RunManifest, out):
    cfg, ax = m.parsed.config, m.parsed.axes
    v = cfg.speed
    rec = None
    # smallest N_SS first; stop at the first one with a feasible period
    for n_ss in sorted(_axis(ax.n_ss, N_SS_VALUES)):
        entries = _region(replace(m, parsed=replace(
            m.parsed, axes=replace(ax, p_t=(cfg.tx_power_dbm,), tau=(cfg.snr_threshold_db,)))), [v], [n_ss])
        try:
            rec = recommend_config(entries, v, cfg, _axis(ax.t_ss, T_SS_VALUES_MS))
            break
        except InfeasibleRecommendation:
            continue
    cols = ("n_ss", "t_ss_ms", "v_mps", "p_t_dbm", "tau_db", "energy_per_time_w")
    if rec is None:
        write_csv(out, m, cols, [])
        print("infeasible")
        log.error("no feasible (N_SS, T_SS) at v=%g m/s", v)
        return EXIT_INFEASIBLE
    write_csv(out, m, cols, [(rec.n_ss, rec.t_ss_ms, float(v), float(cfg.tx_power_dbm),
                              float(cfg.snr_threshold_db), rec.energy_per_time)])
    print(f"{rec.n_ss},{rec.t_ss_ms}")
    return EXIT_OK


COMMANDS = {
    "simulate": (cmd_simulate, "Monte Carlo statistics for one burst configuration"),
    "curves": (cmd_curves, "average offset and array gain versus antenna count"),
    "sweep": (cmd_sweep, "statistics over the N_ss x T_ss x v x P_T x tau grid"),
    "region": (cmd_region, "largest feasible v*T_ss per N_ss, tau and P_T"),
    "recommend": (cmd_recommend, "lowest-energy burst configuration for the given speed"),
}


def build_parser():
    p = argparse.ArgumentParser(prog="redcap-bm", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        s = sub.add_parser(name, help=help_text)
        s.add_argument("-c", "--config", help="key = value configuration file")
        s.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                       help="override a configuration key (repeatable)")
        s.add_argument("-o", "--output", help=f"CSV path (default: {name}.csv)")
        s.add_argument("--seed", type=int, help=f"master seed (default: config, then ${SEED_ENV}, then 0)")
        s.add_argument("--trials", type=int, help=f"Monte Carlo trials (default: {DEFAULT_TRIALS})")
        s.add_argument("--threads", type=int, default=1, help="worker threads")
        s.add_argument("--emit-config", action="store_true", help="print the resolved config and exit")
        s.add_argument("-q", "--quiet", action="store_true", help="suppress progress output")
    return p


def resolve(args) -> RunManifest:
    """Merge defaults, environment, config file and command-line options."""
    base = ParsedConfig()
    env_seed = os.environ.get(SEED_ENV)
    if env_seed is not None:
        try:
            base = replace(base, config=replace(base.config, seed=int(env_seed)))
        except ValueError:
            raise ConfigError(f"{SEED_ENV}: not an integer: {env_seed!r}") from None
    if args.config:
        with open(args.config) as fh:
            base = parse_config(fh.read(), base)
    parsed = parse_overrides(args.overrides, base)
    if args.seed is not None:
        parsed = replace(parsed, config=replace(parsed.config, seed=args.seed))
    trials = args.trials if args.trials is not None else parsed.axes.trials or DEFAULT_TRIALS
    if trials < 1:
        raise ConfigError("trials: must be >= 1")
    if args.threads < 1:
        raise ConfigError("threads: must be >= 1")
    output = args.output or f"{args.command}.csv"
    return RunManifest(args.command, parsed, parsed.config.seed, trials, args.threads, output)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, stream=sys.stderr,
                        format="%(levelname)s %(message)s")
    try:
        manifest = resolve(args)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.emit_config:
        sys.stdout.write(emit_config(manifest.parsed))
        return EXIT_OK
    fn, _ = COMMANDS[args.command]
    start = time.perf_counter()
    try:
        code = fn(manifest, manifest.output)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - surface any failure as a runtime exit code
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    manifest.elapsed_s = time.perf_counter() - start
    log.info("%s finished in %.2f s", args.command, manifest.elapsed_s)
    return code


if __name__ == "__main__":
    sys.exit(main())
