"""Flat ``key = value`` configuration files.

Grammar: one assignment per line, ``#`` starts a comment, keys are
case-sensitive, list values are comma separated and integer ranges may be
written ``lo..hi``. Units are fixed per key (see ``KEYS``). Unknown keys
are rejected; missing keys fall back to the InF-SH defaults.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .scenario import (
    FADING_LAWS,
    LOS_DISTANCES,
    LOS_MODES,
    MISDETECTION_RULES,
    PLACEMENTS,
    ConfigError,
    SystemConfig,
)
from .timing import N_SS_VALUES, T_SS_VALUES_MS


class ConfigParseError(ConfigError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Key:
    target: str  # SystemConfig field, "power.<field>" or "axis.<name>"
    kind: str  # float | int | bool | str | floats | ints
    unit: str
    scale: float = 1.0  # SI value = file value * scale, or / (1/scale) below 1
    choices: tuple = ()

    def to_si(self, x):
        if self.scale >= 1:
            return x * self.scale
        return x / round(1 / self.scale)

    def from_si(self, x):
        """File-unit float whose ``to_si`` reproduces ``x`` exactly."""
        y = x / self.scale if self.scale >= 1 else x * round(1 / self.scale)
        for _ in range(8):
            if self.to_si(y) == x:
                return y
            y = math.nextafter(y, math.inf if self.to_si(y) < x else -math.inf)
        return y


KEYS = {
    "L": Key("length", "float", "m"),
    "W": Key("width", "float", "m"),
    "H": Key("height", "float", "m"),
    "h_gNB": Key("h_gnb", "float", "m"),
    "h_UE": Key("h_ue", "float", "m"),
    "d_c": Key("clutter_size", "float", "m"),
    "h_c": Key("clutter_height", "float", "m"),
    "r": Key("clutter_density", "float", "fraction"),
    "K": Key("num_ues", "int", "count"),
    "f_c": Key("carrier_freq", "float", "GHz", 1e9),
    "B": Key("bandwidth", "float", "MHz", 1e6),
    "N0": Key("noise_psd_dbm_hz", "float", "dBm/Hz"),
    "NF": Key("noise_figure_db", "float", "dB"),
    "n": Key("numerology", "int", "index"),
    "G_UE": Key("g_ue_db", "float", "dBi"),
    "seed": Key("seed", "int", "-"),
    "N_UE": Key("power.n_ue", "int", "count"),
    "P_LNA": Key("power.p_lna", "float", "mW", 1e-3),
    "P_PS": Key("power.p_ps", "float", "mW", 1e-3),
    "P_M": Key("power.p_mixer", "float", "mW", 1e-3),
    "P_LO": Key("power.p_lo", "float", "mW", 1e-3),
    "P_LPF": Key("power.p_lpf", "float", "mW", 1e-3),
    "P_BB": Key("power.p_bb", "float", "mW", 1e-3),
    "P_ADC": Key("power.p_adc", "float", "mW", 1e-3),
    "P_C": Key("power.p_combiner", "float", "mW", 1e-3),
    "placement": Key("placement", "str", "-", choices=PLACEMENTS),
    "d_min": Key("d_min", "float", "m"),
    "shadowing": Key("shadowing", "bool", "-"),
    "los_mode": Key("los_mode", "str", "-", choices=LOS_MODES),
    "los_distance": Key("los_distance", "str", "-", choices=LOS_DISTANCES),
    "mobility_distance": Key("mobility_distance", "str", "-", choices=LOS_DISTANCES),
    "fading": Key("fading", "str", "-", choices=FADING_LAWS),
    "gain_exponent": Key("gain_exponent", "int", "-", choices=(1, 2)),
    "nm_cap": Key("cap_at_gain_peak", "bool", "-"),
    "misdetection_rule": Key("misdetection_rule", "str", "-", choices=MISDETECTION_RULES),
    # sweep axes; the first value also seeds the scalar config field
    "P_T": Key("axis.p_t", "floats", "dBm"),
    "tau": Key("axis.tau", "floats", "dB"),
    "v": Key("axis.v", "floats", "m/s"),
    "N_ss": Key("axis.n_ss", "ints", "count", choices=N_SS_VALUES),
    "T_ss": Key("axis.t_ss", "ints", "ms", choices=T_SS_VALUES_MS),
    "N_gNB": Key("axis.n_gnb", "ints", "count"),
    "trials": Key("axis.trials", "int", "count"),
    "epsilon": Key("axis.epsilon", "float", "fraction"),
}

AXIS_SCALARS = {"p_t": "tx_power_dbm", "tau": "snr_threshold_db", "v": "speed"}


@dataclass(frozen=True)
class Axes:
    p_t: tuple[float, ...] | None = None
    tau: tuple[float, ...] | None = None
    v: tuple[float, ...] | None = None
    n_ss: tuple[int, ...] | None = None
    t_ss: tuple[int, ...] | None = None
    n_gnb: tuple[int, ...] | None = None
    trials: int | None = None
    epsilon: float | None = None


@dataclass(frozen=True)
class ParsedConfig:
    config: SystemConfig = field(default_factory=SystemConfig)
    axes: Axes = field(default_factory=Axes)


def _int(token):
    try:
        return int(token)
    except ValueError:
        f = float(token)
        if not f.is_integer():
            raise
        return int(f)


def _scalar(kind, token):
    if kind == "float":
        return float(token)
    if kind == "int":
        return _int(token)
    if kind == "bool":
        low = token.lower()
        if low in ("true", "yes", "on", "1"):
            return True
        if low in ("false", "no", "off", "0"):
            return False
        raise ValueError(f"not a boolean: {token!r}")
    return token


def _list(kind, raw):
    out = []
    for tok in raw.split(","):
        tok = tok.strip()
        if not tok:
            raise ValueError("empty list element")
        if kind == "ints" and ".." in tok:
            lo, hi = (_int(x) for x in tok.split(".."))
            if hi < lo:
                raise ValueError(f"empty range {tok!r}")
            out.extend(range(lo, hi + 1))
        else:
            out.append(_int(tok) if kind == "ints" else float(tok))
    return tuple(out)


def parse_value(name: str, raw: str):
    key = KEYS[name]
    value = _list(key.kind, raw) if key.kind in ("floats", "ints") else _scalar(key.kind, raw)
    return value


def _check_range(name, value):
    key = KEYS[name]
    items = value if isinstance(value, tuple) else (value,)
    if key.choices and any(x not in key.choices for x in items):
        raise ConfigError(f"{name}: value {value!r} not in {key.choices}")
    if name == "N_gNB" and (any(not 2 <= x <= 64 for x in items) or list(items) != sorted(set(items))):
        raise ConfigError(f"{name}: antenna counts must be increasing and within 2..64")
    if name == "v" and any(x < 0 for x in items):
        raise ConfigError(f"{name}: speeds must be >= 0")
    if name == "trials" and value < 1:
        raise ConfigError(f"{name}: must be >= 1")
    if name == "epsilon" and not 0 <= value < 1:
        raise ConfigError(f"{name}: must lie in [0, 1)")


def parse_assignments(pairs, base: ParsedConfig | None = None) -> ParsedConfig:
    """Apply ``(line_number, key, raw_value)`` assignments on top of ``base``."""
    base = base or ParsedConfig()
    fields, power, axes = {}, {}, {}
    for line, name, raw in pairs:
        if name not in KEYS:
            raise ConfigParseError(line, f"unknown key {name!r}")
        try:
            value = parse_value(name, raw)
        except ValueError as exc:
            raise ConfigParseError(line, f"bad value for {name!r}: {raw!r} ({exc})") from None
        _check_range(name, value)
        key = KEYS[name]
        if key.kind in ("float", "floats") and key.scale != 1.0:
            value = tuple(map(key.to_si, value)) if isinstance(value, tuple) else key.to_si(value)
        group, _, attr = key.target.rpartition(".")
        {"": fields, "power": power, "axis": axes}[group][attr] = value

    new_axes = replace(base.axes, **axes)
    for axis, attr in AXIS_SCALARS.items():
        if axis in axes:
            fields[attr] = axes[axis][0]
    try:
        pm = replace(base.config.power, **power)
        config = replace(base.config, power=pm, **fields)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return ParsedConfig(config, new_axes)


def split_lines(text: str):
    for number, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigParseError(number, f"expected 'key = value', got {body!r}")
        name, raw = (s.strip() for s in body.split("=", 1))
        if not name or not raw:
            raise ConfigParseError(number, f"expected 'key = value', got {body!r}")
        yield number, name, raw


def parse_config(text: str, base: ParsedConfig | None = None) -> ParsedConfig:
    return parse_assignments(split_lines(text), base)


def parse_overrides(items, base: ParsedConfig) -> ParsedConfig:
    """Apply ``--set key=value`` overrides; errors report the override position."""
    pairs = []
    for i, item in enumerate(items, start=1):
        if "=" not in item:
            raise ConfigParseError(i, f"override must be key=value, got {item!r}")
        name, raw = (s.strip() for s in item.split("=", 1))
        pairs.append((i, name, raw))
    return parse_assignments(pairs, base)


def _fmt(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def resolved_items(parsed: ParsedConfig):
    """Every key with its resolved value in file units, in ``KEYS`` order."""
    cfg, axes = parsed.config, parsed.axes
    for name, key in KEYS.items():
        group, _, attr = key.target.rpartition(".")
        if group == "axis":
            value = getattr(axes, attr)
            if value is None:
                if attr not in AXIS_SCALARS:
                    continue
                value = (getattr(cfg, AXIS_SCALARS[attr]),)
        elif group == "power":
            value = getattr(cfg.power, attr)
        else:
            value = getattr(cfg, attr)
        if key.scale != 1.0:
            value = tuple(map(key.from_si, value)) if isinstance(value, tuple) else key.from_si(value)
        if isinstance(value, tuple):
            value = ", ".join(_fmt(x) for x in value)
        else:
            value = _fmt(value)
        yield name, value


def emit_config(parsed: ParsedConfig) -> str:
    return "".join(f"{name} = {value}\n" for name, value in resolved_items(parsed))
