"""Scenario configuration and the flat `key = value` config-file format.

Files hold one assignment per line, `#` starts a comment, blank lines are
skipped. Unknown keys and out-of-range values are rejected with the file name
and line number. Sweep files add the keys `sweep`, `values`, `policies`,
`path_modes` and `seeds` on top of a base scenario.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields

POLICIES = ("hybrid", "queue", "age")
PATH_MODES = ("dual", "single")
CSI_MODES = ("genie", "blind")
TRAFFIC_MODES = ("high", "low", "mixed", "burst")
SWEEP_KEYS = ("p_blk", "ue_count", "traffic_mode")


class ConfigError(ValueError):
    pass


@dataclass
class ScenarioConfig:
    rows: int = 5
    cols: int = 5
    spacing: float = 200.0
    ue_count: int = 8
    horizon: int = 10000
    traffic_mode: str = "low"
    burst_slot: int = 20
    burst_size: int = 6
    p_blk: float = 0.15
    mean_block_duration: float = 100.0
    gamma: float = 0.5
    buffer_cap: int = 8
    interference_range: float = 100.0
    policy: str = "hybrid"
    path_mode: str = "dual"
    csi_mode: str = "genie"
    seed: int = 1
    k_max: int = 32


@dataclass
class SweepSpec:
    base: ScenarioConfig
    sweep_key: str | None = None
    sweep_values: list = field(default_factory=list)
    policies: list[str] = field(default_factory=lambda: ["hybrid"])
    path_modes: list[str] = field(default_factory=lambda: ["dual"])
    seeds: list[int] = field(default_factory=lambda: [1])


_INT_KEYS = {"rows", "cols", "ue_count", "horizon", "burst_slot", "burst_size",
             "buffer_cap", "seed", "k_max"}
_FLOAT_KEYS = {"spacing", "p_blk", "mean_block_duration", "gamma", "interference_range"}
_CHOICE_KEYS = {"traffic_mode": TRAFFIC_MODES, "policy": POLICIES,
                "path_mode": PATH_MODES, "csi_mode": CSI_MODES}


def validate_config(cfg: ScenarioConfig) -> None:
    def need(cond: bool, msg: str) -> None:
        if not cond:
            raise ConfigError(msg)

    need(cfg.rows >= 1 and cfg.cols >= 1, "rows and cols must be >= 1")
    need(cfg.rows * cfg.cols >= 2, "grid needs at least two backhaul nodes")
    need(cfg.spacing > 0, "spacing must be > 0")
    need(cfg.ue_count >= 1, "ue_count must be >= 1")
    need(cfg.horizon >= 1, "horizon must be >= 1")
    need(cfg.traffic_mode in TRAFFIC_MODES, f"traffic_mode must be one of {TRAFFIC_MODES}")
    need(cfg.burst_slot >= 1, "burst_slot must be >= 1")
    need(cfg.burst_size >= 0, "burst_size must be >= 0")
    need(0.0 <= cfg.p_blk < 1.0, "p_blk must be in [0, 1)")
    need(cfg.mean_block_duration >= 1.0, "mean_block_duration must be >= 1")
    need(cfg.gamma >= 0.0, "gamma must be >= 0")
    need(cfg.buffer_cap >= 1, "buffer_cap must be >= 1")
    need(cfg.interference_range >= 0.0, "interference_range must be >= 0")
    need(cfg.policy in POLICIES, f"policy must be one of {POLICIES}")
    need(cfg.path_mode in PATH_MODES, f"path_mode must be one of {PATH_MODES}")
    need(cfg.csi_mode in CSI_MODES, f"csi_mode must be one of {CSI_MODES}")
    need(cfg.seed >= 0, "seed must be >= 0")
    need(cfg.k_max >= 2, "k_max must be >= 2")


def _parse_scalar(key: str, raw: str, where: str):
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
    except ValueError:
        raise ConfigError(f"{where}: bad value {raw!r} for {key}") from None
    choices = _CHOICE_KEYS[key]
    if raw not in choices:
        raise ConfigError(f"{where}: {key} must be one of {choices}, got {raw!r}")
    return raw


def _parse_seed_list(raw: str, where: str) -> list[int]:
    out: list[int] = []
    for part in raw.split(","):
        part = part.strip()
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            try:
                lo_i, hi_i = int(lo), int(hi)
            except ValueError:
                raise ConfigError(f"{where}: bad seed range {part!r}") from None
            if hi_i < lo_i:
                raise ConfigError(f"{where}: empty seed range {part!r}")
            out.extend(range(lo_i, hi_i + 1))
        else:
            try:
                out.append(int(part))
            except ValueError:
                raise ConfigError(f"{where}: bad seed {part!r}") from None
    if not out:
        raise ConfigError(f"{where}: seeds list is empty")
    return out


def parse_config(path: str) -> SweepSpec:
    """Parse a scenario or sweep file. A plain scenario comes back as a
    single-cell SweepSpec (no sweep key, one policy, one seed)."""
    scalar_fields = {f.name for f in fields(ScenarioConfig)}
    assignments: dict[str, object] = {}
    sweep_key: str | None = None
    raw_values: str | None = None
    values_where = ""
    policies: list[str] | None = None
    path_modes: list[str] | None = None
    seeds: list[int] | None = None

    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            where = f"{path}:{lineno}"
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ConfigError(f"{where}: expected 'key = value'")
            key, raw = (s.strip() for s in text.split("=", 1))
            if not raw:
                raise ConfigError(f"{where}: empty value for {key}")
            if key == "sweep":
                if raw not in SWEEP_KEYS:
                    raise ConfigError(f"{where}: sweep must be one of {SWEEP_KEYS}")
                sweep_key = raw
            elif key == "values":
                raw_values, values_where = raw, where
            elif key == "policies":
                policies = [p.strip() for p in raw.split(",")]
                for p in policies:
                    if p not in POLICIES:
                        raise ConfigError(f"{where}: unknown policy {p!r}")
            elif key == "path_modes":
                path_modes = [p.strip() for p in raw.split(",")]
                for p in path_modes:
                    if p not in PATH_MODES:
                        raise ConfigError(f"{where}: unknown path_mode {p!r}")
            elif key == "seeds":
                seeds = _parse_seed_list(raw, where)
            elif key in scalar_fields:
                assignments[key] = _parse_scalar(key, raw, where)
            else:
                raise ConfigError(f"{where}: unknown key {key!r}")

    base = ScenarioConfig(**assignments)
    try:
        validate_config(base)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None

    spec = SweepSpec(base=base)
    if sweep_key is not None:
        if raw_values is None:
            raise ConfigError(f"{path}: sweep set but no values given")
        vals = []
        for part in raw_values.split(","):
            part = part.strip()
            if sweep_key == "p_blk":
                vals.append(_parse_scalar("p_blk", part, values_where))
            elif sweep_key == "ue_count":
                vals.append(_parse_scalar("ue_count", part, values_where))
            else:
                vals.append(_parse_scalar("traffic_mode", part, values_where))
        spec.sweep_key = sweep_key
        spec.sweep_values = vals
    elif raw_values is not None:
        raise ConfigError(f"{path}: values given without a sweep key")
    spec.policies = policies if policies is not None else [base.policy]
    spec.path_modes = path_modes if path_modes is not None else [base.path_mode]
    spec.seeds = seeds if seeds is not None else [base.seed]
    return spec
