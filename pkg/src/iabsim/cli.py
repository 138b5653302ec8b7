"""Command line front end.

  iabsim run    one scenario, summary to stdout and optional CSV/debug dumps
  iabsim sweep  a sweep config (cells x seeds), summary.csv with aggregates
  iabsim burst  burst recovery traces for several policies, trace_burst.csv

Sweeps fan out over a process pool; rows are assembled in submission order so
output files are byte-identical for any worker count.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from iabsim import engine, metrics
from iabsim.channel import write_channel_csv
from iabsim.config import ConfigError, ScenarioConfig, SweepSpec, parse_config, validate_config
from iabsim.netstate import BufferBreachError
from iabsim.routing import write_paths_csv
from iabsim.topology import write_topology_csv

BURST_TRACE_COLUMNS = ["policy", "seed", "slot", "mean_aoi", "max_queue",
                       "total_queue", "overflows"]


def scenario_id(sweep_key: str | None, value) -> str:
    if sweep_key is None:
        return "base"
    if sweep_key == "p_blk":
        return f"p_blk-{value:g}"
    if sweep_key == "ue_count":
        return f"ue-{value}"
    return f"traffic-{value}"


def _job(payload: tuple) -> dict:
    sid, cfg, lane, want_trace = payload
    res = engine.run_simulation(cfg, lane=lane)
    out = {
        "vals": metrics.values_dict(sid, cfg, cfg.seed, res.summary),
        "fallback": list(res.fallback_flows),
        "lane": res.lane,
    }
    if want_trace:
        T = cfg.horizon
        out["trace"] = {
            "mean_aoi": metrics.aoi_series(res.raw, T).tolist(),
            "max_queue": res.raw.occ_tr[1:T + 1, res.arrays.iab_ids].max(axis=1).tolist(),
            "total_queue": res.raw.totq_tr[1:T + 1].tolist(),
            "overflows": res.raw.ovf_tr[1:T + 1].tolist(),
        }
    return out


def run_sweep(spec: SweepSpec, workers: int = 1, lane: str | None = None,
              want_traces: bool = False, log=None) -> list[dict]:
    """Run every (value, policy, path_mode) cell over all seeds. Returns cells
    in deterministic order, each with per-seed job dicts and mean/std rows."""
    values = spec.sweep_values if spec.sweep_key is not None else [None]
    cells = []
    payloads = []
    for value in values:
        for policy in spec.policies:
            for path_mode in spec.path_modes:
                over = {"policy": policy, "path_mode": path_mode}
                if spec.sweep_key is not None:
                    over[spec.sweep_key] = value
                sid = scenario_id(spec.sweep_key, value)
                cell_jobs = []
                for seed in spec.seeds:
                    cfg = dataclasses.replace(spec.base, seed=seed, **over)
                    validate_config(cfg)
                    cell_jobs.append(len(payloads))
                    payloads.append((sid, cfg, lane, want_traces))
                cells.append({"scenario_id": sid, "policy": policy,
                              "path_mode": path_mode, "value": value,
                              "job_idx": cell_jobs})

    if workers > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_job, p) for p in payloads]
            results = [f.result() for f in futures]
    else:
        results = [_job(p) for p in payloads]

    for cell in cells:
        jobs = [results[i] for i in cell.pop("job_idx")]
        cell["jobs"] = jobs
        cell["agg"] = metrics.aggregate_values([j["vals"] for j in jobs])
        if log is not None:
            v = cell["agg"][0]
            log(f"{cell['scenario_id']} {cell['policy']} {cell['path_mode']}: "
                f"mean_aoi={v['mean_aoi']:.2f} pdr={v['pdr']:.4f} "
                f"overflow={v['overflow_count']:.1f}")
    return cells


def write_summary_csv(path: str, cells: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(metrics.SUMMARY_COLUMNS)
        for cell in cells:
            for job in cell["jobs"]:
                w.writerow(metrics.format_summary_row(job["vals"]))
            for agg in cell["agg"]:
                w.writerow(metrics.format_summary_row(agg))


def write_burst_trace_csv(path: str, cells: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(BURST_TRACE_COLUMNS)
        for cell in cells:
            for job in cell["jobs"]:
                tr = job["trace"]
                policy = job["vals"]["policy"]
                seed = job["vals"]["seed"]
                for s in range(len(tr["mean_aoi"])):
                    w.writerow([policy, seed, s + 1,
                                metrics.fmt_float(tr["mean_aoi"][s]),
                                tr["max_queue"][s], tr["total_queue"][s],
                                tr["overflows"][s]])


def write_topology_dumps(cfg: ScenarioConfig, out_dir: str) -> None:
    graph, _ = engine.build_topology(cfg)
    flows, _ = engine.build_flows(graph, cfg)
    write_topology_csv(graph, os.path.join(out_dir, "topology.csv"))
    write_paths_csv(flows, os.path.join(out_dir, "paths.csv"))


def _load_spec(path: str) -> SweepSpec:
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    return parse_config(path)


def cmd_run(args) -> int:
    if args.config:
        spec = _load_spec(args.config)
        cfg = spec.base
    else:
        cfg = ScenarioConfig()
    over = {}
    for name in ("seed", "policy", "path_mode", "traffic_mode", "horizon", "ue_count"):
        v = getattr(args, name)
        if v is not None:
            over[name] = v
    if over:
        cfg = dataclasses.replace(cfg, **over)
    validate_config(cfg)
    capture = bool(args.out and (args.dump_channel or args.dump_state))
    res = engine.run_simulation(cfg, lane=args.lane, capture=capture)
    s = res.summary
    if not args.quiet:
        print(f"lane={res.lane} policy={cfg.policy} path_mode={cfg.path_mode} "
              f"seed={cfg.seed} horizon={cfg.horizon}")
        print(f"mean_aoi={s.mean_aoi:.3f} pdr={s.pdr:.4f} "
              f"imbalance={s.imbalance_mean:.3f} overflow={s.overflow_count} "
              f"max_relay_occ={s.max_relay_occupancy}")
        if res.fallback_flows:
            print(f"note: flows {res.fallback_flows} fell back to a single path")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        vals = metrics.values_dict("single", cfg, cfg.seed, s)
        with open(os.path.join(args.out, "summary.csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(metrics.SUMMARY_COLUMNS)
            w.writerow(metrics.format_summary_row(vals))
        write_topology_csv(res.graph, os.path.join(args.out, "topology.csv"))
        write_paths_csv(res.flows, os.path.join(args.out, "paths.csv"))
        if args.dump_channel:
            write_channel_csv(res.capture.channel[:cfg.horizon + 1],
                              os.path.join(args.out, "channel.csv"))
        if args.dump_state:
            _write_state_csv(res, os.path.join(args.out, "state.csv"))
    return 0


def _write_state_csv(res, path: str) -> None:
    """Per-slot (node, flow) queue lengths and ages; nodes on flow paths only."""
    cap = res.capture
    T = res.config.horizon
    on_path = sorted({(n, fl.id) for fl in res.flows for p in fl.paths for n in p})
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["slot", "node", "flow", "queue_len", "age"])
        for t in range(1, T + 1):
            for node, flow in on_path:
                w.writerow([t, node, flow, cap.q_nf_tr[t, node, flow],
                            cap.age_nf_tr[t, node, flow]])


def cmd_sweep(args) -> int:
    spec = _load_spec(args.config)
    os.makedirs(args.out, exist_ok=True)
    log = None if args.quiet else lambda m: print(m)
    cells = run_sweep(spec, workers=args.workers, lane=args.lane, log=log)
    write_summary_csv(os.path.join(args.out, "summary.csv"), cells)
    first_cfg = dataclasses.replace(
        spec.base, seed=spec.seeds[0],
        policy=spec.policies[0], path_mode=spec.path_modes[0],
        **({spec.sweep_key: spec.sweep_values[0]} if spec.sweep_key else {}))
    write_topology_dumps(first_cfg, args.out)
    if not args.quiet:
        print(f"wrote {os.path.join(args.out, 'summary.csv')}")
    return 0


def cmd_burst(args) -> int:
    if args.config:
        spec = _load_spec(args.config)
    else:
        spec = SweepSpec(base=ScenarioConfig(horizon=120, traffic_mode="burst"),
                         policies=["hybrid", "queue", "age"],
                         seeds=list(range(1, 11)))
    if spec.base.traffic_mode != "burst":
        spec.base = dataclasses.replace(spec.base, traffic_mode="burst")
    log = None if args.quiet else lambda m: print(m)
    cells = run_sweep(spec, workers=args.workers, lane=args.lane,
                      want_traces=True, log=log)
    os.makedirs(args.out, exist_ok=True)
    write_summary_csv(os.path.join(args.out, "summary.csv"), cells)
    write_burst_trace_csv(os.path.join(args.out, "trace_burst.csv"), cells)
    write_topology_dumps(dataclasses.replace(spec.base, seed=spec.seeds[0]), args.out)
    if not args.quiet:
        print(f"wrote {os.path.join(args.out, 'trace_burst.csv')}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="iabsim")
    sub = ap.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one scenario")
    run_p.add_argument("--config")
    run_p.add_argument("--out")
    run_p.add_argument("--seed", type=int)
    run_p.add_argument("--policy", choices=["hybrid", "queue", "age"])
    run_p.add_argument("--path-mode", dest="path_mode", choices=["dual", "single"])
    run_p.add_argument("--traffic", dest="traffic_mode",
                       choices=["high", "low", "mixed", "burst"])
    run_p.add_argument("--horizon", type=int)
    run_p.add_argument("--ue-count", dest="ue_count", type=int)
    run_p.add_argument("--lane", choices=["py", "c"])
    run_p.add_argument("--dump-channel", action="store_true")
    run_p.add_argument("--dump-state", action="store_true")
    run_p.add_argument("--quiet", action="store_true")
    run_p.set_defaults(fn=cmd_run)

    sweep_p = sub.add_parser("sweep", help="run a sweep config")
    sweep_p.add_argument("--config", required=True)
    sweep_p.add_argument("--out", required=True)
    sweep_p.add_argument("--workers", type=int, default=1)
    sweep_p.add_argument("--lane", choices=["py", "c"])
    sweep_p.add_argument("--quiet", action="store_true")
    sweep_p.set_defaults(fn=cmd_sweep)

    burst_p = sub.add_parser("burst", help="burst recovery traces")
    burst_p.add_argument("--config")
    burst_p.add_argument("--out", required=True)
    burst_p.add_argument("--workers", type=int, default=1)
    burst_p.add_argument("--lane", choices=["py", "c"])
    burst_p.add_argument("--quiet", action="store_true")
    burst_p.set_defaults(fn=cmd_burst)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except BufferBreachError as exc:
        print(f"invariant breach: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
