"""Run metrics: data age averages, delivery ratio, load imbalance, occupancy.

Time averages use slots 1..horizon (slot-start records). Occupancy maxima also
include the final post-run snapshot so arrivals in the last slot are seen.
Imbalance is the population standard deviation of relay occupancies per slot,
averaged (and maxed) over time; donor and UE nodes are excluded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class MetricsSummary:
    mean_aoi: float
    sum_aoi: float
    pdr: float
    imbalance_mean: float
    imbalance_peak: float
    overflow_count: int
    mean_occupancy: float
    max_relay_occupancy: int
    generated_distinct: int
    delivered_distinct: int
    generated_instances: int
    arrived_instances: int
    dedup_discarded: int
    dropped: int
    failed_attempts: int
    per_flow_mean_aoi: np.ndarray
    per_flow_pdr: np.ndarray


def aoi_series(raw, horizon: int) -> np.ndarray:
    """Mean destination age over flows, per slot (1..horizon)."""
    return raw.age_tr[1:horizon + 1].mean(axis=1)


def imbalance_series(raw, iab_ids: np.ndarray, horizon: int) -> np.ndarray:
    occ = raw.occ_tr[1:horizon + 1, iab_ids].astype(np.float64)
    return occ.std(axis=1)


def summarize(raw, iab_ids: np.ndarray, horizon: int) -> MetricsSummary:
    ages = raw.age_tr[1:horizon + 1].astype(np.float64)
    per_flow_mean = ages.mean(axis=0)
    gen = raw.generated_distinct.astype(np.float64)
    dlv = raw.delivered_distinct.astype(np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        per_flow_pdr = np.where(gen > 0, dlv / np.maximum(gen, 1), 1.0)
    total_gen = int(raw.generated_distinct.sum())
    total_dlv = int(raw.delivered_distinct.sum())
    pdr = total_dlv / total_gen if total_gen else 1.0

    if len(iab_ids):
        occ = raw.occ_tr[1:horizon + 1, iab_ids].astype(np.float64)
        imb = occ.std(axis=1)
        max_relay = int(raw.occ_tr[1:horizon + 2, iab_ids].max())
    else:
        occ = np.zeros((horizon, 0))
        imb = np.zeros(horizon)
        max_relay = 0

    return MetricsSummary(
        mean_aoi=float(ages.mean()),
        sum_aoi=float(ages.mean(axis=1).sum()),
        pdr=float(pdr),
        imbalance_mean=float(imb.mean()) if len(iab_ids) else 0.0,
        imbalance_peak=float(imb.max()) if len(iab_ids) else 0.0,
        overflow_count=int(raw.overflow_events),
        mean_occupancy=float(occ.mean()) if len(iab_ids) else 0.0,
        max_relay_occupancy=max_relay,
        generated_distinct=total_gen,
        delivered_distinct=total_dlv,
        generated_instances=int(raw.generated_instances),
        arrived_instances=int(raw.arrived_instances),
        dedup_discarded=int(raw.dedup_discarded),
        dropped=int(raw.dropped),
        failed_attempts=int(raw.failed_attempts),
        per_flow_mean_aoi=per_flow_mean,
        per_flow_pdr=per_flow_pdr,
    )


SUMMARY_COLUMNS = ["scenario_id", "policy", "path_mode", "p_blk", "ue_count",
                   "traffic_mode", "seed", "mean_aoi", "sum_aoi", "pdr",
                   "imbalance_mean", "imbalance_peak", "overflow_count",
                   "mean_occupancy"]

METRIC_COLUMNS = ("mean_aoi", "sum_aoi", "pdr", "imbalance_mean",
                  "imbalance_peak", "overflow_count", "mean_occupancy")


def fmt_float(x: float) -> str:
    return f"{x:.6f}"


def values_dict(scenario_id: str, cfg, seed, s: MetricsSummary) -> dict:
    """One summary row as plain values, plus extras the CSV does not carry
    (max_relay_occupancy and raw counters) for in-process consumers."""
    return {
        "scenario_id": scenario_id, "policy": cfg.policy,
        "path_mode": cfg.path_mode, "p_blk": cfg.p_blk,
        "ue_count": cfg.ue_count, "traffic_mode": cfg.traffic_mode,
        "seed": seed,
        "mean_aoi": s.mean_aoi, "sum_aoi": s.sum_aoi, "pdr": s.pdr,
        "imbalance_mean": s.imbalance_mean, "imbalance_peak": s.imbalance_peak,
        "overflow_count": s.overflow_count, "mean_occupancy": s.mean_occupancy,
        "max_relay_occupancy": s.max_relay_occupancy,
        "dropped": s.dropped, "dedup_discarded": s.dedup_discarded,
        "failed_attempts": s.failed_attempts,
        "generated_distinct": s.generated_distinct,
        "delivered_distinct": s.delivered_distinct,
    }


def format_summary_row(vals: dict) -> list[str]:
    out = []
    for col in SUMMARY_COLUMNS:
        v = vals[col]
        if col in ("scenario_id", "policy", "path_mode", "traffic_mode"):
            out.append(str(v))
        elif col in ("ue_count", "seed"):
            out.append(str(v))
        elif col == "overflow_count":
            out.append(fmt_float(float(v)) if isinstance(v, float) else str(v))
        else:
            out.append(fmt_float(float(v)))
    return out


def aggregate_values(vals_list: list[dict]) -> list[dict]:
    """mean and std rows (over seeds) for one sweep cell."""
    first = vals_list[0]
    out = []
    for label, fn in (("mean", np.mean), ("std", np.std)):
        row = dict(first)
        row["seed"] = label
        for col in METRIC_COLUMNS:
            row[col] = float(fn([v[col] for v in vals_list]))
        out.append(row)
    return out
