"""Scenario assembly and the top-level simulation entry point.

Builds the graph, routes, flow table and the flat array layout both kernel
lanes consume, pregenerates every random draw (PCG64; one child stream for UE
placement, one for the channel), runs the selected kernel and attaches
metrics. All randomness is decided here: kernels are deterministic functions
of (layout, params, draws), and the draw matrix depends only on (seed,
topology, horizon), never on policy or path mode.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from iabsim import kernel, metrics
from iabsim.channel import derive_transition_probs, pregenerate_draws
from iabsim.config import ScenarioConfig, validate_config
from iabsim.routing import (Flow, NoDisjointPairError, compute_disjoint_paths,
                            k_shortest_paths, validate_flow_conservation)
from iabsim.topology import (ConflictSets, NetworkGraph, build_conflict_sets,
                             build_grid_topology, place_ues)

TRAFFIC_MODES = ("high", "low", "mixed", "burst")
HIGH_PERIOD = 10
LOW_PERIOD = 50


@dataclass
class ScenarioArrays:
    """Flat, kernel-ready form of one scenario."""

    n_nodes: int
    n_links: int
    n_flows: int
    donor: int
    capped: np.ndarray            # (N,) uint8, 1 = relay with buffer cap
    iab_ids: np.ndarray           # (n_relays,) int32
    conflict_sets: list[set[int]]
    coff: np.ndarray              # (L+1,) int32 CSR offsets
    cadj: np.ndarray              # int32 CSR adjacency (ascending per link)
    flow_src: np.ndarray          # (F,) int32
    period: np.ndarray            # (F,) int32
    flow_paths: list[list[int]]   # flow -> path slot indices
    path_flow: list[int]          # path slot -> flow
    path_nodes: list[list[int]]
    path_links: list[list[int]]
    qbase: np.ndarray             # (P,) int32: queue id of (ps, hop 0)
    n_queues: int
    ring_cap: np.ndarray          # (P,) int32 FIFO capacity per path slot
    burst_slot: int
    burst_size: int
    burst_enabled: bool


@dataclass
class KernelParams:
    horizon: int
    gamma: float
    buffer_cap: int
    p_block: float
    p_recover: float
    p_steady: float
    policy: str
    overflow_mode: str
    genie: bool


@dataclass
class SimulationResult:
    config: ScenarioConfig
    graph: NetworkGraph
    conflicts: ConflictSets
    flows: list[Flow]
    fallback_flows: list[int]     # flows forced to single path in dual mode
    arrays: ScenarioArrays
    raw: kernel.KernelResult
    summary: metrics.MetricsSummary
    lane: str
    capture: object | None = None


def flow_period(traffic_mode: str, flow_idx: int) -> int:
    if traffic_mode == "high":
        return HIGH_PERIOD
    if traffic_mode in ("low", "burst"):
        return LOW_PERIOD
    if traffic_mode == "mixed":
        return HIGH_PERIOD if flow_idx % 2 == 0 else LOW_PERIOD
    raise ValueError(f"unknown traffic_mode {traffic_mode!r}")


def build_topology(cfg: ScenarioConfig) -> tuple[NetworkGraph, ConflictSets]:
    grid = build_grid_topology(cfg.rows, cfg.cols, cfg.spacing)
    rng_place = np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(cfg.seed).spawn(2)[0]))
    graph = place_ues(grid, cfg.ue_count, rng_place)
    conflicts = build_conflict_sets(graph, cfg.interference_range)
    return graph, conflicts


def build_flows(graph: NetworkGraph, cfg: ScenarioConfig) -> tuple[list[Flow], list[int]]:
    """One uplink flow per UE. In dual mode a flow falls back to its single
    shortest path (and is reported) when no node-disjoint companion exists."""
    flows: list[Flow] = []
    fallback: list[int] = []
    for f, ue in enumerate(graph.node_ids("ue")):
        period = flow_period(cfg.traffic_mode, f)
        if cfg.path_mode == "dual":
            try:
                paths = compute_disjoint_paths(graph, ue, 0, cfg.k_max)
            except NoDisjointPairError:
                paths = (k_shortest_paths(graph, ue, 0, 1)[0],)
                fallback.append(f)
        else:
            paths = (k_shortest_paths(graph, ue, 0, 1)[0],)
        flows.append(Flow(f, ue, 0, period, tuple(paths)))
    return flows, fallback


def build_arrays(graph: NetworkGraph, conflicts: ConflictSets,
                 flows: list[Flow], cfg: ScenarioConfig) -> ScenarioArrays:
    for fl in flows:
        if not validate_flow_conservation(graph, fl):
            raise ValueError(f"flow {fl.id} has an invalid path")
    n_links = graph.n_links
    coff = np.zeros(n_links + 1, dtype=np.int32)
    cadj_parts = []
    for l in range(n_links):
        neigh = sorted(conflicts.per_link[l])
        coff[l + 1] = coff[l] + len(neigh)
        cadj_parts.extend(neigh)
    cadj = np.array(cadj_parts, dtype=np.int32)

    capped = np.zeros(graph.n_nodes, dtype=np.uint8)
    for n in graph.nodes:
        if n.kind == "iab":
            capped[n.id] = 1
    iab_ids = np.array(graph.node_ids("iab"), dtype=np.int32)

    path_flow: list[int] = []
    path_nodes: list[list[int]] = []
    path_links: list[list[int]] = []
    flow_paths: list[list[int]] = []
    qbase_list: list[int] = []
    ring_list: list[int] = []
    n_queues = 0
    burst_enabled = cfg.traffic_mode == "burst"
    for fl in flows:
        slots = []
        gens = cfg.horizon // fl.period + (cfg.burst_size if burst_enabled else 0) + 2
        for p in fl.paths:
            links = [graph.link_between(a, b) for a, b in zip(p, p[1:])]
            slots.append(len(path_flow))
            path_flow.append(fl.id)
            path_nodes.append(list(p))
            path_links.append(links)
            qbase_list.append(n_queues)
            ring_list.append(gens)
            n_queues += len(links)
        flow_paths.append(slots)

    return ScenarioArrays(
        n_nodes=graph.n_nodes,
        n_links=n_links,
        n_flows=len(flows),
        donor=0,
        capped=capped,
        iab_ids=iab_ids,
        conflict_sets=conflicts.per_link,
        coff=coff,
        cadj=cadj,
        flow_src=np.array([fl.src for fl in flows], dtype=np.int32),
        period=np.array([fl.period for fl in flows], dtype=np.int32),
        flow_paths=flow_paths,
        path_flow=path_flow,
        path_nodes=path_nodes,
        path_links=path_links,
        qbase=np.array(qbase_list, dtype=np.int32),
        n_queues=n_queues,
        ring_cap=np.array(ring_list, dtype=np.int32),
        burst_slot=cfg.burst_slot,
        burst_size=cfg.burst_size,
        burst_enabled=burst_enabled,
    )


def build_params(cfg: ScenarioConfig) -> KernelParams:
    ch = derive_transition_probs(cfg.p_blk, cfg.mean_block_duration)
    overflow = {"hybrid": "guard", "queue": "drop", "age": "admit"}[cfg.policy]
    return KernelParams(
        horizon=cfg.horizon,
        gamma=cfg.gamma,
        buffer_cap=cfg.buffer_cap,
        p_block=ch.p_block,
        p_recover=ch.p_recover,
        p_steady=ch.p_steady,
        policy=cfg.policy,
        overflow_mode=overflow,
        genie=cfg.csi_mode == "genie",
    )


def channel_draws(cfg: ScenarioConfig, n_links: int) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(cfg.seed).spawn(2)[1]))
    return pregenerate_draws(n_links, cfg.horizon, rng)


def run_prepared(graph: NetworkGraph, conflicts: ConflictSets, flows: list[Flow],
                 fallback: list[int], cfg: ScenarioConfig, lane: str | None = None,
                 capture: bool = False, draws: np.ndarray | None = None) -> SimulationResult:
    """Run a scenario whose graph and flows were built by the caller (tests use
    this to drive hand-made topologies)."""
    arrays = build_arrays(graph, conflicts, flows, cfg)
    params = build_params(cfg)
    if draws is None:
        draws = channel_draws(cfg, arrays.n_links)
    cap_log, raw = kernel.run(arrays, params, draws, capture=capture, lane=lane)
    summary = metrics.summarize(raw, arrays.iab_ids, cfg.horizon)
    return SimulationResult(
        config=cfg, graph=graph, conflicts=conflicts, flows=flows,
        fallback_flows=fallback, arrays=arrays, raw=raw, summary=summary,
        lane=raw.lane, capture=cap_log,
    )


def run_simulation(cfg: ScenarioConfig, lane: str | None = None,
                   capture: bool = False) -> SimulationResult:
    """Build everything from the config and run one scenario."""
    validate_config(cfg)
    graph, conflicts = build_topology(cfg)
    flows, fallback = build_flows(graph, cfg)
    return run_prepared(graph, conflicts, flows, fallback, cfg,
                        lane=lane, capture=capture)
