"""Pure-Python simulation kernel.

Mirrors iabsim._ckernel step for step; the two lanes must produce bit-identical
traces from the same scenario and draw matrix (enforced by tests and the
benchmark). Keep any semantic change in sync with the .pyx twin.

Slot phases, in order:
  1. record traces (ages and occupancy are slot-start values)
  2. traffic generation (new packets are schedulable in the same slot)
  3. channel step (one uniform per link, link id order)
  4. candidate enumeration + greedy selection on slot-start queue state
  5. transfers: all departures, then all arrivals (simultaneous queue update)
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from iabsim.channel import ChannelParams, init_stationary, step_from_draws
from iabsim.netstate import BufferBreachError
from iabsim.scheduler import SlotView, enumerate_candidates, greedy_select

POLICY_CODES = {"hybrid": 0, "queue": 1, "age": 2}
OVERFLOW_CODES = {"guard": 0, "drop": 1, "admit": 2}


@dataclass
class CaptureLog:
    """Optional event log (pure lane only); meant for small debug runs and the
    replay oracles in tests, not for the big sweeps."""

    channel: np.ndarray | None = None
    q_nf_tr: np.ndarray | None = None    # (T+2, N, F) per-flow queue totals, slot start
    age_nf_tr: np.ndarray | None = None  # (T+2, N, F) per-node ages, slot start
    candidates: dict[int, list] = field(default_factory=dict)
    activations: list = field(default_factory=list)  # (t, link, flow, ps, hop, weight)
    transfers: list = field(default_factory=list)    # (t, link, flow, ps, hop, stamp, outcome)
    generations: list = field(default_factory=list)  # (t, flow, n_copies_per_path)


@dataclass
class KernelResult:
    age_tr: np.ndarray       # (T+2, F) destination age at slot start; row T+1 is final
    occ_tr: np.ndarray       # (T+2, N) occupancy at slot start; row T+1 is final
    totq_tr: np.ndarray      # (T+2,) packets sitting in queues
    gen_tr: np.ndarray       # (T+2,) cumulative generated copies
    arr_tr: np.ndarray       # (T+2,) cumulative copies that reached the donor
    drop_tr: np.ndarray      # (T+2,) cumulative overflow drops
    ovf_tr: np.ndarray       # (T+2,) overflow events during the slot
    act_tr: np.ndarray       # (T+2,) activations during the slot
    fail_tr: np.ndarray      # (T+2,) blind-mode failed attempts during the slot
    generated_instances: int
    arrived_instances: int
    dropped: int
    generated_distinct: np.ndarray   # (F,)
    delivered_distinct: np.ndarray   # (F,)
    dedup_discarded: int
    overflow_events: int
    failed_attempts: int
    final_in_queue: int
    lane: str = "py"


def run(scn, params, draws: np.ndarray, capture: CaptureLog | None = None) -> KernelResult:
    T = params.horizon
    N = scn.n_nodes
    L = scn.n_links
    F = scn.n_flows
    P = len(scn.path_flow)
    donor = scn.donor
    cap = params.buffer_cap
    gamma = params.gamma
    policy = params.policy
    genie = params.genie
    overflow = params.overflow_mode
    cp = ChannelParams(params.p_block, params.p_recover, params.p_steady)

    if draws.shape != (T + 1, L):
        raise ValueError(f"draw matrix must be ({T + 1}, {L})")

    # mutable state
    blocked = init_stationary(L, cp, draws[0])
    q_nf = np.zeros((N, F), dtype=np.int32)
    occ = np.zeros(N, dtype=np.int32)
    freshest = np.zeros((N, F), dtype=np.int64)
    arrived_flag = np.zeros((F, T + 2), dtype=np.uint8)
    tails: list[deque] = [deque() for _ in range(scn.n_queues)]
    dest_age = np.zeros(F, dtype=np.int64)

    # traces
    age_tr = np.zeros((T + 2, F), dtype=np.int32)
    occ_tr = np.zeros((T + 2, N), dtype=np.int32)
    totq_tr = np.zeros(T + 2, dtype=np.int64)
    gen_tr = np.zeros(T + 2, dtype=np.int64)
    arr_tr = np.zeros(T + 2, dtype=np.int64)
    drop_tr = np.zeros(T + 2, dtype=np.int64)
    ovf_tr = np.zeros(T + 2, dtype=np.int32)
    act_tr = np.zeros(T + 2, dtype=np.int32)
    fail_tr = np.zeros(T + 2, dtype=np.int32)

    generated_instances = 0
    arrived_instances = 0
    dropped = 0
    generated_distinct = np.zeros(F, dtype=np.int64)
    delivered_distinct = np.zeros(F, dtype=np.int64)
    dedup_discarded = 0
    overflow_events = 0
    failed_attempts = 0
    in_queue = 0

    tail_len: list[list[int]] = [[0] * len(scn.path_links[ps]) for ps in range(P)]
    view = SlotView(scn.path_flow, scn.path_nodes, scn.path_links, tail_len,
                    q_nf, occ, scn.capped, blocked, dest_age)

    if capture is not None:
        capture.channel = np.zeros((T + 2, L), dtype=np.uint8)
        capture.channel[0] = blocked
        capture.q_nf_tr = np.zeros((T + 2, N, F), dtype=np.int32)
        capture.age_nf_tr = np.zeros((T + 2, N, F), dtype=np.int32)

    for t in range(1, T + 1):
        # 1. record
        np.subtract(t, freshest[donor], out=dest_age)
        age_tr[t] = dest_age
        occ_tr[t] = occ
        totq_tr[t] = in_queue
        gen_tr[t] = generated_instances
        arr_tr[t] = arrived_instances
        drop_tr[t] = dropped
        if capture is not None:
            capture.q_nf_tr[t] = q_nf
            capture.age_nf_tr[t] = t - freshest

        # 2. traffic
        for f in range(F):
            n_new = 1 if t % scn.period[f] == 0 else 0
            if scn.burst_enabled and t == scn.burst_slot:
                n_new += scn.burst_size
            if n_new == 0:
                continue
            src = scn.flow_src[f]
            freshest[src, f] = t
            generated_distinct[f] += 1
            for ps in scn.flow_paths[f]:
                q0 = scn.qbase[ps]
                for _ in range(n_new):
                    tails[q0].append(t)
                q_nf[src, f] += n_new
                occ[src] += n_new
                in_queue += n_new
                generated_instances += n_new
            if capture is not None:
                capture.generations.append((t, f, n_new))

        # 3. channel
        blocked[:] = step_from_draws(blocked, draws[t], cp)
        if capture is not None:
            capture.channel[t] = blocked

        # 4. schedule
        for ps in range(P):
            q0 = scn.qbase[ps]
            row = tail_len[ps]
            for h in range(len(row)):
                row[h] = len(tails[q0 + h])
        cands = enumerate_candidates(view, policy, gamma, cap, genie)
        chosen = greedy_select(cands, scn.conflict_sets)
        act_tr[t] = len(chosen)
        if capture is not None:
            capture.candidates[t] = list(cands)
            for c in chosen:
                capture.activations.append((t, c.link, c.flow, c.path, c.hop, c.weight))

        # 5a. departures
        moved = []
        for c in chosen:
            if not genie and blocked[c.link]:
                failed_attempts += 1
                fail_tr[t] += 1
                if capture is not None:
                    capture.transfers.append((t, c.link, c.flow, c.path, c.hop, -1, "failed"))
                continue
            stamp = tails[scn.qbase[c.path] + c.hop].popleft()
            i = scn.path_nodes[c.path][c.hop]
            q_nf[i, c.flow] -= 1
            occ[i] -= 1
            in_queue -= 1
            moved.append((c, stamp))

        # 5b. arrivals
        for c, stamp in moved:
            f = c.flow
            j = scn.path_nodes[c.path][c.hop + 1]
            if j == donor:
                arrived_instances += 1
                if not arrived_flag[f, stamp]:
                    arrived_flag[f, stamp] = 1
                    delivered_distinct[f] += 1
                if stamp > freshest[donor, f]:
                    freshest[donor, f] = stamp
                    outcome = "delivered_fresh"
                else:
                    dedup_discarded += 1
                    outcome = "delivered_dup"
            else:
                admitted = True
                if scn.capped[j] and occ[j] >= cap:
                    if overflow == "guard":
                        raise BufferBreachError(
                            f"buffer cap breached at node {j} slot {t} (policy {policy})")
                    overflow_events += 1
                    ovf_tr[t] += 1
                    if overflow == "drop":
                        dropped += 1  # already off the books since departure
                        admitted = False
                if admitted:
                    tails[scn.qbase[c.path] + c.hop + 1].append(stamp)
                    q_nf[j, f] += 1
                    occ[j] += 1
                    in_queue += 1
                    if stamp > freshest[j, f]:
                        freshest[j, f] = stamp
                    outcome = "moved"
                else:
                    outcome = "dropped"
            if capture is not None:
                capture.transfers.append((t, c.link, f, c.path, c.hop, stamp, outcome))

    # final snapshot after the last slot's arrivals
    tf = T + 1
    np.subtract(tf, freshest[donor], out=dest_age)
    age_tr[tf] = dest_age
    occ_tr[tf] = occ
    totq_tr[tf] = in_queue
    gen_tr[tf] = generated_instances
    arr_tr[tf] = arrived_instances
    drop_tr[tf] = dropped
    if capture is not None:
        capture.q_nf_tr[tf] = q_nf
        capture.age_nf_tr[tf] = tf - freshest

    return KernelResult(
        age_tr=age_tr, occ_tr=occ_tr, totq_tr=totq_tr, gen_tr=gen_tr,
        arr_tr=arr_tr, drop_tr=drop_tr, ovf_tr=ovf_tr, act_tr=act_tr,
        fail_tr=fail_tr,
        generated_instances=generated_instances,
        arrived_instances=arrived_instances,
        dropped=dropped,
        generated_distinct=generated_distinct,
        delivered_distinct=delivered_distinct,
        dedup_discarded=dedup_discarded,
        overflow_events=overflow_events,
        failed_attempts=failed_attempts,
        final_in_queue=in_queue,
        lane="py",
    )
