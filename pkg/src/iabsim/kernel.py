"""Kernel lane selection: compiled Cython core when available, pure Python
otherwise. Override with IABSIM_KERNEL=py or IABSIM_KERNEL=c. Both lanes are
bit-identical on the same inputs; event capture is a pure-lane feature."""

from __future__ import annotations

import os

import numpy as np

from iabsim import _kernel
from iabsim._kernel import CaptureLog, KernelResult, OVERFLOW_CODES, POLICY_CODES
from iabsim.netstate import BufferBreachError

try:
    from iabsim import _ckernel  # type: ignore[attr-defined]
except ImportError:
    _ckernel = None


def compiled_available() -> bool:
    return _ckernel is not None


def active_lane() -> str:
    env = os.environ.get("IABSIM_KERNEL", "").strip().lower()
    if env in ("py", "c"):
        if env == "c" and _ckernel is None:
            raise RuntimeError("IABSIM_KERNEL=c but the compiled kernel is not built")
        return env
    return "c" if _ckernel is not None else "py"


def run(scn, params, draws: np.ndarray, capture: bool = False,
        lane: str | None = None) -> tuple[CaptureLog | None, KernelResult]:
    if lane is None:
        lane = active_lane()
    if lane not in ("py", "c"):
        raise ValueError(f"unknown kernel lane {lane!r}")
    if capture:
        lane = "py"  # event logs exist only in the pure lane
    if lane == "c" and _ckernel is None:
        raise RuntimeError("compiled kernel requested but not built")
    if lane == "py":
        log = CaptureLog() if capture else None
        return log, _kernel.run(scn, params, draws, log)
    return None, _run_compiled(scn, params, draws)


def _run_compiled(scn, params, draws: np.ndarray) -> KernelResult:
    T = params.horizon
    N, L, F = scn.n_nodes, scn.n_links, scn.n_flows
    P = len(scn.path_flow)

    pn_off = np.zeros(P + 1, dtype=np.int32)
    pl_off = np.zeros(P + 1, dtype=np.int32)
    for ps in range(P):
        pn_off[ps + 1] = pn_off[ps] + len(scn.path_nodes[ps])
        pl_off[ps + 1] = pl_off[ps] + len(scn.path_links[ps])
    pn_flat = np.array([n for nodes in scn.path_nodes for n in nodes], dtype=np.int32)
    pl_flat = np.array([l for links in scn.path_links for l in links], dtype=np.int32)
    pf = np.array(scn.path_flow, dtype=np.int32)
    fp_off = np.zeros(F + 1, dtype=np.int32)
    for f in range(F):
        fp_off[f + 1] = fp_off[f] + len(scn.flow_paths[f])

    # ring storage offsets per queue
    soff = np.zeros(scn.n_queues, dtype=np.int64)
    total = 0
    for ps in range(P):
        hops = len(scn.path_links[ps])
        for h in range(hops):
            soff[scn.qbase[ps] + h] = total
            total += int(scn.ring_cap[ps])
    ts_buf = np.zeros(total, dtype=np.int32)
    rcap_q = np.zeros(scn.n_queues, dtype=np.int32)
    for ps in range(P):
        for h in range(len(scn.path_links[ps])):
            rcap_q[scn.qbase[ps] + h] = scn.ring_cap[ps]

    max_c = int(pl_off[P])  # one candidate per (path, hop) at most

    age_tr = np.zeros((T + 2, F), dtype=np.int32)
    occ_tr = np.zeros((T + 2, N), dtype=np.int32)
    totq_tr = np.zeros(T + 2, dtype=np.int64)
    gen_tr = np.zeros(T + 2, dtype=np.int64)
    arr_tr = np.zeros(T + 2, dtype=np.int64)
    drop_tr = np.zeros(T + 2, dtype=np.int64)
    ovf_tr = np.zeros(T + 2, dtype=np.int32)
    act_tr = np.zeros(T + 2, dtype=np.int32)
    fail_tr = np.zeros(T + 2, dtype=np.int32)
    gen_distinct = np.zeros(F, dtype=np.int64)
    dlv_distinct = np.zeros(F, dtype=np.int64)
    scalars = np.zeros(10, dtype=np.int64)

    _ckernel.run_kernel(
        T, N, L, F, P, scn.donor,
        np.ascontiguousarray(scn.capped),
        np.ascontiguousarray(scn.coff), np.ascontiguousarray(scn.cadj),
        np.ascontiguousarray(scn.flow_src), np.ascontiguousarray(scn.period),
        pf, fp_off, pn_off, pn_flat, pl_off, pl_flat,
        np.ascontiguousarray(scn.qbase), scn.n_queues, rcap_q, soff, ts_buf,
        1 if scn.burst_enabled else 0, scn.burst_slot, scn.burst_size,
        float(params.gamma), int(params.buffer_cap),
        float(params.p_block), float(params.p_recover), float(params.p_steady),
        POLICY_CODES[params.policy], OVERFLOW_CODES[params.overflow_mode],
        1 if params.genie else 0, max_c,
        np.ascontiguousarray(draws),
        age_tr, occ_tr, totq_tr, gen_tr, arr_tr, drop_tr, ovf_tr, act_tr,
        fail_tr, gen_distinct, dlv_distinct, scalars,
    )
    if scalars[7]:
        raise BufferBreachError(
            f"buffer cap breached at node {int(scalars[8])} slot {int(scalars[9])} "
            f"(policy {params.policy})")
    return KernelResult(
        age_tr=age_tr, occ_tr=occ_tr, totq_tr=totq_tr, gen_tr=gen_tr,
        arr_tr=arr_tr, drop_tr=drop_tr, ovf_tr=ovf_tr, act_tr=act_tr,
        fail_tr=fail_tr,
        generated_instances=int(scalars[0]),
        arrived_instances=int(scalars[1]),
        dropped=int(scalars[2]),
        generated_distinct=gen_distinct,
        delivered_distinct=dlv_distinct,
        dedup_discarded=int(scalars[3]),
        overflow_events=int(scalars[4]),
        failed_attempts=int(scalars[5]),
        final_in_queue=int(scalars[6]),
        lane="c",
    )
