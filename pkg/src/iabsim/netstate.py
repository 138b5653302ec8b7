"""Reference implementation of the per-node network state rules.

Holds the FIFO queues, the freshest-timestamp bookkeeping that realizes data
age, the destination de-duplication watermark and the three buffer overflow
policies. The simulation kernels re-implement these rules over flat arrays for
speed; tests replay kernel transfer logs through this class to pin both to the
same behavior.

Age convention: age(node, flow, t) = t - freshest_stamp, where freshest_stamp
starts at 0. A flow that never delivered anything therefore has age t at the
destination.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum

from iabsim.routing import Flow


class Overflow(Enum):
    GUARD = "guard"  # full buffer is a fatal invariant breach (hybrid policy)
    DROP = "drop"    # incoming packet discarded and counted (queue policy)
    ADMIT = "admit"  # admitted past the cap, event counted (age policy)


class BufferBreachError(RuntimeError):
    pass


@dataclass(frozen=True)
class Packet:
    flow: int
    copy: int   # which of the flow's paths this copy rides
    stamp: int  # generation slot


def queue_update(length: int, departures: int, arrivals: int) -> int:
    """One-slot queue recursion: serve first, then admit."""
    if length < 0 or departures < 0 or arrivals < 0:
        raise ValueError("queue quantities are nonnegative")
    return max(length - departures, 0) + arrivals


class NetState:
    """Queues keyed by (node, flow, copy); occupancy caps on relay nodes only."""

    def __init__(self, n_nodes: int, flows: list[Flow], buffer_cap: int,
                 capped: list[bool], donor: int = 0):
        if buffer_cap < 1:
            raise ValueError("buffer_cap must be >= 1")
        self.n_nodes = n_nodes
        self.flows = {f.id: f for f in flows}
        self.buffer_cap = buffer_cap
        self.capped = capped
        self.donor = donor
        self.queues: dict[tuple[int, int, int], deque[Packet]] = {}
        self.occ = [0] * n_nodes
        self.q_nf: dict[tuple[int, int], int] = {}
        self.freshest: dict[tuple[int, int], int] = {}
        self.arrived: dict[int, set[int]] = {f.id: set() for f in flows}
        self.generated_instances = 0
        self.generated_distinct = {f.id: 0 for f in flows}
        self.arrived_instances = 0
        self.delivered_distinct = {f.id: 0 for f in flows}
        self.dedup_discarded = 0
        self.dropped = 0
        self.overflow_events = 0

    # -- helpers ---------------------------------------------------------

    def queue(self, node: int, flow: int, copy: int) -> deque[Packet]:
        return self.queues.setdefault((node, flow, copy), deque())

    def queue_len(self, node: int, flow: int) -> int:
        return self.q_nf.get((node, flow), 0)

    def occupancy(self, node: int) -> int:
        return self.occ[node]

    def age(self, node: int, flow: int, t: int) -> int:
        return t - self.freshest.get((node, flow), 0)

    def _push(self, node: int, pkt: Packet) -> None:
        self.queue(node, pkt.flow, pkt.copy).append(pkt)
        self.q_nf[(node, pkt.flow)] = self.q_nf.get((node, pkt.flow), 0) + 1
        self.occ[node] += 1

    def pop_head(self, node: int, flow: int, copy: int) -> Packet:
        q = self.queue(node, flow, copy)
        if not q:
            raise RuntimeError(f"pop from empty queue at node {node} flow {flow} copy {copy}")
        pkt = q.popleft()
        self.q_nf[(node, flow)] -= 1
        self.occ[node] -= 1
        return pkt

    # -- spec operations -------------------------------------------------

    def generate_and_duplicate(self, flow_id: int, t: int) -> list[Packet]:
        """Create one packet stamped t and enqueue one copy per path at the
        source. Also resets the source's age reference."""
        fl = self.flows[flow_id]
        pkts = [Packet(flow_id, k, t) for k in range(len(fl.paths))]
        for pkt in pkts:
            self._push(fl.src, pkt)
            self.generated_instances += 1
        self.generated_distinct[flow_id] += 1
        self.freshest[(fl.src, flow_id)] = t
        return pkts

    def admit_or_overflow(self, node: int, pkt: Packet, policy: Overflow) -> str:
        """Admit pkt at a relay, or apply the overflow policy when the node
        total sits at the cap. Returns "admitted" or "dropped"."""
        if self.capped[node] and self.occ[node] >= self.buffer_cap:
            if policy is Overflow.GUARD:
                raise BufferBreachError(
                    f"buffer cap breached at node {node} (occupancy {self.occ[node]})")
            if policy is Overflow.DROP:
                self.dropped += 1
                self.overflow_events += 1
                return "dropped"
            self.overflow_events += 1  # ADMIT: over the cap, recorded
        self._push(node, pkt)
        self.freshest[(node, pkt.flow)] = max(self.freshest.get((node, pkt.flow), 0), pkt.stamp)
        return "admitted"

    def deliver_to_destination(self, pkt: Packet, t: int) -> str:
        """Terminal handling at the donor. Fresh copies advance the age
        watermark; stale or repeated copies are discarded after being counted
        toward distinct arrivals (delivery ratio counts stamps, not copies)."""
        self.arrived_instances += 1
        flow = pkt.flow
        if pkt.stamp not in self.arrived[flow]:
            self.arrived[flow].add(pkt.stamp)
            self.delivered_distinct[flow] += 1
        wm = self.freshest.get((self.donor, flow), 0)
        if pkt.stamp > wm:
            self.freshest[(self.donor, flow)] = pkt.stamp
            return "fresh"
        self.dedup_discarded += 1
        return "duplicate"

    def total_queued(self) -> int:
        return sum(self.occ)
