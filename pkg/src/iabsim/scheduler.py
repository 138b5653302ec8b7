"""Per-slot link scheduling.

Builds the candidate set (one entry per non-empty path-hop FIFO whose link is
usable), scores each candidate under the active policy, and picks a
conflict-free subset greedily by descending weight. An exhaustive optimal
selector is included for small instances; tests use it as the oracle for the
greedy pass.

Policies:
  hybrid  gamma * (Q_tx - Q_rx) + destination_age   (guarded buffers)
  queue   gamma * (Q_tx - Q_rx)                     (backpressure baseline)
  age     destination_age                           (freshness baseline)

Only strictly positive weights become candidates. Under the hybrid policy a
candidate whose receiver is a capped relay already at the cap is skipped
outright, which is what keeps hybrid runs drop-free.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple, Sequence

import numpy as np

POLICIES = ("hybrid", "queue", "age")

EXACT_LIMIT = 20  # exhaustive selector refuses larger instances


class Candidate(NamedTuple):
    weight: float
    link: int
    flow: int
    path: int  # path slot index (layout order), not the per-flow copy index
    hop: int


def weight_hybrid(q_tx: int, q_rx: int, dest_age: int, gamma: float) -> float:
    return gamma * (q_tx - q_rx) + dest_age


def weight_queue(q_tx: int, q_rx: int, gamma: float) -> float:
    return gamma * (q_tx - q_rx)


def weight_age(dest_age: int) -> float:
    return float(dest_age)


def candidate_weight(policy: str, gamma: float, q_tx: int, q_rx: int, dest_age: int) -> float:
    if policy == "hybrid":
        return weight_hybrid(q_tx, q_rx, dest_age, gamma)
    if policy == "queue":
        return weight_queue(q_tx, q_rx, gamma)
    if policy == "age":
        return weight_age(dest_age)
    raise ValueError(f"unknown policy {policy!r}")


@dataclass
class SlotView:
    """Read-only snapshot of the state a scheduling pass needs.

    path_* lists are indexed by path slot (flows in id order, then copy index).
    tail_len[ps][h] is the FIFO length feeding hop h of path slot ps.
    """

    path_flow: list[int]
    path_nodes: list[list[int]]
    path_links: list[list[int]]
    tail_len: list[list[int]]
    q_nf: np.ndarray      # (n_nodes, n_flows) per-flow totals
    occ: np.ndarray       # (n_nodes,) node totals
    capped: np.ndarray    # (n_nodes,) uint8
    blocked: np.ndarray   # (n_links,) uint8
    dest_age: np.ndarray  # (n_flows,) int


def enumerate_candidates(view: SlotView, policy: str, gamma: float,
                         buffer_cap: int, genie: bool = True) -> list[Candidate]:
    """All transmittable (link, flow, path, hop) tuples with positive weight.

    With genie channel knowledge blocked links are excluded here; without it
    they stay in and the transmission attempt fails later.
    """
    cands: list[Candidate] = []
    skip_full = policy == "hybrid"
    for ps, nodes in enumerate(view.path_nodes):
        f = view.path_flow[ps]
        age_d = int(view.dest_age[f])
        links = view.path_links[ps]
        tails = view.tail_len[ps]
        for h in range(len(links)):
            if tails[h] == 0:
                continue
            link = links[h]
            if genie and view.blocked[link]:
                continue
            i, j = nodes[h], nodes[h + 1]
            if skip_full and view.capped[j] and view.occ[j] >= buffer_cap:
                continue
            w = candidate_weight(policy, gamma, int(view.q_nf[i, f]), int(view.q_nf[j, f]), age_d)
            if w > 0.0:
                cands.append(Candidate(w, link, f, ps, h))
    return cands


def sort_candidates(cands: list[Candidate]) -> list[Candidate]:
    """Descending weight; ties by (link id, flow id). (link, flow) pairs are
    unique within a slot, so the order is total and reproducible."""
    return sorted(cands, key=lambda c: (-c.weight, c.link, c.flow))


def greedy_select(cands: list[Candidate],
                  conflict_sets: Sequence[set[int]]) -> list[Candidate]:
    """Greedy maximal conflict-free subset in sort_candidates order."""
    chosen: list[Candidate] = []
    avoid: set[int] = set()
    for cand in sort_candidates(cands):
        if cand.link in avoid:
            continue
        chosen.append(cand)
        avoid.add(cand.link)
        avoid |= conflict_sets[cand.link]
    return chosen


def schedule_is_independent(chosen: Sequence[Candidate],
                            conflict_sets: Sequence[set[int]]) -> bool:
    links = [c.link for c in chosen]
    if len(set(links)) != len(links):
        return False
    for a, b in combinations(links, 2):
        if b in conflict_sets[a] or a in conflict_sets[b]:
            return False
    return True


def schedule_is_maximal(chosen: Sequence[Candidate], cands: Sequence[Candidate],
                        conflict_sets: Sequence[set[int]]) -> bool:
    """No leftover candidate could be added without a conflict."""
    used = set()
    for c in chosen:
        used.add(c.link)
        used |= conflict_sets[c.link]
    taken = {(c.link, c.flow, c.path, c.hop) for c in chosen}
    for c in cands:
        if (c.link, c.flow, c.path, c.hop) in taken:
            continue
        if c.link not in used:
            return False
    return True


def exact_select(cands: list[Candidate],
                 conflict_sets: Sequence[set[int]]) -> tuple[list[Candidate], float]:
    """Maximum-total-weight conflict-free subset by exhaustive search.

    Intended as a test oracle; refuses instances above EXACT_LIMIT candidates.
    Ties go to the lexicographically smallest sorted (link, flow) tuple."""
    n = len(cands)
    if n > EXACT_LIMIT:
        raise ValueError(f"exact_select handles at most {EXACT_LIMIT} candidates")
    pair_conflict = [[False] * n for _ in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            la, lb = cands[a].link, cands[b].link
            pair_conflict[a][b] = la == lb or lb in conflict_sets[la]
    best_weight = 0.0
    best_key: tuple | None = None
    best: list[Candidate] = []
    for mask in range(1 << n):
        idx = [i for i in range(n) if mask >> i & 1]
        ok = all(not pair_conflict[a][b] for a, b in combinations(idx, 2))
        if not ok:
            continue
        w = sum(cands[i].weight for i in idx)
        key = tuple(sorted((cands[i].link, cands[i].flow) for i in idx))
        if w > best_weight or (w == best_weight and (best_key is None or key < best_key)):
            best_weight = w
            best_key = key
            best = [cands[i] for i in idx]
    return sorted(best, key=lambda c: (c.link, c.flow)), best_weight
