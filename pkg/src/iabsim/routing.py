"""Route computation: k-shortest simple paths and node-disjoint pair selection.

All tie-breaks are deterministic: among equal hop counts the lexicographically
smallest node sequence wins. That makes route tables a pure function of the
graph, which the rest of the simulator relies on for reproducibility.
"""

from __future__ import annotations

import csv
import heapq
from dataclasses import dataclass

from iabsim.topology import NetworkGraph

Path = tuple[int, ...]


class RoutingError(Exception):
    pass


class NoRouteError(RoutingError):
    pass


class NoDisjointPairError(RoutingError):
    pass


@dataclass(frozen=True)
class Flow:
    """One uplink flow: UE source to the donor, with 1 or 2 forwarding paths.
    Copy k of every packet rides paths[k]."""

    id: int
    src: int
    dst: int
    period: int
    paths: tuple[Path, ...]


def shortest_path(graph: NetworkGraph, src: int, dst: int,
                  banned_nodes: frozenset[int] = frozenset(),
                  banned_links: frozenset[tuple[int, int]] = frozenset()) -> Path | None:
    """Minimum-hop path; ties resolved toward the lexicographically smallest
    node sequence. Returns None when dst is unreachable."""
    if src == dst:
        return (src,)
    # heap keys (hops, node_sequence) pop in exactly the required order
    heap: list[tuple[int, Path]] = [(0, (src,))]
    done: set[int] = set()
    while heap:
        hops, path = heapq.heappop(heap)
        node = path[-1]
        if node in done:
            continue
        done.add(node)
        if node == dst:
            return path
        for nxt in graph.neighbors_out(node):
            if nxt in done or nxt in banned_nodes or (node, nxt) in banned_links:
                continue
            heapq.heappush(heap, (hops + 1, path + (nxt,)))
    return None


def k_shortest_paths(graph: NetworkGraph, src: int, dst: int, k: int) -> list[Path]:
    """Up to k simple paths in (hops, lexicographic) order (Yen's method)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    first = shortest_path(graph, src, dst)
    if first is None:
        raise NoRouteError(f"no route from node {src} to node {dst}")
    paths = [first]
    candidates: list[tuple[int, Path]] = []
    seen = {first}
    while len(paths) < k:
        prev = paths[-1]
        for j in range(len(prev) - 1):
            root = prev[: j + 1]
            banned_links = set()
            for p in paths:
                if len(p) > j + 1 and p[: j + 1] == root:
                    banned_links.add((p[j], p[j + 1]))
            banned_nodes = frozenset(root[:-1])
            spur = shortest_path(graph, root[-1], dst, banned_nodes, frozenset(banned_links))
            if spur is not None:
                cand = root[:-1] + spur
                if cand not in seen:
                    seen.add(cand)
                    heapq.heappush(candidates, (len(cand), cand))
        if not candidates:
            break
        _, best = heapq.heappop(candidates)
        paths.append(best)
    return paths


def interior(path: Path) -> frozenset[int]:
    return frozenset(path[1:-1])


def compute_disjoint_paths(graph: NetworkGraph, src: int, dst: int, k_max: int = 32) -> tuple[Path, Path]:
    """Primary shortest path plus the best candidate whose interior nodes do
    not intersect the primary's. Raises NoDisjointPairError if none of the
    first k_max candidates qualifies."""
    cands = k_shortest_paths(graph, src, dst, k_max)
    p1 = cands[0]
    p1_interior = interior(p1)
    for p in cands[1:]:
        if not (interior(p) & p1_interior):
            return p1, p
    raise NoDisjointPairError(
        f"no node-disjoint companion for {p1} within {k_max} candidates")


def validate_path(graph: NetworkGraph, path: Path, src: int, dst: int) -> bool:
    """Unit-flow conservation along one path: every hop is an existing directed
    link, net flow is +1 at src, -1 at dst, 0 elsewhere, and the path is simple."""
    if len(path) < 2 or path[0] != src or path[-1] != dst:
        return False
    if len(set(path)) != len(path):
        return False
    for a, b in zip(path, path[1:]):
        if graph.link_between(a, b) is None:
            return False
    net: dict[int, int] = {}
    for a, b in zip(path, path[1:]):
        net[a] = net.get(a, 0) + 1
        net[b] = net.get(b, 0) - 1
    for node, balance in net.items():
        want = 1 if node == src else -1 if node == dst else 0
        if balance != want:
            return False
    return True


def validate_flow_conservation(graph: NetworkGraph, flow: Flow) -> bool:
    return all(validate_path(graph, p, flow.src, flow.dst) for p in flow.paths)


def validate_node_disjoint(flow: Flow) -> bool:
    """True when the flow's two paths share no interior node."""
    if len(flow.paths) != 2:
        raise ValueError("disjointness is defined for exactly two paths")
    return not (interior(flow.paths[0]) & interior(flow.paths[1]))


def write_paths_csv(flows: list[Flow], path: str) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["flow", "path_index", "position", "node"])
        for f in flows:
            for k, p in enumerate(f.paths):
                for pos, node in enumerate(p):
                    w.writerow([f.id, k, pos, node])
