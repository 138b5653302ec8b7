"""Network graph: a donor-rooted relay grid plus randomly placed user terminals.

Node ids are dense ints. The donor is always node 0, relay (backhaul) nodes
follow in row-major grid order, user terminals (UEs) come last. Directed links
get dense ids in creation order, so a (rows, cols, spacing, ue placement)
tuple maps to exactly one graph.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

DONOR_ID = 0


@dataclass(frozen=True)
class Node:
    id: int
    kind: str  # "donor" | "iab" | "ue"
    x: float
    y: float


@dataclass(frozen=True)
class Link:
    id: int
    tx: int
    rx: int


class NetworkGraph:
    """Directed graph with positions. Links are unidirectional; grid adjacency
    is materialized as a link pair, UE access links go uplink only."""

    def __init__(self, nodes: list[Node], links: list[Link]):
        self.nodes = nodes
        self.links = links
        self.out_links: list[list[int]] = [[] for _ in nodes]
        self.in_links: list[list[int]] = [[] for _ in nodes]
        self._by_ends: dict[tuple[int, int], int] = {}
        for ln in links:
            self.out_links[ln.tx].append(ln.id)
            self.in_links[ln.rx].append(ln.id)
            self._by_ends[(ln.tx, ln.rx)] = ln.id

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_links(self) -> int:
        return len(self.links)

    def link_between(self, tx: int, rx: int) -> int | None:
        return self._by_ends.get((tx, rx))

    def node_ids(self, kind: str) -> list[int]:
        return [n.id for n in self.nodes if n.kind == kind]

    def backhaul_ids(self) -> list[int]:
        return [n.id for n in self.nodes if n.kind in ("donor", "iab")]

    def positions(self) -> np.ndarray:
        return np.array([[n.x, n.y] for n in self.nodes], dtype=np.float64)

    def neighbors_out(self, node: int) -> list[int]:
        return [self.links[l].rx for l in self.out_links[node]]

    def distance(self, a: int, b: int) -> float:
        na, nb = self.nodes[a], self.nodes[b]
        return math.hypot(na.x - nb.x, na.y - nb.y)


def build_grid_topology(rows: int, cols: int, spacing: float,
                        donor_cell: int | None = None) -> NetworkGraph:
    """Regular rows x cols grid with 4-neighbor connectivity.

    Cell (r, c) sits at (c*spacing, r*spacing). donor_cell is a row-major cell
    index; default is the center cell. Each grid edge becomes two directed links.
    """
    if rows < 1 or cols < 1:
        raise ValueError("grid must have at least one row and one column")
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    n_cells = rows * cols
    if donor_cell is None:
        donor_cell = (rows // 2) * cols + (cols // 2)
    if not 0 <= donor_cell < n_cells:
        raise ValueError(f"donor_cell {donor_cell} outside grid of {n_cells} cells")

    cell_to_id: dict[int, int] = {donor_cell: DONOR_ID}
    nodes: list[Node] = []
    next_id = 1
    for cell in range(n_cells):
        if cell != donor_cell:
            cell_to_id[cell] = next_id
            next_id += 1
    for cell in sorted(cell_to_id, key=cell_to_id.get):
        r, c = divmod(cell, cols)
        kind = "donor" if cell == donor_cell else "iab"
        nodes.append(Node(cell_to_id[cell], kind, c * spacing, r * spacing))

    links: list[Link] = []
    for cell in range(n_cells):
        r, c = divmod(cell, cols)
        for nr, nc in ((r, c + 1), (r + 1, c)):
            if nr < rows and nc < cols:
                a = cell_to_id[cell]
                b = cell_to_id[nr * cols + nc]
                links.append(Link(len(links), a, b))
                links.append(Link(len(links), b, a))
    return NetworkGraph(nodes, links)


def place_ues(graph: NetworkGraph, count: int, rng: np.random.Generator) -> NetworkGraph:
    """Append `count` UE nodes uniformly inside the backhaul bounding box.

    Each UE gets uplink access links to its two nearest backhaul nodes
    (ties broken by node id), nearest first. Returns a new graph.
    """
    if count < 0:
        raise ValueError("count must be >= 0")
    backhaul = graph.backhaul_ids()
    if count > 0 and len(backhaul) < 2:
        raise ValueError("UE placement needs at least two backhaul nodes for duplication")
    nodes = list(graph.nodes)
    links = list(graph.links)
    pos = graph.positions()
    xmin, ymin = pos[backhaul].min(axis=0)
    xmax, ymax = pos[backhaul].max(axis=0)
    for _ in range(count):
        u = rng.random(2)
        x = xmin + u[0] * (xmax - xmin)
        y = ymin + u[1] * (ymax - ymin)
        ue_id = len(nodes)
        nodes.append(Node(ue_id, "ue", x, y))
        ranked = sorted(backhaul, key=lambda b: (math.hypot(x - pos[b][0], y - pos[b][1]), b))
        for target in ranked[:2]:
            links.append(Link(len(links), ue_id, target))
    return NetworkGraph(nodes, links)


@dataclass
class ConflictSets:
    """per_link[l] is the set of link ids that cannot be active together with l."""

    per_link: list[set[int]]

    def conflicts(self, link: int) -> set[int]:
        return self.per_link[link]


def build_conflict_sets(graph: NetworkGraph, interference_range: float) -> ConflictSets:
    """Two links conflict when they share an endpoint node (half duplex) or any
    pair of their endpoints sits within interference_range meters."""
    if interference_range < 0:
        raise ValueError("interference_range must be >= 0")
    n = graph.n_links
    per_link: list[set[int]] = [set() for _ in range(n)]
    pos = graph.positions()

    def close(a: int, b: int) -> bool:
        d = pos[a] - pos[b]
        return float(np.hypot(d[0], d[1])) <= interference_range

    for i in range(n):
        li = graph.links[i]
        for j in range(i + 1, n):
            lj = graph.links[j]
            ends_i = (li.tx, li.rx)
            ends_j = (lj.tx, lj.rx)
            shared = li.tx in ends_j or li.rx in ends_j
            if shared or any(close(a, b) for a in ends_i for b in ends_j):
                per_link[i].add(j)
                per_link[j].add(i)
    return ConflictSets(per_link)


def write_topology_csv(graph: NetworkGraph, path: str) -> None:
    """Dump nodes and links to one CSV (kind column disambiguates rows)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["record", "id", "kind", "x", "y", "tx", "rx"])
        for n in graph.nodes:
            w.writerow(["node", n.id, n.kind, f"{n.x:.3f}", f"{n.y:.3f}", "", ""])
        for ln in graph.links:
            w.writerow(["link", ln.id, "", "", "", ln.tx, ln.rx])
