"""Topology certificates: forest structure, pressure-vertex connectivity, Murray conformance."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .network import Network, SubgraphView, adjacency, positive_subgraph

ZERO_FLOW_RTOL = 1e-10


def same_pressure(a: float, b: float) -> bool:
    return abs(a - b) <= 1e-12 * max(1.0, abs(a), abs(b))


@dataclass(frozen=True)
class OrientedPath:
    """Walk through ``vertices`` using ``edges``; ``signs[i]`` is +1 when the
    walk traverses edge ``i`` along its canonical orientation. For a closed
    path (loop) the last edge returns to ``vertices[0]``."""

    vertices: tuple
    edges: tuple
    signs: tuple
    closed: bool = False

    def oriented(self, flows) -> np.ndarray:
        flows = np.asarray(flows, dtype=float)
        return np.asarray(self.signs, dtype=float) * flows[list(self.edges)]

    def to_dict(self) -> dict:
        return {"vertices": list(self.vertices), "edges": list(self.edges),
                "signs": list(self.signs), "closed": self.closed}


def walk(net: Network, vertices, closed=False) -> OrientedPath:
    """Build an :class:`OrientedPath` from a vertex sequence."""
    vertices = [int(k) for k in vertices]
    steps = list(zip(vertices, vertices[1:]))
    if closed:
        steps.append((vertices[-1], vertices[0]))
    edges, signs = [], []
    for a, b in steps:
        i = net.edge_index(a, b)
        edges.append(i)
        signs.append(1 if net.edges[i].u == a else -1)
    return OrientedPath(tuple(vertices), tuple(edges), tuple(signs), closed)


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def _bfs_path(adj, start, goal, blocked=frozenset()):
    """Shortest vertex path from start to goal; ``blocked`` vertices may not be interior."""
    prev = {start: None}
    queue = deque([start])
    while queue:
        k = queue.popleft()
        if k == goal:
            path = [k]
            while prev[path[-1]] is not None:
                path.append(prev[path[-1]])
            return path[::-1]
        if k in blocked and k != start:
            continue
        for nb, _ in adj[k]:
            if nb not in prev:
                prev[nb] = k
                queue.append(nb)
    return None


def is_forest(view: SubgraphView):
    """Return ``(True, None)`` for an acyclic active subgraph, else ``(False, loop)``."""
    net = view.network
    uf = _UnionFind(net.n_vertices)
    tree = [[] for _ in range(net.n_vertices)]
    for i in view.active_edges:
        e = net.edges[i]
        if uf.union(e.u, e.v):
            tree[e.u].append((e.v, i))
            tree[e.v].append((e.u, i))
            continue
        path = _bfs_path(tree, e.v, e.u)
        return False, walk(net, path, closed=True)
    return True, None


def fundamental_cycles(view: SubgraphView) -> list:
    """Fundamental cycles of a BFS spanning forest, ordered by closing-edge index."""
    net = view.network
    adj = adjacency(view)
    parent, depth = {}, {}
    tree_edges = set()
    for root in range(net.n_vertices):
        if root in parent:
            continue
        parent[root], depth[root] = None, 0
        queue = deque([root])
        while queue:
            k = queue.popleft()
            for nb, i in adj[k]:
                if nb not in parent:
                    parent[nb], depth[nb] = k, depth[k] + 1
                    tree_edges.add(i)
                    queue.append(nb)

    def tree_path(a, b):
        left, right = [a], [b]
        while left[-1] != right[-1]:
            if depth[left[-1]] >= depth[right[-1]]:
                left.append(parent[left[-1]])
            else:
                right.append(parent[right[-1]])
        return left + right[-2::-1]

    cycles = []
    for i in view.active_edges:
        if i in tree_edges:
            continue
        e = net.edges[i]
        cycles.append(walk(net, tree_path(e.v, e.u), closed=True))
    return cycles


def dirichlet_path(net: Network, view: SubgraphView, equal_only: bool = True):
    """Lowest-index pair of connected Dirichlet vertices and a shortest path.

    With ``equal_only`` the pair must share its prescribed pressure and the
    path may pass through other Dirichlet vertices. Otherwise any pair
    qualifies and the path interior avoids Dirichlet vertices.
    """
    adj = adjacency(view)
    comp = view.component_of
    dirichlet = net.dirichlet
    blocked = frozenset() if equal_only else frozenset(dirichlet)
    for a_idx, a in enumerate(dirichlet):
        for b in dirichlet[a_idx + 1:]:
            if comp[a] != comp[b]:
                continue
            if equal_only and not same_pressure(net.pressure[a], net.pressure[b]):
                continue
            path = _bfs_path(adj, a, b, blocked)
            if path is not None:
                return (a, b), walk(net, path)
    return None


def equal_pressure_connection(net: Network, view: SubgraphView):
    """``((a, b), path)`` for connected equal-pressure Dirichlet vertices, else ``None``."""
    return dirichlet_path(net, view, equal_only=True)


def murray_residual(net: Network, kappa, flows, eps: Optional[float] = None):
    """Deviation from ``kappa = a |Q|**(4/3) / d**(2/3)`` for a single fitted ``a``.

    Returns ``(residual, a)``. The residual is the largest absolute misfit
    relative to the largest conductance; an active edge without flow makes the
    network nonconformant (residual 1). Networks without flow give ``(0, 0)``.
    """
    kappa = np.asarray(kappa, dtype=float)
    Q = np.abs(np.asarray(getattr(flows, "flows", flows), dtype=float))
    active = positive_subgraph(net, kappa, eps).active_mask
    qmax = Q.max(initial=0.0)
    if qmax == 0.0:
        return 0.0, 0.0
    flowing = Q > ZERO_FLOW_RTOL * qmax
    if np.any(active & ~flowing):
        return 1.0, 0.0
    sel = active & flowing
    if not sel.any():
        return 0.0, 0.0
    w = Q[sel] ** (4.0 / 3.0) * net.weights[sel] ** (-2.0 / 3.0)
    a = float(np.dot(kappa[sel], w) / np.dot(w, w))
    misfit = np.abs(kappa[sel] - a * w).max()
    # flowing edges left without conductance also violate the law
    if np.any(flowing & ~active):
        misfit = max(misfit, (a * Q[flowing & ~active] ** (4 / 3)
                              * net.weights[flowing & ~active] ** (-2 / 3)).max())
    return float(misfit / kappa[active].max()), a


@dataclass
class TopologyReport:
    is_forest: bool
    loop_witness: Optional[OrientedPath]
    equal_pressure_path_witness: Optional[tuple]
    murray_residual: float
    murray_coefficient: float
    dirichlet_components: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        witness = None
        if self.equal_pressure_path_witness is not None:
            pair, path = self.equal_pressure_path_witness
            witness = {"pair": list(pair), "path": path.to_dict()}
        return {
            "is_forest": self.is_forest,
            "loop_witness": None if self.loop_witness is None else self.loop_witness.to_dict(),
            "equal_pressure_path_witness": witness,
            "murray_residual": self.murray_residual,
            "murray_coefficient": self.murray_coefficient,
            "dirichlet_components": {str(k): v for k, v in self.dirichlet_components.items()},
        }


def analyze(net: Network, kappa, flows, eps: Optional[float] = None) -> TopologyReport:
    view = positive_subgraph(net, kappa, eps)
    forest, loop = is_forest(view)
    residual, a = murray_residual(net, kappa, flows, eps)
    return TopologyReport(
        is_forest=forest,
        loop_witness=loop,
        equal_pressure_path_witness=equal_pressure_connection(net, view),
        murray_residual=residual,
        murray_coefficient=a,
        dirichlet_components={k: int(view.component_of[k]) for k in net.dirichlet},
    )
