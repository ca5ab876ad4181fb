"""Network topology, boundary conditions and positive-conductance views."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Mapping, Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components as _cc


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    d: float = 1.0


def _canonical(edge) -> Edge:
    if isinstance(edge, Edge):
        u, v, d = edge.u, edge.v, edge.d
    elif len(edge) == 2:
        (u, v), d = edge, 1.0
    else:
        u, v, d = edge
    u, v = int(u), int(v)
    if u > v:
        u, v = v, u
    return Edge(u, v, float(d))


@dataclass(frozen=True)
class Network:
    """Undirected network with Dirichlet (pressure) and Neumann (flow) vertices.

    Edges are stored with canonical orientation ``u < v``; a positive edge
    flow runs from ``u`` toward ``v``. Vertices absent from both ``pressure``
    and ``inflow`` are free and conserve mass.

    Parameters
    ----------
    n_vertices : int
        Number of vertices ``V``; ids are ``0 .. V-1``.
    edges : sequence of Edge or (u, v[, d]) tuples
        ``d`` is the positive material weight of the edge (defaults to 1).
    pressure : mapping vertex -> prescribed pressure
    inflow : mapping vertex -> prescribed inflow ``q`` (positive enters the network)
    """

    n_vertices: int
    edges: tuple = ()
    pressure: Mapping[int, float] = field(default_factory=dict)
    inflow: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "n_vertices", int(self.n_vertices))
        object.__setattr__(self, "edges", tuple(_canonical(e) for e in self.edges))
        p = {int(k): float(v) for k, v in dict(self.pressure).items()}
        q = {int(k): float(v) for k, v in dict(self.inflow).items()}
        object.__setattr__(self, "pressure", MappingProxyType(p))
        object.__setattr__(self, "inflow", MappingProxyType(q))

    @classmethod
    def from_lengths(cls, n_vertices, edges, lengths, **bc) -> "Network":
        """Build a network whose weights follow Hagen-Poiseuille, ``d = length**1.5``."""
        edges = [(u, v, float(ell) ** 1.5) for (u, v), ell in zip(edges, lengths)]
        return cls(n_vertices, edges, **bc)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def tails(self) -> np.ndarray:
        return np.array([e.u for e in self.edges], dtype=int)

    @property
    def heads(self) -> np.ndarray:
        return np.array([e.v for e in self.edges], dtype=int)

    @property
    def weights(self) -> np.ndarray:
        return np.array([e.d for e in self.edges], dtype=float)

    @property
    def dirichlet(self) -> list:
        return sorted(self.pressure)

    @property
    def neumann(self) -> list:
        return sorted(self.inflow)

    def inflow_vector(self) -> np.ndarray:
        q = np.zeros(self.n_vertices)
        for k, value in self.inflow.items():
            if 0 <= k < self.n_vertices:
                q[k] = value
        return q

    def pressure_vector(self) -> np.ndarray:
        """Prescribed pressures, zero at non-Dirichlet vertices."""
        p = np.zeros(self.n_vertices)
        for k, value in self.pressure.items():
            if 0 <= k < self.n_vertices:
                p[k] = value
        return p

    def is_dirichlet_mask(self) -> np.ndarray:
        mask = np.zeros(self.n_vertices, dtype=bool)
        mask[[k for k in self.pressure if 0 <= k < self.n_vertices]] = True
        return mask

    def has_neumann_drive(self) -> bool:
        return any(v != 0.0 for v in self.inflow.values())

    def with_boundary(self, pressure=None, inflow=None) -> "Network":
        return replace(
            self,
            pressure=self.pressure if pressure is None else pressure,
            inflow=self.inflow if inflow is None else inflow,
        )

    def edge_index(self, u: int, v: int) -> int:
        """Index of the edge joining ``u`` and ``v`` (either order)."""
        if u > v:
            u, v = v, u
        for i, e in enumerate(self.edges):
            if e.u == u and e.v == v:
                return i
        raise KeyError((u, v))

    def incidence(self) -> np.ndarray:
        """Dense V x E incidence matrix, +1 at the tail and -1 at the head."""
        B = np.zeros((self.n_vertices, self.n_edges))
        idx = np.arange(self.n_edges)
        B[self.tails, idx] = 1.0
        B[self.heads, idx] = -1.0
        return B

    def outflow(self, flows) -> np.ndarray:
        """Net flow leaving each vertex into the network, ``sum_l Q_kl``."""
        flows = np.asarray(flows, dtype=float)
        out = np.zeros(self.n_vertices)
        np.add.at(out, self.tails, flows)
        np.add.at(out, self.heads, -flows)
        return out


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.valid

    def raise_if_invalid(self):
        from .exceptions import InvalidNetworkError

        if self.violations:
            raise InvalidNetworkError(self.violations)


def validate_network(net: Network) -> ValidationReport:
    report = ValidationReport()
    V = net.n_vertices
    if V < 1:
        report.violations.append("vertex count must be positive")
    seen = set()
    for i, e in enumerate(net.edges):
        if e.u == e.v:
            report.violations.append(f"self-loop at edge {i} (vertex {e.u})")
        if not (0 <= e.u < V and 0 <= e.v < V):
            report.violations.append(f"edge {i} has vertex id out of range [0, {V})")
        if not (np.isfinite(e.d) and e.d > 0):
            report.violations.append(f"edge {i} has nonpositive weight d={e.d}")
        if (e.u, e.v) in seen:
            report.violations.append(f"duplicate edge {i} ({e.u}, {e.v})")
        seen.add((e.u, e.v))
    for k in sorted(set(net.pressure) | set(net.inflow)):
        if not 0 <= k < V:
            report.violations.append(f"boundary condition on unknown vertex {k}")
    for k in sorted(set(net.pressure) & set(net.inflow)):
        report.violations.append(f"conflicting boundary tags at vertex {k}")
    for k, value in list(net.pressure.items()) + list(net.inflow.items()):
        if not np.isfinite(value):
            report.violations.append(f"non-finite boundary value at vertex {k}")
    return report


def default_threshold(kappa) -> float:
    kappa = np.asarray(kappa, dtype=float)
    top = float(kappa.max()) if kappa.size else 0.0
    return 1e-12 * max(top, 1.0)


@dataclass(frozen=True)
class SubgraphView:
    network: Network
    active_edges: tuple
    component_of: np.ndarray

    @property
    def active_mask(self) -> np.ndarray:
        mask = np.zeros(self.network.n_edges, dtype=bool)
        mask[list(self.active_edges)] = True
        return mask

    @property
    def n_components(self) -> int:
        return int(self.component_of.max()) + 1 if self.component_of.size else 0


def positive_subgraph(net: Network, kappa, eps: Optional[float] = None) -> SubgraphView:
    kappa = np.asarray(kappa, dtype=float)
    if kappa.shape != (net.n_edges,):
        raise ValueError(f"expected {net.n_edges} conductances, got shape {kappa.shape}")
    if eps is None:
        eps = default_threshold(kappa)
    active = np.flatnonzero(kappa > eps)
    V = net.n_vertices
    tails, heads = net.tails[active], net.heads[active]
    adj = coo_matrix((np.ones(active.size), (tails, heads)), shape=(V, V))
    _, raw = _cc(adj, directed=False)
    # relabel so component ids follow the lowest member vertex
    order = {}
    labels = np.empty(V, dtype=int)
    for k in range(V):
        labels[k] = order.setdefault(raw[k], len(order))
    labels.setflags(write=False)
    return SubgraphView(net, tuple(int(i) for i in active), labels)


@dataclass(frozen=True)
class Component:
    label: int
    vertices: tuple
    dirichlet: tuple
    net_inflow: float

    @property
    def has_dirichlet(self) -> bool:
        return bool(self.dirichlet)


def connected_components(view: SubgraphView) -> list:
    net = view.network
    q = net.inflow_vector()
    comps = []
    for label in range(view.n_components):
        members = np.flatnonzero(view.component_of == label)
        comps.append(
            Component(
                label=label,
                vertices=tuple(int(k) for k in members),
                dirichlet=tuple(int(k) for k in members if int(k) in net.pressure),
                net_inflow=float(q[members].sum()),
            )
        )
    return comps


def adjacency(view: SubgraphView) -> list:
    """Neighbour lists ``[(neighbour, edge_index), ...]`` over active edges."""
    net = view.network
    adj = [[] for _ in range(net.n_vertices)]
    for i in view.active_edges:
        e = net.edges[i]
        adj[e.u].append((e.v, i))
        adj[e.v].append((e.u, i))
    for nbrs in adj:
        nbrs.sort()
    return adj
