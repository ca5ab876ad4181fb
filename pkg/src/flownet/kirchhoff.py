"""Kirchhoff pressure system: assembly, solution and superposition."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import SingularSystem, UnbalancedInflow
from .network import Network, connected_components, positive_subgraph

BALANCE_TOL = 1e-8


class Gauge(str, enum.Enum):
    UNIQUE = "unique"
    UP_TO_CONSTANT = "up_to_constant"


@dataclass(frozen=True)
class LinearSystem:
    matrix: np.ndarray
    rhs: np.ndarray

    def solve(self) -> np.ndarray:
        return np.linalg.solve(self.matrix, self.rhs)


@dataclass(frozen=True)
class FlowState:
    """Vertex pressures and canonical edge flows of a Kirchhoff solution."""

    pressures: np.ndarray
    flows: np.ndarray
    gauge: Gauge = Gauge.UNIQUE

    def net_outflow(self, net: Network) -> np.ndarray:
        return net.outflow(self.flows)


def assemble_system(net: Network, kappa, eps: Optional[float] = None) -> LinearSystem:
    """Dense Kirchhoff matrix ``D`` and right-hand side ``b``.

    Dirichlet rows are unit rows carrying the prescribed pressure; every other
    row is the weighted-Laplacian row of the vertex with ``b_k = q_k``. Edges
    at or below the conductance threshold are left out.
    """
    view = positive_subgraph(net, kappa, eps)
    kappa = np.asarray(kappa, dtype=float)
    V = net.n_vertices
    D = np.zeros((V, V))
    for i in view.active_edges:
        e, c = net.edges[i], kappa[i]
        D[e.u, e.u] += c
        D[e.v, e.v] += c
        D[e.u, e.v] -= c
        D[e.v, e.u] -= c
    b = net.inflow_vector()
    for k, value in net.pressure.items():
        D[k, :] = 0.0
        D[k, k] = 1.0
        b[k] = value
    return LinearSystem(D, b)


def solve_kirchhoff(net: Network, kappa, eps: Optional[float] = None) -> FlowState:
    """Solve for pressures and flows under the network's boundary conditions.

    Components of the positive subgraph without a pressure vertex must have
    zero net inflow; their pressure is pinned to 0 at the lowest-index member
    and the returned gauge is ``UP_TO_CONSTANT``. Flows are unique either way.

    Raises
    ------
    UnbalancedInflow
        A pressure-free component has nonzero net inflow.
    SingularSystem
        The assembled system is numerically rank deficient for other reasons.
    """
    kappa = np.asarray(kappa, dtype=float)
    view = positive_subgraph(net, kappa, eps)
    q = net.inflow_vector()
    scale = max(1.0, float(np.abs(q).sum()))
    pinned = []
    for comp in connected_components(view):
        if comp.has_dirichlet:
            continue
        if abs(comp.net_inflow) > BALANCE_TOL * scale:
            raise UnbalancedInflow(comp.vertices, comp.net_inflow)
        pinned.append(comp.vertices[0])

    system = assemble_system(net, kappa, eps)
    D, b = system.matrix.copy(), system.rhs.copy()
    for k in pinned:
        D[k, :] = 0.0
        D[k, k] = 1.0
        b[k] = 0.0
    try:
        p = np.linalg.solve(D, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    if not np.all(np.isfinite(p)):
        raise SingularSystem("non-finite pressures")
    resid = np.abs(D @ p - b).max(initial=0.0)
    if resid > 1e-8 * max(1.0, np.abs(b).max(initial=0.0), np.abs(D).max(initial=0.0) * np.abs(p).max(initial=0.0)):
        raise SingularSystem(f"residual {resid:.3g} after factorization")

    flows = np.zeros(net.n_edges)
    act = np.asarray(view.active_edges, dtype=int)
    if act.size:
        flows[act] = kappa[act] * (p[net.tails[act]] - p[net.heads[act]])
    gauge = Gauge.UP_TO_CONSTANT if pinned else Gauge.UNIQUE
    return FlowState(p, flows, gauge)


def conservation_residual(net: Network, flows) -> np.ndarray:
    """``sum_l Q_kl - q_k`` at non-Dirichlet vertices, 0 at Dirichlet vertices."""
    r = net.outflow(flows) - net.inflow_vector()
    r[net.is_dirichlet_mask()] = 0.0
    return r


def decompose_flow(net: Network, kappa, eps: Optional[float] = None):
    """Split the solution into a flow-driven and a pressure-driven part.

    Returns ``(state_f, state_p)``: ``state_f`` keeps all inflows with every
    prescribed pressure set to 0, ``state_p`` keeps the prescribed pressures
    with all inflows removed. Flows add up edgewise to the full solution.
    """
    f_net = net.with_boundary(pressure={k: 0.0 for k in net.pressure})
    p_net = net.with_boundary(inflow={})
    return solve_kirchhoff(f_net, kappa, eps), solve_kirchhoff(p_net, kappa, eps)
