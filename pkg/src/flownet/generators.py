"""Small network constructors: the worked examples and random priors."""
from __future__ import annotations

import numpy as np

from .network import Network


def square_network(pressures=(1.0, 0.0, 1.0, 0.0), d=1.0) -> Network:
    """Four pressure vertices on a square loop.

    Alternating pressures give a unit pressure drop on every edge, so each
    edge carries a flow equal to its conductance.
    """
    edges = [(0, 1, d), (1, 2, d), (2, 3, d), (0, 3, d)]
    return Network(4, edges, pressure=dict(enumerate(pressures)))


def two_edge_network(inflow=1.0, d=1.0) -> Network:
    """Inflow vertex 2 feeding pressure vertices 0 (p=0) and 1 (p=1).

    Edge 0 joins vertices (0, 2) and edge 1 joins (1, 2).
    """
    return Network(3, [(0, 2, d), (1, 2, d)], pressure={0: 0.0, 1: 1.0}, inflow={2: inflow})


def triangle_network(pressures=(0.0, 1.0), inflow=1.0, d=(1.0, 1.0, 1.0)) -> Network:
    """Two pressure vertices and one inflow vertex, all mutually linked.

    Edge 0 is the pressure-pressure edge (0, 1).
    """
    edges = [(0, 1, d[0]), (0, 2, d[1]), (1, 2, d[2])]
    return Network(3, edges, pressure={0: pressures[0], 1: pressures[1]}, inflow={2: inflow})


def grid_edges(rows: int, cols: int) -> list:
    edges = []
    for r in range(rows):
        for c in range(cols):
            k = r * cols + c
            if c + 1 < cols:
                edges.append((k, k + 1))
            if r + 1 < rows:
                edges.append((k, k + cols))
    return edges


def random_tree_edges(n: int, rng) -> list:
    """Uniform random recursive tree on ``n`` vertices."""
    return [(int(rng.integers(0, k)), k) for k in range(1, n)]


def random_weights(n_edges: int, rng, low=0.5, high=2.0) -> np.ndarray:
    return rng.uniform(low, high, size=n_edges)


def balanced_inflows(vertices, rng) -> dict:
    """Random inflows on ``vertices`` summing to zero."""
    q = rng.normal(size=len(vertices))
    q -= q.mean()
    return {int(k): float(v) for k, v in zip(vertices, q)}


def random_driven_network(kind: str, rng, size: int = 4, n_dirichlet: int = 1,
                          pressure: float = 0.0, weighted: bool = True) -> Network:
    """Grid or tree prior with ``n_dirichlet`` equal-pressure vertices and random inflows.

    Inflows on the remaining vertices sum to zero when there is one pressure
    vertex; with several, their total is random and absorbed by the pressure
    vertices.
    """
    if kind == "grid":
        V = size * size
        edges = grid_edges(size, size)
    elif kind == "tree":
        V = size
        edges = random_tree_edges(size, rng)
    else:
        raise ValueError(f"unknown prior kind {kind!r}")
    d = random_weights(len(edges), rng) if weighted else np.ones(len(edges))
    order = rng.permutation(V)
    dirichlet = sorted(int(k) for k in order[:n_dirichlet])
    others = [int(k) for k in order[n_dirichlet:]]
    if n_dirichlet == 1:
        inflow = balanced_inflows(others, rng)
    else:
        inflow = {k: float(v) for k, v in zip(others, rng.normal(size=len(others)))}
    return Network(V, [(u, v, w) for (u, v), w in zip(edges, d)],
                   pressure={k: pressure for k in dirichlet}, inflow=inflow)


def random_mixed_network(rng, size: int = 3, n_dirichlet: int = 3) -> Network:
    """Grid prior with several pressure vertices of random pressure and random inflows."""
    V = size * size
    edges = grid_edges(size, size)
    extra = [(0, V - 1)] if V > 2 else []
    d = random_weights(len(edges) + len(extra), rng)
    order = rng.permutation(V)
    dirichlet = [int(k) for k in order[:n_dirichlet]]
    others = [int(k) for k in order[n_dirichlet:]]
    pressure = {k: float(rng.uniform(-1.0, 1.0)) for k in dirichlet}
    inflow = {k: float(v) for k, v in zip(others, rng.normal(size=len(others)))}
    all_edges = [(u, v, w) for (u, v), w in zip(edges + extra, d)]
    return Network(V, all_edges, pressure=pressure, inflow=inflow)
