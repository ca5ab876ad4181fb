import numpy as np
import pytest

from flownet.generators import random_driven_network, random_mixed_network

# Filled by test_acceptance; one line per criterion in the terminal summary.
ACCEPTANCE_LINES = {}


def record(number, name, passed, detail=""):
    ACCEPTANCE_LINES[number] = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {name}  {detail}".rstrip()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])


def driven(seed, kind="tree", size=None, n_dirichlet=1, pressure=0.0):
    rng = np.random.default_rng(seed)
    if size is None:
        size = 7 if kind == "tree" else 3
    return random_driven_network(kind, rng, size=size, n_dirichlet=n_dirichlet, pressure=pressure)


def mixed(seed, size=3, n_dirichlet=3):
    return random_mixed_network(np.random.default_rng(seed), size=size, n_dirichlet=n_dirichlet)


def positive_kappa(net, seed):
    return np.random.default_rng(seed).uniform(0.2, 3.0, size=net.n_edges)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def perturbation_basis(net):
    """Feasible flow directions: fundamental-cycle loops and paths between pressure vertices.

    Adding any combination keeps every non-pressure vertex balanced.
    """
    from flownet.network import adjacency, positive_subgraph
    from flownet.topology import _bfs_path, fundamental_cycles, walk

    view = positive_subgraph(net, np.ones(net.n_edges), 0.0)
    basis = []
    for loop in fundamental_cycles(view):
        v = np.zeros(net.n_edges)
        v[list(loop.edges)] = loop.signs
        basis.append(v)
    adj = adjacency(view)
    P = net.dirichlet
    for i, a in enumerate(P):
        for b in P[i + 1:]:
            path = _bfs_path(adj, a, b)
            if path is None:
                continue
            w = walk(net, path)
            v = np.zeros(net.n_edges)
            v[list(w.edges)] = w.signs
            basis.append(v)
    return basis


def random_perturbation(basis, rng, n_terms=None):
    if not basis:
        return None
    n_terms = n_terms or int(rng.integers(1, len(basis) + 1))
    picks = rng.choice(len(basis), size=min(n_terms, len(basis)), replace=False)
    return sum(rng.uniform(-1.0, 1.0) * basis[j] for j in picks)
