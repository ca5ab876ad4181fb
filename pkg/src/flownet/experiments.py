"""Worked examples, the two-edge material sweep and a brute-force grid oracle."""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import bisect

from .energy import material_cost
from .exceptions import SolverError, TooManyEdges
from .generators import random_driven_network, square_network, two_edge_network
from .kirchhoff import solve_kirchhoff
from .network import Network, connected_components, positive_subgraph
from .optimizer import (OptimizeConfig, Termination, optimize_constrained, optimize_penalized)

MAX_ORACLE_EDGES = 6


# ---------------------------------------------------------------------------
# brute-force oracle


@dataclass
class OracleResult:
    kappa: np.ndarray
    objective: float
    shares: np.ndarray
    evaluated: int
    skipped: int


def _simplex_grid(n_edges: int, steps: int):
    """All integer compositions of ``steps`` into ``n_edges`` parts (stars and bars)."""
    for bars in itertools.combinations(range(steps + n_edges - 1), n_edges - 1):
        prev, counts = -1, []
        for b in bars:
            counts.append(b - prev - 1)
            prev = b
        counts.append(steps + n_edges - 2 - prev)
        yield counts


def _batch_objective(net: Network, kappas: np.ndarray, support: np.ndarray, objective: str):
    """Objective of the Kirchhoff flow for a batch of conductances sharing one support."""
    V = net.n_vertices
    t, h = net.tails, net.heads
    view = positive_subgraph(net, support.astype(float), 0.0)
    fixed = net.is_dirichlet_mask()
    for comp in connected_components(view):
        if not comp.has_dirichlet:
            fixed[comp.vertices[0]] = True
    lap = np.zeros((net.n_edges, V, V))
    for i in np.flatnonzero(support):
        lap[i, t[i], t[i]] = lap[i, h[i], h[i]] = 1.0
        lap[i, t[i], h[i]] = lap[i, h[i], t[i]] = -1.0
    lap[:, fixed, :] = 0.0
    base = np.diag(fixed.astype(float))
    rhs = np.where(fixed, 0.0, net.inflow_vector())
    for k, p in net.pressure.items():
        rhs[k] = p
    mats = base[None] + np.einsum("be,eij->bij", kappas, lap)
    p = np.linalg.solve(mats, np.broadcast_to(rhs, (len(kappas), V))[..., None])[..., 0]
    drop = p[:, t] - p[:, h]
    D = np.sum(kappas * drop ** 2, axis=1)
    if objective == "dissipation":
        return D
    flows = kappas * drop
    out = np.zeros((len(kappas), V))
    np.add.at(out, (slice(None), t), flows)
    np.add.at(out, (slice(None), h), -flows)
    work = sum(pk * out[:, k] for k, pk in net.pressure.items())
    return D - 2.0 * work


def brute_force_minimize(net: Network, M: float, objective: str = "dissipation",
                         grid_steps: int = 60) -> OracleResult:
    """Grid search over the material simplex ``kappa_e = (M s_e / d_e)**2``.

    Points whose zero pattern leaves a pressure-free component with net
    inflow are skipped.
    """
    E = net.n_edges
    if E > MAX_ORACLE_EDGES:
        raise TooManyEdges(f"oracle handles at most {MAX_ORACLE_EDGES} edges, got {E}")
    if grid_steps < 10:
        raise ValueError("grid_steps must be at least 10")
    counts = np.array(list(_simplex_grid(E, grid_steps)), dtype=float)
    shares = counts / grid_steps
    kappas = (M * shares / net.weights) ** 2
    support = shares > 0
    keys = support @ (1 << np.arange(E))
    values = np.full(len(shares), np.inf)
    skipped = 0
    for key in np.unique(keys):
        rows = np.flatnonzero(keys == key)
        pattern = support[rows[0]]
        try:
            solve_kirchhoff(net, pattern.astype(float), 0.0)
        except SolverError:
            skipped += len(rows)
            continue
        for chunk in np.array_split(rows, max(1, len(rows) // 20000)):
            values[chunk] = _batch_objective(net, kappas[chunk], pattern, objective)
    best = int(np.argmin(values))
    return OracleResult(kappas[best], float(values[best]), shares[best],
                        len(shares) - skipped, skipped)


# ---------------------------------------------------------------------------
# two-edge uniformity example


@dataclass(frozen=True)
class SweepRow:
    K: float
    kappa1: float
    kappa2: float
    asymmetry: float


def uniform_split_material(kappa2: float) -> float:
    """Square-root material of the evenly splitting two-edge network as a function of ``kappa2``."""
    r = np.sqrt(1.0 + 2.0 * kappa2)
    return (1.0 + r) * np.sqrt(kappa2) / r


def sweep_two_edge(K_values) -> list:
    """Even-split conductances of the two-edge network at each material ``K``.

    ``K`` follows the squared convention ``sqrt(K) = sqrt(kappa1) + sqrt(kappa2)``.
    """
    rows = []
    for K in K_values:
        K = float(K)
        if not K > 0:
            raise ValueError("K must be positive")
        target = np.sqrt(K)
        k2 = bisect(lambda x: uniform_split_material(x) - target, 0.0, K,
                    xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=2000)
        k1 = k2 / (1.0 + 2.0 * k2)
        rows.append(SweepRow(K, k1, k2, k2 / k1))
    return rows


def delivery_uniformity(net: Network, kappa, state) -> float:
    """``sum (Q_k - 1/2)**2`` over flows delivered into the pressure vertices."""
    out = net.outflow(getattr(state, "flows", state))
    return float(sum((-out[k] - 0.5) ** 2 for k in net.dirichlet))


def penalty_diagonal(a: float, eps_values, net: Network = None) -> list:
    """Penalized uniformity along ``kappa1 = kappa2 = eps`` (solved, not closed form)."""
    net = net or two_edge_network()
    values = []
    for eps in eps_values:
        kappa = np.full(2, float(eps))
        state = solve_kirchhoff(net, kappa, 0.0)
        values.append(delivery_uniformity(net, kappa, state) + a * material_cost(net, kappa))
    return values


@dataclass
class DegenerationReport:
    termination: Termination
    eps_values: list
    theta: list
    strictly_decreasing: bool
    hook_trace: list = field(default_factory=list)


def penalty_degeneration(a: float = 1.0, eps_values=(1e-2, 1e-4, 1e-6)) -> DegenerationReport:
    """Show the penalized uniformity problem has no minimizer on the two-edge network."""
    net = two_edge_network()
    theta = penalty_diagonal(a, eps_values, net)
    decreasing = all(y < x for x, y in zip(theta, theta[1:]))
    cfg = OptimizeConfig(objective="dissipation", mode="penalty", material=None,
                         penalty_coeff=a, restarts=1)
    hook = optimize_penalized(net, cfg, objective_fn=delivery_uniformity)
    term = hook.termination if decreasing else Termination.CONVERGED
    return DegenerationReport(term, list(eps_values), theta, decreasing, hook.trace)


# ---------------------------------------------------------------------------
# worked examples


@dataclass
class Check:
    name: str
    passed: bool
    detail: str


def square_strata(M: float = 1.0) -> list:
    """Dissipation with ``n`` equal active square edges, ``n = 1..4``."""
    net = square_network()
    out = []
    for n in range(1, 5):
        kappa = np.zeros(4)
        kappa[:n] = (M / n) ** 2
        state = solve_kirchhoff(net, kappa)
        out.append(float(np.sum(state.flows[:n] ** 2 / kappa[:n])))
    return out


def penalty_round_trip(net: Network, a: float, restarts: int = 10, seed: int = 0):
    """Penalized optimum versus the constrained optimum at the matching material.

    Returns ``(penalized_result, constrained_result, relative_gap)``.
    """
    pen = optimize_penalized(net, OptimizeConfig(objective="dissipation", mode="penalty",
                                                 material=None, penalty_coeff=a,
                                                 restarts=restarts, rng_seed=seed))
    K = pen.extra["material_level"]
    con = optimize_constrained(net, OptimizeConfig(objective="dissipation", mode="constraint",
                                                   material=K, restarts=restarts, rng_seed=seed))
    theta_con = con.energy.dissipation + a * con.energy.material
    gap = abs(theta_con - pen.objective) / abs(pen.objective)
    return pen, con, gap


def run_paper_examples(restarts: int = 10, seed: int = 0) -> list:
    checks = []

    t0 = time.perf_counter()
    sq = square_network()
    res = optimize_constrained(sq, OptimizeConfig(objective="dissipation", material=1.0,
                                                  restarts=restarts, rng_seed=seed))
    oracle = brute_force_minimize(sq, 1.0, "dissipation", 60)
    share = np.sqrt(res.conductances)  # d = 1, M = 1
    ok = (abs(res.objective - 0.25) <= 1e-3 and abs(oracle.objective - 0.25) <= 1e-3
          and np.abs(share - 0.25).max() <= 2 / 60 and np.abs(oracle.shares - 0.25).max() <= 2 / 60)
    checks.append(Check("square loop optimum", ok,
                        f"optimizer D={res.objective:.6g}, oracle D={oracle.objective:.6g}, "
                        f"K=M^2=1, {time.perf_counter() - t0:.2f}s"))
    strata = square_strata(1.0)
    ok = all(y < x for x, y in zip(strata, strata[1:])) and np.allclose(strata, [1 / n for n in range(1, 5)])
    checks.append(Check("square strata D(n)=M^2/n", ok, ", ".join(f"{v:.6g}" for v in strata)))

    deg = penalty_degeneration(1.0)
    ok = deg.termination is Termination.DEGENERATE_TO_ZERO and deg.strictly_decreasing
    checks.append(Check("penalized uniformity has no minimizer", ok,
                        "theta=" + ", ".join(f"{v:.3e}" for v in deg.theta)))

    rows = sweep_two_edge([1e-4, 1.0, 1e4])
    ok = (abs(rows[0].kappa2 / 2.5e-5 - 1) <= 0.01 and rows[2].kappa2 / 1e4 >= 0.97
          and rows[0].asymmetry < rows[1].asymmetry < rows[2].asymmetry)
    checks.append(Check("two-edge sweep asymptotics", ok,
                        "; ".join(f"K={r.K:g}: k1={r.kappa1:.6g} k2={r.kappa2:.6g}" for r in rows)))

    net = random_driven_network("tree", np.random.default_rng(seed), size=6)
    _, _, gap = penalty_round_trip(net, 1.0, restarts=restarts, seed=seed)
    checks.append(Check("penalty/constraint round trip", gap <= 1e-6, f"relative gap {gap:.2e}"))
    return checks


def format_checks(checks) -> str:
    width = max(len(c.name) for c in checks)
    return "\n".join(f"{'PASS' if c.passed else 'FAIL'}  {c.name:<{width}}  {c.detail}" for c in checks)
