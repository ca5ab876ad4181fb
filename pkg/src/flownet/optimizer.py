"""Conductance optimization under a material constraint or penalty.

The descent works on a feasible pair ``(kappa, Q)``: flows that satisfy mass
conservation and every prescribed inflow, with ``Q = 0`` wherever
``kappa = 0``. Each move below is non-increasing for the objective of the pair:

* Murray refit -- for fixed flows, ``kappa ~ |Q|**(4/3) / d**(2/3)`` is the
  best way to spend a fixed amount of material;
* loop / path current -- push a constant current around a cycle (or between
  two pressure vertices) and refit the material on it; the optimum current
  always zeroes at least one edge;
* prune and redistribute -- drop dead edges and scale the rest up;
* relaxation -- replace the flows by the Kirchhoff flows, which minimize the
  complementary dissipation among all feasible flows.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize

from .energy import (EnergyReport, complementary_dissipation, dissipation, energy_report,
                     material_cost, objective_value, OBJECTIVES)
from .exceptions import (AllZeroFlows, ConstantLoopFlow, EndpointPressureMismatch,
                         NoLiveFlow, NonPhysicalPrior, NotScaleInvariant, SolverError)
from .kirchhoff import FlowState, decompose_flow, solve_kirchhoff
from .network import Network, connected_components, positive_subgraph, validate_network
from .topology import (ZERO_FLOW_RTOL, OrientedPath, TopologyReport, analyze, dirichlet_path,
                       fundamental_cycles, same_pressure)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class Termination(str, enum.Enum):
    CONVERGED = "Converged"
    MAX_ITERS = "MaxIters"
    DEGENERATE_TO_ZERO = "DegenerateToZero"
    UNBOUNDED_BELOW = "UnboundedBelow"


@dataclass
class OptimizeConfig:
    objective: str = "complementary"
    mode: str = "constraint"
    material: Optional[float] = 1.0
    penalty_coeff: Optional[float] = None
    max_iters: int = 1000
    rel_tol: float = 1e-10
    prune_threshold: Optional[float] = None
    restarts: int = 10
    rng_seed: int = 0

    def __post_init__(self):
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}, got {self.objective!r}")
        if self.mode not in ("constraint", "penalty"):
            raise ValueError(f"mode must be 'constraint' or 'penalty', got {self.mode!r}")
        if self.mode == "constraint" and not (self.material is not None and self.material > 0):
            raise ValueError("constraint mode needs a positive material")
        if self.mode == "penalty" and not (self.penalty_coeff is not None and self.penalty_coeff > 0):
            raise ValueError("penalty mode needs a positive penalty_coeff")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.max_iters < 1 or self.restarts < 1:
            raise ValueError("max_iters and restarts must be at least 1")
        if self.prune_threshold is not None and self.prune_threshold < 0:
            raise ValueError("prune_threshold must be nonnegative")


@dataclass
class OptimizeResult:
    conductances: np.ndarray
    flowstate: FlowState
    energy: EnergyReport
    trace: list
    certificates: TopologyReport
    termination: Termination
    objective: float
    restart: int = 0
    restart_objectives: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def material(self) -> float:
        return self.energy.material

    def to_dict(self) -> dict:
        return {
            "conductances": [float(x) for x in self.conductances],
            "pressures": [float(x) for x in self.flowstate.pressures],
            "flows": [float(x) for x in self.flowstate.flows],
            "gauge": self.flowstate.gauge.value,
            "energy": self.energy.to_dict(),
            "material": self.energy.material,
            "material_squared": self.energy.material ** 2,
            "objective": self.objective,
            "certificates": self.certificates.to_dict(),
            "termination": self.termination.value,
            "restart": self.restart,
            "restart_objectives": [float(x) for x in self.restart_objectives],
            "trace": [float(x) for x in self.trace],
            "extra": {k: v for k, v in self.extra.items()},
        }


# ---------------------------------------------------------------------------
# elementary moves


def murray_conductances(net: Network, flows, M: float, edge_subset=None, kappa=None) -> np.ndarray:
    """Murray-law conductances on ``edge_subset`` spending exactly material ``M`` there.

    ``kappa_e = mu |Q_e|**(4/3) / d_e**(2/3)`` with
    ``mu = M**2 / (sum |Q|**(2/3) d**(2/3))**2``; conductances outside the
    subset are copied from ``kappa`` (zeros when omitted).
    """
    Q = np.abs(np.asarray(getattr(flows, "flows", flows), dtype=float))
    subset = np.arange(net.n_edges) if edge_subset is None else np.asarray(list(edge_subset), dtype=int)
    if subset.size == 0:
        raise ValueError("edge_subset is empty")
    if not M > 0:
        raise ValueError("material must be positive")
    d = net.weights[subset]
    A = float(np.sum(Q[subset] ** (2.0 / 3.0) * d ** (2.0 / 3.0)))
    if A == 0.0:
        raise AllZeroFlows("every flow on the subset is zero; prune it instead")
    mu = M ** 2 / A ** 2
    out = np.zeros(net.n_edges) if kappa is None else np.array(kappa, dtype=float)
    out[subset] = mu * Q[subset] ** (4.0 / 3.0) / d ** (2.0 / 3.0)
    return out


def relax_flows(net: Network, kappa, eps=None) -> FlowState:
    return solve_kirchhoff(net, kappa, eps)


def cusp_dissipation(oriented, d, current, material) -> float:
    """Dissipation of a loop/path after adding ``current`` and refitting Murray conductances."""
    A = np.sum(np.abs(np.asarray(oriented) + current) ** (2.0 / 3.0) * np.asarray(d) ** (2.0 / 3.0))
    return float(A ** 3 / material ** 2)


def _golden(fun, lo, hi, iters=60):
    a, b = lo, hi
    c, e = b - _GOLDEN * (b - a), a + _GOLDEN * (b - a)
    fc, fe = fun(c), fun(e)
    for _ in range(iters):
        if fc <= fe:
            b, e, fe = e, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, e, fe
            e = a + _GOLDEN * (b - a)
            fe = fun(e)
    return (c, fc) if fc <= fe else (e, fe)


def best_current(oriented, d) -> float:
    """Global minimizer of ``sum |q_i + c|**(2/3) d_i**(2/3)`` over the scalar ``c``.

    Minima sit at the cusps ``c = -q_i``; the intervals between consecutive
    cusps are still searched since smooth stationary points are maxima only
    in exact arithmetic.
    """
    q = np.asarray(oriented, dtype=float)
    w = np.asarray(d, dtype=float) ** (2.0 / 3.0)

    def A(c):
        return float(np.sum(np.abs(q + c) ** (2.0 / 3.0) * w))

    cusps = np.unique(-q)
    best_c, best_val = None, np.inf
    for c in cusps:
        val = A(c)
        if val < best_val or (val == best_val and abs(c) < abs(best_c)):
            best_c, best_val = float(c), val
    for lo, hi in zip(cusps[:-1], cusps[1:]):
        c, val = _golden(A, lo, hi)
        if val < best_val * (1.0 - 1e-12):
            best_c, best_val = float(c), val
    return best_c


def _check_simple(path: OrientedPath, closed: bool, net: Network, kappa):
    verts = path.vertices
    if len(set(verts)) != len(verts):
        raise ValueError("path must not revisit a vertex")
    if closed and (not path.closed or len(verts) < 3):
        raise ValueError("a loop needs at least 3 distinct vertices")
    if len(path.edges) != len(path.signs) or len(path.edges) == 0:
        raise ValueError("malformed path")
    if np.any(np.asarray(kappa)[list(path.edges)] <= 0):
        raise ValueError("loop/path edges must all be active")


def _apply_current(net, kappa, flows, path: OrientedPath, material):
    q = path.oriented(flows)
    d = net.weights[list(path.edges)]
    c = best_current(q, d)
    new_q = q + c
    scale = max(np.abs(q).max(), np.abs(np.asarray(flows)).max())
    new_q[np.abs(new_q) <= ZERO_FLOW_RTOL * scale] = 0.0
    new_flows = np.array(flows, dtype=float)
    new_flows[list(path.edges)] = np.asarray(path.signs) * new_q
    new_kappa = np.array(kappa, dtype=float)
    if np.any(new_q != 0.0):
        new_kappa = murray_conductances(net, new_flows, material, path.edges, new_kappa)
    else:
        new_kappa[list(path.edges)] = 0.0
    return new_flows, new_kappa


def loop_current_minimize(net: Network, kappa, flows, loop: OrientedPath, M_loop: Optional[float] = None):
    """Add the optimal constant current around ``loop`` and refit its conductances.

    Returns ``(flows, kappa)``. Every vertex keeps its net inflow, so the
    pair stays feasible; the loop material is preserved.

    Raises
    ------
    ConstantLoopFlow
        All oriented loop flows are equal; the optimal current cancels them
        and the whole loop should be pruned instead.
    """
    kappa = np.asarray(kappa, dtype=float)
    flows = np.asarray(getattr(flows, "flows", flows), dtype=float)
    _check_simple(loop, True, net, kappa)
    q = loop.oriented(flows)
    if np.ptp(q) <= ZERO_FLOW_RTOL * max(np.abs(q).max(), 1e-300):
        raise ConstantLoopFlow(q[0])
    if M_loop is None:
        M_loop = float(np.sum(np.sqrt(kappa[list(loop.edges)]) * net.weights[list(loop.edges)]))
    return _apply_current(net, kappa, flows, loop, M_loop)


def path_current_minimize(net: Network, kappa, flows, path: OrientedPath,
                          M_path: Optional[float] = None, require_equal_pressure: bool = True):
    """Add the optimal current along a path between two pressure vertices.

    With equal endpoint pressures the complementary dissipation changes only
    through the dissipation on the path, so the same cusp search as for loops
    applies. Interior vertices receive no net flow. A path carrying one
    constant flow is zeroed outright and its conductances are set to 0; the
    caller redistributes that material.

    ``require_equal_pressure=False`` admits endpoints with different
    pressures; that is only objective-preserving for the plain dissipation.
    """
    kappa = np.asarray(kappa, dtype=float)
    flows = np.asarray(getattr(flows, "flows", flows), dtype=float)
    _check_simple(path, False, net, kappa)
    a, b = path.vertices[0], path.vertices[-1]
    if a not in net.pressure or b not in net.pressure:
        raise ValueError("path endpoints must be pressure vertices")
    if require_equal_pressure and not same_pressure(net.pressure[a], net.pressure[b]):
        raise EndpointPressureMismatch(
            f"endpoint pressures differ: {net.pressure[a]} vs {net.pressure[b]}")
    if M_path is None:
        M_path = float(np.sum(np.sqrt(kappa[list(path.edges)]) * net.weights[list(path.edges)]))
    return _apply_current(net, kappa, flows, path, M_path)


def prune_and_redistribute(net: Network, kappa, flows, dead_edges, M: float) -> np.ndarray:
    """Zero ``dead_edges`` and scale every other conductance so the material is ``M``."""
    kappa = np.array(kappa, dtype=float)
    Q = np.asarray(getattr(flows, "flows", flows), dtype=float)
    dead = np.zeros(net.n_edges, dtype=bool)
    dead[list(dead_edges)] = True
    scale = max(np.abs(Q).max(initial=0.0), 1e-300)
    if np.any(np.abs(Q[dead]) > ZERO_FLOW_RTOL * scale):
        raise ValueError("dead edges must carry zero flow")
    kappa[dead] = 0.0
    live = kappa > 0
    if not np.any(live & (np.abs(Q) > ZERO_FLOW_RTOL * scale)):
        raise NoLiveFlow("no remaining edge carries flow")
    beta = (M / material_cost(net, kappa)) ** 2
    return kappa * beta


def material_of_penalty(a: float, D_hat: float) -> float:
    """Material level ``(2 D_hat / a)**(1/3)`` matching penalty coefficient ``a``."""
    if not (a > 0 and D_hat > 0):
        raise ValueError("a and D_hat must be positive")
    return (2.0 * D_hat / a) ** (1.0 / 3.0)


# ---------------------------------------------------------------------------
# descent engine


@dataclass
class _Run:
    kappa: np.ndarray
    trace: list
    termination: Termination
    moves: int = 0


def _single_pressure_components(net: Network, kappa, eps) -> bool:
    view = positive_subgraph(net, kappa, eps)
    for comp in connected_components(view):
        ps = [net.pressure[k] for k in comp.dirichlet]
        if any(not same_pressure(ps[0], p) for p in ps[1:]):
            return False
    return True


def _descend(net: Network, kappa0, M: float, objective: str, cfg: OptimizeConfig,
             cut_dirichlet: bool = False) -> _Run:
    """Alternating descent from ``kappa0`` on the material surface ``M``.

    ``cut_dirichlet`` starts with a phase that severs every connection
    between pressure vertices before the flows are relaxed; it is used for
    the plain dissipation with distinct pressures, where relaxation only
    lowers the dissipation once each component has a single pressure level.
    """
    eps = cfg.prune_threshold
    kappa = np.array(kappa0, dtype=float)
    Q = solve_kirchhoff(net, kappa, eps).flows
    value = objective_value(net, kappa, Q, objective)
    trace = [value]
    quiet, moves = 0, 0
    for _ in range(cfg.max_iters):
        moved = False
        scale = np.abs(Q).max(initial=0.0)
        if scale == 0.0:
            return _Run(kappa, trace, Termination.CONVERGED, moves)
        flowing = np.abs(Q) > ZERO_FLOW_RTOL * scale
        Q = np.where(flowing, Q, 0.0)
        kappa = murray_conductances(net, Q, M, np.flatnonzero(flowing))

        view = positive_subgraph(net, kappa, eps)
        cycles = fundamental_cycles(view)
        try:
            if cycles:
                loop = cycles[0]
                try:
                    Q, kappa = loop_current_minimize(net, kappa, Q, loop)
                except ConstantLoopFlow:
                    Q[list(loop.edges)] = 0.0
                    kappa = prune_and_redistribute(net, kappa, Q, loop.edges, M)
                moved = True
            else:
                found = dirichlet_path(net, view, equal_only=not cut_dirichlet)
                if found is not None:
                    _, path = found
                    Q, kappa = path_current_minimize(
                        net, kappa, Q, path, require_equal_pressure=not cut_dirichlet)
                    if material_cost(net, kappa) < M * (1.0 - 1e-12):
                        dead = [i for i in path.edges if Q[i] == 0.0]
                        kappa = prune_and_redistribute(net, kappa, Q, dead, M)
                    moved = True
                elif cut_dirichlet:
                    cut_dirichlet = False
        except NoLiveFlow:
            Q = np.zeros_like(Q)
            trace.append(objective_value(net, kappa, Q, objective))
            return _Run(kappa, trace, Termination.CONVERGED, moves)
        moves += moved

        # physicality check after every move; flows are only adopted when
        # relaxation cannot increase the objective
        state = solve_kirchhoff(net, kappa, eps)
        if objective == "complementary" or (
                not cut_dirichlet and _single_pressure_components(net, kappa, eps)):
            Q = state.flows
        new = objective_value(net, kappa, Q, objective)
        trace.append(new)
        change = abs(new - value) / max(abs(value), abs(new), 1e-300)
        value = new
        quiet = quiet + 1 if (not moved and not cut_dirichlet and change < cfg.rel_tol) else 0
        if quiet >= 3:
            return _Run(kappa, trace, Termination.CONVERGED, moves)
    return _Run(kappa, trace, Termination.MAX_ITERS, moves)


def _dissipation_gradient(net: Network, kappa, eps=None):
    """Physical dissipation and its gradient with respect to the conductances.

    ``dD/dkappa_e = dp_e**2 - 2 dp_e dz_e`` where ``dp`` are pressure drops of
    the full solution and ``dz`` those of the flow-driven part with every
    prescribed pressure grounded.
    """
    state = solve_kirchhoff(net, kappa, eps)
    f_state, _ = decompose_flow(net, kappa, eps)
    t, h = net.tails, net.heads
    dp = state.pressures[t] - state.pressures[h]
    dz = f_state.pressures[t] - f_state.pressures[h]
    return dissipation(net, kappa, state.flows), dp ** 2 - 2.0 * dp * dz


def _smooth_descent(net: Network, s0, M: float, cfg: OptimizeConfig) -> _Run:
    """SLSQP on the material simplex for pressure-driven dissipation."""
    d = net.weights
    trace = []

    def kappa_of(s):
        return (M * np.clip(s, 0.0, None) / d) ** 2

    def fun(s):
        D, g = _dissipation_gradient(net, kappa_of(s), cfg.prune_threshold)
        return D, g * 2.0 * M ** 2 * np.clip(s, 0.0, None) / d ** 2

    trace.append(fun(s0)[0])
    res = minimize(
        fun, s0, jac=True, method="SLSQP",
        bounds=[(0.0, 1.0)] * net.n_edges,
        constraints=[{"type": "eq", "fun": lambda s: np.sum(s) - 1.0,
                      "jac": lambda s: np.ones_like(s)}],
        callback=lambda s: trace.append(fun(s)[0]),
        options={"ftol": min(cfg.rel_tol, 1e-12), "maxiter": cfg.max_iters},
    )
    s = np.clip(res.x, 0.0, None)
    s[s < 1e-9] = 0.0
    s /= s.sum()
    kappa = kappa_of(s)
    trace.append(fun(s)[0])
    term = Termination.CONVERGED if res.success else Termination.MAX_ITERS
    return _Run(kappa, trace, term, int(res.nit))


def _random_start(net: Network, M: float, rng) -> np.ndarray:
    s = rng.dirichlet(np.ones(net.n_edges))
    return s, (M * s / net.weights) ** 2


def _check_prior(net: Network, eps=None):
    validate_network(net).raise_if_invalid()
    if net.n_edges == 0:
        raise NonPhysicalPrior("network has no edges")
    try:
        solve_kirchhoff(net, np.ones(net.n_edges), eps)
    except SolverError as exc:
        raise NonPhysicalPrior(f"all-positive prior is not physical: {exc}") from exc


def _finish(net: Network, kappa, run: _Run, objective: str, cfg, restart, restart_values,
            a=None, eps=None) -> OptimizeResult:
    eps = cfg.prune_threshold if eps is None else eps
    state = solve_kirchhoff(net, kappa, eps)
    energy = energy_report(net, kappa, state.flows, a=a, objective=objective)
    value = objective_value(net, kappa, state.flows, objective)
    return OptimizeResult(
        conductances=np.asarray(kappa, dtype=float),
        flowstate=state,
        energy=energy,
        trace=list(run.trace),
        certificates=analyze(net, kappa, state, eps),
        termination=run.termination,
        objective=value,
        restart=restart,
        restart_objectives=list(restart_values),
        extra={"moves": run.moves},
    )


def optimize_constrained(net: Network, config: OptimizeConfig) -> OptimizeResult:
    """Minimize the configured objective subject to ``sum sqrt(kappa) d = M``.

    Runs ``config.restarts`` independent descents from random points of the
    material surface and keeps the best (ties go to the lower restart index).
    The dissipation objective is handled by regime:

    * one pressure level (or none): shift it to 0, where the complementary
      dissipation equals the dissipation;
    * distinct pressures with a nonzero prescribed inflow: sever the pressure
      vertices from each other first, then descend as above;
    * distinct pressures and no inflow: smooth local optimization on the
      material simplex (optimal networks can contain loops here).
    """
    if config.mode != "constraint":
        raise ValueError("optimize_constrained needs mode='constraint'")
    M = float(config.material)
    _check_prior(net, config.prune_threshold)
    rng = np.random.default_rng(config.rng_seed)

    pressures = list(net.pressure.values())
    single_level = all(same_pressure(pressures[0], p) for p in pressures[1:]) if pressures else True
    work_net, run_objective, smooth, cut = net, config.objective, False, False
    if config.objective == "dissipation":
        if single_level:
            work_net = net.with_boundary(pressure={k: 0.0 for k in net.pressure})
            run_objective = "complementary"
        elif net.has_neumann_drive():
            cut = True
        else:
            smooth = True

    best, best_value, best_idx, values = None, np.inf, 0, []
    for r in range(config.restarts):
        s0, kappa0 = _random_start(net, M, rng)
        if smooth:
            run = _smooth_descent(work_net, s0, M, config)
        else:
            run = _descend(work_net, kappa0, M, run_objective, config, cut_dirichlet=cut)
        state = solve_kirchhoff(net, run.kappa, config.prune_threshold)
        value = objective_value(net, run.kappa, state.flows, config.objective)
        values.append(value)
        if value < best_value:
            best, best_value, best_idx = run, value, r
    return _finish(net, best.kappa, best, config.objective, config, best_idx, values)


def _distinct_pressures_connectable(net: Network) -> bool:
    view = positive_subgraph(net, np.ones(net.n_edges))
    for comp in connected_components(view):
        ps = [net.pressure[k] for k in comp.dirichlet]
        if any(not same_pressure(ps[0], p) for p in ps[1:]):
            return True
    return False


def _ray_search(net, objective_fn, a, betas, kappa0):
    trace, last = [], None
    for beta in betas:
        kappa = beta * kappa0
        # positive everywhere along the ray; no pruning
        state = solve_kirchhoff(net, kappa, 0.0)
        trace.append(objective_fn(net, kappa, state) + a * material_cost(net, kappa))
        last = kappa
    return trace, last


def _penalty_hook(net: Network, objective_fn: Callable, a: float, cfg: OptimizeConfig):
    """Scale search for an arbitrary objective ``fn(net, kappa, flowstate)``.

    Shrinks the unit-material uniform network by decades; an objective that is
    still decreasing at the smallest scale is reported as degenerate.
    """
    kappa0 = (1.0 / net.weights.sum()) ** 2 * np.ones(net.n_edges)
    betas = [10.0 ** (-j) for j in range(0, 25)]
    trace, _ = _ray_search(net, objective_fn, a, betas, kappa0)
    j = int(np.argmin(trace))
    decreasing = all(y < x for x, y in zip(trace, trace[1:]))
    term = Termination.DEGENERATE_TO_ZERO if decreasing else Termination.CONVERGED
    kappa = betas[j] * kappa0
    run = _Run(kappa, trace, term)
    result = _finish(net, kappa, run, "dissipation", cfg, 0, [trace[j]], a=a, eps=0.0)
    result.objective = trace[j]
    result.extra["scales"] = betas
    return result


def optimize_penalized(net: Network, config: OptimizeConfig, objective_fn: Optional[Callable] = None) -> OptimizeResult:
    """Minimize ``objective + a * material`` without a material constraint.

    The unit-material constrained optimum ``D_hat`` fixes the material level
    ``K = (2 D_hat / a)**(1/3)``; the returned network is that optimum scaled
    by ``K**2``. This is exact when flows do not change under uniform
    rescaling of the conductances, which is checked.

    ``objective_fn(net, kappa, flowstate)`` plugs in another target; it is
    explored along uniform scalings only and may end in ``DegenerateToZero``.

    Raises
    ------
    NotScaleInvariant
        The optimal flows change under rescaling, so the reduction does not apply.
    """
    if config.mode != "penalty":
        raise ValueError("optimize_penalized needs mode='penalty'")
    a = float(config.penalty_coeff)
    _check_prior(net, config.prune_threshold)
    if objective_fn is not None:
        return _penalty_hook(net, objective_fn, a, config)

    if config.objective == "complementary" and _distinct_pressures_connectable(net):
        # material poured onto a pressure-driven path lowers f linearly in the
        # scale but costs only its square root
        kappa0 = (1.0 / net.weights.sum()) ** 2 * np.ones(net.n_edges)
        betas = [10.0 ** j for j in range(0, 13)]
        fn = lambda n, k, s: complementary_dissipation(n, k, s.flows)
        trace, kappa = _ray_search(net, fn, a, betas, kappa0)
        run = _Run(kappa, trace, Termination.UNBOUNDED_BELOW)
        result = _finish(net, kappa, run, "complementary", config, 0, [trace[-1]], a=a)
        result.objective = -np.inf
        return result

    unit_cfg = OptimizeConfig(
        objective="dissipation", mode="constraint", material=1.0,
        max_iters=config.max_iters, rel_tol=config.rel_tol,
        prune_threshold=config.prune_threshold, restarts=config.restarts,
        rng_seed=config.rng_seed,
    )
    unit = optimize_constrained(net, unit_cfg)
    D_hat = unit.energy.dissipation
    if D_hat <= 0.0:
        run = _Run(unit.conductances * 0.0, unit.trace, Termination.DEGENERATE_TO_ZERO)
        return _finish(net, unit.conductances, run, config.objective, config, unit.restart,
                       unit.restart_objectives, a=a)
    K = material_of_penalty(a, D_hat)
    beta = K ** 2
    kappa = beta * unit.conductances
    state = solve_kirchhoff(net, kappa, config.prune_threshold)
    ref = unit.flowstate.flows
    if np.abs(state.flows - ref).max() > 1e-8 * max(1.0, np.abs(ref).max()):
        raise NotScaleInvariant("optimal flows change under uniform rescaling")

    def theta(b):
        k = b * unit.conductances
        s = solve_kirchhoff(net, k, config.prune_threshold)
        return objective_value(net, k, s.flows, config.objective) + a * material_cost(net, k)

    h = 1e-4 * beta
    slope = (theta(beta + h) - theta(beta - h)) / (2.0 * h)
    run = _Run(kappa, [t * 1.0 for t in unit.trace], Termination.CONVERGED, 0)
    result = _finish(net, kappa, run, config.objective, config, unit.restart,
                     unit.restart_objectives, a=a)
    result.objective = result.energy.penalty_objective
    result.extra.update({
        "unit_dissipation": D_hat,
        "material_level": K,
        "scale": beta,
        "stationarity": slope * beta / abs(theta(beta)),
        "unit_conductances": [float(x) for x in unit.conductances],
    })
    return result


def optimize(net: Network, config: OptimizeConfig, objective_fn=None) -> OptimizeResult:
    if config.mode == "constraint":
        return optimize_constrained(net, config)
    return optimize_penalized(net, config, objective_fn)
