"""Scalar functionals of a (conductance, flow) pair."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .exceptions import InfiniteDissipation
from .network import Network

OBJECTIVES = ("dissipation", "complementary")

# flows below this fraction of the largest flow count as zero on a dead edge
_ZERO_FLOW = 1e-12


@dataclass(frozen=True)
class EnergyReport:
    dissipation: float
    pressure_work: float
    complementary: float
    material: float
    penalty_objective: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)


def _flows(flows) -> np.ndarray:
    return np.asarray(getattr(flows, "flows", flows), dtype=float)


def dissipation(net: Network, kappa, flows) -> float:
    """``sum Q**2 / kappa`` with the convention ``0**2 / 0 = 0``."""
    kappa = np.asarray(kappa, dtype=float)
    Q = _flows(flows)
    live = kappa > 0
    dead_flow = np.abs(Q[~live]) > _ZERO_FLOW * max(1.0, np.abs(Q).max(initial=0.0))
    if dead_flow.any():
        raise InfiniteDissipation(np.flatnonzero(~live)[dead_flow])
    return float(np.sum(Q[live] ** 2 / kappa[live]))


def pressure_work(net: Network, flows) -> float:
    """``sum_{k in P} pbar_k sum_l Q_kl``: work done by the pressure vertices."""
    out = net.outflow(_flows(flows))
    return float(sum(p * out[k] for k, p in net.pressure.items()))


def complementary_dissipation(net: Network, kappa, flows) -> float:
    return dissipation(net, kappa, flows) - 2.0 * pressure_work(net, flows)


def material_cost(net: Network, kappa) -> float:
    kappa = np.asarray(kappa, dtype=float)
    return float(np.sum(np.sqrt(np.clip(kappa, 0.0, None)) * net.weights))


def objective_value(net: Network, kappa, flows, objective: str) -> float:
    if objective == "dissipation":
        return dissipation(net, kappa, flows)
    if objective == "complementary":
        return complementary_dissipation(net, kappa, flows)
    raise ValueError(f"unknown objective {objective!r}; expected one of {OBJECTIVES}")


def penalty_objective(net: Network, kappa, flows, a: float, objective: str = "dissipation") -> float:
    if not a > 0:
        raise ValueError("penalty coefficient must be positive")
    return objective_value(net, kappa, flows, objective) + a * material_cost(net, kappa)


def energy_report(net: Network, kappa, flows, a: Optional[float] = None,
                  objective: str = "dissipation") -> EnergyReport:
    D = dissipation(net, kappa, flows)
    W = pressure_work(net, flows)
    M = material_cost(net, kappa)
    f = D - 2.0 * W
    theta = None
    if a is not None:
        theta = (D if objective == "dissipation" else f) + a * M
    return EnergyReport(D, W, f, M, theta)
