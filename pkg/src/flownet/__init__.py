"""Kirchhoff flows and minimal-dissipation conductance networks."""
from .energy import (EnergyReport, complementary_dissipation, dissipation, energy_report,
                     material_cost, penalty_objective, pressure_work)
from .estimator import NetworkOptimizer
from .kirchhoff import (FlowState, Gauge, LinearSystem, assemble_system, conservation_residual,
                        decompose_flow, solve_kirchhoff)
from .network import (Component, Edge, Network, SubgraphView, ValidationReport,
                      connected_components, positive_subgraph, validate_network)
from .optimizer import (OptimizeConfig, OptimizeResult, Termination, loop_current_minimize,
                        material_of_penalty, murray_conductances, optimize, optimize_constrained,
                        optimize_penalized, path_current_minimize, prune_and_redistribute,
                        relax_flows)
from .topology import (OrientedPath, TopologyReport, analyze, equal_pressure_connection,
                       fundamental_cycles, is_forest, murray_residual)

__version__ = "0.1.0"

__all__ = [
    "Component", "Edge", "EnergyReport", "FlowState", "Gauge", "LinearSystem", "Network",
    "NetworkOptimizer", "OptimizeConfig", "OptimizeResult", "OrientedPath", "SubgraphView",
    "Termination", "TopologyReport", "ValidationReport", "analyze", "assemble_system",
    "complementary_dissipation", "connected_components", "conservation_residual",
    "decompose_flow", "dissipation", "energy_report", "equal_pressure_connection",
    "fundamental_cycles", "is_forest", "loop_current_minimize", "material_cost",
    "material_of_penalty", "murray_conductances", "murray_residual", "optimize",
    "optimize_constrained", "optimize_penalized", "path_current_minimize", "penalty_objective",
    "positive_subgraph", "pressure_work", "prune_and_redistribute", "relax_flows",
    "solve_kirchhoff", "validate_network",
]
