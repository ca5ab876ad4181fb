"""Exception hierarchy shared by the solver, optimizer and CLI."""


class FlownetError(Exception):
    """Base class for all library errors."""


class InvalidNetworkError(FlownetError, ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations) or "invalid network")


class SolverError(FlownetError):
    """Raised when the Kirchhoff system has no (unique) solution."""


class UnbalancedInflow(SolverError):
    def __init__(self, component, net_inflow):
        self.component = tuple(component)
        self.net_inflow = float(net_inflow)
        super().__init__(
            f"component {list(self.component)} has no pressure vertex and "
            f"unbalanced net inflow {self.net_inflow:.6g}"
        )


class SingularSystem(SolverError):
    pass


class InfiniteDissipation(FlownetError):
    def __init__(self, edges):
        self.edges = tuple(edges)
        super().__init__(f"nonzero flow on zero-conductance edges {list(self.edges)}")


class OptimizationError(FlownetError):
    pass


class AllZeroFlows(OptimizationError):
    pass


class ConstantLoopFlow(OptimizationError):
    def __init__(self, value):
        self.value = float(value)
        super().__init__(f"all oriented flows on the loop equal {self.value:.6g}")


class EndpointPressureMismatch(OptimizationError):
    pass


class NoLiveFlow(OptimizationError):
    pass


class NonPhysicalPrior(OptimizationError):
    pass


class NotScaleInvariant(OptimizationError):
    """Flows change under uniform rescaling, so the penalty reduction is invalid."""


class TooManyEdges(FlownetError, ValueError):
    pass
