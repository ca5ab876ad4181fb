"""Scikit-learn style front end to the optimizer."""
from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_network, check_same_topology
from .kirchhoff import solve_kirchhoff
from .optimizer import OptimizeConfig, optimize


class NetworkOptimizer(BaseEstimator):
    """Optimal conductances for a prior network.

    ``fit`` takes a :class:`~flownet.network.Network` as ``X``. Fitted
    attributes follow the usual trailing-underscore convention.

    Parameters
    ----------
    objective : {'complementary', 'dissipation'}
    mode : {'constraint', 'penalty'}
    material : float
        Material budget ``sum sqrt(kappa) d`` in constraint mode.
    penalty_coeff : float, optional
        Material price ``a`` in penalty mode.
    max_iter, tol, prune_threshold, n_restarts, random_state
        Passed through to the optimizer.

    Attributes
    ----------
    conductances_ : ndarray of shape (n_edges,)
    flow_state_ : FlowState
    energy_ : EnergyReport
    certificates_ : TopologyReport
    termination_ : Termination
    trace_ : list of float
    result_ : OptimizeResult
    """

    def __init__(self, objective="complementary", mode="constraint", material=1.0,
                 penalty_coeff=None, max_iter=1000, tol=1e-10, prune_threshold=None,
                 n_restarts=10, random_state=0):
        self.objective = objective
        self.mode = mode
        self.material = material
        self.penalty_coeff = penalty_coeff
        self.max_iter = max_iter
        self.tol = tol
        self.prune_threshold = prune_threshold
        self.n_restarts = n_restarts
        self.random_state = random_state

    def _config(self) -> OptimizeConfig:
        return OptimizeConfig(
            objective=self.objective,
            mode=self.mode,
            material=self.material if self.mode == "constraint" else None,
            penalty_coeff=self.penalty_coeff,
            max_iters=self.max_iter,
            rel_tol=self.tol,
            prune_threshold=self.prune_threshold,
            restarts=self.n_restarts,
            rng_seed=0 if self.random_state is None else int(self.random_state),
        )

    def fit(self, X, y=None):
        net = check_network(X)
        result = optimize(net, self._config())
        self.network_ = net
        self.result_ = result
        self.conductances_ = result.conductances
        self.flow_state_ = result.flowstate
        self.energy_ = result.energy
        self.certificates_ = result.certificates
        self.termination_ = result.termination
        self.trace_ = result.trace
        self.objective_ = result.objective
        return self

    def predict(self, X=None):
        """Kirchhoff flows of the fitted conductances under ``X``'s boundary data.

        ``X`` must share the fitted topology; ``None`` reuses the fitted network.
        """
        check_is_fitted(self, "conductances_")
        net = self.network_ if X is None else check_same_topology(check_network(X), self.network_)
        return solve_kirchhoff(net, self.conductances_, self.prune_threshold)

    def score(self, X=None, y=None):
        """Negated objective of the fitted network (higher is better)."""
        check_is_fitted(self, "conductances_")
        return -float(self.objective_)
