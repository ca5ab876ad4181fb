import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flownet.exceptions import TooManyEdges
from flownet.experiments import (brute_force_minimize, delivery_uniformity, format_checks,
                                 penalty_degeneration, penalty_diagonal, run_paper_examples,
                                 square_strata, sweep_two_edge)
from flownet.generators import square_network, triangle_network, two_edge_network
from flownet.kirchhoff import solve_kirchhoff
from flownet.network import Network
from flownet.optimizer import OptimizeConfig, Termination, optimize_constrained


def test_oracle_square():
    res = brute_force_minimize(square_network(), 1.0, "dissipation", 60)
    assert np.abs(res.shares - 0.25).max() <= 1 / 60
    assert res.objective == pytest.approx(0.25, abs=1e-3)


@pytest.mark.parametrize("d, M", [(1.0, 1.0), (2.0, 3.0)])
def test_oracle_single_edge(d, M):
    net = Network(2, [(0, 1, d)], pressure={0: 1.0, 1: 0.0})
    res = brute_force_minimize(net, M, "dissipation", 10)
    assert res.shares[0] == 1.0
    assert res.kappa[0] == pytest.approx((M / d) ** 2)


def test_oracle_triangle_cuts_pressure_pair():
    res = brute_force_minimize(triangle_network(), 1.0, "dissipation", 60)
    assert res.shares[0] == 0.0
    assert res.skipped > 0  # points leaving the inflow vertex isolated


def test_oracle_limits():
    big = Network(8, [(k, k + 1) for k in range(7)], pressure={0: 0.0})
    with pytest.raises(TooManyEdges):
        brute_force_minimize(big, 1.0)
    with pytest.raises(ValueError):
        brute_force_minimize(square_network(), 1.0, grid_steps=5)


def test_sweep_small_material():
    (row,) = sweep_two_edge([1e-4])
    assert row.kappa2 == pytest.approx(2.5e-5, rel=0.01)
    assert row.kappa1 == pytest.approx(2.5e-5, rel=0.01)


def test_sweep_large_material():
    (row,) = sweep_two_edge([1e4])
    assert 0.97 <= row.kappa2 / 1e4 <= 1.0
    # second order: kappa2 ~ K - sqrt(2K) + 1/2
    assert row.kappa2 == pytest.approx(1e4 - np.sqrt(2e4) + 0.5, rel=1e-3)


def test_sweep_splits_evenly_and_spends_material():
    net = two_edge_network()
    for row in sweep_two_edge(np.logspace(-3, 3, 7)):
        kappa = np.array([row.kappa1, row.kappa2])
        state = solve_kirchhoff(net, kappa)
        assert delivery_uniformity(net, kappa, state) < 1e-20
        assert np.sqrt(kappa).sum() == pytest.approx(np.sqrt(row.K), rel=1e-12)
        assert row.asymmetry == pytest.approx(1 + 2 * row.kappa2, rel=1e-12)


def test_sweep_rejects_nonpositive():
    with pytest.raises(ValueError):
        sweep_two_edge([0.0])


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(1e-6, 1e6), min_size=2, max_size=8, unique=True))
def test_sweep_asymmetry_monotone(K):
    rows = sweep_two_edge(sorted(K))
    asym = [r.asymmetry for r in rows]
    assert all(y > x for x, y in zip(asym, asym[1:]))


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_penalty_diagonal_closed_form(a):
    eps = [1e-1, 1e-2, 1e-4, 1e-6]
    for e, theta in zip(eps, penalty_diagonal(a, eps)):
        assert theta == pytest.approx(e ** 2 / 2 + 2 * a * np.sqrt(e), rel=1e-9)


def test_penalty_degeneration():
    rep = penalty_degeneration(1.0)
    assert rep.termination is Termination.DEGENERATE_TO_ZERO
    assert rep.strictly_decreasing
    assert rep.theta[-1] == pytest.approx(2e-3, rel=1e-3)


def test_square_strata():
    np.testing.assert_allclose(square_strata(2.0), [4.0 / n for n in range(1, 5)])


def test_worked_examples_all_pass():
    checks = run_paper_examples(restarts=3)
    assert all(c.passed for c in checks), format_checks(checks)
    assert format_checks(checks).count("PASS") == len(checks)


def _small_networks():
    nets = [square_network(), triangle_network(), two_edge_network(),
            Network(4, [(0, 1), (1, 2), (2, 3), (0, 2)], pressure={0: 0.0, 3: 0.0}, inflow={1: 1.0, 2: 0.5}),
            Network(4, [(0, 1), (1, 2), (2, 3), (0, 3), (1, 3)], pressure={0: 0.0}, inflow={1: 1.0, 2: -0.4, 3: -0.6})]
    return nets


@pytest.mark.parametrize("index", range(5))
@pytest.mark.parametrize("objective", ["dissipation", "complementary"])
def test_oracle_consistency(index, objective):
    net = _small_networks()[index]
    steps = 60
    oracle = brute_force_minimize(net, 1.0, objective, steps)
    res = optimize_constrained(net, OptimizeConfig(objective=objective, restarts=10))
    # one grid step of slack scaled by the objective magnitude
    bound = 2.0 * net.n_edges / steps * max(1.0, abs(oracle.objective))
    assert res.objective <= oracle.objective + bound
