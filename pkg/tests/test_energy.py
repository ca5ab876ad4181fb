import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flownet.energy import (complementary_dissipation, dissipation, energy_report,
                            material_cost, objective_value, penalty_objective, pressure_work)
from flownet.exceptions import InfiniteDissipation
from flownet.generators import square_network
from flownet.kirchhoff import conservation_residual, solve_kirchhoff
from flownet.network import Network

from conftest import driven, mixed, perturbation_basis, positive_kappa, random_perturbation


def single_edge(d=1.0):
    return Network(2, [(0, 1, d)], pressure={0: 1.0, 1: 0.0})


def test_square_dissipation_is_sum_of_conductances():
    net = square_network()
    kappa = np.array([0.1, 0.4, 0.9, 1.6])
    state = solve_kirchhoff(net, kappa)
    assert dissipation(net, kappa, state) == pytest.approx(kappa.sum())


def test_zero_flows_dissipate_nothing():
    net = square_network()
    assert dissipation(net, np.ones(4), np.zeros(4)) == 0.0
    assert dissipation(net, np.zeros(4), np.zeros(4)) == 0.0
    assert penalty_objective(net, np.zeros(4), np.zeros(4), 1.0) == 0.0


@pytest.mark.parametrize("K", [0.01, 1.0, 16.0])
def test_square_equal_split(K):
    net = square_network()
    kappa = np.full(4, K / 16)
    assert dissipation(net, kappa, solve_kirchhoff(net, kappa)) == pytest.approx(K / 4)


def test_flow_on_dead_edge_is_infinite():
    with pytest.raises(InfiniteDissipation):
        dissipation(square_network(), [1, 1, 1, 0], [1, 1, 1, 1])


@pytest.mark.parametrize("kappa", [0.25, 1.0, 7.0])
def test_single_edge_complementary(kappa):
    net = single_edge()
    state = solve_kirchhoff(net, [kappa])
    assert complementary_dissipation(net, [kappa], state) == pytest.approx(-kappa)


def test_single_edge_penalty_unbounded():
    net = single_edge(d=2.0)
    values = []
    for kappa in [1.0, 10.0, 100.0, 1000.0]:
        state = solve_kirchhoff(net, [kappa])
        theta = penalty_objective(net, [kappa], state, 1.0, "complementary")
        assert theta == pytest.approx(-kappa + np.sqrt(kappa) * 2.0)
        values.append(theta)
    assert all(y < x for x, y in zip(values, values[1:]))


def test_material_examples():
    net = square_network()
    assert material_cost(net, np.full(4, 9.0 / 16)) == pytest.approx(3.0)
    assert material_cost(net, np.zeros(4)) == 0.0
    assert material_cost(Network(2, [(0, 1, 2.0)]), [4.0]) == pytest.approx(4.0)


def test_report_is_consistent():
    net = mixed(3)
    kappa = positive_kappa(net, 3)
    state = solve_kirchhoff(net, kappa)
    rep = energy_report(net, kappa, state, a=0.5, objective="complementary")
    assert rep.complementary == pytest.approx(rep.dissipation - 2 * rep.pressure_work)
    assert rep.penalty_objective == pytest.approx(rep.complementary + 0.5 * rep.material)
    assert set(rep.to_dict()) >= {"dissipation", "complementary", "material"}


def test_unknown_objective():
    with pytest.raises(ValueError):
        objective_value(square_network(), np.ones(4), np.zeros(4), "entropy")


def test_loop_perturbation_raises_complementary():
    net = square_network()
    kappa = np.array([1.0, 2.0, 0.5, 1.5])
    state = solve_kirchhoff(net, kappa)
    base = complementary_dissipation(net, kappa, state)
    loop = np.array([1.0, 1.0, 1.0, -1.0])  # 0->1->2->3->0
    for c in [-0.3, 0.01, 0.8]:
        assert complementary_dissipation(net, kappa, state.flows + c * loop) > base


# -- invariants

seeds = st.integers(0, 10_000)
SETTINGS = settings(max_examples=40, deadline=None)


@SETTINGS
@given(seeds)
def test_thomson(seed):
    net = mixed(seed)
    rng = np.random.default_rng(seed)
    kappa = positive_kappa(net, seed)
    state = solve_kirchhoff(net, kappa)
    base = complementary_dissipation(net, kappa, state)
    basis = perturbation_basis(net)
    for _ in range(5):
        flows = state.flows + random_perturbation(basis, rng)
        assert np.abs(conservation_residual(net, flows)).max() < 1e-9
        assert complementary_dissipation(net, kappa, flows) >= base - 1e-10


@SETTINGS
@given(seeds, st.integers(0, 100), st.floats(1e-3, 10.0))
def test_rayleigh(seed, which, bump):
    net = mixed(seed)
    kappa = positive_kappa(net, seed)
    e = which % net.n_edges
    more = kappa.copy()
    more[e] += bump
    s0, s1 = solve_kirchhoff(net, kappa), solve_kirchhoff(net, more)
    f0 = complementary_dissipation(net, kappa, s0)
    f1 = complementary_dissipation(net, more, s1)
    assert f1 <= f0 + 1e-12
    if abs(s0.flows[e]) > 1e-8:
        assert f1 < f0


@SETTINGS
@given(seeds, st.sampled_from(["tree", "grid"]))
def test_zero_pressures_make_f_equal_d(seed, kind):
    net = driven(seed, kind, n_dirichlet=2, pressure=0.0)
    kappa = positive_kappa(net, seed)
    state = solve_kirchhoff(net, kappa)
    assert pressure_work(net, state) == 0.0
    assert complementary_dissipation(net, kappa, state) == dissipation(net, kappa, state)


@SETTINGS
@given(seeds, st.floats(1e-2, 1e2))
def test_neumann_dissipation_scales_inversely(seed, beta):
    net = driven(seed, "grid")
    kappa = positive_kappa(net, seed)
    D1 = dissipation(net, kappa, solve_kirchhoff(net, kappa))
    D2 = dissipation(net, beta * kappa, solve_kirchhoff(net, beta * kappa))
    assert D2 == pytest.approx(D1 / beta, rel=1e-9)
