import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flownet import io
from flownet.cli import main
from flownet.exceptions import InvalidNetworkError
from flownet.generators import square_network, two_edge_network
from flownet.optimizer import OptimizeConfig, optimize

from conftest import driven, mixed


def write_json(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


def test_network_json_round_trip(tmp_path):
    net = mixed(4)
    io.save_network(net, tmp_path / "n.json")
    assert io.load_network(tmp_path / "n.json") == net


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["tree", "grid"]))
def test_network_dict_round_trip(seed, kind):
    net = driven(seed, kind, n_dirichlet=2)
    doc = json.loads(io.dumps(io.network_to_dict(net)))
    assert io.network_from_dict(doc) == net


def test_length_field():
    doc = {"vertices": [{"id": 0, "bc": {"type": "pressure", "value": 0}}, {"id": 1}],
           "edges": [{"u": 0, "v": 1, "length": 4.0}]}
    assert io.network_from_dict(doc).weights[0] == pytest.approx(8.0)


@pytest.mark.parametrize("doc", [
    {"edges": []},
    {"vertices": [{"id": 0}, {"id": 2}], "edges": []},
    {"vertices": [{"id": 0, "bc": {"type": "sink", "value": 1}}], "edges": []},
    {"vertices": [{"id": 0, "bc": {"type": "flow"}}], "edges": []},
])
def test_bad_documents(doc):
    with pytest.raises(InvalidNetworkError):
        io.network_from_dict(doc)


def test_conductance_csv_round_trip(tmp_path):
    kappa = np.array([0.1, 1 / 3, 2.0 ** -40, 7.0])
    p = tmp_path / "k.csv"
    p.write_text(io.conductances_csv(kappa))
    np.testing.assert_array_equal(io.read_conductances(p, 4), kappa)


def test_conductance_csv_errors(tmp_path):
    p = tmp_path / "k.csv"
    p.write_text("edge_index,kappa\n0,1\n0,2\n")
    with pytest.raises(ValueError, match="twice"):
        io.read_conductances(p, 2)
    p.write_text("edge_index,kappa\n0,1\n")
    with pytest.raises(ValueError, match="missing"):
        io.read_conductances(p, 2)


def test_result_json_round_trip():
    net = driven(1, "tree")
    res = optimize(net, OptimizeConfig(restarts=2))
    doc = json.loads(io.result_json(res))
    np.testing.assert_array_equal(doc["conductances"], res.conductances)
    np.testing.assert_array_equal(doc["flows"], res.flowstate.flows)
    assert doc["termination"] == res.termination.value
    assert doc["material_squared"] == pytest.approx(doc["material"] ** 2)


# -- CLI


@pytest.fixture
def grid_file(tmp_path):
    path = tmp_path / "grid.json"
    io.save_network(driven(3, "grid", size=4), path)
    return str(path)


def test_cli_optimize_grid_is_forest(tmp_path, grid_file):
    out, trace = tmp_path / "r.json", tmp_path / "t.csv"
    code = main(["optimize", grid_file, "--objective", "complementary", "--mode", "constraint",
                 "--material", "1", "--output", str(out), "--trace", str(trace)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["certificates"]["is_forest"] is True
    assert doc["termination"] == "Converged"
    rows = io.read_csv_rows(trace.read_text())
    assert [float(r["objective"]) for r in rows] == doc["trace"]


def test_cli_optimize_is_deterministic(tmp_path, grid_file):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["optimize", grid_file, "--seed", "5", "--restarts", "3", "--output", str(a)]) == 0
    assert main(["optimize", grid_file, "--seed", "5", "--restarts", "3", "--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_cli_seed_from_environment(tmp_path, grid_file, monkeypatch):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    monkeypatch.setenv("FLOWNET_SEED", "5")
    assert main(["optimize", grid_file, "--restarts", "3", "--output", str(a)]) == 0
    monkeypatch.setenv("FLOWNET_SEED", "not-a-number")
    assert main(["optimize", grid_file, "--seed", "5", "--restarts", "3", "--output", str(b)]) == 1
    monkeypatch.delenv("FLOWNET_SEED")
    assert main(["optimize", grid_file, "--seed", "5", "--restarts", "3", "--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_cli_solve(tmp_path, capsys):
    net_path = tmp_path / "two.json"
    io.save_network(two_edge_network(), net_path)
    k = tmp_path / "k.csv"
    k.write_text(io.conductances_csv([1.0, 1.0]))
    pres = tmp_path / "p.csv"
    assert main(["solve", str(net_path), "--conductances", str(k), "--pressures", str(pres)]) == 0
    rows = io.read_csv_rows(capsys.readouterr().out)
    assert [r["edge"] for r in rows] == ["0", "1"]
    assert float(rows[0]["Q"]) == pytest.approx(-1.0)
    prows = io.read_csv_rows(pres.read_text())
    assert float(prows[2]["p"]) == pytest.approx(1.0)


def test_cli_solve_unbalanced(tmp_path, capsys):
    doc = {"vertices": [{"id": 0, "bc": {"type": "flow", "value": 1.0}},
                        {"id": 1, "bc": {"type": "flow", "value": 0.5}}],
           "edges": [{"u": 0, "v": 1}]}
    net_path = write_json(tmp_path / "u.json", doc)
    k = tmp_path / "k.csv"
    k.write_text(io.conductances_csv([1.0]))
    assert main(["solve", net_path, "--conductances", str(k)]) == 2
    err = capsys.readouterr().err.strip()
    assert "component [0, 1]" in err and "\n" not in err


def test_cli_invalid_network(tmp_path, capsys):
    doc = {"vertices": [{"id": 0}, {"id": 1}], "edges": [{"u": 0, "v": 0}]}
    k = tmp_path / "k.csv"
    k.write_text(io.conductances_csv([1.0]))
    assert main(["solve", write_json(tmp_path / "bad.json", doc), "--conductances", str(k)]) == 1
    assert "self-loop" in capsys.readouterr().err


def test_cli_usage_errors(tmp_path):
    assert main([]) == 1
    assert main(["sweep"]) == 1
    assert main(["optimize", str(tmp_path / "missing.json")]) == 1
    (tmp_path / "junk.json").write_text("{not json")
    assert main(["optimize", str(tmp_path / "junk.json")]) == 1


def test_cli_sweep(capsys):
    assert main(["sweep", "--K", "1e-4,1,1e4"]) == 0
    rows = io.read_csv_rows(capsys.readouterr().out)
    assert len(rows) == 3
    assert list(rows[0]) == ["K", "kappa1", "kappa2", "asymmetry"]
    assert main(["sweep", "--log-range", "-4", "4", "20"]) == 0
    assert len(io.read_csv_rows(capsys.readouterr().out)) == 20


def test_cli_analyze(tmp_path, capsys):
    net_path = tmp_path / "sq.json"
    io.save_network(square_network(), net_path)
    k = tmp_path / "k.csv"
    k.write_text(io.conductances_csv(np.full(4, 1 / 16)))
    assert main(["analyze", str(net_path), "--conductances", str(k)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["is_forest"] is False


def test_cli_oracle(tmp_path, capsys):
    net_path = tmp_path / "sq.json"
    io.save_network(square_network(), net_path)
    assert main(["oracle", str(net_path), "--grid-steps", "20"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["objective"] == pytest.approx(0.25)
    assert doc["material_squared"] == 1.0


def test_cli_worked_examples(capsys):
    assert main(["paper-examples", "--restarts", "2"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines and all(line.startswith("PASS") for line in lines)


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "flownet.cli", "sweep", "--K", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("K,kappa1,kappa2,asymmetry")
