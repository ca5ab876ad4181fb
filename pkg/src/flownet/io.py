"""JSON network files and CSV/JSON result files."""
from __future__ import annotations

import csv
import io as _io
import json
from pathlib import Path

import numpy as np

from .exceptions import InvalidNetworkError
from .network import Network


def fmt(x: float) -> str:
    return "%.17g" % float(x)


def network_from_dict(doc: dict) -> Network:
    """Parse the JSON network document.

    ``{"vertices": [{"id": 0, "bc": {"type": "pressure", "value": 1.0}}, ...],
    "edges": [{"u": 0, "v": 1, "d": 1.0}, ...]}``; an edge may give
    ``"length"`` instead of ``"d"`` (then ``d = length**1.5``).
    """
    try:
        vertices = doc["vertices"]
        edges_doc = doc["edges"]
    except (KeyError, TypeError) as exc:
        raise InvalidNetworkError([f"missing top-level key {exc}"]) from exc
    violations, pressure, inflow = [], {}, {}
    ids = set()
    for entry in vertices:
        try:
            k = int(entry["id"])
        except (KeyError, TypeError, ValueError):
            violations.append(f"vertex entry without integer id: {entry!r}")
            continue
        ids.add(k)
        bc = entry.get("bc") or {"type": "free"}
        kind = str(bc.get("type", "free")).lower()
        if kind == "free":
            continue
        if kind not in ("pressure", "flow"):
            violations.append(f"vertex {k}: unknown boundary type {kind!r}")
            continue
        if "value" not in bc:
            violations.append(f"vertex {k}: {kind} boundary condition needs a value")
            continue
        target = pressure if kind == "pressure" else inflow
        if k in target:
            violations.append(f"vertex {k}: duplicate {kind} boundary condition")
        target[k] = float(bc["value"])
    edges = []
    for i, entry in enumerate(edges_doc):
        try:
            u, v = int(entry["u"]), int(entry["v"])
        except (KeyError, TypeError, ValueError):
            violations.append(f"edge entry {i} needs integer 'u' and 'v'")
            continue
        if entry.get("d") is not None:
            d = float(entry["d"])
        elif entry.get("length") is not None:
            d = float(entry["length"]) ** 1.5
        else:
            d = 1.0
        edges.append((u, v, d))
    if violations:
        raise InvalidNetworkError(violations)
    n = max(ids) + 1 if ids else 0
    if ids != set(range(n)):
        raise InvalidNetworkError([f"vertex ids must be 0..{n - 1} without gaps"])
    return Network(n, edges, pressure=pressure, inflow=inflow)


def network_to_dict(net: Network) -> dict:
    vertices = []
    for k in range(net.n_vertices):
        if k in net.pressure:
            bc = {"type": "pressure", "value": net.pressure[k]}
        elif k in net.inflow:
            bc = {"type": "flow", "value": net.inflow[k]}
        else:
            bc = {"type": "free"}
        vertices.append({"id": k, "bc": bc})
    edges = [{"u": e.u, "v": e.v, "d": e.d} for e in net.edges]
    return {"vertices": vertices, "edges": edges}


def load_network(path) -> Network:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidNetworkError([f"{path}: not valid JSON ({exc.msg})"]) from exc
    return network_from_dict(doc)


def save_network(net: Network, path):
    Path(path).write_text(dumps(network_to_dict(net)))


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _csv_text(header, rows) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def read_conductances(path, n_edges: int) -> np.ndarray:
    """Read ``edge_index,kappa`` rows; every edge must appear exactly once."""
    kappa = np.full(n_edges, np.nan)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"edge_index", "kappa"} <= set(reader.fieldnames):
            raise ValueError(f"{path}: expected columns edge_index,kappa")
        for row in reader:
            i = int(row["edge_index"])
            if not 0 <= i < n_edges:
                raise ValueError(f"{path}: edge index {i} out of range")
            if not np.isnan(kappa[i]):
                raise ValueError(f"{path}: edge index {i} listed twice")
            kappa[i] = float(row["kappa"])
    if np.isnan(kappa).any():
        raise ValueError(f"{path}: missing conductances for edges {np.flatnonzero(np.isnan(kappa)).tolist()}")
    if (kappa < 0).any():
        raise ValueError(f"{path}: conductances must be nonnegative")
    return kappa


def conductances_csv(kappa) -> str:
    return _csv_text(["edge_index", "kappa"], [(i, fmt(k)) for i, k in enumerate(kappa)])


def flows_csv(net: Network, flows) -> str:
    return _csv_text(["edge", "u", "v", "Q"],
                     [(i, e.u, e.v, fmt(q)) for i, (e, q) in enumerate(zip(net.edges, flows))])


def pressures_csv(pressures) -> str:
    return _csv_text(["vertex", "p"], [(k, fmt(p)) for k, p in enumerate(pressures)])


def trace_csv(trace) -> str:
    return _csv_text(["iteration", "objective"], [(i, fmt(v)) for i, v in enumerate(trace)])


def sweep_csv(rows) -> str:
    return _csv_text(["K", "kappa1", "kappa2", "asymmetry"],
                     [(fmt(r.K), fmt(r.kappa1), fmt(r.kappa2), fmt(r.asymmetry)) for r in rows])


def read_csv_rows(text: str) -> list:
    return list(csv.DictReader(_io.StringIO(text)))


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if np.isfinite(x) else str(x)
    if isinstance(x, np.integer):
        return int(x)
    return x


def result_json(result) -> str:
    return dumps(_jsonable(result.to_dict()))
