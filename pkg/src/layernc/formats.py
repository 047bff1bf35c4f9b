"""JSON and DOT serialization.

Network files::

    {"field": {"p": 2, "m": 8},
     "nodes": [{"id": "S", "kind": "source"}, {"id": "v", "variant": {"hybrid": 2}}, ...],
     "edges": [{"id": "e1", "from": "S", "to": "v"}, ...],
     "source": "S",
     "destinations": [{"node": "D1"}]}

Layered files add ``"layers": {node: int}`` and ``"inserted": [ids]``.
Unknown keys are rejected everywhere.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from .errors import SchemaError
from .gf import FieldMatrix, FieldSpec, field_from_json
from .lnc import PRNG_NAME, CodingAssignment, assign_random
from .netgraph import (
    INTERMEDIATE,
    KINDS,
    VARIANT1,
    VARIANT2,
    DestinationSpec,
    Edge,
    Hybrid,
    Network,
    Node,
)
from .transform import LayeredNetwork

NETWORK_KEYS = {"field", "nodes", "edges", "source", "destinations"}
LAYERED_KEYS = NETWORK_KEYS | {"layers", "inserted"}


def _check_keys(obj, allowed: set[str], required: set[str], what: str):
    if not isinstance(obj, dict):
        raise SchemaError(f"{what} must be an object")
    unknown = set(obj) - allowed
    if unknown:
        raise SchemaError(f"unknown keys in {what}: {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise SchemaError(f"missing keys in {what}: {sorted(missing)}")


def _str(v, what):
    if not isinstance(v, str):
        raise SchemaError(f"{what} must be a string, got {v!r}")
    return v


def _variant_from_json(v):
    if v in (VARIANT1, VARIANT2):
        return v
    if isinstance(v, dict) and set(v) == {"hybrid"} and isinstance(v["hybrid"], int):
        return Hybrid(v["hybrid"])
    raise SchemaError(f"bad variant {v!r}")


def _variant_to_json(v):
    return {"hybrid": v.h} if isinstance(v, Hybrid) else v


def network_from_json(d: dict, allowed: set[str] = NETWORK_KEYS) -> Network:
    _check_keys(d, allowed, NETWORK_KEYS - {"field"}, "network")
    field = field_from_json(d["field"]) if "field" in d else None
    nodes = []
    for i, nd in enumerate(d["nodes"]):
        _check_keys(nd, {"id", "kind", "variant"}, {"id"}, f"nodes[{i}]")
        kind = nd.get("kind", INTERMEDIATE)
        if kind not in KINDS:
            raise SchemaError(f"nodes[{i}]: unknown kind {kind!r}")
        nodes.append(Node(_str(nd["id"], "node id"), kind, _variant_from_json(nd.get("variant", VARIANT1))))
    edges = []
    for i, ed in enumerate(d["edges"]):
        _check_keys(ed, {"id", "from", "to"}, {"id", "from", "to"}, f"edges[{i}]")
        edges.append(Edge(_str(ed["id"], "edge id"), _str(ed["from"], "edge from"), _str(ed["to"], "edge to")))
    dests = []
    for i, dd in enumerate(d["destinations"]):
        _check_keys(dd, {"node", "taps"}, {"node"}, f"destinations[{i}]")
        if "taps" in dd:
            dests.append(DestinationSpec(_str(dd["node"], "destination"), tuple(dd["taps"])))
        else:
            dests.append(_str(dd["node"], "destination"))
    return Network(nodes, edges, _str(d["source"], "source"), dests, field)


def network_to_json(net: Network) -> dict:
    nodes = []
    for n in net.nodes:
        nd = {"id": n.id, "kind": n.kind}
        if n.kind == INTERMEDIATE:
            nd["variant"] = _variant_to_json(n.variant)
        nodes.append(nd)
    dests = []
    for d in net.destinations:
        dd = {"node": d.node}
        if list(d.taps) != [e.id for e in net.in_edges(d.node)]:
            dd["taps"] = list(d.taps)
        dests.append(dd)
    return {
        "field": net.field.to_json(),
        "nodes": nodes,
        "edges": [{"id": e.id, "from": e.tail, "to": e.head} for e in net.edges],
        "source": net.source,
        "destinations": dests,
    }


def layered_to_json(lnet: LayeredNetwork) -> dict:
    d = network_to_json(lnet.network)
    d["layers"] = {v: lnet.layers[v] for v in (n.id for n in lnet.network.nodes) if v in lnet.layers}
    d["inserted"] = list(lnet.inserted)
    return d


def layered_from_json(d: dict) -> LayeredNetwork:
    _check_keys(d, LAYERED_KEYS, {"layers"}, "layered network")
    net = network_from_json({k: v for k, v in d.items() if k in NETWORK_KEYS})
    return LayeredNetwork.from_network(net, {k: int(v) for k, v in d["layers"].items()}, d.get("inserted", []))


def load_any(d: dict):
    """Network or LayeredNetwork, depending on whether ``layers`` is present."""
    return layered_from_json(d) if isinstance(d, dict) and "layers" in d else network_from_json(d)


# -- assignments ----------------------------------------------------------------------

def assignment_to_json(asg: CodingAssignment) -> dict:
    return {
        "field": asg.field.to_json(),
        "coeffs": [
            {"node": node, "in_edge": ein, "out_edge": eout, "value": v}
            for (node, ein, eout), v in asg.items()
        ],
    }


def assignment_from_json(d: dict, net: Network) -> CodingAssignment:
    """Explicit coefficients, or a ``{"seed", "prng"}`` recipe drawn on ``net``."""
    if isinstance(d, dict) and "seed" in d:
        _check_keys(d, {"seed", "prng"}, {"seed"}, "assignment")
        prng = d.get("prng", PRNG_NAME)
        if prng != PRNG_NAME:
            raise SchemaError(f"unsupported prng {prng!r}; only {PRNG_NAME!r} is available")
        return assign_random(net, int(d["seed"]))
    _check_keys(d, {"coeffs", "field"}, {"coeffs"}, "assignment")
    field = field_from_json(d["field"]) if "field" in d else net.field
    coeffs = {}
    for i, c in enumerate(d["coeffs"]):
        _check_keys(c, {"node", "in_edge", "out_edge", "value"}, {"node", "in_edge", "value"}, f"coeffs[{i}]")
        coeffs[(c["node"], c["in_edge"], c.get("out_edge"))] = int(c["value"])
    return CodingAssignment(field, coeffs)


# -- matrices -------------------------------------------------------------------------

def matrix_to_json(m: FieldMatrix) -> list[list[int]]:
    return m.tolist()


def matrix_from_json(field: FieldSpec, rows) -> FieldMatrix:
    """Accepts a bare list of rows or a dump with a ``data`` key."""
    if isinstance(rows, dict):
        rows = rows.get("data")
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise SchemaError("matrix must be a list of rows")
    return FieldMatrix.from_rows(field, rows)


# -- files ----------------------------------------------------------------------------

def read_json(path) -> dict:
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: {exc}") from None


def dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def write_atomic(path, text: str):
    """Write via a temp file in the same directory, then rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- DOT --------------------------------------------------------------------------------

def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


_SHAPES = {"source": "box", "destination": "doublecircle", "siso": "point", "intermediate": "circle"}


def to_dot(net_or_lnet, name: str = "network") -> str:
    """Graphviz text; layered networks get one ``rank=same`` cluster per layer."""
    lnet = net_or_lnet if isinstance(net_or_lnet, LayeredNetwork) else None
    net = lnet.network if lnet else net_or_lnet
    out = [f"digraph {_q(name)} {{", "  rankdir=LR;"]
    layered = set()
    if lnet:
        for l in range(1, lnet.L + 1):
            out.append(f"  subgraph {_q(f'cluster_layer{l}')} {{")
            out.append(f"    label={_q(f'l={l}')};")
            out.append("    rank=same;")
            for v in lnet.layer_nodes(l):
                out.append(f"    {_q(v)} [shape={_SHAPES[net.node(v).kind]}];")
                layered.add(v)
            out.append("  }")
    for n in net.nodes:
        if n.id not in layered:
            out.append(f"  {_q(n.id)} [shape={_SHAPES[n.kind]}];")
    for e in net.edges:
        out.append(f"  {_q(e.tail)} -> {_q(e.head)} [label={_q(e.id)}];")
    out.append("}")
    return "\n".join(out) + "\n"
