"""Command-line front end.

Machine-readable JSON goes to ``--out`` (written atomically) or, without
``--out``, to stdout; the human-readable report goes to stdout or stderr
respectively.  Exit status: 0 success, 1 domain error, 2 usage or I/O.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import formats
from .analysis import mincut_report
from .duality import (
    backward_channel_by_simulation,
    backward_individual,
    backward_matrix,
    backward_valid,
    precode,
    random_precoder,
    reverse,
)
from .errors import NetworkCodingError, SchemaError
from .gf import mat_rank, mat_transpose, parse_field
from .lnc import (
    assign_random,
    channel_matrix,
    individual_matrix,
    interlayer_matrix,
    is_valid,
    overall_matrix,
    simulate,
    simulate_timed,
    transport_steps,
)
from .netgraph import INTERMEDIATE, VARIANT1, validate
from .transform import LayeredNetwork, layer, layered_variant1, layering_cost, to_variant1

SUBCOMMANDS = ("validate", "layer", "convert", "matrix", "mincut", "simulate", "reverse", "precode", "export-dot")


class UsageError(Exception):
    pass


@dataclass
class Output:
    data: object
    report: str
    status: int = 0


# -- helpers -----------------------------------------------------------------------------

def _load(args):
    obj = formats.load_any(formats.read_json(args.input))
    if args.field:
        f = parse_field(args.field)
        if isinstance(obj, LayeredNetwork):
            obj = LayeredNetwork(obj.network.replace(field=f), obj.layers, obj.inserted)
        else:
            obj = obj.replace(field=f)
    return obj


def _network(obj):
    return obj.network if isinstance(obj, LayeredNetwork) else obj


def _is_variant1(net) -> bool:
    return all(n.variant == VARIANT1 for n in net.nodes if n.kind == INTERMEDIATE)


def _pipeline(obj, convert_first: bool = False):
    """Layered Variant-I form plus the rewrite steps from the input network."""
    net = _network(obj)
    if isinstance(obj, LayeredNetwork) and _is_variant1(net):
        return obj, []
    if convert_first:
        conv, cmap = to_variant1(net)
        lnet = layer(conv)
        return lnet, [cmap, lnet]
    return layered_variant1(net)


def _assignment(args, net):
    if args.assignment:
        return formats.assignment_from_json(formats.read_json(args.assignment), net)
    if args.seed is None:
        raise UsageError(f"{args.command} needs --seed N or --assignment FILE")
    return assign_random(net, args.seed)


def _dest_keys(args, net):
    if args.dest is None:
        return [d.node for d in net.destinations]
    return [net.destination(_dest_arg(args.dest)).node]


def _dest_arg(text: str):
    return int(text) if text.isdigit() else text


def _frac(x: Fraction):
    return int(x) if x.denominator == 1 else float(x)


# -- subcommands ---------------------------------------------------------------------------

def cmd_validate(args) -> Output:
    net = _network(_load(args))
    rep = validate(net)
    text = "ok" if rep.ok else "\n".join(str(i) for i in rep.issues)
    return Output(rep.to_json(), text, 0 if rep.ok else 1)


def cmd_layer(args) -> Output:
    net = _network(_load(args))
    if args.convert_first:
        net, _ = to_variant1(net)
    lnet = layer(net)
    ncp, avg = layering_cost(net)
    text = "\n".join([
        f"L\t{lnet.L}",
        "n_l\t" + ",".join(map(str, lnet.sizes)),
        f"inserted_siso\t{len(lnet.inserted)}",
        f"coding_points\t{ncp}",
        f"avg_cp_in_degree\t{_frac(avg)}",
    ])
    if args.figure:
        from .plotting import plot_layered

        plot_layered(lnet, args.figure)
    return Output(formats.layered_to_json(lnet), text)


def cmd_convert(args) -> Output:
    net = _network(_load(args))
    out, cmap = to_variant1(net)
    split = {k: v for k, v in cmap.aux.items() if v != [k]}
    text = f"split_nodes\t{len(split)}\nrelays\t{len(cmap.relays)}\nnodes\t{len(out.nodes)}"
    return Output({"network": formats.network_to_json(out), "conversion": cmap.to_json()}, text)


def cmd_matrix(args) -> Output:
    obj = _load(args)
    net = _network(obj)
    asg = _assignment(args, net)
    lnet, steps = _pipeline(obj, args.convert_first)
    lasg = transport_steps(asg, net, steps)
    inter = [interlayer_matrix(lnet, lasg, l) for l in range(1, lnet.L)]
    a = overall_matrix(lnet, lasg)
    data = {
        "field": lnet.network.field.to_json(),
        "L": lnet.L,
        "layer_sizes": lnet.sizes,
        "source_injection": interlayer_matrix(lnet, lasg, 0).tolist(),
        "interlayer": [{"name": f"A_{l + 1},{l}", "shape": list(m.shape), "data": m.tolist()}
                       for l, m in enumerate(inter, start=1)],
        "overall": a.to_json(),
        "individual": {},
        "simulation_check": True,
    }
    lines = [f"A_{l + 1},{l}\t{m.rows}x{m.cols}" for l, m in enumerate(inter, start=1)]
    lines.append(f"A\t{a.matrix.rows}x{a.matrix.cols}")
    for d in net.destinations:
        ak = individual_matrix(lnet, lasg, d.node)
        ok = channel_matrix(net, asg, d.node).matrix == ak.matrix
        data["individual"][d.node] = ak.to_json()
        data["simulation_check"] &= ok
        lines.append(f"A_{d.node}\t{ak.matrix.rows}x{ak.matrix.cols}\trank={mat_rank(ak.matrix)}\tsim_ok={ok}")
    lines.append(a.matrix.pretty())
    return Output(data, "\n".join(lines), 0 if data["simulation_check"] else 1)


def cmd_mincut(args) -> Output:
    net = _network(_load(args))
    if args.seed is None:
        raise UsageError("mincut needs --seed N")
    reports = [mincut_report(net, d, args.trials, args.seed) for d in _dest_keys(args, net)]
    if args.figure:
        from .plotting import plot_mincut

        for i, r in enumerate(reports):
            path = args.figure if len(reports) == 1 else _suffixed(args.figure, r.destination)
            plot_mincut(r, path)
    text = "\n\n".join(r.table() for r in reports)
    return Output([r.to_json() for r in reports], text)


def _suffixed(path: str, tag: str) -> str:
    stem, dot, ext = path.rpartition(".")
    return f"{stem}_{tag}.{ext}" if dot else f"{path}_{tag}"


def cmd_simulate(args) -> Output:
    net = _network(_load(args))
    asg = _assignment(args, net)
    if args.x is None:
        raise UsageError("simulate needs --x v1,v2,...")
    x = [int(v) for v in args.x.split(",")]
    if args.timed:
        ys, trace = simulate_timed(net, asg, x)
    else:
        ys, trace = simulate(net, asg, x), None
    data = {"x": x, "y": {k: v.tolist() for k, v in ys.items()}}
    lines = [f"{k}\t" + ",".join(map(str, v.tolist())) for k, v in ys.items()]
    if trace is not None:
        data["trace"] = trace.to_json()
        lines += [f"{v}\tticks={','.join(map(str, t))}\tbuffer={trace.buffer_depth(v)}"
                  for v, t in trace.arrivals.items()]
    return Output(data, "\n".join(lines))


def _reverse_setup(args):
    obj = _load(args)
    net = _network(obj)
    asg = _assignment(args, net)
    lnet, steps = _pipeline(obj, args.convert_first)
    lasg = transport_steps(asg, net, steps)
    k = _dest_arg(args.dest) if args.dest is not None else 1
    return lnet, lasg, k


def cmd_reverse(args) -> Output:
    lnet, lasg, k = _reverse_setup(args)
    rev = reverse(lnet, lasg, k)
    a = overall_matrix(lnet, lasg)
    ab = backward_matrix(rev)
    ok = ab.matrix == mat_transpose(a.matrix)
    sim_ok = backward_channel_by_simulation(rev).matrix == backward_individual(rev).matrix
    fwd_valid = is_valid(lnet, lasg, k)
    bwd_valid = backward_valid(lnet, lasg, k)
    data = {
        "network": formats.network_to_json(rev.network),
        "layers": rev.layers,
        "assignment": formats.assignment_to_json(rev.assignment),
        "forward_matrix": a.to_json(),
        "backward_matrix": ab.to_json(),
        "transpose_ok": ok,
        "backward_simulation_ok": sim_ok,
        "forward_valid": fwd_valid,
        "backward_valid": bwd_valid,
    }
    text = "\n".join([
        f"transpose_ok\t{ok}",
        f"backward_simulation_ok\t{sim_ok}",
        f"forward_valid\t{fwd_valid}",
        f"backward_valid\t{bwd_valid}",
    ])
    return Output(data, text, 0 if ok and sim_ok else 1)


def cmd_precode(args) -> Output:
    lnet, lasg, k = _reverse_setup(args)
    rev = reverse(lnet, lasg, k)
    field = lnet.network.field
    if args.matrix:
        P = formats.matrix_from_json(field, formats.read_json(args.matrix))
    elif args.random:
        if args.seed is None:
            raise UsageError("precode --random needs --seed N")
        P = random_precoder(rev, args.seed)
    else:
        raise UsageError("precode needs --matrix FILE or --random")
    m = precode(rev, P)
    data = {"precoder": P.tolist(), "map": m.to_json(), "rank": mat_rank(m.matrix)}
    return Output(data, f"precoder\t{P.rows}x{P.cols}\nmap_rank\t{data['rank']}\n{m.matrix.pretty()}")


def cmd_export_dot(args) -> Output:
    obj = _load(args)
    return Output(None, formats.to_dot(obj))


HANDLERS = {
    "validate": cmd_validate,
    "layer": cmd_layer,
    "convert": cmd_convert,
    "matrix": cmd_matrix,
    "mincut": cmd_mincut,
    "simulate": cmd_simulate,
    "reverse": cmd_reverse,
    "precode": cmd_precode,
    "export-dot": cmd_export_dot,
}


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("input", help="network or layered-network JSON file")
    shared.add_argument("--field", help="override the field: p or p,m")
    shared.add_argument("--seed", type=int, help="seed for coefficient draws")
    shared.add_argument("--trials", type=int, default=32, help="random trials for mincut (default 32)")
    shared.add_argument("--dest", help="destination: 1-based index or node id")
    shared.add_argument("--timed", action="store_true", help="tick-level simulation trace")
    shared.add_argument("--convert-first", action="store_true",
                        help="convert to Variant I before layering (default: layer first)")
    shared.add_argument("--out", help="write JSON here instead of stdout")
    shared.add_argument("--assignment", help="coefficient assignment JSON")
    shared.add_argument("--x", help="comma-separated source symbols for simulate")
    shared.add_argument("--figure", help="also render a PNG/PDF figure (layer, mincut)")
    shared.add_argument("--matrix", help="precoder matrix JSON (precode)")
    shared.add_argument("--random", action="store_true", help="random precoder (precode)")

    p = argparse.ArgumentParser(prog="layernc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "validate": "check network invariants",
        "layer": "insert SISO relays so all source-destination paths have equal length",
        "convert": "split Variant-II/hybrid nodes into Variant-I auxiliaries",
        "matrix": "interlayer, overall and individual channel matrices",
        "mincut": "rank estimate, structural bound and max-flow per destination",
        "simulate": "propagate source symbols through the network",
        "reverse": "backward network and transpose check",
        "precode": "backward map with a precoder at the reverse source",
        "export-dot": "Graphviz DOT text",
    }
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[shared], help=helps[name])
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        res = HANDLERS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NetworkCodingError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1

    if res.data is None:
        text = res.report
        if args.out:
            formats.write_atomic(args.out, text)
        else:
            sys.stdout.write(text)
        return res.status
    payload = formats.dumps(_jsonable(res.data))
    if args.out:
        formats.write_atomic(args.out, payload)
        print(res.report)
    else:
        sys.stdout.write(payload)
        print(res.report, file=sys.stderr)
    return res.status


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer, np.bool_)):
        return obj.item()
    return obj


if __name__ == "__main__":
    sys.exit(main())
