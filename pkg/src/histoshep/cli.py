"""Command-line front end.

Subcommands: ``approximate``, ``info``, ``weights``, ``bench``.  Exit codes:
0 success, 2 bad input, 3 infeasible configuration, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import warnings
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import bench
from .covering import build_covering, covering_radius, max_degree
from .errors import HistoshepError, InfeasibleError, InputError, MalformedInput
from .formats import atomic_write, fmt, jsonable, read_grid
from .grid import build_grid, compute_metrics, partition_continuity
from .operator import DEFAULT_K, DEFAULT_MU, build, evaluate_many
from .shepard import eval_weights_many, figure_layout, place_nodes, two_interval_nodes

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_NUMERICAL = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _int_at_least(lo):
    def parse(text):
        v = int(text)
        if v < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}, got {text}")
        return v
    return parse


def _floats(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_build_flags(p, *, d_required=True):
    p.add_argument("--d", type=_int_at_least(0), required=d_required, help="local polynomial degree")
    p.add_argument("--K", type=_int_at_least(2), default=DEFAULT_K, help="Shepard points per covering interval")
    p.add_argument("--mu", type=_positive, default=DEFAULT_MU, help="Shepard exponent (even integers give C-infinity)")
    p.add_argument("--placement", choices=["interior", "shared"], default=None,
                   help="Shepard point placement; default picks interior for single-node overlaps")


def _add_input_flags(p):
    p.add_argument("input", help="grid file: CSV 'left,right,integral' or JSON {nodes, integrals, jumps}")
    p.add_argument("--jumps", type=_floats, default=None,
                   help="comma-separated jump locations (adds to those in a JSON file)")
    p.add_argument("--on-node", choices=["raise", "split", "straddle"], default="raise",
                   help="policy for a jump lying on a node")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="histoshep", description="Smooth quasi-histopolation from segment integrals.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("approximate", help="build the quasi-histopolant and evaluate it")
    _add_input_flags(p)
    _add_build_flags(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--ne", type=_int_at_least(2), default=None,
                   help="number of equispaced evaluation points (default 10007)")
    g.add_argument("--eval-grid", default=None, help="file with one evaluation point per line")
    p.add_argument("--out", default=None, help="output CSV 'x,Q(x)' (stdout if omitted)")
    p.add_argument("--report", default=None, help="write the build report as JSON to this path")

    p = sub.add_parser("info", help="print radius, d_max, covering and metrics as JSON")
    _add_input_flags(p)
    p.add_argument("--d", type=_int_at_least(0), nargs="*", default=None,
                   help="degrees to report r_d for (default 0..d_max); the first one is covered")
    p.add_argument("--out", default=None, help="write the JSON here instead of stdout")

    p = sub.add_parser("weights", help="dump Shepard weights 'x,W_1,...,W_M' as CSV")
    p.add_argument("input", nargs="?", default=None, help="grid file (omit when --config is given)")
    p.add_argument("--config", choices=["figure1", "figure8"], default=None,
                   help="built-in layout: nine overlapping intervals, or two disjoint intervals")
    p.add_argument("--jumps", type=_floats, default=None, help="comma-separated jump locations")
    p.add_argument("--on-node", choices=["raise", "split", "straddle"], default="raise")
    _add_build_flags(p, d_required=False)
    p.add_argument("--ne", type=_int_at_least(2), default=2001, help="number of equispaced points")
    p.add_argument("--out", default=None, help="output CSV (stdout if omitted)")

    p = sub.add_parser("bench", help="run a named experiment and emit CSV rows")
    p.add_argument("name", help=", ".join(bench.EXPERIMENTS))
    p.add_argument("--K", type=_int_at_least(2), default=None, help="override the sweep's K")
    p.add_argument("--mu", type=_positive, default=None, help="override the Shepard exponent")
    p.add_argument("--placement", choices=["interior", "shared"], default=None)
    p.add_argument("--ne", type=_int_at_least(2), default=None, help="evaluation points (default 10007)")
    p.add_argument("--out", default=None, help="output CSV (stdout if omitted)")
    p.add_argument("--plots", action="store_true",
                   help="also write 'x,f,Q' traces for f5..f8 next to --out")
    return parser


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _load(args):
    gi = read_grid(args.input)
    grid = build_grid(gi.nodes, gi.integrals)
    jumps = list(gi.jumps) + list(args.jumps or [])
    return grid, partition_continuity(grid, jumps, on_node=args.on_node)


def _eval_points(args, grid) -> np.ndarray:
    if args.eval_grid:
        path = Path(args.eval_grid)
        try:
            lines = path.read_text().splitlines()
        except OSError as exc:
            raise MalformedInput(f"cannot read {path}: {exc.strerror or exc}") from None
        pts = []
        for k, line in enumerate(lines, start=1):
            if line.strip():
                try:
                    pts.append(float(line.split(",")[0]))
                except ValueError:
                    raise MalformedInput(f"{path}: row {k}: {line.strip()!r} is not a number") from None
        return np.array(pts)
    return np.linspace(grid.a, grid.b, args.ne or bench.DEFAULT_NE)


def cmd_approximate(args) -> int:
    grid, part = _load(args)
    Q = build(grid, part, args.d, K=args.K, mu=args.mu, placement=args.placement)
    xs = _eval_points(args, grid)
    qs = evaluate_many(Q, xs)
    _emit("x,Q(x)\n" + "".join(f"{fmt(float(x))},{fmt(float(q))}\n" for x, q in zip(xs, qs)), args.out)
    if args.report:
        atomic_write(args.report, json.dumps(jsonable(Q.report), indent=2) + "\n")
    return EXIT_OK


def cmd_info(args) -> int:
    grid, part = _load(args)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        metrics = compute_metrics(grid, part)
    info = {
        "n": grid.n,
        "a": grid.a,
        "b": grid.b,
        "jumps": list(part.jumps),
        "sigma": list(part.sigma),
        "intervals": [None if iv is None else {"first": iv.first, "last": iv.last, "left": iv.left, "right": iv.right}
                      for iv in part.intervals],
        "metrics": metrics.as_dict(),
        "admissible": metrics.admissible,
        "d_max": None,
        "r": {},
        "covering": None,
    }
    if metrics.admissible:
        d_max = max_degree(grid, part)
        info["d_max"] = d_max
        degrees = args.d if args.d else list(range(d_max + 1))
        for d in degrees:
            try:
                info["r"][str(d)] = covering_radius(grid, part, d)
            except InfeasibleError as exc:
                info["r"][str(d)] = None
                info.setdefault("errors", {})[str(d)] = str(exc)
        d0 = degrees[0]
        if d0 <= d_max:
            info["covering"] = build_covering(grid, part, d0).as_dict()
    _emit(json.dumps(jsonable(info), indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_weights(args) -> int:
    if args.config == "figure1":
        nodes = place_nodes(figure_layout(bench.OVERLAP_LEFTS, bench.OVERLAP_LENGTH), args.K,
                            args.placement or "shared")
        a, b = -1.0, 1.0
    elif args.config == "figure8":
        nodes = two_interval_nodes(-1.0, -0.1, 0.1, 1.0, args.K)
        a, b = -1.0, 1.0
    else:
        if args.input is None:
            raise MalformedInput("weights needs an input file or --config")
        if args.d is None:
            raise MalformedInput("weights on a grid file needs --d")
        grid, part = _load(args)
        Q = build(grid, part, args.d, K=args.K, mu=args.mu, placement=args.placement)
        nodes, a, b = Q.nodes, grid.a, grid.b
    xs = np.linspace(a, b, args.ne)
    W = eval_weights_many(nodes, args.mu, xs)
    head = "x," + ",".join(f"W_{i + 1}" for i in range(W.shape[1])) + "\n"
    body = "".join(fmt(float(x)) + "," + ",".join(fmt(float(w)) for w in row) + "\n" for x, row in zip(xs, W))
    _emit(head + body, args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    overrides = {"K": args.K, "mu": args.mu, "placement": args.placement, "ne": args.ne}
    rows = bench.run_experiment(args.name, overrides)
    _emit(bench.rows_to_csv(rows), args.out)
    if args.plots:
        stem = Path(args.out).with_suffix("") if args.out else Path(args.name)
        for name in ("f5", "f6", "f7", "f8"):
            traces = bench.plot_traces(name, K=args.K or DEFAULT_K, mu=args.mu or DEFAULT_MU,
                                       placement=args.placement)
            atomic_write(f"{stem}_trace_{name}.csv", bench.rows_to_csv(traces))
    return EXIT_OK


COMMANDS = {"approximate": cmd_approximate, "info": cmd_info, "weights": cmd_weights, "bench": cmd_bench}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except HistoshepError as exc:
        if isinstance(exc, InputError):
            code = EXIT_INPUT
        elif isinstance(exc, InfeasibleError):
            code = EXIT_INFEASIBLE
        else:
            code = EXIT_NUMERICAL
        print(f"histoshep: error: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
