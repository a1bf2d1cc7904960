"""Command-line entry point: ``percoplanar <subcommand> [flags]``.

Exit status is 0 on success, 1 on usage, validation or domain errors and 2
on I/O errors. Sweep flags override the matching config-file keys.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional, Sequence

from . import analysis, harness
from .generators import FAMILIES, FamilySpec, FamilySpecError, GenerationError, generate
from .graph import EdgeListFormatError, GraphValidationError, graph_stats, read_edge_list, write_edge_list
from .percolation import SampleParams, percolate
from .planarity import density_certificate, format_certificate, is_planar
from .witness import WitnessParams, find_witness

SEED_ENV = "PERCOPLANAR_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _family_flags(p: argparse.ArgumentParser, required: bool = True) -> None:
    g = p.add_argument_group("base graph")
    g.add_argument("--family", choices=FAMILIES, required=required)
    g.add_argument("--n", type=int, help="vertex count (complete, random_regular)")
    g.add_argument("--r", type=int, help="degree (random_regular, disjoint_cliques)")
    g.add_argument("--d", type=int, help="hypercube dimension")
    g.add_argument("--rows", type=int)
    g.add_argument("--cols", type=int)
    g.add_argument("--copies", type=int, help="number of cliques K_{r+1}")
    g.add_argument("--a", type=int, help="first side of a complete bipartite graph")
    g.add_argument("--b", type=int, help="second side of a complete bipartite graph")
    g.add_argument("--path", help="edge-list file (family from_file)")


def _seed_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None,
                   help=f"master seed (default: ${SEED_ENV}, else 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="percoplanar", description="Planarity of percolated graphs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="write a base graph as an edge list")
    _family_flags(p)
    _seed_flag(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("percolate", help="keep each edge with probability p")
    p.add_argument("graph")
    p.add_argument("--p", type=float, required=True)
    _seed_flag(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("planar", help="print planar or non-planar")
    p.add_argument("graph")

    p = sub.add_parser("certify", help="search for a non-planarity certificate")
    p.add_argument("graph")
    p.add_argument("--ell", type=int, default=10, help="short-cycle horizon (default 10)")
    p.add_argument("--out", help="also write the certificate block here")

    p = sub.add_parser("witness", help="run the tree-growth witness search on one sample")
    p.add_argument("graph", nargs="?", help="edge-list file (or give --family)")
    _family_flags(p, required=False)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--p", type=float, help="override p = (1 + epsilon) / r")
    _seed_flag(p)
    p.add_argument("--ell", type=int)
    p.add_argument("--i0", type=int, help="target tree size")
    p.add_argument("--out", help="write the certificate block here")

    p = sub.add_parser("sweep", help="run a Monte Carlo sweep and write CSV")
    p.add_argument("--config")
    _family_flags(p, required=False)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--trials", type=int)
    _seed_flag(p)
    p.add_argument("--ell", type=int)
    p.add_argument("--mode", choices=harness.MODES + ("oracle", "witness"))
    p.add_argument("--threads", type=int)
    p.add_argument("--out")
    p.add_argument("--coupled", action="store_true", default=None)
    p.add_argument("--summary-out", help="also write per-point summary CSV")

    p = sub.add_parser("analyze", help="closed-form giant and cycle predictions")
    p.add_argument("--fixed-point", type=float, metavar="C",
                   help="print the root of x = 1 - exp(-C x)")
    p.add_argument("--c", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--g0", type=int)
    p.add_argument("--tol", type=float, default=1e-12)
    return parser


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None or env == "":
        return 0
    try:
        return int(env)
    except ValueError:
        raise ValueError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def _require_file(path: str) -> None:
    if not os.path.isfile(path):
        raise FileNotFoundError(2, "no such file", path)


def _require_writable(path: Optional[str]) -> None:
    if path is None:
        return
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        raise FileNotFoundError(2, "output directory does not exist", parent)


def _family_spec(args) -> FamilySpec:
    return FamilySpec(args.family, n=args.n, a=args.a, b=args.b, dim=args.d, rows=args.rows,
                      cols=args.cols, r=args.r, copies=args.copies, path=args.path)


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def cmd_generate(args, out) -> int:
    _require_writable(args.out)
    if args.family == "from_file" and args.path:
        _require_file(args.path)
    graph = generate(_family_spec(args), _seed(args))
    write_edge_list(graph, args.out)
    s = graph_stats(graph)
    print(f"n={s.n} m={s.m} min_degree={s.min_degree} max_degree={s.max_degree}", file=out)
    return 0


def cmd_percolate(args, out) -> int:
    _require_file(args.graph)
    _require_writable(args.out)
    params = SampleParams(args.p, _seed(args))
    sample = percolate(read_edge_list(args.graph), params)
    write_edge_list(sample, args.out)
    print(f"n={sample.n} m={sample.m}", file=out)
    return 0


def cmd_planar(args, out) -> int:
    _require_file(args.graph)
    print("planar" if is_planar(read_edge_list(args.graph)) else "non-planar", file=out)
    return 0


def cmd_certify(args, out) -> int:
    _require_file(args.graph)
    _require_writable(args.out)
    cert = density_certificate(read_edge_list(args.graph), args.ell)
    text = format_certificate(cert) if cert is not None else "no-certificate\n"
    out.write(text)
    if args.out:
        _write_text(args.out, text)
    return 0


def cmd_witness(args, out) -> int:
    if (args.graph is None) == (args.family is None):
        raise UsageError("witness: give either a graph file or --family")
    _require_writable(args.out)
    seed = _seed(args)
    if args.graph is not None:
        _require_file(args.graph)
        graph = read_edge_list(args.graph)
    else:
        graph = generate(_family_spec(args), seed)
    r = int(graph.degrees.min()) if graph.n else 0
    if r < 1:
        raise ValueError("the base graph has an isolated vertex")
    overrides = {k: v for k, v in (("ell", args.ell), ("i0", args.i0)) if v is not None}
    params = WitnessParams.for_graph(args.epsilon, r, graph.n, **overrides)
    rep = find_witness(graph, args.epsilon, seed, params=params, p=args.p)
    kind = rep.certificate.kind if rep.certificate else "-"
    print(f"outcome={rep.outcome} mechanism={rep.mechanism or '-'} reason={rep.reason or '-'} "
          f"certificate={kind} rounds={rep.rounds} tree={rep.tree_size} probes={rep.probes} "
          f"p={rep.p:.10g} p1={rep.p1:.10g} p2={rep.p2:.10g} seed={rep.seed}", file=out)
    if rep.certificate is not None:
        text = format_certificate(rep.certificate)
        out.write(text)
        if args.out:
            _write_text(args.out, text)
    return 0


def cmd_sweep(args, out) -> int:
    flags = dict(epsilon=args.epsilon, c=args.c, p=args.p, trials=args.trials,
                 n=args.n, r=args.r, d=args.d, rows=args.rows, cols=args.cols,
                 copies=args.copies, a=args.a, b=args.b, path=args.path)
    flags = {k: v for k, v in flags.items() if v is not None}
    run = dict(mode=args.mode, threads=args.threads, out=args.out, ell=args.ell,
               coupled=args.coupled)
    if args.seed is not None or os.environ.get(SEED_ENV):
        run["seed"] = _seed(args)
    if args.config:
        _require_file(args.config)
        config = harness.load_config(args.config)
        if args.family is not None and args.family != config.family:
            raise UsageError("sweep: --family disagrees with the config file")
        config = config.with_overrides(**flags, **run)
    else:
        if args.family is None:
            raise UsageError("sweep: give --config or --family")
        config = harness.ExperimentConfig(
            family=args.family, grid=({},), defaults=flags,
            **{k: v for k, v in run.items() if v is not None})
    if config.out is None:
        raise UsageError("sweep: no output path (set --out or 'out' in the config)")
    _require_writable(config.out)
    _require_writable(args.summary_out)
    records = harness.run_sweep(config)
    harness.emit_csv(records, config.out)
    stats = harness.summarize(records)
    if args.summary_out:
        harness.emit_csv(stats, args.summary_out)
    print(harness.format_summary(stats), file=out)
    return 0


def cmd_analyze(args, out) -> int:
    if args.fixed_point is None and args.c is None:
        raise UsageError("analyze: give --fixed-point C or --c C")
    if args.fixed_point is not None:
        print(f"x = {analysis.giant_fixed_point(args.fixed_point, args.tol):.10f}", file=out)
    if args.c is not None:
        x = analysis.giant_fixed_point(args.c, args.tol)
        print(f"c = {args.c:.10g}  x = {x:.10f}", file=out)
        if args.n is not None and args.c > 1:
            g = analysis.predicted_giant(args.n, args.c, args.tol)
            print(f"giant vertices = {g.vertices:.10g}  giant edges = {g.edges:.10g}", file=out)
        if args.g0 is not None:
            e = analysis.expected_short_cycles(args.n or 1, args.c, args.g0)
            print(f"cycles of length 3..{args.g0}: expected = {e.refined:.10g}  "
                  f"upper bound = {e.upper_bound:.10g}", file=out)
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "percolate": cmd_percolate,
    "planar": cmd_planar,
    "certify": cmd_certify,
    "witness": cmd_witness,
    "sweep": cmd_sweep,
    "analyze": cmd_analyze,
}

DOMAIN_ERRORS = (ValueError, GraphValidationError, EdgeListFormatError, FamilySpecError,
                 GenerationError, harness.ConfigError)


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(exc, file=err)
        return 1
    except harness.SweepError as exc:
        print(f"error: {exc}", file=err)
        return 2 if isinstance(exc.__cause__, OSError) else 1
    except OSError as exc:
        where = f": {exc.filename}" if exc.filename else ""
        print(f"I/O error: {exc.strerror or exc}{where}", file=err)
        return 2
    except DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=err)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
