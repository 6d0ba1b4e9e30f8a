"""Command-line experiment runner.

Subcommands cover each module plus an acceptance-suite driver. Configuration
comes from an INI file (section [loopzeta]) overridden by command-line flags;
every run logs the fully resolved configuration and seed. All stochastic
commands use the counter-based Philox generator, so identical configurations
reproduce byte-identical artifacts.

Exit codes: 0 success, 2 success with flagged numerical warnings, 1 error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import math
import os
import sys

import numpy as np

from . import acceptance, gff, graphs, lattice, reweight, subdivision
from .loopmass import (
    LoopMassQuery,
    decay_residual,
    fit_log_slope,
    loop_mass,
    loop_mass_quadrature,
    theorem_residual_boundary,
    theorem_residual_closed,
)
from .surfaces import parse_surface
from .zeta import log_det_zeta

log = logging.getLogger("loopzeta")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FLAGGED = 2


def _fmt(x) -> str:
    if isinstance(x, float):
        return "%.17g" % x
    return str(x)


def _write_text(path, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _csv(rows) -> str:
    return "".join(",".join(_fmt(x) for x in row) + "\n" for row in rows)


def worker_count(requested=None) -> int:
    """Worker count: flag value, else LOOPZETA_WORKERS, else 1."""
    if requested:
        return max(1, int(requested))
    env = os.environ.get("LOOPZETA_WORKERS")
    return max(1, int(env)) if env else 1


def parallel_map(fn, items, workers: int):
    """Map over independent items on a thread pool; results are aggregated
    in submission order so output never depends on scheduling."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _load_graph(path: str) -> graphs.Graph:
    with open(path) as fh:
        return graphs.read_edge_list(fh.read())


def cmd_graph_loops(args) -> int:
    g = _load_graph(args.graph)
    rows = [("quantity", "value")]
    det_graph, det_rw, deg_prod = graphs.determinant_identity(g)
    rows += [("det_laplacian_minor", det_graph),
             ("det_rw_laplacian", det_rw),
             ("degree_product", deg_prod)]
    if g.is_killed:
        rows.append(("loop_mass_exact", graphs.loop_mass_exact(g)))
        mass, tail = graphs.loop_mass_truncated(g, args.max_len)
        rows += [("loop_mass_truncated", mass), ("tail_bound", tail)]
    else:
        rows.append(("log_det_prime_rw", graphs.log_det_prime_rw(g)))
    rows.append(("spanning_trees", graphs.spanning_tree_count(g)))
    if args.alpha is not None:
        rows.append(("penalized_loop_mass", graphs.penalized_loop_mass(g, args.alpha)))
    _write_text(args.out, _csv(rows))
    return EXIT_OK


def cmd_soup_sample(args) -> int:
    g = _load_graph(args.graph)
    soup = graphs.sample_loop_soup(g, args.intensity, args.max_len, args.seed)
    rows = [("loop", "length", "vertices")]
    for i, loop in enumerate(soup.loops):
        rows.append((i, len(loop) - 1, "-".join(str(v) for v in loop)))
    _write_text(args.out, _csv(rows))
    if soup.tail_warning:
        log.warning("truncation at max_len %d misses non-negligible mass",
                    args.max_len)
        return EXIT_FLAGGED
    return EXIT_OK


def cmd_zeta_det(args) -> int:
    surf = parse_surface(args.surface)
    report = log_det_zeta(surf, args.delta)
    _write_text(args.out, json.dumps({
        "surface": args.surface,
        "log_det": report.log_det,
        "delta_split": report.delta_split,
        "integral_tail": report.integral_tail,
        "integral_head": report.integral_head,
        "correction_terms": report.correction_terms,
        "error_estimate": report.error_estimate,
        "flagged": report.flagged,
    }, indent=2) + "\n")
    return EXIT_FLAGGED if report.flagged else EXIT_OK


def cmd_loop_mass(args) -> int:
    surf = parse_surface(args.surface)
    query = LoopMassQuery(surf, args.qv_low, args.qv_high, args.kappa)
    eigen = loop_mass(query)
    quad = loop_mass_quadrature(query)
    _write_text(args.out, json.dumps({
        "surface": args.surface,
        "qv_low": args.qv_low,
        "qv_high": args.qv_high,
        "kappa": args.kappa,
        "loop_mass": eigen,
        "loop_mass_quadrature": quad,
        "route_gap": abs(eigen - quad),
    }, indent=2) + "\n")
    return EXIT_OK


def cmd_verify_theorem(args) -> int:
    surf = parse_surface(args.surface)
    deltas = [float(d) for d in args.deltas.split(",")]
    if args.case == "boundary":
        res = [theorem_residual_boundary(surf, d) for d in deltas]
    elif args.case == "closed":
        res = [theorem_residual_closed(surf, d, args.cap) for d in deltas]
    else:
        res = [decay_residual(surf, d, args.kappa) for d in deltas]
    rows = [("delta", "residual")] + list(zip(deltas, res))
    _write_text(args.out, _csv(rows))
    try:
        slope = fit_log_slope(deltas, res)
    except ValueError:
        slope = None
    _write_text(args.json_out, json.dumps(
        {"case": args.case, "surface": args.surface, "slope": slope}) + "\n")
    return EXIT_OK


def cmd_lattice_torus(args) -> int:
    sizes = tuple(int(s) for s in args.sizes.split(","))
    specs = lattice.standard_sequence(args.aspect, sizes)
    rows = [("n_x", "n_y", "log_det_prime", "constant")]
    for spec in specs:
        rows.append((spec.n_x, spec.n_y,
                     lattice.discrete_torus_log_det(spec),
                     lattice.torus_constant(spec)))
    _write_text(args.out, _csv(rows))
    result = lattice.constant_term(specs)
    _write_text(args.json_out, json.dumps({
        "aspect": args.aspect,
        "limit": result.limit,
        "cauchy_gap": result.cauchy_gap,
        "flagged": result.flagged,
    }) + "\n")
    return EXIT_FLAGGED if result.flagged else EXIT_OK


def cmd_gff_sample(args) -> int:
    field = gff.sample_dgff(args.size, args.seed)
    gff.write_field(field, args.out)
    log.info("field variance %.4f, dirichlet energy %.1f",
             float(field.values.var()), gff.dirichlet_energy(field))
    return EXIT_OK


def cmd_subdivide(args) -> int:
    if args.field:
        field = gff.read_field(args.field)
    else:
        field = gff.sample_dgff(args.size, args.seed)
    if args.epsilon is not None:
        q = subdivision.charge_to_params(args.charge).Q
        part = subdivision.subdivide(field, q, args.epsilon)
    else:
        part = subdivision.regime_protocol(field, args.charge, args.ratio)
    rows = [("level", "i", "j", "flagged")]
    flagged = part.flagged
    for s in sorted(part.squares):
        rows.append((s.level, s.i, s.j, int(s in flagged)))
    _write_text(args.out, _csv(rows))
    if args.svg:
        _write_text(args.svg, subdivision.render_svg(part))
    log.info("%d squares, %d flagged, terminated=%s",
             len(part), part.flagged_count, part.terminated)
    return EXIT_OK if part.terminated else EXIT_FLAGGED


def cmd_reweight_test(args) -> int:
    rep = reweight.reweighting_experiment(
        args.size, args.epsilon, args.charge, args.delta_charge,
        args.samples, args.seed)
    _write_text(args.json_out, json.dumps({
        "count_chi2": rep.count_chi2, "count_p": rep.count_p,
        "level_chi2": rep.level_chi2, "level_p": rep.level_p,
        "slice_chi2": rep.slice_chi2, "slice_p": rep.slice_p,
        "modal_count": rep.modal_count, "ess": rep.ess,
        "underpowered": rep.underpowered,
        "mean_count_direct": rep.mean_count_direct,
        "mean_count_weighted": rep.mean_count_weighted,
    }, indent=2) + "\n")
    rows = [("statistic", "direct", "weighted")]
    rows.append(("mean_count", rep.mean_count_direct, rep.mean_count_weighted))
    _write_text(args.out, _csv(rows))
    return EXIT_FLAGGED if rep.underpowered else EXIT_OK


def cmd_acceptance(args) -> int:
    indices = None
    if args.only:
        indices = [int(tok) for tok in args.only.split(",")]
    results = acceptance.run_all(indices)
    return EXIT_OK if all(r.passed for r in results) else EXIT_ERROR


# ---------------------------------------------------------------------------
# argument parsing and config merging
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loopzeta",
        description="loop measures, zeta determinants and square subdivisions")
    parser.add_argument("--config", help="INI config file ([loopzeta] section)")
    parser.add_argument("--workers", type=int,
                        help="worker threads (default: LOOPZETA_WORKERS or 1)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(fn=fn)
        p.add_argument("--out", default="-", help="output path (default stdout)")
        return p

    p = add("graph-loops", cmd_graph_loops, help="graph determinants and loop masses")
    p.add_argument("--graph", required=True, help="edge-list file")
    p.add_argument("--max-len", type=int, default=40)
    p.add_argument("--alpha", type=float)

    p = add("soup-sample", cmd_soup_sample, help="sample a Poissonian loop soup")
    p.add_argument("--graph", required=True)
    p.add_argument("--intensity", type=float, default=1.0)
    p.add_argument("--max-len", type=int, default=40)
    p.add_argument("--seed", type=int, default=0)

    p = add("zeta-det", cmd_zeta_det, help="zeta-regularized determinant")
    p.add_argument("--surface", required=True,
                   help="e.g. disk:1.0, torus:1.0x2.0, interval:1.0")
    p.add_argument("--delta", type=float, default=0.1)

    p = add("loop-mass", cmd_loop_mass, help="loop mass in a QV window")
    p.add_argument("--surface", required=True)
    p.add_argument("--qv-low", type=float, required=True)
    p.add_argument("--qv-high", type=float, default=math.inf)
    p.add_argument("--kappa", type=float, default=0.0)

    p = add("verify-theorem", cmd_verify_theorem,
            help="expansion residuals across a delta sweep")
    p.add_argument("--case", choices=("boundary", "closed", "decay"),
                   required=True)
    p.add_argument("--surface", required=True)
    p.add_argument("--deltas", default="0.04,0.02,0.01,0.005")
    p.add_argument("--cap", type=float, default=50.0)
    p.add_argument("--kappa", type=float, default=1e-4)
    p.add_argument("--json-out", default="-")

    p = add("lattice-torus", cmd_lattice_torus,
            help="discrete torus determinant constants")
    p.add_argument("--aspect", type=int, default=1)
    p.add_argument("--sizes", default="64,128,256,512")
    p.add_argument("--json-out", default="-")

    p = add("gff-sample", cmd_gff_sample, help="sample a field to a binary file")
    p.add_argument("--size", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)

    p = add("subdivide", cmd_subdivide, help="dyadic square subdivision")
    p.add_argument("--size", type=int, default=1024)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--field", help="read field from file instead of sampling")
    p.add_argument("--charge", type=float, default=0.0)
    p.add_argument("--ratio", type=float, default=2.0**-12)
    p.add_argument("--epsilon", type=float,
                   help="explicit quantum-size threshold (overrides --ratio)")
    p.add_argument("--svg", help="also render the partition to this SVG file")

    p = add("reweight-test", cmd_reweight_test,
            help="two-protocol reweighting comparison")
    p.add_argument("--size", type=int, default=64)
    p.add_argument("--charge", type=float, default=0.0)
    p.add_argument("--delta-charge", type=float, default=-12.5)
    p.add_argument("--epsilon", type=float, default=0.45)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=11)
    p.add_argument("--json-out", default="-")

    p = add("acceptance", cmd_acceptance, help="run the acceptance suite")
    p.add_argument("--only", help="comma-separated criterion numbers")

    return parser


def _merge_config(parser, args, argv):
    """Fill in values from the INI file for options not given on the command
    line (flags win)."""
    if not args.config:
        return args
    ini = configparser.ConfigParser()
    if not ini.read(args.config):
        raise ValueError("unreadable config file: %s" % args.config)
    if not ini.has_section("loopzeta"):
        raise ValueError("config file lacks a [loopzeta] section")
    given = {tok.split("=", 1)[0].lstrip("-").replace("-", "_")
             for tok in argv if tok.startswith("--")}
    for key, value in ini.items("loopzeta"):
        dest = key.replace("-", "_")
        if dest in given or not hasattr(args, dest):
            continue
        current = getattr(args, dest)
        caster = type(current) if current is not None else str
        if caster is bool:
            value = ini.getboolean("loopzeta", key)
        else:
            value = caster(value)
        setattr(args, dest, value)
    return args


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="loopzeta: %(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        args = _merge_config(parser, args, argv)
        resolved = {k: v for k, v in sorted(vars(args).items())
                    if k not in ("fn",) and v is not None}
        resolved["workers"] = worker_count(args.workers)
        log.info("resolved config: %s", json.dumps(resolved, default=str))
        return args.fn(args)
    except (ValueError, OSError, ArithmeticError) as exc:
        print("loopzeta: error: %s" % exc, file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
