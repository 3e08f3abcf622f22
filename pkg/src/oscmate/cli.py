"""Command-line front end.

Exit status: 0 success, 2 geometric domain error, 3 expression or
argument error, 4 I/O error. Diagnostics go to stderr prefixed with
``error[CODE]:``; stdout carries only the requested payload.
"""

import argparse
import json
import sys
from typing import List, Optional

import numpy as np

from . import catalog, classify, export, mates
from .curves import synthesize_from_curvatures
from .errors import OscMateError
from .exprparse import compile_expr
from .numerics import Grid


class ArgumentError(Exception):
    code = "ArgumentError"
    exit_status = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ArgumentError(f"{self.prog}: {message}")


def _vector(text):
    try:
        v = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected X,Y,Z, got {text!r}") from None
    if len(v) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}")
    return v


def _add_source(p, with_window=True):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--curve", help="catalog curve, NAME[:k=v,...]")
    src.add_argument("--in", dest="infile", help="curve JSON written by this tool")
    if with_window:
        p.add_argument("--s-min", type=float, help="first arc-length station (default: entry window)")
        p.add_argument("--s-max", type=float, help="last arc-length station (default: entry window)")
        p.add_argument("--samples", type=int, default=catalog.DEFAULT_SAMPLES, help="number of stations")


def _add_output(p):
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--out", help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="oscmate", description="Osculating mates of space curves.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("list-catalog", help="list built-in curves and their parameters")

    p = sub.add_parser("analyze", help="Frenet apparatus with sigma and mu profiles")
    _add_source(p)
    _add_output(p)

    p = sub.add_parser("mate", help="osculating mate of a curve")
    _add_source(p)
    p.add_argument("--theta0", type=float, default=0.0, help="rotation angle at arc length 0")
    p.add_argument("--origin", type=_vector, default=[0.0, 0.0, 0.0], help="mate position at the reference station")
    _add_output(p)

    p = sub.add_parser("ot-mate", help="closed-form OT-osculating mate with validation")
    _add_source(p)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--theta0", type=float, default=0.0)
    _add_output(p)

    p = sub.add_parser("classify", help="class verdicts as JSON")
    _add_source(p)
    p.add_argument("--of", choices=("curve", "mate"), default="curve")
    p.add_argument("--theta0", type=float, default=0.0, help="mate angle (with --of mate)")
    p.add_argument("--tol-rel", type=float, default=classify.Tolerances.tol_rel)
    p.add_argument("--tol-abs", type=float, default=classify.Tolerances.tol_abs)
    p.add_argument("--tol-rel-fd", type=float, default=classify.Tolerances.tol_rel_fd,
                   help="relative tolerance for quantities built from stencil derivatives")
    p.add_argument("--out", help="output file (default: stdout)")

    p = sub.add_parser("synth", help="integrate a curve from curvature and torsion expressions")
    p.add_argument("--kappa", required=True, help="curvature expression in s")
    p.add_argument("--tau", required=True, help="torsion expression in s")
    p.add_argument("--s-min", type=float, required=True)
    p.add_argument("--s-max", type=float, required=True)
    p.add_argument("--samples", type=int, default=catalog.DEFAULT_SAMPLES)
    _add_output(p)

    p = sub.add_parser("export-svg", help="2-D orthographic projection of a curve JSON")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--plane", choices=tuple(export.PLANES), default="xy")
    p.add_argument("--out", required=True)
    return ap


def _load(args):
    if args.infile:
        return export.import_json(args.infile)
    name, params = catalog.parse_curve_spec(args.curve)
    if args.samples < 5:
        raise ArgumentError("--samples must be at least 5")
    return catalog.sampled_catalog_curve(name, params, args.s_min, args.s_max, args.samples)


def _emit(text: str, out: Optional[str], stdout):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def _cmd_list(args, stdout):
    for name, entry in catalog.CATALOG.items():
        params = ", ".join(f"{k}={'required' if v is None else format(v, 'g')}"
                           for k, v in entry.parameters.items()) or "-"
        lo, hi = entry.window
        stdout.write(f"{name}\t{params}\twindow [{lo:g}, {hi:g}]\t{entry.description}\n")


def _cmd_analyze(args, stdout):
    sc = _load(args)
    extra = None
    if args.format == "json":
        extra = {"profiles": {
            "sigma": classify.sigma_profile(sc.s, sc.kappa, sc.tau),
            "mu": classify.mu_profile(sc.s, sc.kappa, sc.tau),
        }}
    _emit(export.to_text(sc, args.format, extra), args.out, stdout)


def _schedule(result):
    return [[iv.lo, iv.hi, iv.sign] for iv in result.epsilon1]


def _cmd_mate(args, stdout):
    base = _load(args)
    result = mates.osculating_mate(base, theta0=args.theta0, origin=args.origin)
    extra = {"epsilon1": _schedule(result), "origin": list(args.origin)}
    _emit(export.to_text(result, args.format, extra), args.out, stdout)


def _cmd_ot_mate(args, stdout):
    base = _load(args)
    if args.a == 0:
        raise ArgumentError("--a must be non-zero")
    curve, validation = mates.ot_osculating_mate(base, args.a, args.b, theta0=args.theta0)
    extra = {"a": args.a, "b": args.b, "validation": validation.as_dict()}
    _emit(export.to_text(curve, args.format, extra), args.out, stdout)


def _cmd_classify(args, stdout):
    base = _load(args)
    tol = classify.Tolerances(args.tol_rel, args.tol_abs, args.tol_rel_fd)
    if args.of == "mate":
        result = mates.osculating_mate(base, theta0=args.theta0)
        doc = classify.classify_mate(result, tol).as_dict()
        doc["epsilon1"] = _schedule(result)
        doc["relations"] = classify.to_jsonable(classify.mate_relations(result, tol))
        doc["equivalence"] = classify.equivalence_report(base, result, tol).as_dict()
    else:
        doc = classify.classify_report(base, tol).as_dict()
    _emit(json.dumps(classify.to_jsonable(doc), indent=2) + "\n", args.out, stdout)


def _cmd_synth(args, stdout):
    if args.samples < 5:
        raise ArgumentError("--samples must be at least 5")
    if not args.s_max > args.s_min:
        raise ArgumentError("--s-max must exceed --s-min")
    kappa = compile_expr(args.kappa)
    tau = compile_expr(args.tau)
    grid = Grid.uniform(args.s_min, args.s_max, args.samples)
    sc = synthesize_from_curvatures(kappa, tau, grid, name=f"synth kappa={kappa.text} tau={tau.text}")
    _emit(export.to_text(sc, args.format), args.out, stdout)


def _cmd_svg(args, stdout):
    sc = export.import_json(args.infile)
    export.export_svg(sc, args.plane, args.out)


COMMANDS = {
    "list-catalog": _cmd_list,
    "analyze": _cmd_analyze,
    "mate": _cmd_mate,
    "ot-mate": _cmd_ot_mate,
    "classify": _cmd_classify,
    "synth": _cmd_synth,
    "export-svg": _cmd_svg,
}


_VALUE_OPTIONS = {
    "--curve", "--in", "--s-min", "--s-max", "--samples", "--format", "--out", "--theta0",
    "--origin", "--a", "--b", "--of", "--tol-rel", "--tol-abs", "--tol-rel-fd", "--kappa",
    "--tau", "--plane",
}


def _glue_values(argv: List[str]) -> List[str]:
    # "--tau -1/sqrt(1-s^2)": argparse would read the value as a flag
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-") \
                and not argv[i + 1].startswith("--"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def run_command(argv: Optional[List[str]] = None, stdout=None, stderr=None) -> int:
    """Run one command; returns the exit status instead of exiting."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(_glue_values(argv))
        with np.errstate(all="ignore"):
            COMMANDS[args.command](args, stdout)
        return 0
    except (OscMateError, ArgumentError) as exc:
        stderr.write(f"error[{exc.code}]: {exc}\n")
        return exc.exit_status
    except OSError as exc:
        stderr.write(f"error[IOError]: {exc}\n")
        return 4
    except ValueError as exc:
        stderr.write(f"error[InvalidInput]: {exc}\n")
        return 3


def main(argv: Optional[List[str]] = None) -> None:
    sys.exit(run_command(argv))


if __name__ == "__main__":
    main()
