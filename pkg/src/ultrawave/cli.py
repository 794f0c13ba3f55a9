"""Command line front end.

Exit codes: 0 success, 1 tolerance check failed, 2 bad configuration or
malformed input, 3 cell guard exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from .groups import (
    GroupDescriptor,
    element_from_json,
    element_to_json,
)
from .stepfn import (
    CellGuardError,
    DEFAULT_CELL_GUARD,
    SIDE_TIME,
    ball,
    ball_measure,
    evaluate,
    indicator,
    stepfn_from_json,
    stepfn_to_csv,
    stepfn_to_json,
)
from .groups import ZERO
from .fourier import inverse_transform, transform
from .operators import translate
from .verify import (
    compare_example,
    gram_matrix,
    parseval_capture,
    scaled_generator_system,
)
from .wavelets import (
    EXAMPLE_IDS,
    WaveletSetSpec,
    default_partition,
    example_group,
    example_partition,
    haar_shannon_system,
    system_to_json,
    wavelet_set_system,
)

EXIT_OK = 0
EXIT_TOL = 1
EXIT_CONFIG = 2
EXIT_GUARD = 3


def _parse_eps(text: str) -> Fraction:
    text = text.strip()
    if "^" in text:
        base, expo = text.split("^", 1)
        return Fraction(int(base)) ** int(expo)
    if "/" in text:
        return Fraction(text)
    return Fraction(text)


def _group_from_args(args) -> GroupDescriptor:
    if getattr(args, "example", None):
        return example_group(args.example, p=args.p, r=args.r0)
    kind = args.kind or "qp"
    return GroupDescriptor(kind, args.p or (3 if kind == "qpquad" else 2),
                           r0=args.r0 or 1, u=args.u)


def _system_from_args(args, g: GroupDescriptor):
    if args.system == "haar":
        return haar_shannon_system(g, cell_guard=args.guard)
    eps = _parse_eps(args.eps)
    if getattr(args, "example", None):
        part = example_partition(args.example, g)
    else:
        part = default_partition(g)
    spec = WaveletSetSpec(part, args.niter, eps)
    return wavelet_set_system(g, spec, cell_guard=args.guard)


def _emit(obj, out_format: str, csv_rows=None, csv_header=None) -> None:
    if out_format == "json":
        print(json.dumps(obj, sort_keys=True, indent=2))
    else:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(csv_header)
        for row in csv_rows:
            writer.writerow(row)
        sys.stdout.write(buf.getvalue())


def _add_group_flags(sub, with_example=True):
    sub.add_argument("--kind", choices=["qp", "fpt", "qpquad"], default=None,
                     help="group family (default qp)")
    sub.add_argument("--p", type=int, default=None, help="residue prime")
    sub.add_argument("--u", type=int, default=None,
                     help="nonresidue for the quadratic extension")
    sub.add_argument("--r0", type=int, default=None, help="dilation step")
    if with_example:
        sub.add_argument("--example", choices=list(EXAMPLE_IDS), default=None,
                         help="use a named worked configuration")


def _add_system_flags(sub):
    sub.add_argument("--system", choices=["haar", "waveletset"], default="haar")
    sub.add_argument("--eps", default="2^-40",
                     help="truncation tolerance, e.g. 2^-40 or 1/1024")
    sub.add_argument("--niter", type=int, default=6,
                     help="iteration cap for the set construction")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ultrawave",
        description="Wavelet analysis on groups with a compact open subgroup.")
    ap.add_argument("--guard", type=int, default=DEFAULT_CELL_GUARD,
                    help="cell guard for step-function operations")
    sp = ap.add_subparsers(dest="command", required=True)

    b = sp.add_parser("build", help="construct a wavelet system")
    _add_group_flags(b)
    _add_system_flags(b)
    b.add_argument("--out", choices=["json", "csv"], default="json")

    gr = sp.add_parser("gram", help="Gram matrix of a basis slice")
    _add_group_flags(gr)
    _add_system_flags(gr)
    gr.add_argument("--nmin", type=int, default=-2)
    gr.add_argument("--nmax", type=int, default=2)
    gr.add_argument("--depth", type=int, default=2)
    gr.add_argument("--tol", type=float, default=1e-8)
    gr.add_argument("--wrong-order", action="store_true",
                    help="negative control: translate after dilating")
    gr.add_argument("--corrupt", type=float, default=None,
                    help="negative control: scale the first generator")
    gr.add_argument("--out", choices=["json", "csv"], default="json")

    pv = sp.add_parser("parseval", help="energy captured by an index slice")
    _add_group_flags(pv)
    _add_system_flags(pv)
    pv.add_argument("--fn", default=None,
                    help="step function JSON file (default: unit-ball indicator)")
    pv.add_argument("--nmin", type=int, default=-8)
    pv.add_argument("--nmax", type=int, default=4)
    pv.add_argument("--depth", type=int, default=2)
    pv.add_argument("--threshold", type=float, default=None,
                    help="fail unless the captured fraction reaches this")
    pv.add_argument("--out", choices=["json", "csv"], default="json")

    cp = sp.add_parser("compare", help="constructed wavelet vs closed form")
    cp.add_argument("--example", choices=list(EXAMPLE_IDS), required=True)
    cp.add_argument("--p", type=int, default=None)
    cp.add_argument("--r0", type=int, default=None)
    cp.add_argument("--eps", default="2^-40")
    cp.add_argument("--samples", type=int, default=64)
    cp.add_argument("--seed", type=int, default=0)
    cp.add_argument("--tol", type=float, default=1e-6)
    cp.add_argument("--out", choices=["json", "csv"], default="json")

    ev = sp.add_parser("eval", help="evaluate a step function at a point")
    ev.add_argument("--fn", required=True, help="step function JSON file")
    ev.add_argument("--x", required=True, help="element JSON")
    ev.add_argument("--s", default=None,
                    help="optional element JSON: translate before evaluating")

    tr = sp.add_parser("transform", help="Fourier transform of a step function")
    tr.add_argument("--fn", required=True, help="step function JSON file")
    tr.add_argument("--inverse", action="store_true")
    tr.add_argument("--method", choices=["dft", "cellwise"], default="dft")
    tr.add_argument("--out", choices=["json", "csv"], default="json")

    return ap


def _cmd_build(args) -> int:
    g = _group_from_args(args)
    system = _system_from_args(args, g)
    if args.out == "json":
        _emit(system_to_json(system), "json")
    else:
        rows = [[json.dumps(element_to_json(b.center), sort_keys=True),
                 b.scale, str(ball_measure(b))]
                for b in system.omega.balls]
        _emit(None, "csv", rows, ["center", "scale", "measure"])
    return EXIT_OK


def _cmd_gram(args) -> int:
    g = _group_from_args(args)
    system = _system_from_args(args, g)
    if args.corrupt is not None:
        system = scaled_generator_system(system, args.corrupt)
    report = gram_matrix(system, args.nmin, args.nmax, args.depth,
                         wrong_order=args.wrong_order,
                         keep_entries=(args.out == "csv"), tol=args.tol)
    if args.out == "json":
        _emit(report.to_json(), "json")
    else:
        rows = [[*a, *b, f"{v.real!r}", f"{v.imag!r}"] for a, b, v in report.entries]
        _emit(None, "csv", rows,
              ["a_n", "a_coset", "a_gen", "b_n", "b_coset", "b_gen", "re", "im"])
    return EXIT_OK if report.passed else EXIT_TOL


def _cmd_parseval(args) -> int:
    g = _group_from_args(args)
    system = _system_from_args(args, g)
    if args.fn:
        with open(args.fn) as fh:
            f = stepfn_from_json(json.load(fh))
    else:
        f = indicator(ball(g, SIDE_TIME, ZERO, 0))
    report = parseval_capture(system, f, args.nmin, args.nmax, args.depth,
                              keep_coeffs=(args.out == "csv"),
                              cell_guard=args.guard)
    if args.out == "json":
        _emit(report.to_json(), "json")
    else:
        rows = [[*ix, f"{c.real!r}", f"{c.imag!r}"] for ix, c in report.coeffs]
        _emit(None, "csv", rows, ["n", "coset", "gen", "re", "im"])
    if args.threshold is not None and report.fraction < args.threshold:
        return EXIT_TOL
    return EXIT_OK


def _cmd_compare(args) -> int:
    report = compare_example(args.example, p=args.p, r=args.r0,
                             n_samples=args.samples, seed=args.seed,
                             epsilon=_parse_eps(args.eps),
                             keep_rows=(args.out == "csv"))
    if args.out == "json":
        _emit(report.to_json(), "json")
    else:
        rows = [[json.dumps(element_to_json(s), sort_keys=True),
                 json.dumps(element_to_json(x), sort_keys=True), repr(d)]
                for s, x, d in report.rows]
        _emit(None, "csv", rows, ["s", "x", "abs_diff"])
    return EXIT_OK if report.max_abs_diff < args.tol else EXIT_TOL


def _cmd_eval(args) -> int:
    with open(args.fn) as fh:
        f = stepfn_from_json(json.load(fh))
    x = element_from_json(f.group, json.loads(args.x))
    if args.s is not None:
        s = element_from_json(f.group, json.loads(args.s))
        f = translate(f, s, cell_guard=args.guard)
    v = evaluate(f, x)
    print(json.dumps({"re": v.real, "im": v.imag}, sort_keys=True))
    return EXIT_OK


def _cmd_transform(args) -> int:
    with open(args.fn) as fh:
        f = stepfn_from_json(json.load(fh))
    op = inverse_transform if args.inverse else transform
    out = op(f, method=args.method, cell_guard=args.guard)
    if args.out == "json":
        _emit(stepfn_to_json(out), "json")
    else:
        sys.stdout.write(stepfn_to_csv(out))
    return EXIT_OK


_COMMANDS = {
    "build": _cmd_build,
    "gram": _cmd_gram,
    "parseval": _cmd_parseval,
    "compare": _cmd_compare,
    "eval": _cmd_eval,
    "transform": _cmd_transform,
}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except CellGuardError as exc:
        print(f"cell guard exceeded: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
