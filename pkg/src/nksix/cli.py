"""Command-line interface.

Subcommands: ``verify`` (run a suite), ``curvature-report`` and
``fuzz-group`` (shorthands for the suites of the same name), and
``decompose`` (read a serialized element or generator composition and
print its canonical group coordinates).

Exit codes: 0 all checks pass, 1 a check or decomposition failed,
2 usage or parse errors.  Randomness comes exclusively from the seed flag
(counter-based Philox streams); the environment cannot override it, so
equal invocations produce identical report bodies.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import flag, s3s3, serialization
from .errors import DecompositionError, NKSixError, NotAnIsometryError, SerializationError
from .report import format_real
from .suites import SPACES, SUITES, RunConfig, run

__all__ = ["main"]


def _tol_pair(text: str):
    name, sep, value = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError("tolerance overrides look like NAME=VALUE")
    try:
        return name, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad tolerance value in {text!r}") from None


def _add_run_flags(p: argparse.ArgumentParser, with_suite: bool):
    p.add_argument("--space", required=True, choices=SPACES)
    if with_suite:
        p.add_argument("--suite", default="all", choices=SUITES)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--tol", action="append", type=_tol_pair, default=[],
                   metavar="KEY=VAL", help="override a named tolerance")
    p.add_argument("--step", type=float, default=1e-3,
                   help="finite-difference step for the numeric oracle")
    p.add_argument("--out", metavar="PATH", help="also write the report to a file")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nksix",
        description="verification suites and isometry decomposition for the "
                    "homogeneous nearly Kahler six-manifolds",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    _add_run_flags(sub.add_parser("verify", help="run a verification suite"), True)
    _add_run_flags(sub.add_parser("curvature-report",
                                  help="curvature checks against the numeric oracle"), False)
    _add_run_flags(sub.add_parser("fuzz-group", help="group-law fuzzing"), False)

    dec = sub.add_parser("decompose",
                         help="recover group coordinates of a serialized isometry")
    dec.add_argument("path", help="element record or generator-composition file")
    dec.add_argument("--space", required=True, choices=("s3s3", "flag"))
    dec.add_argument("--samples", type=int, default=16,
                     help="sample count for the residual pointwise defect")
    dec.add_argument("--seed", type=int, default=42)
    dec.add_argument("--tol", action="append", type=_tol_pair, default=[],
                     metavar="KEY=VAL")
    dec.add_argument("--out", metavar="PATH")
    return parser


def _emit(text: str, out_path):
    sys.stdout.write(text)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _run_suite(args, suite: str) -> int:
    config = RunConfig(
        space=args.space,
        suite=suite,
        samples=args.samples,
        seed=args.seed,
        tolerances=dict(args.tol),
        step=args.step,
    )
    try:
        report = run(config)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(report.render(), args.out)
    return 0 if report.overall else 1


def _decompose(args) -> int:
    try:
        with open(args.path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        element = serialization.load_element_text(args.space, text)
    except SerializationError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2

    tol = dict(args.tol).get("decompose", 1e-8)
    rng = np.random.default_rng(np.random.Philox(args.seed))
    space = s3s3 if args.space == "s3s3" else flag
    oracle = space.element_oracle(element)
    try:
        recovered = space.decompose_isometry(oracle, tol)
    except (DecompositionError, NotAnIsometryError) as exc:
        print(f"decomposition failed: {exc}", file=sys.stderr)
        return 1
    defect = space.pointwise_defect(recovered, oracle, args.samples, rng)

    lines = [f"space   : {args.space}", f"input   : {args.path}"]
    if args.space == "s3s3":
        for label, q in (("a", recovered.a), ("b", recovered.b), ("c", recovered.c)):
            lines.append(
                f"{label}       : "
                + " ".join(format_real(v) for v in (q.w, q.x, q.y, q.z))
            )
        lines.append(f"kappa   : {recovered.kappa}")
        lines.append(f"tau     : {recovered.tau_idx} (angle {format_real(recovered.tau)})")
    else:
        for i in range(3):
            lines.append(
                "A row %d : " % (i + 1)
                + " ".join(
                    f"{format_real(z.real)}{z.imag:+.17g}j" for z in recovered.A[i]
                )
            )
        lines.append(f"perm    : {tuple(i + 1 for i in recovered.sigma)}")
        lines.append(f"conj    : {recovered.k}")
    lines.append("record  : " + serialization.serialize_element(args.space, recovered))
    lines.append(f"defect  : {format_real(defect)} (over {args.samples} sample points)")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return _run_suite(args, args.suite)
        if args.command == "curvature-report":
            return _run_suite(args, "curvature")
        if args.command == "fuzz-group":
            return _run_suite(args, "fuzz-group")
        return _decompose(args)
    except NKSixError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
