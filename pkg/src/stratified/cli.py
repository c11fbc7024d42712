"""Command-line front end.

Exit codes: 0 when the mathematical claim of the subcommand holds, 1 when it
fails (relation violation, no gauge within the bound, no decomposition), and
2 for usage or input-format errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from typing import Sequence

from . import serial
from .errors import (
    FormatError,
    NotDecomposable,
    NotFoundWithinBound,
    ProbeCheckFailed,
    StratError,
)
from .exponents import exponent_digits
from .gf import FieldSpec, make_field
from .horizon import FamilySpec, family_fibers, make_family, profile_csv, trivialize
from .stratmod import direct_sum, dual, invert_coordinate, restrict_fiber, tensor, verify_relations

DEFAULT_VERIFY_CUTOFF = 32
DEFAULT_INVERT_CUTOFF = 8

MATH_FAILURES = (NotFoundWithinBound, NotDecomposable, ProbeCheckFailed)


@dataclass
class CommandOutcome:
    code: int
    report: str = ""
    document: str | None = None
    files: dict = field(default_factory=dict)


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _gauge_rows(U) -> str:
    return "\n".join("  [" + ", ".join(repr(f) for f in row) + "]" for row in U.matrix)


def cmd_verify(path: str, cutoff: int | None) -> CommandOutcome:
    M = serial.load_module(_read(path))
    if cutoff is None:
        cutoff = DEFAULT_VERIFY_CUTOFF
        if M.valid_up_to is not None:
            cutoff = min(cutoff, M.valid_up_to)
    report = verify_relations(M, cutoff)
    if report.passed:
        return CommandOutcome(0, f"PASS relations up to cutoff {cutoff}")
    lines = [f"FAIL relations up to cutoff {cutoff}: {len(report.violations)} violation(s)"]
    lines += ["  " + v.describe() for v in report.violations]
    return CommandOutcome(1, "\n".join(lines))


def _parse_field(p: int, modulus: str | None) -> FieldSpec:
    if modulus is None:
        return make_field(p, 1, [0, 1])
    try:
        digits = [int(d) for d in modulus.split(",")]
    except ValueError:
        raise UsageError(f"bad modulus {modulus!r}; expected comma-separated digits") from None
    return make_field(p, len(digits) - 1, digits)


def parse_points(F: FieldSpec, text: str) -> list:
    return [F.parse(s) for s in text.split(",")]


def cmd_family(p: int, modulus: str | None, points: str) -> CommandOutcome:
    F = _parse_field(p, modulus)
    spec = FamilySpec(F, tuple(parse_points(F, points)))
    results = family_fibers(spec)
    profile = [(r.n, r.certificate.minimal_degree) for r in results]
    csv = profile_csv(profile)
    files = {
        "family.json": serial.dumps(spec.to_json()),
        "module.json": serial.dump_module(make_family(spec)),
        "profile.csv": csv,
    }
    for r in results:
        files[f"fiber_{r.n}.json"] = serial.dump_module(r.fiber)
        files[f"certificate_{r.n}.json"] = serial.dumps(serial.certificate_to_json(r.certificate))
    return CommandOutcome(0, "n,minimal_degree\n" + csv.rstrip("\n"), files=files)


def _parse_assignment(M, text: str) -> dict:
    point = {}
    for part in text.split(","):
        var, sep, value = part.partition("=")
        if not sep:
            raise UsageError(f"bad assignment {part!r}; expected var=element")
        point[var.strip()] = M.spec.parse(value)
    return point


def cmd_fiber(path: str, at: str, deg_bound: int) -> CommandOutcome:
    M = serial.load_module(_read(path))
    fiber = restrict_fiber(M, _parse_assignment(M, at))
    cert = trivialize(fiber, deg_bound)
    report = "\n".join([
        "trivial",
        f"minimal_degree {cert.minimal_degree}",
        f"checked_order_bound {cert.checked_order_bound}",
        "gauge",
        _gauge_rows(cert.gauge),
    ])
    return CommandOutcome(0, report, serial.dumps(serial.certificate_to_json(cert)))


def cmd_algebra(op: str, paths: Sequence[str]) -> CommandOutcome:
    mods = [serial.load_module(_read(p)) for p in paths]
    if op == "dual":
        if len(mods) != 1:
            raise UsageError("dual takes one module")
        out = dual(mods[0])
    else:
        if len(mods) != 2:
            raise UsageError(f"{op} takes two modules")
        out = (tensor if op == "tensor" else direct_sum)(*mods)
    doc = serial.dump_module(out)
    return CommandOutcome(0, doc.rstrip("\n"), doc)


def cmd_exponents(path: str, window: int | None) -> CommandOutcome:
    L = serial.log_module_from_json(serial.loads(_read(path)))
    record = exponent_digits(L, window)
    lines = []
    for e in record.entries:
        line = f"alpha digits {e.digits}"
        if e.multiplicity > 1:
            line += f" (multiplicity {e.multiplicity})"
        lines.append(f"{line}; torsion: {e.classification}")
    return CommandOutcome(0, "\n".join(lines))


def cmd_invert(path: str, cutoff: int | None) -> CommandOutcome:
    M = serial.load_module(_read(path))
    out = invert_coordinate(M, DEFAULT_INVERT_CUTOFF if cutoff is None else cutoff)
    doc = serial.dump_module(out)
    return CommandOutcome(0, doc.rstrip("\n"), doc)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=argparse.SUPPRESS,
                        help="output file (a directory for 'family')")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="accepted for uniformity; every subcommand is deterministic")
    common.add_argument("--cutoff", type=int, default=argparse.SUPPRESS,
                        help="order cutoff for verify and invert")

    parser = argparse.ArgumentParser(prog="stratified", parents=[common],
                                     description="Exact computations with stratified modules over finite fields.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="check the divided-power relations")
    p.add_argument("module")

    p = sub.add_parser("family", parents=[common], help="build the family and trivialize its fibers")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--field-modulus", help="comma-separated modulus digits, constant term first")
    p.add_argument("--points", required=True, help="comma-separated elements such as 0,1,T")

    p = sub.add_parser("fiber", parents=[common], help="restrict to a fiber and certify triviality")
    p.add_argument("module")
    p.add_argument("--at", required=True, help="base point, e.g. y=1 or y=1+T")
    p.add_argument("--deg-bound", type=int, required=True)

    p = sub.add_parser("algebra", parents=[common], help="dual, tensor product or direct sum")
    p.add_argument("op", choices=["dual", "tensor", "dsum"])
    p.add_argument("modules", nargs="+")

    p = sub.add_parser("exponents", parents=[common], help="exponent digits of a log module")
    p.add_argument("logmodule")
    p.add_argument("--window", type=int)

    p = sub.add_parser("invert", parents=[common], help="rewrite a module in t = 1/x")
    p.add_argument("module")
    return parser


def run(args: argparse.Namespace) -> CommandOutcome:
    cutoff = getattr(args, "cutoff", None)
    if args.command == "verify":
        return cmd_verify(args.module, cutoff)
    if args.command == "family":
        return cmd_family(args.p, args.field_modulus, args.points)
    if args.command == "fiber":
        return cmd_fiber(args.module, args.at, args.deg_bound)
    if args.command == "algebra":
        return cmd_algebra(args.op, args.modules)
    if args.command == "exponents":
        return cmd_exponents(args.logmodule, args.window)
    return cmd_invert(args.module, cutoff)


def _write(out: str, outcome: CommandOutcome, is_dir: bool) -> None:
    if is_dir:
        os.makedirs(out, exist_ok=True)
        for name, text in outcome.files.items():
            with open(os.path.join(out, name), "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
    elif outcome.document is not None:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(outcome.document)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with status 2
        return int(exc.code or 0)
    try:
        outcome = run(args)
    except MATH_FAILURES as exc:
        outcome = CommandOutcome(1, f"FAIL {type(exc).__name__}: {exc}")
    except (UsageError, FormatError, StratError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if outcome.report:
        print(outcome.report)
    out = getattr(args, "out", None)
    if out is not None and outcome.code == 0:
        try:
            _write(out, outcome, args.command == "family")
        except OSError as exc:
            print(f"error: cannot write {out}: {exc.strerror}", file=sys.stderr)
            return 2
    return outcome.code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
