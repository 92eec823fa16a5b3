"""Command-line front end.

Subcommands::

    evidence  one E value for (n, x) or (n, ratio)
    sweep     E over an (n, ratio) grid
    iso       iso-E contour n(ratio)
    trp       transition points for one or more n
    verify    the verification suite

Tables go to stdout as CSV (one header line) or JSON (array of objects with
the same field names).  Exit codes: 0 success, 1 usage error, 2 when E could
not be computed for some row, 3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .analysis import ContourSpec, find_trp, iso_contour
from .core import HCClass, HypothesisContrast, Observation
from .eos import EvidenceModel, EvidenceResult, evidence_E
from .errors import EvidenceError
from .quadrature import DEFAULT_QUADRATURE, QuadratureConfig
from .state import CALIBRATED_B_NUMERATOR, LITERAL_B_NUMERATOR
from .verification import run_all, run_bbp_suite

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_COMPUTE = 2
EXIT_VERIFY = 3

COLUMNS = (
    "class", "theta2_left", "theta2_right", "n", "x", "ratio",
    "S", "V", "b", "c1", "E", "log2E", "favored", "trp", "error",
)
REPORT_COLUMNS = ("name", "passed", "deviation", "grid", "details")
SIG_DIGITS = 12


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class OutputRow:
    hc: HypothesisContrast
    n: float
    x: float | None = None
    result: EvidenceResult | None = None
    trp: tuple[float, ...] = ()
    error: str = ""
    ratio: float | None = None

    def values(self) -> dict:
        r = self.result
        ratio = self.x / self.n if self.x is not None else self.ratio
        row = {
            "class": self.hc.tag(),
            "theta2_left": self.hc.theta2_left,
            "theta2_right": self.hc.theta2_right,
            "n": self.n,
            "x": self.x,
            "ratio": ratio,
            "S": r.S if r else None,
            "V": r.V if r else None,
            "b": r.b if r else None,
            "c1": r.c1 if r else None,
            "E": r.E if r else None,
            "log2E": r.log_E / math.log(2.0) if r else None,
            "favored": r.favored.value if r and r.favored else "",
            "trp": self.trp or (r.trp if r else ()),
            "error": self.error or (r.note if r else ""),
        }
        return {k: _fmt(v) for k, v in row.items()}


def _fmt(value):
    """12 significant digits; non-finite numbers become strings."""
    if isinstance(value, (tuple, list)):
        return [_fmt(v) for v in value]
    if isinstance(value, (float, int, np.floating)) and not isinstance(value, bool):
        v = float(value) + 0.0  # drop negative zero
        return float(f"{v:.{SIG_DIGITS}g}") if math.isfinite(v) else str(v)
    return value


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, list):
        return ";".join(_csv_cell(v) for v in value)
    if isinstance(value, float):
        return f"{value:.{SIG_DIGITS}g}"
    return str(value)


def render(rows: Sequence[dict], fmt: str, columns: Sequence[str]) -> str:
    if fmt == "json":
        return json.dumps(list(rows), indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(row[c]) for c in columns])
    return buf.getvalue()


def parse_range(text: str) -> list[float]:
    """``lo:hi:steps`` -> ``steps`` evenly spaced points from lo to hi."""
    try:
        lo, hi, steps = text.split(":")
        lo, hi, count = float(lo), float(hi), int(steps)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:steps, got {text!r}") from None
    if count < 1 or (count == 1 and lo != hi):
        raise argparse.ArgumentTypeError(f"steps must be >= 2 unless lo == hi, got {text!r}")
    return [float(v) for v in np.linspace(lo, hi, count)]


def _contrast(args) -> HypothesisContrast:
    try:
        cls = HCClass.parse(args.hc_class)
    except (ValueError, EvidenceError) as exc:
        raise UsageError(str(exc)) from None
    if cls is HCClass.II_B:
        if args.theta2 is None:
            raise UsageError("class 2b needs --theta2 LEFT RIGHT")
        try:
            return HypothesisContrast.two_b(*args.theta2)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if args.theta2 is not None:
        raise UsageError(f"--theta2 only applies to class 2b, not {cls.value}")
    return HypothesisContrast(cls)


def _settings(args) -> tuple[QuadratureConfig, EvidenceModel]:
    cfg = QuadratureConfig(rel_tol=args.tol) if args.tol is not None else DEFAULT_QUADRATURE
    numerator = LITERAL_B_NUMERATOR if args.literal_b else CALIBRATED_B_NUMERATOR
    return cfg, EvidenceModel(b_numerator=numerator)


def _evaluate_row(hc, obs, cfg, model) -> OutputRow:
    try:
        return OutputRow(hc, obs.n, obs.x, evidence_E(hc, obs, cfg, model))
    except EvidenceError as exc:
        return OutputRow(hc, obs.n, obs.x, error=f"{type(exc).__name__}: {exc}")


def _observation(n: float, x: float | None, ratio: float | None) -> Observation:
    try:
        return Observation(n, x) if x is not None else Observation.from_ratio(n, ratio)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_evidence(args) -> list[OutputRow]:
    hc = _contrast(args)
    cfg, model = _settings(args)
    return [_evaluate_row(hc, _observation(args.n, args.x, args.ratio), cfg, model)]


def cmd_sweep(args) -> list[OutputRow]:
    hc = _contrast(args)
    cfg, model = _settings(args)
    ns = args.nrange if args.nrange is not None else [args.n]
    ratios = args.ratiorange if args.ratiorange is not None else [args.ratio]
    return [_evaluate_row(hc, _observation(n, None, r), cfg, model) for n in ns for r in ratios]


def cmd_iso(args) -> list[OutputRow]:
    hc = _contrast(args)
    cfg, model = _settings(args)
    try:
        spec = ContourSpec(args.iso, tuple(args.ratiorange))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = []
    for p in iso_contour(hc, spec, cfg, model, refine_apex=not args.no_apex):
        if p.n is None:
            rows.append(OutputRow(hc, math.nan, error=f"NotBracketable: {p.error}", ratio=p.ratio))
            continue
        rows.append(_evaluate_row(hc, Observation.from_ratio(p.n, p.ratio), cfg, model))
    return rows


def cmd_trp(args) -> list[OutputRow]:
    hc = _contrast(args)
    cfg, model = _settings(args)
    ns = args.nrange if args.nrange is not None else [args.n]
    rows = []
    for n in ns:
        try:
            trp = find_trp(hc, n, cfg, model)
        except (EvidenceError, ValueError) as exc:
            rows.append(OutputRow(hc, n, error=f"{type(exc).__name__}: {exc}"))
            continue
        for t in trp.ratios:
            row = _evaluate_row(hc, Observation.from_ratio(n, t), cfg, model)
            row.trp = trp.ratios
            rows.append(row)
    return rows


def cmd_verify(args) -> list[dict]:
    cfg, model = _settings(args)
    reports = run_all(cfg, model) if args.all else run_bbp_suite(cfg=cfg, model=model)
    return [
        {
            "name": r.name,
            "passed": r.passed,
            "deviation": _fmt(r.deviation),
            "grid": r.grid,
            "details": " | ".join(r.details),
        }
        for r in reports
    ]


def _add_common(p, needs_class=True):
    if needs_class:
        p.add_argument("--class", dest="hc_class", required=True, help="1a, 1b, 2a or 2b")
        p.add_argument("--theta2", nargs=2, type=float, metavar=("LEFT", "RIGHT"),
                       help="Theta2 interval for class 2b (symmetric about 1/2)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--tol", type=float, default=None, help="quadrature relative tolerance")
    p.add_argument("--literal-b", action="store_true",
                   help="use sqrt(2 pi) rather than ln 4 in the b correction")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="binomial-evidence", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("evidence", help="E for a single observation")
    _add_common(p)
    p.add_argument("--n", type=float, required=True)
    obs = p.add_mutually_exclusive_group(required=True)
    obs.add_argument("--x", type=float)
    obs.add_argument("--ratio", type=float)

    p = sub.add_parser("sweep", help="E over an (n, ratio) grid")
    _add_common(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--n", type=float)
    g.add_argument("--nrange", type=parse_range, metavar="LO:HI:STEPS")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--ratio", type=float)
    g.add_argument("--ratiorange", type=parse_range, metavar="LO:HI:STEPS")

    p = sub.add_parser("iso", help="iso-E contour n(ratio)")
    _add_common(p)
    p.add_argument("--iso", type=float, required=True, metavar="E")
    p.add_argument("--ratiorange", type=parse_range, required=True, metavar="LO:HI:STEPS")
    p.add_argument("--no-apex", action="store_true", help="skip the refined contour apex row")

    p = sub.add_parser("trp", help="transition points")
    _add_common(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--n", type=float)
    g.add_argument("--nrange", type=parse_range, metavar="LO:HI:STEPS")

    p = sub.add_parser("verify", help="run the verification suite")
    _add_common(p, needs_class=False)
    p.add_argument("--all", action="store_true",
                   help="also run identities, oracles and negative controls")
    return parser


COMMANDS = {
    "evidence": cmd_evidence,
    "sweep": cmd_sweep,
    "iso": cmd_iso,
    "trp": cmd_trp,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.tol is not None and not args.tol > 0:
        parser.error("--tol must be positive")
    try:
        if args.command == "verify":
            reports = cmd_verify(args)
            sys.stdout.write(render(reports, args.format, REPORT_COLUMNS))
            return EXIT_OK if all(r["passed"] for r in reports) else EXIT_VERIFY
        rows = COMMANDS[args.command](args)
    except UsageError as exc:
        parser.error(str(exc))
    sys.stdout.write(render([r.values() for r in rows], args.format, COLUMNS))
    return EXIT_COMPUTE if any(r.result is None for r in rows) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
