"""Command line interface.

Every command prints one report, as JSON (default) or text, and exits with
0 on success, 1 when the search has found a violation and 2 on bad input.
"""
from __future__ import annotations

import argparse
import io as _stdio
import json
import sys
import time
from fractions import Fraction
from typing import Sequence

from . import __version__
from .formula import Formula, FormulaSyntaxError, atoms, is_positive, parse, to_text
from .io import InputError, dump_model, format_rational, load_model, load_search, parse_rational
from .measure import NonPositiveFormulaError, chain_of, prog_exact_unchecked, prog_lower_bound
from .pts import PtsError, build_minimal_extension, check_search, complete_final_states, validate
from .qualitative import violation_witness
from .sim import Strategy, interval_estimate, progress_curve, write_curve_csv

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT = 2


class UsageError(Exception):
    pass


def rational(x: Fraction) -> dict:
    """A rational as exact text plus a display-only decimal rounded to 6 places."""
    x = Fraction(x)
    scaled = round(x * 10**6)
    sign = "-" if scaled < 0 else ""
    scaled = abs(scaled)
    return {"value": format_rational(x), "decimal": f"{sign}{scaled // 10**6}.{scaled % 10**6:06d}"}


class Report:
    def __init__(self, command: str):
        self.command = command
        self.inputs: dict = {}
        self.results: dict = {}
        self.warnings: list[str] = []
        self.errors: list[str] = []
        self.timing: dict | None = None

    def as_dict(self) -> dict:
        d = {"command": self.command, "inputs": self.inputs, "results": self.results,
             "warnings": self.warnings, "errors": self.errors}
        if self.timing is not None:
            d["timing"] = self.timing
        return d

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        lines = [f"command: {self.command}"]
        for k, v in self.inputs.items():
            lines.append(f"  {k}: {v}")
        for k, v in self.results.items():
            lines.extend(_text_item(k, v, 0))
        for w in self.warnings:
            lines.append(f"warning: {w}")
        for e in self.errors:
            lines.append(f"error: {e}")
        if self.timing is not None:
            for k, v in self.timing.items():
                lines.append(f"time {k}: {v:.3f}s")
        return "\n".join(lines) + "\n"


def _text_item(key, value, depth) -> list[str]:
    pad = "  " * depth
    if isinstance(value, dict) and set(value) == {"value", "decimal"}:
        return [f"{pad}{key}: {value['value']} (~{value['decimal']})"]
    if isinstance(value, dict):
        out = [f"{pad}{key}:"]
        for k, v in value.items():
            out.extend(_text_item(k, v, depth + 1))
        return out
    if isinstance(value, list) and value and isinstance(value[0], dict):
        out = [f"{pad}{key}:"]
        for i, v in enumerate(value):
            out.extend(_text_item(f"[{i}]", v, depth + 1))
        return out
    if isinstance(value, list):
        return [f"{pad}{key}: {' '.join(map(str, value)) or '(none)'}"]
    return [f"{pad}{key}: {value}"]


# ---------------------------------------------------------------- helpers

def _model(path: str, report: Report):
    model = load_model(path)
    report.inputs["model"] = path
    problems = validate(model)
    if problems:
        report.errors.extend(problems)
        raise UsageError(f"{path}: model is not a valid PTS")
    return model


def _search(path: str, model, report: Report) -> frozenset[str]:
    report.inputs["search"] = path
    try:
        return check_search(model, load_search(path))
    except PtsError as exc:
        raise InputError(f"{path}: {exc}") from None


def _formula(text: str, model, report: Report) -> Formula:
    report.inputs["formula"] = text
    phi = parse(text)
    if not is_positive(phi):
        raise NonPositiveFormulaError(f"formula must be negation-free: {text!r}")
    unknown = sorted(atoms(phi) - model.ap)
    if unknown:
        report.warnings.append(
            f"atoms not in the model's propositions are false everywhere: {', '.join(unknown)}")
    report.inputs["parsed"] = to_text(phi)
    return phi


def _budgets(text: str) -> list[int]:
    try:
        out = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--budgets: expected comma-separated integers, got {text!r}") from None
    if not out or any(b < 0 for b in out):
        raise UsageError("--budgets: need at least one non-negative budget")
    if out != sorted(out):
        raise UsageError("--budgets: budgets must be ascending")
    return out


def _witness(lasso) -> dict:
    return {"prefix": list(lasso.prefix), "cycle": list(lasso.cycle)}


# ---------------------------------------------------------------- commands

def cmd_validate(args, report: Report) -> int:
    model = load_model(args.model)
    report.inputs["model"] = args.model
    if args.complete_final_states:
        model, repaired = complete_final_states(model)
        report.results["repaired_states"] = repaired
    problems = validate(model)
    report.results["valid"] = not problems
    report.results["states"] = len(model.states)
    report.results["transitions"] = len(model.transitions)
    report.errors.extend(problems)
    if problems:
        return EXIT_INPUT
    if args.write:
        dump_model(model, args.write)
        report.inputs["write"] = args.write
    return EXIT_OK


def cmd_progress(args, report: Report) -> int:
    model = _model(args.model, report)
    search = _search(args.search, model, report)
    phi = _formula(args.formula, model, report)
    report.inputs["method"] = args.method
    report.results["search_size"] = len(search)
    witness = violation_witness(model, search, phi)
    if witness is not None:
        report.results["violation"] = True
        report.results["witness"] = _witness(witness)
        return EXIT_VIOLATION
    report.results["violation"] = False
    if args.method in ("exact", "both"):
        report.results["exact"] = rational(prog_exact_unchecked(model, search, phi))
    if args.method in ("bound", "both"):
        report.results["bound"] = rational(prog_lower_bound(model, search))
    return EXIT_OK


def cmd_violation(args, report: Report) -> int:
    model = _model(args.model, report)
    search = _search(args.search, model, report)
    phi = _formula(args.formula, model, report)
    witness = violation_witness(model, search, phi)
    report.results["violation"] = witness is not None
    if witness is not None:
        report.results["witness"] = _witness(witness)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_explore(args, report: Report) -> int:
    model = _model(args.model, report)
    phi = _formula(args.formula, model, report)
    budgets = _budgets(args.budgets)
    report.inputs["strategy"] = args.strategy
    report.inputs["budgets"] = budgets
    rows = progress_curve(model, phi, args.strategy, budgets)
    report.results["rows"] = [
        {"budget": r.budget, "search_size": r.search_size,
         "lower_bound": rational(r.lower_bound),
         "exact": r.exact if isinstance(r.exact, str) else rational(r.exact)}
        for r in rows
    ]
    if args.csv:
        report.inputs["csv"] = args.csv
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            write_curve_csv(rows, fh)
    return EXIT_OK


def cmd_estimate(args, report: Report) -> int:
    model = _model(args.model, report)
    search = _search(args.search, model, report)
    phi = _formula(args.formula, model, report)
    delta = parse_rational(args.delta, "--delta")
    if not 0 < delta < 1:
        raise UsageError("--delta must lie strictly between 0 and 1")
    if args.samples < 1 or args.horizon < 1:
        raise UsageError("--samples and --horizon must be positive")
    report.inputs.update(samples=args.samples, horizon=args.horizon, seed=args.seed,
                         delta=format_rational(delta))
    ext, _ = build_minimal_extension(model, search)
    est = interval_estimate(chain_of(ext), phi, args.samples, args.horizon, args.seed,
                            delta, ap=model.ap)
    report.results.update(
        n_samples=est.n_samples, n_definitely_sat=est.n_definitely_sat,
        n_definitely_unsat=est.n_definitely_unsat, n_unknown=est.n_unknown,
        lo=rational(est.lo), hi=rational(est.hi), slack=rational(est.slack),
        confidence_delta=format_rational(est.confidence_delta),
        seed=est.seed, rng=est.rng)
    return EXIT_OK


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json",
                        help="report format (default: json)")
    common.add_argument("--timing", action="store_true",
                        help="add wall-clock timing to the report (breaks byte-stable output)")

    p = argparse.ArgumentParser(prog="ltlprogress",
                                description="Progress of a partial search of a probabilistic "
                                            "transition system towards verifying an LTL property.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="check a model file")
    s.add_argument("model")
    s.add_argument("--complete-final-states", action="store_true",
                   help="add a probability-one self loop to states without successors")
    s.add_argument("--write", metavar="PATH", help="write the (repaired) model to PATH")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("progress", parents=[common], help="exact progress and/or lower bound")
    s.add_argument("model")
    s.add_argument("search")
    s.add_argument("--formula", required=True)
    s.add_argument("--method", choices=("exact", "bound", "both"), default="exact")
    s.set_defaults(func=cmd_progress)

    s = sub.add_parser("violation", parents=[common], help="has the search found a violation")
    s.add_argument("model")
    s.add_argument("search")
    s.add_argument("--formula", required=True)
    s.set_defaults(func=cmd_violation)

    s = sub.add_parser("explore", parents=[common], help="progress curve of a search strategy")
    s.add_argument("model")
    s.add_argument("--formula", required=True)
    s.add_argument("--strategy", choices=[x.value for x in Strategy], default="bfs")
    s.add_argument("--budgets", required=True, help="ascending comma-separated budgets")
    s.add_argument("--csv", metavar="PATH", help="also write the curve as CSV")
    s.set_defaults(func=cmd_explore)

    s = sub.add_parser("estimate", parents=[common],
                       help="sampled interval for the measure on the minimal extension")
    s.add_argument("model")
    s.add_argument("search")
    s.add_argument("--formula", required=True)
    s.add_argument("--samples", type=int, required=True)
    s.add_argument("--horizon", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--delta", default="1/20", help="per-side error probability (default 1/20)")
    s.set_defaults(func=cmd_estimate)
    return p


def main(argv: Sequence[str] | None = None, stdout=None) -> int:
    out = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    report = Report(args.command)
    start = time.perf_counter()
    try:
        code = args.func(args, report)
    except (InputError, UsageError, FormulaSyntaxError, NonPositiveFormulaError,
            PtsError, OSError) as exc:
        report.errors.append(str(exc))
        code = EXIT_INPUT
    if args.timing:
        report.timing = {"total_seconds": time.perf_counter() - start}
    out.write(report.to_json() if args.format == "json" else report.to_text())
    return code


def run(argv: Sequence[str]) -> tuple[int, str]:
    """Run :func:`main` and capture the report, for tests and scripting."""
    buf = _stdio.StringIO()
    code = main(argv, buf)
    return code, buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())
