"""
Command-line interface.

    python -m app.cli distance specs/fig1.spec S2 S
    python -m app.cli quotient specs/fig1.spec S T --out X

Exit codes: 0 success, 1 property violated, 2 construction does not exist,
3 parse or configuration error, 4 budget exceeded.
"""
import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

from app.config import settings
from app.exceptions import (
    BudgetExceededError,
    ConfigurationError,
    ConstructionError,
    ParseError,
    SemanticError,
)
from app.models.lattice import format_extended
from app.models.smts import RefinementWitness
from app.services.analysis_service import AnalysisOptions, analysis_service
from app.services.dsl import format_label, format_smts
from app.services.export import distance_to_export, smts_to_export

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_NO_CONSTRUCTION = 2
EXIT_INPUT = 3
EXIT_BUDGET = 4


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spectheory",
                                     description="quantitative refinement of timed modal specifications")
    parser.add_argument("-v", "--verbose", help="log progress to stderr", action="store_true")
    commands = parser.add_subparsers(dest="command", required=True)

    def with_file(name: str, help_text: str, systems: int) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument("file", help="specification file")
        for label in ("A", "B")[:systems]:
            sub.add_argument(label.lower(), metavar=label, help="system name")
        return sub

    def grid_options(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--grid", type=_fraction, help="grid step")
        sub.add_argument("--lead-bound", type=_fraction, help="largest lead tracked")
        sub.add_argument("--value-cap", type=_fraction, help="values above this saturate")
        sub.add_argument("--cap", type=int, help="clock cap for MECS semantics")
        sub.add_argument("--delay-mode", choices=("point", "interval"))
        sub.add_argument("--timing", choices=("standard", "urgent"))

    with_file("check", "report consistency and determinism", 0)
    distance = with_file("distance", "refinement distance from A to B", 2)
    grid_options(distance)
    distance.add_argument("--json", action="store_true", help="print a JSON object")
    refine = with_file("refine", "does A refine B", 2)
    grid_options(refine)
    for name in ("compose", "quotient", "conjoin"):
        sub = with_file(name, f"{name} A and B and append the result", 2)
        sub.add_argument("--out", help="name of the new system")
        if name == "quotient":
            grid_options(sub)
    widen = with_file("widen", "widen A by N and append the result", 1)
    widen.add_argument("n", type=_fraction, metavar="N")
    widen.add_argument("--out", help="name of the new system")
    semantics = with_file("semantics", "print the finitized semantics of a MECS", 1)
    grid_options(semantics)
    semantics.add_argument("--json", action="store_true", help="print a JSON object")
    with_file("dot", "print Graphviz DOT", 1)
    return parser


def _options(args: argparse.Namespace) -> AnalysisOptions:
    return AnalysisOptions(
        step=getattr(args, "grid", None),
        lead_bound=getattr(args, "lead_bound", None),
        value_cap=getattr(args, "value_cap", None),
        clock_cap=getattr(args, "cap", None),
        delay_mode=getattr(args, "delay_mode", None),
        timing=getattr(args, "timing", None),
    )


def _print_witness(witness: RefinementWitness) -> None:
    if witness.refines:
        print(f"refines ({len(witness.relation or ())} pairs in the relation)")
        return
    print("does not refine")
    for step in witness.counterexample:
        side = "left" if step.modality == "may" else "right"
        print(f"  at {step.pair}: {step.modality} {format_label(step.label)} -> {step.target} on the {side}")
        for label, target in step.answers:
            print(f"    answered by {format_label(label)} -> {target}")


def _append(path: Path, text: str) -> None:
    with path.open("a", encoding="utf-8") as handle:
        handle.write("\n" + text + "\n")


def run(args: argparse.Namespace) -> int:
    path = Path(args.file)
    spec = analysis_service.load(path.read_text(encoding="utf-8"))

    if args.command == "check":
        ok = True
        for report in analysis_service.check(spec):
            ok = ok and report.consistent
            print(f"{report.name}: {report.kind}, {report.states} states, "
                  f"{'consistent' if report.consistent else 'INCONSISTENT'}, "
                  f"{'deterministic' if report.deterministic else 'nondeterministic'}")
        return EXIT_OK if ok else EXIT_VIOLATED

    if args.command == "distance":
        result = analysis_service.distance(spec, args.a, args.b, _options(args))
        if args.json:
            print(json.dumps(distance_to_export(result).model_dump()))
        else:
            print(format_extended(result.value))
            print(f"saturated={'true' if result.saturated else 'false'}")
        return EXIT_OK

    if args.command == "refine":
        witness = analysis_service.refine(spec, args.a, args.b, _options(args))
        _print_witness(witness)
        return EXIT_OK if witness else EXIT_VIOLATED

    if args.command in ("compose", "quotient", "conjoin", "widen"):
        if args.command == "compose":
            result = analysis_service.compose(spec, args.a, args.b)
        elif args.command == "quotient":
            result = analysis_service.quotient(spec, args.a, args.b, _options(args))
        elif args.command == "conjoin":
            result = analysis_service.conjoin(spec, args.a, args.b)
        else:
            result = analysis_service.widen(spec, args.a, args.n)
        suffix = args.b if args.command != "widen" else format_extended(args.n).replace("/", "_")
        name = args.out or f"{args.a}_{args.command}_{suffix}"
        text = analysis_service.format_system(name, result)
        _append(path, text)
        print(text)
        return EXIT_OK

    if args.command == "semantics":
        system = analysis_service.semantics(spec, args.a, _options(args))
        if args.json:
            print(json.dumps(smts_to_export(system).model_dump()))
        else:
            print(format_smts(f"{args.a}_semantics", system))
        return EXIT_OK

    print(analysis_service.dot(spec, args.a), end="")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else getattr(logging, settings.log_level.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )
    try:
        return run(args)
    except (ParseError, SemanticError, ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ConstructionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONSTRUCTION


if __name__ == "__main__":
    sys.exit(main())
