"""Command-line driver: grade, construct, count, verify and oracle.

Exit codes: 0 ok, 2 validation error, 3 no convergence, 4 parse error, 5 invariant failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import numpy as np

from .ao import cycle_count_objective, exhaustive_partition_search, object_count_objective
from .errors import (
    InvariantViolation,
    MatrixParseError,
    NoConvergence,
    ValidationError,
)
from .evaluation import distribution_distances, protograph_statistics, tanner_statistics
from .grade import (
    cycle_pattern_evaluator,
    find_optimal_coupling_pattern,
    grade_cycles,
    grade_objects,
    object_pattern_evaluator,
)
from .io_utils import (
    MatrixHeader,
    format_probability,
    read_distribution,
    read_matrix,
    save_report,
    write_distribution,
    write_matrix,
)
from .model import (
    discretize_distribution,
    distribution_from_matrix,
    lifting_violations,
    partitioning_violations,
    validate_distribution,
    validate_params,
    value_counts,
)
from .objects import CONCATENATED_KINDS, concatenated_cycles
from .pipeline import ConstructionConfig, construct_code
from .schema import (
    CodeParams,
    CycleWeights,
    EdgeDistribution,
    GradeConfig,
    ObjectWeights,
    SearchBudget,
)
from .settings import load_settings

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NO_CONVERGENCE = 3
EXIT_PARSE = 4
EXIT_INVARIANT = 5


# ---------------------------------------------------------------------------
# Argument helpers
# ---------------------------------------------------------------------------

def _int_list(raw: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in raw.split(",") if part.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {raw!r}") from exc


def _params_from_args(args: argparse.Namespace) -> CodeParams:
    if not args.pattern and args.memory is None:
        raise ValidationError("give --memory or --pattern")
    pattern = args.pattern if args.pattern else tuple(range(args.memory + 1))
    memory = args.memory if args.memory is not None else pattern[-1]
    return validate_params(
        CodeParams(args.gamma, args.kappa, memory, tuple(pattern), args.circulant, args.replicas)
    )


def _cycle_weights(args: argparse.Namespace) -> CycleWeights:
    return CycleWeights(cycle6=args.cycle6_weight, cycle8=args.cycle8_weight)


def _object_weights(args: argparse.Namespace) -> ObjectWeights:
    weights = args.object_weights
    if len(weights) != 4:
        raise ValidationError("--object-weights needs four values (2-1-2, 2-1-3, 2-2-2, 3-1-3)")
    return ObjectWeights(*weights)


def _float_list(raw: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in raw.split(",") if part.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {raw!r}") from exc


def _budget(args: argparse.Namespace, params: CodeParams) -> SearchBudget:
    default = SearchBudget.default_for(params)
    return SearchBudget(
        d1=default.d1 if args.d1 is None else args.d1,
        d2=default.d2 if args.d2 is None else args.d2,
    )


def _emit(payload: dict[str, Any]) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_grade(args: argparse.Namespace) -> int:
    """Run GRADE (optionally after a coupling-pattern search) and write the distribution."""
    gamma, kappa = args.gamma, args.kappa
    config = GradeConfig(step=args.step, tol=args.tol, max_iters=args.max_iters)
    objects = [(concatenated_cycles(kind), 1.0) for kind in args.objects]
    typical_only = not args.all_classes

    pattern_table = None
    if args.pseudo_memory is not None:
        if args.memory is None:
            raise ValidationError("--pseudo-memory needs --memory")
        if args.objective == "objects":
            evaluate = object_pattern_evaluator(objects, gamma, kappa, config, typical_only)
        else:
            evaluate = cycle_pattern_evaluator(gamma, kappa, _cycle_weights(args), config)
        search = find_optimal_coupling_pattern(
            args.memory, args.pseudo_memory, evaluate, max_workers=args.threads
        )
        args.pattern = search.pattern
        pattern_table = [
            {"pattern": list(pattern), "objective": value} for pattern, value in search.table
        ]

    params = _params_from_args(args)
    if args.objective == "objects":
        result = grade_objects(objects, params, config, typical_only=typical_only)
    else:
        result = grade_cycles(params, config, _cycle_weights(args))

    out = Path(args.out)
    write_distribution(out, result.distribution)
    summary = result.to_summary()
    summary["pattern"] = list(params.pattern)
    summary["distribution"] = [format_probability(v) for v in result.distribution.probs]
    if pattern_table is not None:
        summary["patterns"] = pattern_table
    save_report(summary, out.with_suffix(".json"))
    _emit(summary)
    if not result.converged:
        raise NoConvergence(result)
    return EXIT_OK


def cmd_construct(args: argparse.Namespace) -> int:
    """GRADE (or a given p), best-of-restarts AO, then lifting; writes P, L and a report."""
    params = _params_from_args(args)
    print(f"seed={args.seed}")
    config = ConstructionConfig(
        objective=args.objective,
        distribution=args.dist,
        distribution_path=args.dist_file,
        cycle_weights=_cycle_weights(args),
        object_weights=_object_weights(args),
        grade_config=GradeConfig(step=args.step, tol=args.tol, max_iters=args.max_iters),
        budget=_budget(args, params),
        restarts=args.restarts,
        seed=args.seed,
        threads=args.threads,
        lift=not args.no_lift,
    )
    result = construct_code(params, config)

    out_dir = Path(args.out_dir)
    header = MatrixHeader.from_params(params)
    label = f"{args.dist} ({params.gamma},{params.kappa}) m={params.memory} seed={result.ao.seed}"
    p_path = out_dir / f"{args.name}.P.txt"
    write_matrix(p_path, result.ao.matrix, header, [f"{label} partitioning"])
    if result.lift is not None:
        l_path = out_dir / f"{args.name}.L.txt"
        write_matrix(l_path, result.lift.matrix, header, [f"{label} lifting"])
    report = result.to_report()
    save_report(report, out_dir / f"{args.name}.report.json")
    _emit({"seed": args.seed, "statistics": report["statistics"]})
    if result.grade is not None and not result.grade.converged:
        raise NoConvergence(result.grade)
    return EXIT_OK


def cmd_count(args: argparse.Namespace) -> int:
    """Count cycles and objects of matrix files at protograph and (with L) Tanner level."""
    p_file = read_matrix(args.P)
    params = validate_params(p_file.header.params(args.pattern))
    failures = partitioning_violations(p_file.entries, params)
    if failures:
        raise ValidationError("; ".join(failures))
    payload: dict[str, Any] = {
        "protograph": protograph_statistics(p_file.entries, params).counts()
    }
    if args.L:
        l_file = read_matrix(args.L)
        if (l_file.header.gamma, l_file.header.kappa) != (params.gamma, params.kappa):
            raise ValidationError("P and L files have different dimensions")
        failures = lifting_violations(l_file.entries, params)
        if failures:
            raise ValidationError("; ".join(failures))
        payload["tanner"] = tanner_statistics(p_file.entries, l_file.entries, params).counts()
    if args.report:
        save_report(payload, args.report)
    _emit(payload)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    """Audit a partitioning matrix: pattern membership, distances to p, optional budget."""
    p_file = read_matrix(args.P)
    params = validate_params(p_file.header.params(args.pattern))
    failures = partitioning_violations(p_file.entries, params)
    report: dict[str, Any] = {"pattern": list(params.pattern), "failures": failures}

    if not failures:
        empirical = distribution_from_matrix(p_file.entries, params)
        report["distribution"] = list(empirical.probs)
        reference: EdgeDistribution | None = None
        if args.reference:
            reference = read_distribution(args.reference)
        elif args.uniform:
            reference = EdgeDistribution.uniform(len(params.pattern))
        if reference is not None:
            validate_distribution(reference, size=len(params.pattern), allow_zero=True)
            l1, linf = distribution_distances(empirical, reference)
            report.update(l1_distance=l1, linf_distance=linf)
            if args.d1 is not None or args.d2 is not None:
                target = discretize_distribution(reference, params.entry_count)
                drift = np.maximum(value_counts(p_file.entries, params) - target, 0)
                report["drift"] = [int(v) for v in drift]
                if args.d1 is not None and drift.sum() > args.d1:
                    failures.append(f"value-count drift {int(drift.sum())} exceeds d1={args.d1}")
                if args.d2 is not None and drift.max() > args.d2:
                    failures.append(f"value-count drift {int(drift.max())} exceeds d2={args.d2}")

    report["passed"] = not failures
    _emit(report)
    if failures:
        raise InvariantViolation(failures, report)
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    """Exhaustive partition search on a tiny instance."""
    params = _params_from_args(args)
    if args.objective == "objects":
        objective = object_count_objective(params, _object_weights(args))
    else:
        objective = cycle_count_objective(params, _cycle_weights(args), args.structures)
    best = exhaustive_partition_search(params, objective)
    _emit(
        {
            "matrix": [[int(v) for v in row] for row in best.entries],
            "objective": objective(best.entries),
        }
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_code_arguments(parser: argparse.ArgumentParser, lifting: bool = False) -> None:
    parser.add_argument("--gamma", type=int, required=True, help="Row count of the base matrix.")
    parser.add_argument("--kappa", type=int, required=True, help="Column count.")
    parser.add_argument("--memory", type=int, help="Memory m (defaults to the last pattern value).")
    parser.add_argument("--pattern", type=_int_list, help="Coupling pattern, e.g. 0,1,4,6.")
    if lifting:
        parser.add_argument("--circulant", "-z", type=int, default=1, help="Circulant size z.")
        parser.add_argument("--replicas", "-L", type=int, default=1, help="Replica count L.")
    else:
        parser.set_defaults(circulant=1, replicas=1)


def _add_weight_arguments(parser: argparse.ArgumentParser) -> None:
    defaults = CycleWeights()
    parser.add_argument("--objective", choices=("cycles", "objects"), default="cycles")
    parser.add_argument("--cycle6-weight", type=float, default=defaults.cycle6)
    parser.add_argument("--cycle8-weight", type=float, default=defaults.cycle8)
    parser.add_argument(
        "--object-weights",
        type=_float_list,
        default=(1.0, 1.0, 1.0, 1.0),
        help="Weights of 2-1-2, 2-1-3, 2-2-2, 3-1-3 objects.",
    )


def _add_grade_arguments(parser: argparse.ArgumentParser) -> None:
    defaults = GradeConfig()
    parser.add_argument("--step", type=float, default=defaults.step)
    parser.add_argument("--tol", type=float, default=defaults.tol)
    parser.add_argument("--max-iters", type=int, default=defaults.max_iters)


def build_parser() -> argparse.ArgumentParser:
    settings, paths = load_settings()
    parser = argparse.ArgumentParser(
        prog="grade-ao", description="GRADE-AO construction of SC LDPC codes."
    )
    parser.add_argument("--threads", type=int, default=settings.threads)
    parser.add_argument("--seed", type=int, default=settings.seed)
    parser.add_argument("--log-level", default=settings.log_level)
    commands = parser.add_subparsers(dest="command", required=True)

    grade = commands.add_parser("grade", help="Optimize the edge distribution.")
    _add_code_arguments(grade)
    _add_weight_arguments(grade)
    _add_grade_arguments(grade)
    grade.add_argument(
        "--objects",
        type=lambda raw: [kind.strip() for kind in raw.split(",")],
        default=["3-1-3"],
        help=f"Object kinds for --objective objects, among {', '.join(CONCATENATED_KINDS)}.",
    )
    grade.add_argument("--all-classes", action="store_true", help="Use every prototype class.")
    grade.add_argument("--pseudo-memory", type=int, help="Search coupling patterns first.")
    grade.add_argument("--out", default=f"{paths.artifacts_dir}/grade.p.txt")
    grade.set_defaults(handler=cmd_grade)

    construct = commands.add_parser("construct", help="Build P and L matrices.")
    _add_code_arguments(construct, lifting=True)
    _add_weight_arguments(construct)
    _add_grade_arguments(construct)
    construct.add_argument("--dist", choices=("grade", "uniform", "file"), default="grade")
    construct.add_argument("--dist-file")
    construct.add_argument("--d1", type=float)
    construct.add_argument("--d2", type=float)
    construct.add_argument("--restarts", type=int, default=20)
    construct.add_argument("--no-lift", action="store_true")
    construct.add_argument("--name", default="code")
    construct.add_argument("--out-dir", default=paths.artifacts_dir)
    construct.set_defaults(handler=cmd_construct)

    count = commands.add_parser("count", help="Count cycles and objects of matrix files.")
    count.add_argument("--P", required=True, help="Partitioning matrix file.")
    count.add_argument("--L", help="Lifting matrix file.")
    count.add_argument("--pattern", type=_int_list)
    count.add_argument("--report", help="Also write the counts to this JSON file.")
    count.set_defaults(handler=cmd_count)

    verify = commands.add_parser("verify", help="Check a partitioning matrix file.")
    verify.add_argument("--P", required=True)
    verify.add_argument("--pattern", type=_int_list)
    verify.add_argument("--reference", help="Reference distribution file.")
    verify.add_argument("--uniform", action="store_true", help="Compare against uniform p.")
    verify.add_argument("--d1", type=float)
    verify.add_argument("--d2", type=float)
    verify.set_defaults(handler=cmd_verify)

    oracle = commands.add_parser("oracle", help="Exhaustive search on a tiny instance.")
    _add_code_arguments(oracle)
    _add_weight_arguments(oracle)
    oracle.add_argument("--structures", type=_int_list, help="Restrict cycle-8 structures.")
    oracle.set_defaults(handler=cmd_oracle)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, run one command and map errors to exit codes."""
    try:
        parser = build_parser()
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=str(args.log_level).upper(),
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        return args.handler(args)
    except MatrixParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InvariantViolation as exc:
        for failure in exc.failures:
            print(f"invariant failed: {failure}", file=sys.stderr)
        return EXIT_INVARIANT
    except NoConvergence as exc:
        print(f"warning: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
