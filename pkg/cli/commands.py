"""
Command implementations for the resochi command line

Every command returns a CommandOutcome; run() renders it and maps it to the
exit code: 0 for a clean run, 2 when a verdict fails, 1 on errors.
"""

import re
import sys
import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence

import mpmath

from cli.parser import build_parser
from core.config_manager import ConfigManager, RunConfig
from core.contact import (
    ReebOrbitSystem,
    asymptotic_morse,
    build_truncated_complex,
    cf2_violations,
    chi_closed_form,
    chi_limit_compare,
    chi_mean_truncated,
    chi_truncated,
    euler_report,
    validate_index_bounds
)
from core.exactnum import ExactScalar, SymbolTable, parse_scalar
from core.file_handler import (
    load_orbit_system,
    load_problem,
    problem_to_document,
    render_report,
    system_to_document,
    write_document,
    write_report
)
from core.models import EllipsoidSpec, UstilovskySpec, cpn_mean_indices, ellipsoid_system, ustilovsky_chi
from core.resonance import (
    MeanIndexProblem,
    cpn_corollary_check,
    diagonal_bound_check,
    gamma_structure,
    numeric_agreement,
    prohibited_region_scan,
    theorem_one_report
)
from core.verify_suite import InvariantSuite
from utils.constants import (
    APP_NAME,
    EXIT_CLEAN,
    EXIT_ERROR,
    EXIT_VERDICT_FAILED,
    MODE_NUMERIC,
    MODEL_CPN,
    MODEL_ELLIPSOID,
    MODEL_USTILOVSKY,
    SUPPORTED_DIRECTIONS,
    WITNESS_PRECISION_DPS
)
from utils.exceptions import (
    DegenerateIterateError,
    DomainError,
    ExtrapolationError,
    InputFormatError,
    ResochiError
)
from utils.helpers import parse_int_list, parse_rational, split_list
from utils.logger import setup_logging

# Set up logging
logger = logging.getLogger(__name__)

# Violations listed in a report; the rest are only counted
REPORTED_VIOLATIONS = 20

_SQRT_SYMBOL = re.compile(r"^sqrt(\d+)$")


@dataclass
class CommandOutcome:
    document: Dict[str, Any]
    table: Optional[List[Dict[str, Any]]] = None
    failed: bool = False
    text: Optional[str] = None


def symbol_witness(name: str) -> Optional[mpmath.mpf]:
    """
    Witness of a named constant: sqrtK is sqrt(K), phi the golden ratio

    Raises:
        DomainError: For sqrtK with K a perfect square
    """
    with mpmath.workdps(WITNESS_PRECISION_DPS):
        match = _SQRT_SYMBOL.match(name)
        if match:
            radicand = int(match.group(1))
            root = mpmath.sqrt(radicand)
            if int(root) ** 2 == radicand:
                raise DomainError(f"{name} is rational; write {int(root)} instead")
            return root
        if name == "phi":
            return (1 + mpmath.sqrt(5)) / 2
    return None


def parse_lambdas(text: str) -> List[ExactScalar]:
    """Comma-separated scalars; free symbol names stay formal"""
    values = [parse_scalar(token) for token in split_list(text or "")]
    if not values:
        raise InputFormatError("--lambdas is required for the cpn model")
    return values


def witness_table(values: Sequence[ExactScalar]) -> SymbolTable:
    """Witnesses for every sqrtK and phi symbol among the values"""
    witnesses = {}
    for value in values:
        for name in value.symbols:
            witness = symbol_witness(name)
            if witness is not None:
                witnesses[name] = witness
    return SymbolTable.from_witnesses(dict(sorted(witnesses.items())))


def parse_weights(text: str, mode: str) -> List:
    """Rational weights; numeric mode also takes sqrtK and phi"""
    weights = []
    for token in split_list(text or ""):
        witness = symbol_witness(token) if mode == MODE_NUMERIC else None
        if witness is not None:
            weights.append(float(witness))
            continue
        try:
            value = parse_rational(token)
        except (ValueError, ZeroDivisionError):
            raise InputFormatError(f"Weight {token!r} is not a rational (irrational weights need --mode numeric)")
        weights.append(float(value) if mode == MODE_NUMERIC else value)
    return weights


def model_problem(args) -> MeanIndexProblem:
    """The CP^n problem described by --lambdas and --t"""
    lambdas = parse_lambdas(args.lambdas)
    try:
        t = parse_rational(args.t)
    except (ValueError, ZeroDivisionError):
        raise InputFormatError(f"--t {args.t!r} is not a rational")
    return cpn_mean_indices(lambdas, t, symbols=witness_table(lambdas))


def model_system(args, config: RunConfig) -> ReebOrbitSystem:
    """The ellipsoid system described by --weights and --mode"""
    if not args.weights:
        raise InputFormatError("--weights is required for the ellipsoid model")
    k_max = config.k_max if args.mode == MODE_NUMERIC else None
    return ellipsoid_system(EllipsoidSpec(tuple(parse_weights(args.weights, args.mode)), args.mode, k_max))


def _problem_input(args) -> MeanIndexProblem:
    if getattr(args, "model", None) == MODEL_CPN:
        return model_problem(args)
    if not args.input:
        raise InputFormatError("Give a problem file or --model cpn")
    return load_problem(args.input)


def _system_input(args, config: RunConfig) -> ReebOrbitSystem:
    if getattr(args, "model", None) == MODEL_ELLIPSOID:
        return model_system(args, config)
    if not args.input:
        raise InputFormatError("Give an orbit-system file or --model ellipsoid")
    return load_orbit_system(args.input)


def cmd_resonance(args, config: RunConfig) -> CommandOutcome:
    """Dual structure, verdicts and optional scan of a mean-index problem"""
    problem = _problem_input(args)
    structure = gamma_structure(problem)
    theorem = theorem_one_report(problem, args.filter)
    document = {"problem": problem_to_document(problem), "gamma": structure, "theorem_one": theorem}
    failed = not theorem.all_consistent

    corollary = cpn_corollary_check(problem, theorem)
    if corollary.applicable:
        document["cpn_corollary"] = corollary
        failed = failed or not corollary.consistent

    if theorem.rank_one and theorem.generator_nonnegative:
        document["diagonal"] = diagonal_bound_check(theorem.generator, problem.n, problem.N)

    if args.numeric:
        agree, offending = numeric_agreement(problem, config.coeff_bound, config.tol)
        if not agree:
            logger.warning(f"Numeric relation detection disagrees with the exact lattice at {offending}")
        document["numeric"] = {"agreement": agree, "offending": [list(vector) for vector in offending]}

    if args.scan:
        scan = prohibited_region_scan(problem, config.k_max, threads=config.threads)
        document["scan"] = scan
        failed = failed or scan.has_violation

    return CommandOutcome(document, failed=failed)


def cmd_scan(args, config: RunConfig) -> CommandOutcome:
    """Prohibited-region scan of a mean-index problem"""
    problem = _problem_input(args)
    scan = prohibited_region_scan(problem, config.k_max, threads=config.threads)
    return CommandOutcome({"problem": problem_to_document(problem), "scan": scan}, failed=scan.has_violation)


def _validation_section(system: ReebOrbitSystem, k_max: int) -> Dict[str, Any]:
    violations = validate_index_bounds(system, k_max)
    real = [violation for violation in violations if violation.kind != "degenerate"]
    return {
        "k_max": k_max,
        "violation_count": len(real),
        "degenerate_iterates": len(violations) - len(real),
        "violations": real[:REPORTED_VIOLATIONS]
    }


def cmd_euler(args, config: RunConfig) -> CommandOutcome:
    """Closed-form chi with the truncated series, comparison and validation"""
    if getattr(args, "model", None) == MODEL_USTILOVSKY:
        spec = UstilovskySpec(args.n, args.p)
        chi_plus, chi_minus = ustilovsky_chi(spec)
        document = {
            "model": MODEL_USTILOVSKY,
            "n": spec.n,
            "p": spec.p,
            "chi_plus": chi_plus,
            "chi_minus": chi_minus,
            "chi_mean": (chi_plus + chi_minus) / 2
        }
        return CommandOutcome(document)

    system = _system_input(args, config)
    document = {"n": system.n, "orbit_count": len(system.orbits), "euler": euler_report(system)}
    failed = False
    table = None

    try:
        comparisons = [chi_limit_compare(system, config.n_list, direction) for direction in SUPPORTED_DIRECTIONS]
        largest = max(config.n_list)
        morse = [
            asymptotic_morse(system, direction, config.n_list, checked_from=largest) for direction in SUPPORTED_DIRECTIONS
        ]
        document["comparisons"] = comparisons
        document["truncated_mean"] = {"N": largest, "value": chi_mean_truncated(system, largest)}
        document["asymptotic_morse"] = morse
        failed = any(not (c.envelope_ok and c.converged) for c in comparisons)
        failed = failed or not all(check.satisfied for check in morse)
        table = [
            {
                "direction": comparison.direction,
                "N": row.N,
                "chi_value": row.chi_value,
                "normalized": row.normalized,
                "closed_form": row.closed_form,
                "difference": row.difference
            }
            for comparison in comparisons
            for row in comparison.rows
        ]
    except (DegenerateIterateError, ExtrapolationError) as e:
        logger.warning(f"Truncated complexes unavailable: {e}")
        document["truncation"] = f"unavailable: {e}"

    validation = _validation_section(system, config.k_max)
    document["validation"] = validation
    document["cf2_violations"] = [
        {"orbit": name, "k": k, "degree": degree} for name, k, degree in cf2_violations(system)
    ]
    failed = failed or validation["violation_count"] > 0
    return CommandOutcome(document, table=table, failed=failed)


def cmd_truncate(args, config: RunConfig) -> CommandOutcome:
    """One truncated complex and its Euler characteristic"""
    system = _system_input(args, config)
    complex_ = build_truncated_complex(system, args.degree, args.direction,
                                      keep_log=args.generators, threads=config.threads)
    document = {
        "complex": complex_,
        "chi": chi_truncated(complex_),
        "closed_form": chi_closed_form(system, args.direction)
    }
    if args.generators:
        document["generators"] = [
            {"orbit": name, "k": k, "degree": degree} for name, k, degree in complex_.generator_log
        ]
    table = [{"degree": degree, "dim": count} for degree, count in sorted(complex_.dims.items())]
    return CommandOutcome(document, table=table)


def cmd_model(args, config: RunConfig) -> CommandOutcome:
    """Problem or orbit-system document of a model"""
    if args.name == MODEL_CPN:
        return CommandOutcome(problem_to_document(model_problem(args)))
    if args.name == MODEL_ELLIPSOID:
        return CommandOutcome(system_to_document(model_system(args, config)))
    spec = UstilovskySpec(args.n, args.p)
    chi_plus, chi_minus = ustilovsky_chi(spec)
    return CommandOutcome({"model": MODEL_USTILOVSKY, "n": spec.n, "p": spec.p,
                           "chi_plus": chi_plus, "chi_minus": chi_minus})


def cmd_verify(args, config: RunConfig) -> CommandOutcome:
    """Invariant suite; one line per invariant unless a format is requested"""
    suite = InvariantSuite(seed=config.seed, quick=args.quick)
    suite.set_progress_callback(lambda progress, message: logger.debug(f"[{progress}%] {message}"))
    result = suite.run()
    text = None
    if args.format is None:
        text = "\n".join(result.summary_lines()) + "\n"
    return CommandOutcome(result.to_report(), failed=not result.all_passed, text=text)


COMMANDS: Dict[str, Callable[[Any, RunConfig], CommandOutcome]] = {
    "resonance": cmd_resonance,
    "scan": cmd_scan,
    "euler": cmd_euler,
    "truncate": cmd_truncate,
    "model": cmd_model,
    "verify": cmd_verify
}


def _emit(args, config: RunConfig, outcome: CommandOutcome, stdout) -> None:
    if outcome.text is not None:
        write_report(outcome.text, config.output_path, stdout)
    elif args.command == "model" and args.name != MODEL_USTILOVSKY:
        write_document(outcome.document, config.output_path, stdout)
    else:
        write_report(render_report(outcome.document, config.format, outcome.table), config.output_path, stdout)


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    """
    Parse arguments, run one command and write its report

    Args:
        argv: Arguments without the program name (default: sys.argv[1:])
        stdout: Stream for reports (default: sys.stdout)
        stderr: Stream for diagnostics (default: sys.stderr)

    Returns:
        Exit code
    """
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr

    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        # argparse exits with 2 on usage errors, which is the verdict code here
        return EXIT_CLEAN if e.code in (0, None) else EXIT_ERROR

    manager = ConfigManager()
    setup_logging(
        log_level=logging.DEBUG if args.verbose else logging.INFO,
        log_file=manager.log_file(),
        console_level=logging.DEBUG if args.verbose else logging.WARNING
    )

    try:
        config = manager.run_config(
            args.command,
            input_path=getattr(args, "input", None),
            output_path=args.output,
            tol=args.tol,
            coeff_bound=args.coeff_bound,
            k_max=args.k_max,
            n_list=tuple(parse_int_list(args.n_list)) if args.n_list else None,
            format=args.format,
            seed=args.seed
        )
        logger.info(f"Running {args.command}")
        outcome = COMMANDS[args.command](args, config)
        _emit(args, config, outcome, stdout)
    except (ResochiError, OSError, ValueError) as e:
        logger.error(f"{args.command} failed: {e}")
        stderr.write(f"{APP_NAME}: error: {e}\n")
        return EXIT_ERROR

    if outcome.failed:
        logger.info(f"{args.command}: a verdict failed")
        return EXIT_VERDICT_FAILED
    return EXIT_CLEAN
