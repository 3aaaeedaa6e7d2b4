"""
Argument parser for the resochi command line
"""

import argparse

from utils.constants import (
    APP_DISPLAY_NAME,
    APP_NAME,
    APP_VERSION,
    MODE_FORMAL,
    MODE_NUMERIC,
    MODEL_CPN,
    MODEL_ELLIPSOID,
    MODEL_USTILOVSKY,
    SUPPORTED_DIRECTIONS,
    SUPPORTED_FILTERS,
    SUPPORTED_FORMATS,
    SUPPORTED_MODELS,
    DIRECTION_POSITIVE,
    FILTER_NONE
)


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="Write the report to this file instead of stdout")
    common.add_argument("--format", choices=SUPPORTED_FORMATS, help="Report format")
    common.add_argument("--tol", type=float, help="Numeric tolerance of relation detection")
    common.add_argument("--coeff-bound", type=int, help="Largest relation coefficient searched numerically")
    common.add_argument("--k-max", type=int, help="Last iterate scanned or validated")
    common.add_argument("--n-list", help="Comma-separated truncation degrees, e.g. 100,1000,10000")
    common.add_argument("--seed", type=int, help="Seed of generated data")
    common.add_argument("--verbose", action="store_true", help="Log at DEBUG level on stderr")
    return common


def _model_options(allowed=None) -> argparse.ArgumentParser:
    model = argparse.ArgumentParser(add_help=False)
    if allowed:
        model.add_argument("--model", choices=allowed, help="Generate the input from a model instead of a file")
    model.add_argument("--lambdas", help="CP^n coefficients: rationals, sqrtK, phi or symbol names")
    model.add_argument("--t", default="1", help="CP^n flow time (rational)")
    model.add_argument("--weights", help="Ellipsoid weights: rationals, or sqrtK/phi in numeric mode")
    model.add_argument("--mode", choices=[MODE_FORMAL, MODE_NUMERIC], default=MODE_FORMAL, help="Ellipsoid mode")
    model.add_argument("--n", type=int, help="Ustilovsky dimension parameter (odd, >= 3)")
    model.add_argument("--p", type=int, help="Ustilovsky parameter (p = +-1 mod 8)")
    return model


def build_parser() -> argparse.ArgumentParser:
    """
    Build the resochi argument parser

    Returns:
        ArgumentParser with one subparser per command
    """
    common = _common_options()

    parser = argparse.ArgumentParser(prog=APP_NAME, description=APP_DISPLAY_NAME)
    parser.add_argument("--version", action="version", version=f"{APP_NAME} {APP_VERSION}")
    subparsers = parser.add_subparsers(dest="command", metavar="command")
    subparsers.required = True

    resonance = subparsers.add_parser(
        "resonance",
        parents=[common, _model_options([MODEL_CPN])],
        help="Resonance lattice, dual structure and verdicts of a mean-index problem"
    )
    resonance.add_argument("input", nargs="?", help="Mean-index problem file (JSON)")
    resonance.add_argument("--filter", choices=SUPPORTED_FILTERS, default=FILTER_NONE,
                           help="Also analyze the problem with these indices removed")
    resonance.add_argument("--scan", action="store_true", help="Run the prohibited-region scan up to --k-max")
    resonance.add_argument("--numeric", action="store_true",
                           help="Cross-check the exact lattice against numeric relation detection")

    scan = subparsers.add_parser(
        "scan",
        parents=[common, _model_options([MODEL_CPN])],
        help="Scan the iterates k*Delta mod 2N for points in the prohibited region"
    )
    scan.add_argument("input", nargs="?", help="Mean-index problem file (JSON)")

    euler = subparsers.add_parser(
        "euler",
        parents=[common, _model_options([MODEL_ELLIPSOID, MODEL_USTILOVSKY])],
        help="Mean Euler characteristics by closed form and truncated complexes"
    )
    euler.add_argument("input", nargs="?", help="Reeb orbit-system file (JSON)")

    truncate = subparsers.add_parser(
        "truncate",
        parents=[common, _model_options([MODEL_ELLIPSOID])],
        help="Generator counts per degree of one truncated complex"
    )
    truncate.add_argument("input", nargs="?", help="Reeb orbit-system file (JSON)")
    truncate.add_argument("--degree", type=int, default=100, help="Truncation degree N")
    truncate.add_argument("--direction", choices=SUPPORTED_DIRECTIONS, default=DIRECTION_POSITIVE)
    truncate.add_argument("--generators", action="store_true", help="List every generator (orbit, k, degree)")

    model = subparsers.add_parser(
        "model",
        parents=[common, _model_options()],
        help="Write a model problem or orbit system as JSON"
    )
    model.add_argument("name", choices=SUPPORTED_MODELS)

    verify = subparsers.add_parser(
        "verify",
        parents=[common],
        help="Run the invariant suite"
    )
    verify.add_argument("--quick", action="store_true", help="Reduced trial counts")

    return parser
