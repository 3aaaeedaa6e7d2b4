"""
Validation functions for resochi input documents
"""

import os
import re
import logging
from typing import Any, Dict, Optional, Tuple

from utils.constants import (
    BLOCK_ELLIPTIC,
    BLOCK_NEGATIVE_HYPERBOLIC,
    BLOCK_POSITIVE_HYPERBOLIC,
    LAW_BLOCKS,
    LAW_TABLE,
    ORBIT_BAD,
    ORBIT_GOOD,
    SUPPORTED_FORMATS
)

# Set up logging
logger = logging.getLogger(__name__)

INFINITE_N_TOKENS = ("inf", "infinity", "∞")

_SYMBOL_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def is_valid_output_format(format_str: str) -> bool:
    """
    Check if a format string is a valid report format

    Args:
        format_str: Format string

    Returns:
        True if the format is supported, False otherwise
    """
    return bool(format_str) and format_str.lower() in SUPPORTED_FORMATS


def is_valid_symbol_name(name: Any) -> bool:
    """
    Check if a name can serve as an irrational symbol

    Args:
        name: Candidate name

    Returns:
        True for identifiers such as "beta1" or "lambda_0"
    """
    return isinstance(name, str) and bool(_SYMBOL_NAME.match(name))


def is_infinite_n(value: Any) -> bool:
    """True when a document spells N as infinite (null, "inf", "infinity")"""
    if value is None:
        return True
    return isinstance(value, str) and value.strip().lower() in INFINITE_N_TOKENS


def _is_positive_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool) and value >= 1


def _validate_symbols(symbols: Any) -> Tuple[bool, Optional[str]]:
    if not isinstance(symbols, list):
        return False, "Field 'symbols' must be a list"
    seen = set()
    for position, entry in enumerate(symbols):
        if not isinstance(entry, dict):
            return False, f"symbols[{position}] must be an object"
        name = entry.get("name")
        if not is_valid_symbol_name(name):
            return False, f"symbols[{position}].name is not a valid symbol name: {name!r}"
        if name in seen:
            return False, f"symbols[{position}].name duplicates {name!r}"
        seen.add(name)
        witness = entry.get("witness")
        if witness is not None and not isinstance(witness, (int, float, str)):
            return False, f"symbols[{position}].witness must be a number or numeric string"
    return True, None


def validate_problem_document(document: Any) -> Tuple[bool, Optional[str]]:
    """
    Check the shape of a mean-index problem document

    Args:
        document: Parsed JSON

    Returns:
        Tuple of (is_valid, error_message)
    """
    if not isinstance(document, dict):
        return False, "Problem document must be a JSON object"

    if not _is_positive_int(document.get("n")):
        return False, f"Field 'n' must be a positive integer, got {document.get('n')!r}"

    if "N" not in document:
        return False, "Field 'N' is required (use \"inf\" for an infinite minimal Chern number)"
    N = document["N"]
    if not is_infinite_n(N) and not _is_positive_int(N):
        return False, f"Field 'N' must be a positive integer or \"inf\", got {N!r}"

    deltas = document.get("deltas")
    if not isinstance(deltas, list) or not deltas:
        return False, "Field 'deltas' must be a nonempty list"
    for position, delta in enumerate(deltas):
        if not isinstance(delta, (str, int)) or isinstance(delta, bool):
            return False, f"deltas[{position}] must be scalar text or an integer"

    labels = document.get("labels")
    if labels is not None:
        if not isinstance(labels, list) or len(labels) != len(deltas):
            return False, "Field 'labels' must be a list with one label per mean index"
        if not all(isinstance(label, str) for label in labels):
            return False, "Every label must be a string"

    valid, message = _validate_symbols(document.get("symbols", []))
    if not valid:
        return valid, message

    return True, None


def _validate_block(block: Any, where: str) -> Tuple[bool, Optional[str]]:
    if not isinstance(block, dict):
        return False, f"{where} must be an object"
    kind = block.get("kind")
    if kind == BLOCK_ELLIPTIC:
        if not isinstance(block.get("theta"), (int, float, str)):
            return False, f"{where}.theta is required for elliptic blocks"
    elif kind == BLOCK_NEGATIVE_HYPERBOLIC:
        winding = block.get("winding", 0)
        if not isinstance(winding, int) or winding < 0:
            return False, f"{where}.winding must be a nonnegative integer"
    elif kind != BLOCK_POSITIVE_HYPERBOLIC:
        return False, f"{where}.kind must be one of elliptic, positive_hyperbolic, negative_hyperbolic"
    return True, None


def validate_orbit_system_document(document: Any) -> Tuple[bool, Optional[str]]:
    """
    Check the shape of a Reeb orbit-system document

    Args:
        document: Parsed JSON

    Returns:
        Tuple of (is_valid, error_message)
    """
    if not isinstance(document, dict):
        return False, "Orbit-system document must be a JSON object"

    n = document.get("n")
    if not _is_positive_int(n) or n < 2:
        return False, f"Field 'n' must be an integer >= 2, got {n!r}"

    orbits = document.get("orbits")
    if not isinstance(orbits, list):
        return False, "Field 'orbits' must be a list"

    for position, orbit in enumerate(orbits):
        where = f"orbits[{position}]"
        if not isinstance(orbit, dict):
            return False, f"{where} must be an object"
        if not isinstance(orbit.get("name"), str) or not orbit["name"]:
            return False, f"{where}.name must be a nonempty string"
        law = orbit.get("cz_law")
        if not isinstance(law, dict):
            return False, f"{where}.cz_law must be an object"
        law_type = law.get("type")
        if law_type == LAW_TABLE:
            values = law.get("values")
            if not isinstance(values, list) or not values or not all(isinstance(v, int) for v in values):
                return False, f"{where}.cz_law.values must be a nonempty list of integers"
            if orbit.get("class") not in (ORBIT_GOOD, ORBIT_BAD):
                return False, f"{where}.class must be 'good' or 'bad' for a table law"
            if not isinstance(orbit.get("delta"), (int, float, str)):
                return False, f"{where}.delta is required for a table law"
        elif law_type == LAW_BLOCKS:
            blocks = law.get("blocks")
            if not isinstance(blocks, list):
                return False, f"{where}.cz_law.blocks must be a list"
            for index, block in enumerate(blocks):
                valid, message = _validate_block(block, f"{where}.cz_law.blocks[{index}]")
                if not valid:
                    return valid, message
            if orbit.get("class") not in (None, ORBIT_GOOD, ORBIT_BAD):
                return False, f"{where}.class must be 'good' or 'bad'"
        else:
            return False, f"{where}.cz_law.type must be 'table' or 'blocks'"
        sigma = orbit.get("sigma")
        if sigma is not None and sigma not in (1, -1):
            return False, f"{where}.sigma must be 1 or -1"

    valid, message = _validate_symbols(document.get("symbols", []))
    if not valid:
        return valid, message

    return True, None


def is_valid_output_path(path: str) -> Tuple[bool, Optional[str]]:
    """
    Check if a report can be written to a path

    Args:
        path: Output file path

    Returns:
        Tuple of (is_valid, error_message)
    """
    if not path:
        return False, "Output path cannot be empty"

    if os.path.isdir(path):
        return False, "Output path is a directory"

    directory = os.path.dirname(os.path.abspath(path))
    if not os.path.exists(directory):
        try:
            os.makedirs(directory)
        except Exception as e:
            return False, f"Cannot create output directory: {e}"

    if not os.access(directory, os.W_OK):
        return False, "Output directory is not writable"

    return True, None
