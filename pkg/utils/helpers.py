"""
Helper functions for the resochi toolkit
"""

import os
import math
import logging
from fractions import Fraction
from typing import Any, List, Sequence, Union

from utils.constants import FLOAT_SIGNIFICANT_DIGITS

# Set up logging
logger = logging.getLogger(__name__)

def format_float(value: float) -> str:
    """
    Format a float with the report precision

    Args:
        value: Float value

    Returns:
        String with 12 significant digits ("inf"/"nan" kept readable)
    """
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.{FLOAT_SIGNIFICANT_DIGITS}g}"

def format_rational(value: Union[Fraction, int]) -> str:
    """
    Format an exact rational as p/q

    Args:
        value: Fraction or int

    Returns:
        "p" for integers, "p/q" otherwise
    """
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"

def parse_rational(text: str) -> Fraction:
    """
    Parse a rational literal such as "3", "-3/4" or "0.25"

    Args:
        text: Rational literal

    Returns:
        Fraction

    Raises:
        ValueError: If the text is not a rational literal
    """
    text = text.strip()
    if not text:
        raise ValueError("Empty rational literal")
    return Fraction(text)

def to_report_value(value: Any) -> Any:
    """
    Convert a computed value into its JSON report form

    Fractions become "p/q" strings, floats are rounded to the report
    precision, tuples become lists and objects with a to_report() method
    are expanded.

    Args:
        value: Any computed value

    Returns:
        JSON-serializable value
    """
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, float):
        if math.isnan(value) or math.isinf(value):
            return format_float(value)
        return float(format_float(value))
    if hasattr(value, "to_report"):
        return to_report_value(value.to_report())
    if isinstance(value, dict):
        return {str(key): to_report_value(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_report_value(item) for item in value]
    # numpy scalars and similar
    if hasattr(value, "item"):
        return to_report_value(value.item())
    return str(value)

def parse_int_list(text: str) -> List[int]:
    """
    Parse a comma-separated list of integers

    Args:
        text: String such as "100,1000,10000"

    Returns:
        List of integers

    Raises:
        ValueError: If an entry is not an integer
    """
    if not text or not text.strip():
        return []
    return [int(item) for item in text.split(",") if item.strip()]

def split_list(text: str) -> List[str]:
    """
    Split a comma-separated list, dropping blanks

    Args:
        text: Comma-separated string

    Returns:
        List of stripped entries
    """
    return [item.strip() for item in text.split(",") if item.strip()]

def format_vector(vector: Sequence[int]) -> str:
    """
    Format an integer vector as "(a1,a2,...)"

    Args:
        vector: Integer vector

    Returns:
        Formatted vector
    """
    return "(" + ",".join(str(int(entry)) for entry in vector) + ")"

def ensure_directory_exists(directory: str) -> bool:
    """
    Create a directory (and its parents) unless it is already there

    Returns:
        False for an empty path, a path naming a file, or an OS error
    """
    if not directory:
        return False
    try:
        os.makedirs(directory, exist_ok=True)
    except OSError as e:
        logger.error(f"Cannot create directory {directory}: {e}")
        return False
    return True
