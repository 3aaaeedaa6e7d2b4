"""
Exact scalars over Q extended by formal irrational symbols

An ExactScalar is r + c1*s1 + ... + ck*sk with rational r, ci and symbols si
that the caller declares rationally independent (together with 1). Nothing
here verifies the independence; it is the "generic choice" hypothesis made
explicit. Values are immutable and every operation is pure.
"""

import re
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

import mpmath

from utils.constants import WITNESS_PRECISION_DPS
from utils.exceptions import (
    DomainError,
    InputFormatError,
    UnresolvedSymbolError,
    UnsupportedOperationError
)
from utils.helpers import format_rational

# Set up logging
logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]

_SYMBOL_PATTERN = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_TERM_PATTERN = re.compile(
    r"^(?:(?P<coeff>[0-9]+(?:/[0-9]+)?|[0-9]*\.[0-9]+)\s*\*\s*)?(?P<symbol>[A-Za-z_][A-Za-z0-9_]*)$"
)


@dataclass(frozen=True)
class ExactScalar:
    """
    A rational plus a rational combination of irrational symbols.

    The canonical form stores irrational coefficients sorted by symbol with no
    zero entries, so dataclass equality is equality of values.
    """

    rational_part: Fraction = Fraction(0)
    irrational_coeffs: Tuple[Tuple[str, Fraction], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rational_part", Fraction(self.rational_part))
        merged: Dict[str, Fraction] = {}
        for symbol, coeff in self.irrational_coeffs:
            if not isinstance(symbol, str) or not _SYMBOL_PATTERN.match(symbol):
                raise InputFormatError(f"Invalid symbol name: {symbol!r}")
            merged[symbol] = merged.get(symbol, Fraction(0)) + Fraction(coeff)
        canonical = tuple(
            (symbol, coeff) for symbol, coeff in sorted(merged.items()) if coeff != 0
        )
        object.__setattr__(self, "irrational_coeffs", canonical)

    @classmethod
    def of(cls, rational: Rational = 0, coeffs: Optional[Mapping[str, Rational]] = None) -> "ExactScalar":
        """Build a scalar from a rational part and a symbol -> coefficient mapping"""
        return cls(Fraction(rational), tuple((coeffs or {}).items()))

    @classmethod
    def symbol(cls, name: str, coeff: Rational = 1) -> "ExactScalar":
        """The scalar coeff*name"""
        return cls(Fraction(0), ((name, Fraction(coeff)),))

    @property
    def is_rational(self) -> bool:
        return not self.irrational_coeffs

    @property
    def is_zero(self) -> bool:
        return self.is_rational and self.rational_part == 0

    @property
    def symbols(self) -> Tuple[str, ...]:
        return tuple(symbol for symbol, _ in self.irrational_coeffs)

    def coefficient(self, symbol: str) -> Fraction:
        """Coefficient of a symbol (zero when absent)"""
        return dict(self.irrational_coeffs).get(symbol, Fraction(0))

    def __add__(self, other) -> "ExactScalar":
        return scalar_arith(self, _coerce(other), "add")

    __radd__ = __add__

    def __sub__(self, other) -> "ExactScalar":
        return scalar_arith(self, _coerce(other), "sub")

    def __rsub__(self, other) -> "ExactScalar":
        return scalar_arith(_coerce(other), self, "sub")

    def __neg__(self) -> "ExactScalar":
        return scalar_arith(self, ExactScalar(Fraction(-1)), "mul")

    def __mul__(self, other) -> "ExactScalar":
        return scalar_arith(self, _coerce(other), "mul")

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ExactScalar":
        divisor = _coerce(other)
        if not divisor.is_rational:
            raise UnsupportedOperationError("Division by an irrational scalar is not supported")
        if divisor.rational_part == 0:
            raise DomainError("Division by zero")
        return scalar_arith(self, ExactScalar(1 / divisor.rational_part), "mul")

    def to_text(self) -> str:
        return format_scalar(self)

    def __str__(self) -> str:
        return self.to_text()


def _coerce(value) -> ExactScalar:
    if isinstance(value, ExactScalar):
        return value
    if isinstance(value, (int, Fraction)):
        return ExactScalar(Fraction(value))
    raise TypeError(f"Cannot combine ExactScalar with {type(value).__name__}")


def scalar_arith(a: ExactScalar, b: ExactScalar, op: str) -> ExactScalar:
    """
    Exact add, sub or multiplication of two scalars

    Multiplication needs at least one rational factor: every formula in
    scope is linear in the symbols.

    Args:
        a: First scalar
        b: Second scalar
        op: "add", "sub" or "mul"

    Returns:
        Canonical result

    Raises:
        UnsupportedOperationError: If both factors of a product are irrational
        ValueError: If op is unknown
    """
    if op == "add" or op == "sub":
        sign = 1 if op == "add" else -1
        coeffs = dict(a.irrational_coeffs)
        for symbol, coeff in b.irrational_coeffs:
            coeffs[symbol] = coeffs.get(symbol, Fraction(0)) + sign * coeff
        return ExactScalar(a.rational_part + sign * b.rational_part, tuple(coeffs.items()))
    if op == "mul":
        if not a.is_rational and not b.is_rational:
            raise UnsupportedOperationError(
                f"Cannot multiply two irrational scalars: ({a}) * ({b})"
            )
        if a.is_rational:
            a, b = b, a
        factor = b.rational_part
        return ExactScalar(
            a.rational_part * factor,
            tuple((symbol, coeff * factor) for symbol, coeff in a.irrational_coeffs)
        )
    raise ValueError(f"Unknown scalar operation: {op}")


@dataclass(frozen=True)
class CircleValue:
    """
    A point of R / modulus*Z with a canonical representative.

    The rational part of the representative lies in [0, modulus); the
    irrational part is untouched, so equality is exact.
    """

    representative: ExactScalar
    modulus: Fraction

    def __post_init__(self):
        modulus = Fraction(self.modulus)
        if modulus <= 0:
            raise DomainError(f"Modulus must be positive, got {format_rational(modulus)}")
        rational = self.representative.rational_part
        reduced = rational - modulus * (rational // modulus)
        object.__setattr__(self, "modulus", modulus)
        object.__setattr__(
            self,
            "representative",
            ExactScalar(reduced, self.representative.irrational_coeffs)
        )

    @property
    def is_zero(self) -> bool:
        return self.representative.is_zero

    @property
    def is_rational(self) -> bool:
        return self.representative.is_rational

    def __str__(self) -> str:
        return f"{self.representative} (mod {format_rational(self.modulus)})"


def reduce_mod(x: ExactScalar, modulus: Rational) -> CircleValue:
    """
    Reduce a scalar modulo a positive rational

    Args:
        x: Scalar to reduce
        modulus: Positive rational modulus (2N in every Hamiltonian use)

    Returns:
        CircleValue with rational part of the representative in [0, modulus)

    Raises:
        DomainError: If modulus <= 0
    """
    modulus = Fraction(modulus)
    if modulus <= 0:
        raise DomainError(f"Modulus must be positive, got {format_rational(modulus)}")
    return CircleValue(x, modulus)


@dataclass(frozen=True)
class SymbolEntry:
    """One declared irrational symbol with an optional numeric witness"""

    name: str
    witness: Optional[mpmath.mpf] = None
    description: str = ""


@dataclass(frozen=True)
class SymbolTable:
    """
    Ordered declaration of irrational symbols.

    Witnesses are mpmath numbers evaluated at `precision` decimal digits.
    """

    entries: Tuple[SymbolEntry, ...] = ()
    precision: int = WITNESS_PRECISION_DPS

    def __post_init__(self):
        names = [entry.name for entry in self.entries]
        if len(set(names)) != len(names):
            raise InputFormatError(f"Duplicate symbol names in {names}")
        for entry in self.entries:
            if not _SYMBOL_PATTERN.match(entry.name):
                raise InputFormatError(f"Invalid symbol name: {entry.name!r}")
            if entry.witness is not None and not mpmath.isfinite(entry.witness):
                raise InputFormatError(f"Witness for {entry.name} must be finite")

    @classmethod
    def from_witnesses(cls, witnesses: Mapping[str, object], precision: int = WITNESS_PRECISION_DPS) -> "SymbolTable":
        """Build a table from name -> witness (number, numeric string or None)"""
        with mpmath.workdps(precision):
            entries = tuple(
                SymbolEntry(name, None if value is None else mpmath.mpf(value))
                for name, value in witnesses.items()
            )
        return cls(entries, precision)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(entry.name for entry in self.entries)

    def __contains__(self, name: str) -> bool:
        return name in self.names

    def witness(self, name: str) -> mpmath.mpf:
        """
        Numeric witness of a symbol

        Raises:
            UnresolvedSymbolError: If the symbol is undeclared or has no witness
        """
        for entry in self.entries:
            if entry.name == name:
                if entry.witness is None:
                    raise UnresolvedSymbolError(f"Symbol {name} has no float witness")
                return entry.witness
        raise UnresolvedSymbolError(f"Symbol {name} is not declared")

    def merged(self, other: "SymbolTable") -> "SymbolTable":
        """Union of two tables; entries of self win on name clashes"""
        entries = list(self.entries)
        for entry in other.entries:
            if entry.name not in self:
                entries.append(entry)
        return SymbolTable(tuple(entries), max(self.precision, other.precision))


def evaluate_float(x: ExactScalar, table: SymbolTable) -> float:
    """
    Evaluate a scalar numerically

    The sum is formed with mpmath at the table's precision (round to nearest)
    and then rounded to the nearest double.

    Args:
        x: Scalar to evaluate
        table: Symbol table with witnesses for every symbol of x

    Returns:
        Float value

    Raises:
        UnresolvedSymbolError: If a symbol has no witness
    """
    return float(evaluate_mp(x, table))


def evaluate_mp(x: ExactScalar, table: SymbolTable) -> mpmath.mpf:
    """Evaluate a scalar as an mpmath number at the table's precision"""
    with mpmath.workdps(table.precision):
        total = mpmath.mpf(x.rational_part.numerator) / x.rational_part.denominator
        for symbol, coeff in x.irrational_coeffs:
            total += mpmath.mpf(coeff.numerator) / coeff.denominator * table.witness(symbol)
        return +total


def format_scalar(x: ExactScalar) -> str:
    """
    Text form of a scalar: "p/q" or "p/q + r/s*beta1 - t*beta2"

    Args:
        x: Scalar

    Returns:
        Text that parse_scalar maps back to x
    """
    parts = []
    if x.rational_part != 0 or x.is_rational:
        parts.append(format_rational(x.rational_part))
    for symbol, coeff in x.irrational_coeffs:
        magnitude = abs(coeff)
        term = symbol if magnitude == 1 else f"{format_rational(magnitude)}*{symbol}"
        if not parts:
            parts.append(term if coeff > 0 else f"-{term}")
        else:
            parts.append(f"+ {term}" if coeff > 0 else f"- {term}")
    return " ".join(parts)


def parse_scalar(text: str) -> ExactScalar:
    """
    Parse the text form of a scalar

    Accepts sums and differences of rational literals and terms
    "coeff*symbol" or "symbol", e.g. "1/2 + 3*beta - gamma".

    Args:
        text: Scalar text

    Returns:
        ExactScalar

    Raises:
        InputFormatError: If the text cannot be parsed
    """
    if not isinstance(text, str):
        raise InputFormatError(f"Scalar must be given as text, got {type(text).__name__}")
    compact = text.replace(" ", "")
    if not compact:
        raise InputFormatError("Empty scalar text")

    # Split into signed terms, keeping signs that follow '*' or '/' untouched
    terms = re.findall(r"[+-]?[^+-]+", compact)
    if "".join(terms) != compact:
        raise InputFormatError(f"Cannot parse scalar: {text!r}")

    rational = Fraction(0)
    coeffs: Dict[str, Fraction] = {}
    for term in terms:
        sign = -1 if term.startswith("-") else 1
        body = term.lstrip("+-")
        if not body:
            raise InputFormatError(f"Dangling sign in scalar: {text!r}")
        try:
            rational += sign * Fraction(body)
            continue
        except (ValueError, ZeroDivisionError):
            pass
        match = _TERM_PATTERN.match(body)
        if not match:
            raise InputFormatError(f"Cannot parse term {term!r} in {text!r}")
        coeff = Fraction(match.group("coeff")) if match.group("coeff") else Fraction(1)
        symbol = match.group("symbol")
        coeffs[symbol] = coeffs.get(symbol, Fraction(0)) + sign * coeff
    return ExactScalar(rational, tuple(coeffs.items()))


def coefficient_matrix(values: Iterable[ExactScalar]) -> Tuple[Tuple[str, ...], Tuple[Tuple[Fraction, ...], ...], Tuple[Fraction, ...]]:
    """
    Split scalars into rational parts and a symbol-coefficient matrix

    Args:
        values: Scalars x_1..x_m

    Returns:
        (symbols, Q, r) where Q[k][i] is the coefficient of symbols[k] in x_i
        and r[i] is the rational part of x_i
    """
    values = list(values)
    symbols = tuple(sorted({symbol for value in values for symbol in value.symbols}))
    matrix = tuple(
        tuple(value.coefficient(symbol) for value in values) for symbol in symbols
    )
    rationals = tuple(value.rational_part for value in values)
    return symbols, matrix, rationals
