"""
Exact integer lattice algebra for resochi

Lattices are stored by their row Hermite normal form: upper echelon rows,
positive pivots, and every entry above a pivot reduced into [0, pivot).
Equal lattices therefore have equal bases. Normal forms, kernels and basis
reduction are delegated to sympy; everything is arbitrary precision.
"""

import math
import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

from sympy import Matrix, Rational, ZZ, QQ
from sympy.matrices.normalforms import hermite_normal_form as _sympy_hnf
from sympy.matrices.normalforms import smith_normal_decomp as _sympy_snd
from sympy.polys.matrices import DomainMatrix

from utils.constants import LOVASZ_DELTA, RELATION_SCALE_BITS, RELATION_SCALE_FACTOR
from utils.exceptions import ContainmentError, DomainError, InputFormatError

# Set up logging
logger = logging.getLogger(__name__)

IntVector = Tuple[int, ...]


@dataclass(frozen=True)
class IntegerLattice:
    """
    A sublattice of Z^m given by its canonical row HNF basis.

    Build instances through hermite_normal_form(); the constructor does not
    re-normalize.
    """

    ambient_dim: int
    basis: Tuple[IntVector, ...] = ()

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def is_full_rank(self) -> bool:
        return self.rank == self.ambient_dim

    @property
    def pivots(self) -> Tuple[int, ...]:
        """Column of the leading entry of each basis row"""
        return tuple(next(i for i, entry in enumerate(row) if entry != 0) for row in self.basis)

    def determinant(self) -> int:
        """Index in Z^m of a full-rank lattice (product of pivots)"""
        if not self.is_full_rank:
            raise DomainError("Determinant is only defined for full-rank lattices")
        return math.prod(self.basis[i][pivot] for i, pivot in enumerate(self.pivots))

    def coordinates(self, vector: Sequence[int]) -> Optional[Tuple[int, ...]]:
        """
        Integer coordinates of a vector in the HNF basis

        Args:
            vector: Integer vector of length ambient_dim

        Returns:
            Coordinates, or None when the vector is not in the lattice
        """
        if len(vector) != self.ambient_dim:
            raise InputFormatError(
                f"Vector of length {len(vector)} does not live in Z^{self.ambient_dim}"
            )
        residual = [int(entry) for entry in vector]
        coords = []
        for row, pivot in zip(self.basis, self.pivots):
            # Later rows vanish at this pivot, earlier rows are already removed
            if any(residual[i] != 0 for i in range(pivot)):
                return None
            coeff, remainder = divmod(residual[pivot], row[pivot])
            if remainder != 0:
                return None
            coords.append(coeff)
            if coeff:
                residual = [r - coeff * b for r, b in zip(residual, row)]
        if any(residual):
            return None
        return tuple(coords)

    def contains(self, vector: Sequence[int]) -> bool:
        """True when the vector lies in the lattice"""
        return self.coordinates(vector) is not None

    def contains_lattice(self, other: "IntegerLattice") -> bool:
        """True when every basis row of other lies in this lattice"""
        return other.ambient_dim == self.ambient_dim and all(
            self.contains(row) for row in other.basis
        )

    def to_text(self) -> str:
        return lattice_to_text(self)

    def to_report(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "rank": self.rank,
            "basis": [list(row) for row in self.basis]
        }


@dataclass(frozen=True)
class SmithDecomposition:
    """
    Smith normal form D = S * M * T with unimodular S and T.

    diagonal holds the min(rows, cols) diagonal entries of D; nonzero entries
    come first and form a divisibility chain.
    """

    matrix: Tuple[IntVector, ...]
    diagonal: Tuple[int, ...]
    left: Tuple[IntVector, ...]
    right: Tuple[IntVector, ...]

    @property
    def invariant_factors(self) -> Tuple[int, ...]:
        return tuple(d for d in self.diagonal if d != 0)

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    def reassemble(self) -> Tuple[IntVector, ...]:
        """S^-1 * D * T^-1, which must reproduce the input matrix"""
        rows, cols = len(self.left), len(self.right)
        diag = Matrix.zeros(rows, cols)
        for i, d in enumerate(self.diagonal):
            diag[i, i] = d
        product = Matrix(self.left).inv() * diag * Matrix(self.right).inv()
        return _matrix_rows(product)


@dataclass(frozen=True)
class LatticeIndex:
    """|L0 / L| with the invariant factors of the quotient; index None means infinite"""

    index: Optional[int]
    invariant_factors: Tuple[int, ...]

    @property
    def is_finite(self) -> bool:
        return self.index is not None

    @property
    def is_cyclic(self) -> bool:
        return self.is_finite and sum(1 for d in self.invariant_factors if d != 1) <= 1


@dataclass(frozen=True)
class RelationCandidate:
    """An integer vector a with a small folded residual |a.x mod M|"""

    vector: IntVector
    residual: float
    confidence: float

    def to_report(self) -> dict:
        return {
            "vector": list(self.vector),
            "residual": self.residual,
            "confidence": self.confidence
        }


def _as_int(value) -> int:
    integer = int(value)
    if integer != value:
        raise InputFormatError(f"Expected an integer entry, got {value!r}")
    return integer


def _check_rows(rows: Sequence[Sequence[int]]) -> List[List[int]]:
    if not rows:
        raise InputFormatError("At least one row is required")
    width = len(rows[0])
    if width == 0:
        raise InputFormatError("Rows must have at least one entry")
    checked = []
    for row in rows:
        if len(row) != width:
            raise InputFormatError(f"Rows of unequal length: {len(row)} != {width}")
        checked.append([_as_int(entry) for entry in row])
    return checked


def _matrix_rows(matrix: Matrix) -> Tuple[IntVector, ...]:
    return tuple(
        tuple(_as_int(matrix[i, j]) for j in range(matrix.shape[1]))
        for i in range(matrix.shape[0])
    )


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> IntegerLattice:
    """
    Canonical HNF basis of the lattice spanned by integer rows

    sympy computes a column HNF whose pivots sit at the bottom of each
    column; reversing the coordinates before and after turns it into the
    upper echelon row form used here.

    Args:
        rows: Nonempty list of integer vectors of common length m

    Returns:
        IntegerLattice in Z^m

    Raises:
        InputFormatError: If rows are empty, ragged or non-integral
    """
    rows = _check_rows(rows)
    m = len(rows[0])
    reversed_columns = Matrix([[row[m - 1 - j] for row in rows] for j in range(m)])
    hnf = _sympy_hnf(reversed_columns)
    basis = tuple(
        tuple(_as_int(hnf[m - 1 - i, c]) for i in range(m))
        for c in range(hnf.shape[1] - 1, -1, -1)
    )
    return IntegerLattice(m, basis)


def zero_lattice(m: int) -> IntegerLattice:
    """The rank 0 lattice in Z^m"""
    return IntegerLattice(m, ())


def standard_lattice(m: int) -> IntegerLattice:
    """Z^m itself"""
    return IntegerLattice(m, tuple(tuple(int(i == j) for j in range(m)) for i in range(m)))


def lattice_from_rows(rows: Sequence[Sequence[int]], m: int) -> IntegerLattice:
    """hermite_normal_form that accepts an empty row list"""
    if not rows:
        return zero_lattice(m)
    return hermite_normal_form(rows)


def smith_normal_form(matrix: Sequence[Sequence[int]]) -> SmithDecomposition:
    """
    Smith decomposition of an integer matrix

    Args:
        matrix: Integer matrix (list of rows)

    Returns:
        SmithDecomposition with nonnegative diagonal
    """
    rows = _check_rows(matrix)
    n_rows, n_cols = len(rows), len(rows[0])
    diag, left, right = _sympy_snd(Matrix(rows), domain=ZZ)
    left = Matrix(left)
    diagonal = []
    for i in range(min(n_rows, n_cols)):
        d = _as_int(diag[i, i])
        if d < 0:
            left[i, :] = -left[i, :]
            d = -d
        diagonal.append(d)
    return SmithDecomposition(
        matrix=tuple(tuple(row) for row in rows),
        diagonal=tuple(diagonal),
        left=_matrix_rows(left),
        right=_matrix_rows(Matrix(right))
    )


def saturation(lattice: IntegerLattice) -> IntegerLattice:
    """
    Smallest lattice of the same rank containing L with torsion-free quotient

    With B = S^-1 D T^-1 every row of B is a combination of the first r rows
    of T^-1, and those rows span the rational hull intersected with Z^m.
    """
    if lattice.rank == 0:
        return lattice
    decomposition = smith_normal_form(lattice.basis)
    inverse_right = Matrix(decomposition.right).inv()
    rows = _matrix_rows(inverse_right)[:lattice.rank]
    return hermite_normal_form(rows)


def integer_kernel(matrix: Sequence[Sequence], m: int) -> IntegerLattice:
    """
    All integer vectors a with M a = 0 for a rational matrix M

    Args:
        matrix: Rational rows (Fraction, int) of length m; may be empty
        m: Number of columns

    Returns:
        Saturated kernel lattice in Z^m
    """
    if m < 1:
        raise DomainError("The kernel needs at least one column")
    if not matrix:
        return standard_lattice(m)
    for row in matrix:
        if len(row) != m:
            raise InputFormatError(f"Row of length {len(row)} in a matrix with {m} columns")
    sym = Matrix([
        [Rational(Fraction(entry).numerator, Fraction(entry).denominator) for entry in row]
        for row in matrix
    ])
    rows = []
    for vector in sym.nullspace():
        scale = math.lcm(*(int(Rational(entry).q) for entry in vector))
        integral = [int(entry * scale) for entry in vector]
        content = math.gcd(*integral)
        rows.append([entry // content for entry in integral])
    if not rows:
        return zero_lattice(m)
    return saturation(hermite_normal_form(rows))


def congruence_kernel(v: Sequence[int], modulus: int) -> IntegerLattice:
    """
    The lattice {a in Z^m : a.v = 0 mod modulus}

    The congruence is folded into a kernel by a slack variable: solve
    a.v + s*modulus = 0 in Z^(m+1) and drop s.

    Args:
        v: Integer vector
        modulus: Positive integer

    Returns:
        Full-rank IntegerLattice of index modulus / gcd(v, modulus)

    Raises:
        DomainError: If modulus < 1
    """
    modulus = _as_int(modulus)
    if modulus < 1:
        raise DomainError(f"Congruence modulus must be positive, got {modulus}")
    v = [_as_int(entry) for entry in v]
    if not v:
        raise InputFormatError("Congruence vector must be nonempty")
    extended = integer_kernel([v + [modulus]], len(v) + 1)
    return hermite_normal_form([row[:-1] for row in extended.basis])


def lattice_index(lattice: IntegerLattice, ambient: IntegerLattice) -> LatticeIndex:
    """
    Order and structure of ambient / lattice

    Args:
        lattice: Sublattice L
        ambient: Lattice L0 containing L

    Returns:
        LatticeIndex; index None when the ranks differ

    Raises:
        ContainmentError: If L is not contained in L0
    """
    if lattice.ambient_dim != ambient.ambient_dim:
        raise ContainmentError("Lattices live in different ambient spaces")
    coordinate_rows = []
    for row in lattice.basis:
        coords = ambient.coordinates(row)
        if coords is None:
            raise ContainmentError(f"Vector {row} is not in the ambient lattice")
        coordinate_rows.append(coords)
    if lattice.rank != ambient.rank:
        return LatticeIndex(None, ())
    if lattice.rank == 0:
        return LatticeIndex(1, ())
    factors = smith_normal_form(coordinate_rows).invariant_factors
    return LatticeIndex(math.prod(factors), factors)


def _fold_residual(value: float, modulus: float) -> float:
    reduced = math.fmod(value, modulus)
    if reduced < 0:
        reduced += modulus
    return min(reduced, modulus - reduced)


def _sign_normalize(vector: Sequence[int]) -> IntVector:
    for entry in vector:
        if entry != 0:
            return tuple(vector) if entry > 0 else tuple(-e for e in vector)
    return tuple(vector)


def integer_relation(x: Sequence[float], modulus: float, coeff_bound: int, tol: float) -> List[RelationCandidate]:
    """
    Small integer vectors a with a.x = 0 mod modulus, found by LLL

    The reduced lattice has rows [e_i | round(g*x_i)] and [0 | round(g*modulus)]
    with g = RELATION_SCALE_FACTOR/tol, capped so that g*max(|x_i|, modulus)
    stays below 2**RELATION_SCALE_BITS. Each reduced row, and each sum or
    difference of two reduced rows, is re-verified against the float residual
    before it is reported.

    Args:
        x: Finite real values
        modulus: Positive real modulus
        coeff_bound: Bound on max |a_i|
        tol: Residual tolerance

    Returns:
        Candidates sorted by residual, then size; possibly empty
    """
    if tol <= 0:
        raise DomainError(f"Tolerance must be positive, got {tol}")
    if coeff_bound < 1:
        raise DomainError(f"Coefficient bound must be at least 1, got {coeff_bound}")
    if modulus <= 0:
        raise DomainError(f"Modulus must be positive, got {modulus}")
    values = [float(value) for value in x]
    if not values or not all(math.isfinite(value) for value in values):
        raise DomainError("Relation detection needs a nonempty vector of finite reals")

    m = len(values)
    scale = max([abs(value) for value in values] + [modulus])
    gamma = min(RELATION_SCALE_FACTOR / tol, 2.0 ** RELATION_SCALE_BITS / scale)
    rows = []
    for i, value in enumerate(values):
        rows.append([ZZ(int(i == j)) for j in range(m)] + [ZZ(int(round(gamma * value)))])
    rows.append([ZZ(0)] * m + [ZZ(max(1, int(round(gamma * modulus))))])
    reduced = DomainMatrix(rows, (m + 1, m + 1), ZZ).lll(delta=QQ(*LOVASZ_DELTA)).to_Matrix()
    reduced_rows = [[int(reduced[i, j]) for j in range(m)] for i in range(m + 1)]

    pool = list(reduced_rows)
    for first, second in combinations(reduced_rows, 2):
        pool.append([a + b for a, b in zip(first, second)])
        pool.append([a - b for a, b in zip(first, second)])

    candidates = {}
    for vector in pool:
        if not any(vector) or max(abs(entry) for entry in vector) > coeff_bound:
            continue
        vector = _sign_normalize(vector)
        if vector in candidates:
            continue
        residual = _fold_residual(sum(a * value for a, value in zip(vector, values)), modulus)
        if residual <= tol:
            confidence = 1.0 - residual / tol
            candidates[vector] = RelationCandidate(vector, residual, confidence)

    result = sorted(
        candidates.values(),
        key=lambda c: (c.residual, sum(abs(a) for a in c.vector), c.vector)
    )
    logger.debug(f"integer_relation: {len(result)} candidates for m={m}, modulus={modulus}")
    return result


def lattice_to_text(lattice: IntegerLattice) -> str:
    """
    Row-per-line text form of a lattice basis

    The first line is "dim <m> rank <r>"; each basis row follows as
    space-separated integers.
    """
    lines = [f"dim {lattice.ambient_dim} rank {lattice.rank}"]
    lines.extend(" ".join(str(entry) for entry in row) for row in lattice.basis)
    return "\n".join(lines) + "\n"


def lattice_from_text(text: str) -> IntegerLattice:
    """
    Parse the output of lattice_to_text (rows are re-normalized)

    Raises:
        InputFormatError: If the header or a row is malformed
    """
    lines = [line.strip() for line in text.strip().splitlines() if line.strip()]
    if not lines:
        raise InputFormatError("Empty lattice text")
    header = lines[0].split()
    if len(header) != 4 or header[0] != "dim" or header[2] != "rank":
        raise InputFormatError(f"Bad lattice header: {lines[0]!r}")
    try:
        m, rank = int(header[1]), int(header[3])
        rows = [[int(token) for token in line.split()] for line in lines[1:]]
    except ValueError as e:
        raise InputFormatError(f"Bad lattice text: {e}")
    if len(rows) != rank:
        raise InputFormatError(f"Header announces rank {rank} but {len(rows)} rows follow")
    lattice = lattice_from_rows(rows, m)
    if lattice.ambient_dim != m:
        raise InputFormatError(f"Rows have length {lattice.ambient_dim}, header says {m}")
    return lattice
