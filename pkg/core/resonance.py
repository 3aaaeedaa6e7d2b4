"""
Resonance analysis of Hamiltonian mean indices

A problem is a list of mean indices in R / 2N Z. Its resonance lattice is
{a in Z^m : a.Delta = 0 mod 2N}; the closure of the orbit of Delta/2N in the
m-torus is dual to it. This module computes both, evaluates the verdicts a
perfect Hamiltonian diffeomorphism must pass, and scans orbits for points in
the prohibited cube.
"""

import os
import math
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from core.exactnum import (
    ExactScalar,
    CircleValue,
    SymbolTable,
    coefficient_matrix,
    evaluate_float,
    evaluate_mp,
    reduce_mod
)
from core.lattice import (
    IntegerLattice,
    RelationCandidate,
    congruence_kernel,
    integer_kernel,
    integer_relation,
    lattice_from_rows,
    lattice_index,
    saturation,
    smith_normal_form,
    zero_lattice
)
from sympy import Matrix, Rational
from utils.constants import (
    APP_THREADS_ENV,
    BOUNDARY_TOL,
    DEFAULT_COEFF_BOUND,
    DEFAULT_THREADS,
    DEFAULT_TOL,
    FILTER_DROP_RATIONAL,
    FILTER_DROP_ZERO,
    FILTER_NONE,
    SCAN_CHUNK_SIZE,
    SCAN_HISTOGRAM_BINS,
    SUPPORTED_FILTERS
)
from utils.exceptions import (
    DomainError,
    InfiniteChernError,
    InputFormatError,
    InternalConsistencyError
)

# Set up logging
logger = logging.getLogger(__name__)

INFINITE_N_MESSAGE = (
    "N is infinite (c1 vanishes on pi_2): perfect Hamiltonian diffeomorphisms are "
    "not expected to exist there and mean indices carry no mod 2N structure, "
    "so resonances are not computed"
)


@dataclass(frozen=True)
class MeanIndexProblem:
    """
    Mean indices Delta_1..Delta_m of the fixed points of a Hamiltonian map.

    N is None for an infinite minimal Chern number. For finite N the stored
    deltas are the canonical representatives modulo 2N.
    """

    n: int
    N: Optional[int]
    deltas: Tuple[ExactScalar, ...]
    labels: Tuple[str, ...] = ()
    symbols: SymbolTable = field(default_factory=SymbolTable)

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise InputFormatError(f"n must be a positive integer, got {self.n!r}")
        if self.N is not None and (not isinstance(self.N, int) or self.N < 1):
            raise InputFormatError(f"N must be a positive integer or infinite, got {self.N!r}")
        deltas = tuple(self.deltas)
        if not deltas:
            raise InputFormatError("A problem needs at least one mean index")
        if self.N is not None:
            deltas = tuple(reduce_mod(delta, 2 * self.N).representative for delta in deltas)
        labels = tuple(self.labels) or tuple(f"x{i + 1}" for i in range(len(deltas)))
        if len(labels) != len(deltas):
            raise InputFormatError(f"{len(labels)} labels given for {len(deltas)} mean indices")
        object.__setattr__(self, "deltas", deltas)
        object.__setattr__(self, "labels", labels)

    @property
    def m(self) -> int:
        return len(self.deltas)

    @property
    def is_finite(self) -> bool:
        return self.N is not None

    @property
    def modulus(self) -> int:
        """2N"""
        if self.N is None:
            raise InfiniteChernError(INFINITE_N_MESSAGE)
        return 2 * self.N

    @property
    def circle_values(self) -> Tuple[CircleValue, ...]:
        return tuple(reduce_mod(delta, self.modulus) for delta in self.deltas)

    def subproblem(self, indices: Sequence[int]) -> "MeanIndexProblem":
        """The problem restricted to the given positions (must be nonempty)"""
        return MeanIndexProblem(
            self.n,
            self.N,
            tuple(self.deltas[i] for i in indices),
            tuple(self.labels[i] for i in indices),
            self.symbols
        )

    def float_deltas(self) -> List[float]:
        return [evaluate_float(delta, self.symbols) for delta in self.deltas]


@dataclass(frozen=True)
class GammaStructure:
    """Resonance lattice and the structure of the orbit closure it annihilates"""

    resonance_lattice: IntegerLattice
    saturation: IntegerLattice
    rank_R: int
    codim_Gamma: int
    dim_Gamma0: int
    torsion_order: int
    invariant_factors: Tuple[int, ...] = ()

    def to_report(self) -> dict:
        return {
            "resonance_lattice": self.resonance_lattice,
            "saturation": self.saturation,
            "rank_R": self.rank_R,
            "codim_Gamma": self.codim_Gamma,
            "dim_Gamma0": self.dim_Gamma0,
            "torsion_order": self.torsion_order,
            "invariant_factors": list(self.invariant_factors)
        }


@dataclass(frozen=True)
class TheoremOneReport:
    """Verdicts on a resonance lattice; nothing here is ever raised"""

    filter: str
    labels: Tuple[str, ...]
    vacuous: bool
    nontrivial: bool
    rank: int
    rank_one: bool
    basis: Tuple[Tuple[int, ...], ...]
    generator: Optional[Tuple[int, ...]] = None
    generator_nonnegative: Optional[bool] = None
    primitive_generator: Optional[Tuple[int, ...]] = None
    multiplicity: Optional[int] = None
    sum_value: Optional[int] = None
    bound_value: Optional[Fraction] = None
    sum_bound_satisfied: Optional[bool] = None
    duplicate_pairs: Tuple[Tuple[int, int], ...] = ()
    consistent: bool = True
    warnings: Tuple[str, ...] = ()
    filtered_variant: Optional["TheoremOneReport"] = None

    def to_report(self) -> dict:
        return {
            "filter": self.filter,
            "labels": list(self.labels),
            "vacuous": self.vacuous,
            "nontrivial": self.nontrivial,
            "rank": self.rank,
            "rank_one": self.rank_one,
            "basis": [list(row) for row in self.basis],
            "generator": None if self.generator is None else list(self.generator),
            "generator_nonnegative": self.generator_nonnegative,
            "primitive_generator": None if self.primitive_generator is None else list(self.primitive_generator),
            "multiplicity": self.multiplicity,
            "sum_value": self.sum_value,
            "bound_value": self.bound_value,
            "sum_bound_satisfied": self.sum_bound_satisfied,
            "duplicate_pairs": [list(pair) for pair in self.duplicate_pairs],
            "consistent": self.consistent,
            "warnings": list(self.warnings),
            "filtered_variant": self.filtered_variant
        }

    @property
    def all_consistent(self) -> bool:
        """Conjunction over this report and its filtered variant"""
        if self.filtered_variant is not None and not self.filtered_variant.all_consistent:
            return False
        return self.consistent


@dataclass(frozen=True)
class DiagonalBound:
    """Position of the diagonal point t = 1/sum(a) relative to the prohibited arc"""

    t_value: Fraction
    threshold: Fraction
    inside_prohibited: bool

    def to_report(self) -> dict:
        return {
            "t_value": self.t_value,
            "threshold": self.threshold,
            "inside_prohibited": self.inside_prohibited
        }


@dataclass(frozen=True)
class CorollaryCheck:
    """Rank-one diagnosis for CP^n: all-nonzero generators must be (1,...,1) on n+1 points"""

    applicable: bool
    consistent: bool
    reason: str

    def to_report(self) -> dict:
        return {"applicable": self.applicable, "consistent": self.consistent, "reason": self.reason}


@dataclass(frozen=True)
class ScanReport:
    """Result of scanning k*Delta/2N mod 1 for points of the prohibited cube"""

    k_max: int
    threshold: float
    violation_k: Optional[int]
    violation_point: Optional[Tuple[float, ...]]
    min_margin: float
    histogram_counts: Tuple[int, ...]
    histogram_edges: Tuple[float, ...]

    @property
    def has_violation(self) -> bool:
        return self.violation_k is not None

    def to_report(self) -> dict:
        return {
            "k_max": self.k_max,
            "threshold": self.threshold,
            "violation": None if self.violation_k is None else {
                "k": self.violation_k,
                "point": list(self.violation_point)
            },
            "min_margin": self.min_margin,
            "histogram": {
                "counts": list(self.histogram_counts),
                "edges": list(self.histogram_edges)
            }
        }


def resonance_lattice_exact(problem: MeanIndexProblem) -> IntegerLattice:
    """
    The full resonance lattice of an exact problem

    Writing Delta_i = r_i + sum_k q_ik beta_k, a resonance must kill every
    symbol coefficient (an integer kernel) and satisfy a.r = 0 mod 2N on
    that kernel (a congruence in kernel coordinates).

    Args:
        problem: Problem with finite N

    Returns:
        IntegerLattice R in Z^m

    Raises:
        InfiniteChernError: If N is infinite
    """
    modulus = problem.modulus
    m = problem.m
    _, symbol_matrix, rationals = coefficient_matrix(problem.deltas)
    kernel = integer_kernel(list(symbol_matrix), m)
    if kernel.rank == 0:
        return zero_lattice(m)

    # Rational parts seen in kernel coordinates, scaled to integers
    pairings = [sum((Fraction(b) * r for b, r in zip(row, rationals)), Fraction(0)) for row in kernel.basis]
    scale = math.lcm(*(p.denominator for p in pairings))
    v = [int(p * scale) for p in pairings]
    congruence = congruence_kernel(v, modulus * scale)

    rows = [
        [sum(c * kernel.basis[j][i] for j, c in enumerate(coords)) for i in range(m)]
        for coords in congruence.basis
    ]
    lattice = lattice_from_rows(rows, m)
    logger.debug(f"Resonance lattice of rank {lattice.rank} in Z^{m}")
    return lattice


def resonance_lattice_numeric(deltas: Sequence[float], modulus: float,
                              coeff_bound: int = DEFAULT_COEFF_BOUND,
                              tol: float = DEFAULT_TOL) -> List[RelationCandidate]:
    """
    Resonance candidates for float mean indices

    Args:
        deltas: Float mean indices
        modulus: 2N as a float
        coeff_bound: Bound on max |a_i|
        tol: Residual tolerance

    Returns:
        Verified RelationCandidate list sorted by residual
    """
    return integer_relation(deltas, modulus, coeff_bound, tol)


def _symbol_rank(problem: MeanIndexProblem) -> int:
    _, symbol_matrix, _ = coefficient_matrix(problem.deltas)
    if not symbol_matrix:
        return 0
    return Matrix([
        [Rational(entry.numerator, entry.denominator) for entry in row] for row in symbol_matrix
    ]).rank()


def gamma_structure(problem: MeanIndexProblem) -> GammaStructure:
    """
    Structure of the closure of the orbit of Delta/2N

    codim Gamma is computed twice: as rk R, and as m minus the rank of the
    symbol coefficients (the dimension of the identity component). The
    torsion order is likewise computed as |R0/R| and as the torsion of Z^m/R.

    Raises:
        InternalConsistencyError: If the two computations disagree or the
            torsion quotient is not cyclic
    """
    lattice = resonance_lattice_exact(problem)
    saturated = saturation(lattice)
    index = lattice_index(lattice, saturated)

    dim_gamma0 = _symbol_rank(problem)
    if problem.m - dim_gamma0 != lattice.rank:
        raise InternalConsistencyError(
            f"codim Gamma = {problem.m - dim_gamma0} but rk R = {lattice.rank}"
        )
    if not index.is_finite:
        raise InternalConsistencyError("R has infinite index in its saturation")
    if lattice.rank:
        torsion = math.prod(smith_normal_form(lattice.basis).invariant_factors)
    else:
        torsion = 1
    if torsion != index.index:
        raise InternalConsistencyError(
            f"Torsion of Z^m/R is {torsion} but |R0/R| = {index.index}"
        )
    if not index.is_cyclic:
        raise InternalConsistencyError(
            f"R0/R is not cyclic: invariant factors {index.invariant_factors}"
        )

    return GammaStructure(
        resonance_lattice=lattice,
        saturation=saturated,
        rank_R=lattice.rank,
        codim_Gamma=lattice.rank,
        dim_Gamma0=dim_gamma0,
        torsion_order=index.index,
        invariant_factors=tuple(d for d in index.invariant_factors if d != 1)
    )


def sign_normalize(vector: Sequence[int]) -> Tuple[int, ...]:
    """Flip the sign so the first nonzero entry is positive"""
    for entry in vector:
        if entry != 0:
            return tuple(vector) if entry > 0 else tuple(-e for e in vector)
    return tuple(vector)


def filter_indices(problem: MeanIndexProblem, filter_name: str) -> List[int]:
    """
    Positions kept by a filter

    Args:
        problem: Problem to filter
        filter_name: none, drop-zero or drop-rational

    Returns:
        Kept positions in order
    """
    if filter_name not in SUPPORTED_FILTERS:
        raise DomainError(f"Unknown filter {filter_name!r}; expected one of {SUPPORTED_FILTERS}")
    if filter_name == FILTER_NONE:
        return list(range(problem.m))
    if filter_name == FILTER_DROP_ZERO:
        return [i for i, delta in enumerate(problem.deltas) if not delta.is_zero]
    return [i for i, delta in enumerate(problem.deltas) if not delta.is_rational]


def _duplicate_pairs(problem: MeanIndexProblem) -> Tuple[Tuple[int, int], ...]:
    deltas = problem.deltas
    return tuple(
        (i, j) for i in range(len(deltas)) for j in range(i + 1, len(deltas)) if deltas[i] == deltas[j]
    )


def _analyze(problem: MeanIndexProblem, filter_name: str, warnings: List[str]) -> TheoremOneReport:
    n, N = problem.n, problem.N
    lattice = resonance_lattice_exact(problem)
    rank = lattice.rank
    duplicates = _duplicate_pairs(problem)
    bound = Fraction(N, N - n) if N > n else None

    if rank != 1:
        if rank > 1:
            logger.debug("Rank above one: reporting the HNF basis without sign verdicts")
        return TheoremOneReport(
            filter=filter_name,
            labels=problem.labels,
            vacuous=False,
            nontrivial=rank >= 1,
            rank=rank,
            rank_one=False,
            basis=lattice.basis,
            bound_value=bound,
            duplicate_pairs=duplicates,
            consistent=rank >= 1,
            warnings=tuple(warnings)
        )

    generator = sign_normalize(lattice.basis[0])
    content = math.gcd(*generator)
    primitive = tuple(entry // content for entry in generator)
    # The irrational-only statement is about the primitive vector b with a = r*b
    verdict_vector = primitive if filter_name == FILTER_DROP_RATIONAL else generator
    nonnegative = all(entry >= 0 for entry in verdict_vector)
    total = sum(verdict_vector)
    satisfied = None if bound is None else Fraction(total) <= bound
    consistent = nonnegative and satisfied is not False

    return TheoremOneReport(
        filter=filter_name,
        labels=problem.labels,
        vacuous=False,
        nontrivial=True,
        rank=1,
        rank_one=True,
        basis=lattice.basis,
        generator=generator,
        generator_nonnegative=nonnegative,
        primitive_generator=primitive,
        multiplicity=content,
        sum_value=total,
        bound_value=bound,
        sum_bound_satisfied=satisfied,
        duplicate_pairs=duplicates,
        consistent=consistent,
        warnings=tuple(warnings)
    )


def _vacuous_report(filter_name: str, warnings: List[str]) -> TheoremOneReport:
    return TheoremOneReport(
        filter=filter_name,
        labels=(),
        vacuous=True,
        nontrivial=False,
        rank=0,
        rank_one=False,
        basis=(),
        consistent=True,
        warnings=tuple(warnings)
    )


def theorem_one_report(problem: MeanIndexProblem, filter_name: str = FILTER_NONE) -> TheoremOneReport:
    """
    Evaluate the resonance verdicts for a problem

    The report always describes the full problem. With a filter other than
    "none" the analysis of the filtered indices is attached as
    filtered_variant.

    Args:
        problem: Exact problem with finite N
        filter_name: none, drop-zero or drop-rational

    Returns:
        TheoremOneReport
    """
    warnings = []
    if problem.N is None:
        raise InfiniteChernError(INFINITE_N_MESSAGE)
    if problem.N < problem.n + 1:
        message = f"N = {problem.N} < n + 1 = {problem.n + 1}: verdicts are outside their hypotheses"
        logger.warning(message)
        warnings.append(message)

    report = _analyze(problem, FILTER_NONE, list(warnings))
    if filter_name == FILTER_NONE:
        return report

    kept = filter_indices(problem, filter_name)
    if not kept:
        message = f"Filter {filter_name} removed every mean index"
        logger.warning(message)
        variant = _vacuous_report(filter_name, warnings + [message])
    else:
        variant = _analyze(problem.subproblem(kept), filter_name, list(warnings))

    logger.info(
        f"Resonance verdicts: rank {report.rank}, consistent={report.consistent}, "
        f"{filter_name} variant consistent={variant.consistent}"
    )
    return replace(report, filtered_variant=variant)


def diagonal_bound_check(generator: Sequence[int], n: int, N: int) -> DiagonalBound:
    """
    Where the diagonal point of Gamma sits relative to the prohibited arc

    The diagonal subgroup meets Gamma at t = 1/sum(a) (up to sign); a perfect
    map forces t >= 1 - n/N.

    Args:
        generator: Nonnegative integer generator
        n: Half-dimension
        N: Minimal Chern number

    Returns:
        DiagonalBound with exact t

    Raises:
        DomainError: For zero or negative generators
    """
    generator = [int(entry) for entry in generator]
    if any(entry < 0 for entry in generator):
        raise DomainError(f"Diagonal bound needs a nonnegative generator, got {generator}")
    total = sum(generator)
    if total < 1:
        raise DomainError("Diagonal bound needs a nonzero generator")
    t_value = Fraction(1, total)
    threshold = 1 - Fraction(n, N)
    return DiagonalBound(t_value, threshold, t_value < threshold)


def cpn_corollary_check(problem: MeanIndexProblem, report: TheoremOneReport) -> CorollaryCheck:
    """
    Rank-one diagnosis on CP^n (N = n + 1)

    When the generator has no zero component, a perfect map must have
    exactly n + 1 fixed points and the generator must be (1, ..., 1).
    """
    if problem.N != problem.n + 1:
        return CorollaryCheck(False, True, "N != n + 1")
    if not report.rank_one:
        return CorollaryCheck(False, True, "resonance lattice is not of rank one")
    if any(entry == 0 for entry in report.generator):
        return CorollaryCheck(False, True, "generator has a zero component")
    if problem.m != problem.n + 1:
        return CorollaryCheck(True, False, f"m = {problem.m} fixed points instead of {problem.n + 1}")
    if report.generator != (1,) * problem.m:
        return CorollaryCheck(True, False, f"generator {report.generator} is not (1,...,1)")
    return CorollaryCheck(True, True, "sum of mean indices vanishes")


def _split_rotation(delta: ExactScalar, modulus: int, table: SymbolTable) -> Tuple[Fraction, float, float]:
    """
    Split Delta/2N into an exact rational part and a two-float irrational part

    The high float carries 26 fractional bits, so k*hi is exact for every k
    below 2**27 and the scan loses no precision to large k.
    """
    rational = (delta.rational_part / modulus) % 1
    irrational = ExactScalar(0, delta.irrational_coeffs)
    if irrational.is_zero:
        return rational, 0.0, 0.0
    with mpmath.workdps(table.precision):
        value = evaluate_mp(irrational, table) / modulus
        value = value - mpmath.floor(value)
        hi = mpmath.floor(value * 2 ** 26) / 2 ** 26
        lo = value - hi
        return rational, float(hi), float(lo)


def _scan_chunk(start: int, stop: int, parts: List[Tuple[Fraction, float, float]],
                threshold: float, tol: float) -> Tuple[Optional[int], Optional[np.ndarray], np.ndarray]:
    ks = np.arange(start, stop, dtype=np.int64)
    columns = []
    for rational, hi, lo in parts:
        p, q = rational.numerator, rational.denominator
        if q * stop < 2 ** 62:
            rational_frac = ((ks * p) % q) / q
        else:
            rational_frac = np.array([(int(k) * p % q) / q for k in ks], dtype=float)
        theta = np.mod(np.mod(ks * hi, 1.0) + ks * lo + rational_frac, 1.0)
        theta[theta >= 1.0 - tol] = 0.0
        columns.append(theta)
    points = np.stack(columns, axis=1)
    minimum = points.min(axis=1)
    margins = threshold - minimum
    inside = np.nonzero(minimum > threshold + tol)[0]
    if inside.size:
        first = int(inside[0])
        return start + first, points[first], margins
    return None, None, margins


def prohibited_region_scan(problem: MeanIndexProblem, k_max: int,
                           witnesses: Optional[SymbolTable] = None,
                           threads: Optional[int] = None,
                           tol: float = BOUNDARY_TOL) -> ScanReport:
    """
    Look for k <= k_max with every component of k*Delta/2N mod 1 above n/N

    A component within tol of n/N, or within tol of 1, counts as lying in
    the closed arc [0, n/N].

    Args:
        problem: Problem with finite N
        k_max: Last iterate to scan
        witnesses: Symbol witnesses (defaults to the problem's table)
        threads: Worker count (defaults to RESOCHI_THREADS or 1)
        tol: Boundary tolerance

    Returns:
        ScanReport with the smallest violating k, if any

    Raises:
        InfiniteChernError: If N is infinite
        UnresolvedSymbolError: If a symbol has no witness
    """
    if k_max < 1:
        raise DomainError(f"k_max must be at least 1, got {k_max}")
    modulus = problem.modulus
    table = problem.symbols if witnesses is None else witnesses.merged(problem.symbols)
    parts = [_split_rotation(delta, modulus, table) for delta in problem.deltas]
    threshold = problem.n / problem.N

    if threads is None:
        threads = int(os.environ.get(APP_THREADS_ENV, DEFAULT_THREADS))
    threads = max(1, threads)

    chunks = [(start, min(start + SCAN_CHUNK_SIZE, k_max + 1)) for start in range(1, k_max + 1, SCAN_CHUNK_SIZE)]
    if threads == 1 or len(chunks) == 1:
        results = [_scan_chunk(start, stop, parts, threshold, tol) for start, stop in chunks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            results = list(executor.map(lambda c: _scan_chunk(c[0], c[1], parts, threshold, tol), chunks))

    violation_k, violation_point = None, None
    for k, point, _ in results:
        if k is not None and (violation_k is None or k < violation_k):
            violation_k, violation_point = k, tuple(float(value) for value in point)

    margins = np.concatenate([margin for _, _, margin in results])
    counts, edges = np.histogram(margins, bins=SCAN_HISTOGRAM_BINS)

    if violation_k is not None:
        logger.info(f"Prohibited region reached at k = {violation_k}")
    else:
        logger.info(f"No prohibited point for k <= {k_max}")

    return ScanReport(
        k_max=k_max,
        threshold=threshold,
        violation_k=violation_k,
        violation_point=violation_point,
        min_margin=float(margins.min()),
        histogram_counts=tuple(int(c) for c in counts),
        histogram_edges=tuple(float(e) for e in edges)
    )


def numeric_agreement(problem: MeanIndexProblem, coeff_bound: int = DEFAULT_COEFF_BOUND,
                      tol: float = DEFAULT_TOL) -> Tuple[bool, List[Tuple[int, ...]]]:
    """
    Compare the exact lattice with the numeric candidates

    Every numeric candidate must be an exact resonance, and every exact
    basis vector within coeff_bound must lie in the span of the candidates.

    Returns:
        (agreement, offending vectors)
    """
    lattice = resonance_lattice_exact(problem)
    candidates = resonance_lattice_numeric(problem.float_deltas(), float(problem.modulus), coeff_bound, tol)
    offending = [c.vector for c in candidates if not lattice.contains(c.vector)]
    found = lattice_from_rows([c.vector for c in candidates], problem.m)
    for row in lattice.basis:
        if max(abs(entry) for entry in row) <= coeff_bound and not found.contains(row):
            offending.append(sign_normalize(row))
    return not offending, offending
