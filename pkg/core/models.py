"""
Model generators for resochi

A rotation-block engine turns a linearized return map into a Conley-Zehnder
iterate law. Fixed conventions, one block at a time:

    elliptic(theta)            2*floor(k*theta) + 1     Delta += 2*theta
    positive_hyperbolic        0                        Delta += 0
    negative_hyperbolic(w)     (2w + 1)*k               Delta += 2w + 1
    winding                    2*winding*k              Delta += 2*winding

An orbit is bad exactly when it has an odd number of negative hyperbolic
blocks. On top of the engine sit the ellipsoid, CP^n and Ustilovsky models
and the random generators used by the invariant suite.
"""

import math
import random
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from core.contact import ReebOrbit, ReebOrbitSystem
from core.exactnum import ExactScalar, SymbolTable
from core.resonance import MeanIndexProblem
from utils.constants import (
    BLOCK_ELLIPTIC,
    BLOCK_NEGATIVE_HYPERBOLIC,
    BLOCK_POSITIVE_HYPERBOLIC,
    DEGENERACY_TOL,
    MODE_FORMAL,
    MODE_NUMERIC,
    ORBIT_BAD,
    ORBIT_GOOD
)
from utils.exceptions import (
    DegenerateIterateError,
    DegenerateSpectrumError,
    DomainError,
    InputFormatError,
    InternalConsistencyError
)

# Set up logging
logger = logging.getLogger(__name__)

Number = Union[Fraction, float]


@dataclass(frozen=True)
class RotationBlock:
    """One block of a linearized return map"""

    kind: str
    theta: Optional[Number] = None
    eigenvalue: Optional[float] = None
    winding: int = 0

    def __post_init__(self):
        if self.kind == BLOCK_ELLIPTIC:
            if self.theta is None or self.theta <= 0:
                raise InputFormatError(f"Elliptic block needs a positive rotation number, got {self.theta!r}")
        elif self.kind == BLOCK_POSITIVE_HYPERBOLIC:
            if self.eigenvalue is not None and self.eigenvalue <= 1:
                raise InputFormatError(f"Positive hyperbolic eigenvalue must exceed 1, got {self.eigenvalue}")
        elif self.kind == BLOCK_NEGATIVE_HYPERBOLIC:
            if self.eigenvalue is not None and self.eigenvalue >= -1:
                raise InputFormatError(f"Negative hyperbolic eigenvalue must be below -1, got {self.eigenvalue}")
            if not isinstance(self.winding, int) or self.winding < 0:
                raise InputFormatError(f"Negative hyperbolic winding must be a nonnegative integer, got {self.winding!r}")
        else:
            raise InputFormatError(f"Unknown block kind {self.kind!r}")

    def to_document(self) -> dict:
        document = {"kind": self.kind}
        if self.kind == BLOCK_ELLIPTIC:
            document["theta"] = _number_to_document(self.theta)
        if self.eigenvalue is not None:
            document["eigenvalue"] = self.eigenvalue
        if self.kind == BLOCK_NEGATIVE_HYPERBOLIC:
            document["winding"] = self.winding
        return document


def elliptic(theta: Number) -> RotationBlock:
    return RotationBlock(BLOCK_ELLIPTIC, theta=theta)


def positive_hyperbolic(eigenvalue: float = 2.0) -> RotationBlock:
    return RotationBlock(BLOCK_POSITIVE_HYPERBOLIC, eigenvalue=eigenvalue)


def negative_hyperbolic(winding: int = 0, eigenvalue: float = -2.0) -> RotationBlock:
    return RotationBlock(BLOCK_NEGATIVE_HYPERBOLIC, eigenvalue=eigenvalue, winding=winding)


def _number_to_document(value: Number):
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}" if value.denominator != 1 else str(value.numerator)
    return value


@dataclass(frozen=True)
class LinearizedReturnMap:
    """
    Block decomposition of the linearized return map of a Reeb orbit.

    strict refuses rational elliptic rotation numbers outright (CF1).
    """

    blocks: Tuple[RotationBlock, ...]
    winding: int = 0
    strict: bool = False

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        if not isinstance(self.winding, int):
            raise InputFormatError(f"Map winding must be an integer, got {self.winding!r}")
        if self.strict:
            for block in self.blocks:
                if block.kind == BLOCK_ELLIPTIC and isinstance(block.theta, Fraction):
                    raise DegenerateIterateError(f"Rational rotation number {block.theta} is degenerate")

    @property
    def is_bad(self) -> bool:
        return sum(1 for block in self.blocks if block.kind == BLOCK_NEGATIVE_HYPERBOLIC) % 2 == 1

    @property
    def parity_class(self) -> str:
        return ORBIT_BAD if self.is_bad else ORBIT_GOOD

    @property
    def mean_index(self) -> Number:
        """Delta = lim mu(x^k)/k"""
        total = Fraction(2 * self.winding)
        for block in self.blocks:
            if block.kind == BLOCK_ELLIPTIC:
                total = total + 2 * block.theta
            elif block.kind == BLOCK_NEGATIVE_HYPERBOLIC:
                total = total + (2 * block.winding + 1)
        return total

    def to_document(self) -> dict:
        return {
            "type": "blocks",
            "winding": self.winding,
            "strict": self.strict,
            "blocks": [block.to_document() for block in self.blocks]
        }


def _floor_nondegenerate(product: Number, k: int) -> int:
    if isinstance(product, Fraction):
        if product.denominator == 1:
            raise DegenerateIterateError(f"Iterate {k} is degenerate: k*theta = {product} is an integer")
        return math.floor(product)
    nearest = round(product)
    if abs(product - nearest) < DEGENERACY_TOL:
        raise DegenerateIterateError(f"Iterate {k} is degenerate: k*theta = {product:.12g} is within tolerance of an integer")
    return math.floor(product)


def index_engine(return_map: LinearizedReturnMap, k: int) -> int:
    """
    mu_CZ(x^k) for the block decomposition

    Args:
        return_map: Linearized return map
        k: Positive iterate

    Returns:
        Conley-Zehnder index of the k-th iterate

    Raises:
        DomainError: If k < 1
        DegenerateIterateError: If k*theta is an integer for an elliptic block
    """
    if k < 1:
        raise DomainError(f"Iterate must be positive, got {k}")
    total = 2 * return_map.winding * k
    for block in return_map.blocks:
        if block.kind == BLOCK_ELLIPTIC:
            total += 2 * _floor_nondegenerate(k * block.theta, k) + 1
        elif block.kind == BLOCK_NEGATIVE_HYPERBOLIC:
            total += (2 * block.winding + 1) * k
    return total


class BlockLaw:
    """Iterate law backed by the engine"""

    def __init__(self, return_map: LinearizedReturnMap):
        self.return_map = return_map

    def __call__(self, k: int) -> int:
        return index_engine(self.return_map, k)

    def to_document(self) -> dict:
        return self.return_map.to_document()


def orbit_from_map(name: str, return_map: LinearizedReturnMap, sigma: Optional[int] = None) -> ReebOrbit:
    """A ReebOrbit whose law, mean index and class come from the engine"""
    delta = return_map.mean_index
    mean_index = ExactScalar(delta) if isinstance(delta, Fraction) else float(delta)
    return ReebOrbit(name, return_map.parity_class, mean_index, BlockLaw(return_map), sigma)


@dataclass(frozen=True)
class EllipsoidSpec:
    """Weights a_1..a_n; formal mode takes Fractions, numeric mode floats"""

    weights: Tuple[Number, ...]
    mode: str = MODE_FORMAL
    k_max: Optional[int] = None

    def __post_init__(self):
        weights = tuple(self.weights)
        if len(weights) < 2:
            raise DomainError("An ellipsoid needs at least two weights")
        if self.mode == MODE_FORMAL:
            weights = tuple(Fraction(weight) for weight in weights)
        elif self.mode == MODE_NUMERIC:
            weights = tuple(float(weight) for weight in weights)
        else:
            raise DomainError(f"Unknown ellipsoid mode {self.mode!r}")
        if any(weight <= 0 for weight in weights):
            raise DomainError(f"Ellipsoid weights must be positive, got {weights}")
        object.__setattr__(self, "weights", weights)

    @property
    def n(self) -> int:
        return len(self.weights)


def ellipsoid_cz(weights: Sequence[Number], j: int, k: int) -> int:
    """
    n - 1 + 2 * sum_i floor(k * a_j / a_i) for the k-th iterate of orbit j

    Raises:
        DegenerateIterateError: If k*a_j/a_i is an integer for some i != j
    """
    if k < 1:
        raise DomainError(f"Iterate must be positive, got {k}")
    n = len(weights)
    total = n - 1 + 2 * k
    for i, weight in enumerate(weights):
        if i != j:
            total += 2 * _floor_nondegenerate(k * weights[j] / weight, k)
    return total


def ellipsoid_map(weights: Sequence[Number], j: int) -> LinearizedReturnMap:
    """Elliptic blocks theta_i = a_j/a_i for i != j and winding 1"""
    blocks = tuple(elliptic(weights[j] / weight) for i, weight in enumerate(weights) if i != j)
    return LinearizedReturnMap(blocks, winding=1)


def ellipsoid_system(spec: EllipsoidSpec, cross_check: int = 4) -> ReebOrbitSystem:
    """
    The n simple orbits of an irrational ellipsoid in C^n

    Each law is built by the engine and compared with the floor formula for
    the first few iterates. In numeric mode with k_max set, near-degenerate
    ratios up to k_max are reported as DegenerateIterateError.

    Args:
        spec: Ellipsoid weights and mode
        cross_check: Iterates compared against the floor formula

    Returns:
        ReebOrbitSystem of good orbits with sigma = +1
    """
    weights = spec.weights
    orbits = []
    for j in range(spec.n):
        return_map = ellipsoid_map(weights, j)
        for k in range(1, cross_check + 1):
            try:
                engine, formula = index_engine(return_map, k), ellipsoid_cz(weights, j, k)
            except DegenerateIterateError:
                continue
            if engine != formula:
                raise InternalConsistencyError(
                    f"Engine gives {engine} but the floor formula gives {formula} for orbit {j + 1}, k = {k}"
                )
        if spec.mode == MODE_NUMERIC and spec.k_max:
            _check_numeric_degeneracy(weights, j, spec.k_max)
        orbits.append(orbit_from_map(f"gamma{j + 1}", return_map, sigma=1))
    logger.debug(f"Ellipsoid system with weights {weights} ({spec.mode})")
    return ReebOrbitSystem(spec.n, tuple(orbits), homotopy_note="contractible")


def _check_numeric_degeneracy(weights: Sequence[float], j: int, k_max: int) -> None:
    for i, weight in enumerate(weights):
        if i == j:
            continue
        ratio = weights[j] / weight
        for k in range(1, k_max + 1):
            product = k * ratio
            if abs(product - round(product)) < DEGENERACY_TOL:
                raise DegenerateIterateError(
                    f"Weights a{j + 1}/a{i + 1} = {ratio:.12g} are degenerate at iterate {k}"
                )


def cpn_mean_indices(lambdas: Sequence[ExactScalar], t: Fraction = Fraction(1),
                     symbols: Optional[SymbolTable] = None) -> MeanIndexProblem:
    """
    Mean indices of the quadratic flow sum lambda_j |z_j|^2 on CP^n

    Delta_i = t * (sum_j lambda_j - (n+1) lambda_i) with N = n + 1.

    Raises:
        DegenerateSpectrumError: If two lambdas coincide
    """
    lambdas = [value if isinstance(value, ExactScalar) else ExactScalar(Fraction(value)) for value in lambdas]
    if len(lambdas) < 2:
        raise DomainError("CP^n needs at least two coefficients")
    for i in range(len(lambdas)):
        for j in range(i + 1, len(lambdas)):
            if lambdas[i] == lambdas[j]:
                raise DegenerateSpectrumError(f"lambda{i} = lambda{j} = {lambdas[i]}")
    n = len(lambdas) - 1
    t = Fraction(t)
    if t <= 0:
        raise DomainError(f"Time must be positive, got {t}")
    total = ExactScalar()
    for value in lambdas:
        total = total + value
    deltas = [(total - value * (n + 1)) * t for value in lambdas]
    check = ExactScalar()
    for delta in deltas:
        check = check + delta
    if not check.is_zero:
        raise InternalConsistencyError(f"Mean indices of CP^{n} do not sum to zero: {check}")
    return MeanIndexProblem(
        n=n,
        N=n + 1,
        deltas=tuple(deltas),
        labels=tuple(f"p{i}" for i in range(n + 1)),
        symbols=symbols or SymbolTable()
    )


@dataclass(frozen=True)
class UstilovskySpec:
    n: int
    p: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 3 or self.n % 2 == 0:
            raise DomainError(f"n must be an odd integer >= 3, got {self.n!r}")
        if not isinstance(self.p, int) or self.p < 1 or self.p % 8 not in (1, 7):
            raise DomainError(f"p must be a positive integer congruent to 1 or 7 mod 8, got {self.p!r}")


def ustilovsky_chi(spec: UstilovskySpec) -> Tuple[Fraction, Fraction]:
    """(chi_plus, chi_minus) = ((p(n-1)+1) / (2(p(n-2)+2)), 0)"""
    n, p = spec.n, spec.p
    return Fraction(p * (n - 1) + 1, 2 * (p * (n - 2) + 2)), Fraction(0)


def admissible_p(count: int) -> List[int]:
    """First count positive integers p with p = +-1 mod 8"""
    values = []
    p = 1
    while len(values) < count:
        if p % 8 in (1, 7):
            values.append(p)
        p += 1
    return values


def planted_resonance_problem(a: Sequence[int], n: int, N: int) -> MeanIndexProblem:
    """
    A problem whose resonance lattice is spanned by the primitive vector a

    Delta_i = beta_i for i != j and Delta_j = (2N - sum_{i != j} a_i beta_i) / a_j
    with j the last nonzero position; zero entries of a get their own symbol.
    """
    a = [int(entry) for entry in a]
    nonzero = [i for i, entry in enumerate(a) if entry != 0]
    if not nonzero:
        raise DomainError("The planted vector must be nonzero")
    j = nonzero[-1]
    deltas = []
    partial = ExactScalar()
    for i, entry in enumerate(a):
        if i == j:
            deltas.append(None)
            continue
        beta = ExactScalar.symbol(f"beta{i + 1}")
        deltas.append(beta)
        partial = partial + beta * entry
    deltas[j] = (ExactScalar(Fraction(2 * N)) - partial) / a[j]
    return MeanIndexProblem(n, N, tuple(deltas))


def random_problem(rng: random.Random, m_max: int = 6) -> MeanIndexProblem:
    """
    Random mixed rational/symbolic problem

    Each index is a small rational, or a rational plus a small combination of
    one to three shared symbols.
    """
    m = rng.randint(1, m_max)
    n = rng.randint(1, 3)
    N = rng.randint(n + 1, n + 4)
    symbol_count = rng.randint(0, 3)
    deltas = []
    for _ in range(m):
        rational = Fraction(rng.randint(0, 4 * N), rng.randint(1, 4))
        coeffs = {}
        if symbol_count and rng.random() < 0.7:
            for s in range(symbol_count):
                if rng.random() < 0.6:
                    coeffs[f"beta{s + 1}"] = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
        deltas.append(ExactScalar.of(rational, coeffs))
    return MeanIndexProblem(n, N, tuple(deltas))


def random_block_system(rng: random.Random, n: int, orbit_count: int) -> ReebOrbitSystem:
    """
    Synthetic good/bad orbit system with rational data and Delta >= 2

    Every map has n-1 blocks and winding 1 or 2. Elliptic rotation numbers
    are rationals over a prime above 10^5, so the first 10^5 iterates are
    nondegenerate.
    """
    orbits = []
    for index in range(orbit_count):
        blocks = []
        for _ in range(n - 1):
            choice = rng.random()
            if choice < 0.5:
                denominator = rng.choice([100_003, 100_019, 100_043])
                numerator = rng.randint(1, 2 * denominator - 1)
                if numerator == denominator:
                    numerator += 1
                blocks.append(elliptic(Fraction(numerator, denominator)))
            elif choice < 0.75:
                blocks.append(positive_hyperbolic(1.1 + rng.random() * 3))
            else:
                blocks.append(negative_hyperbolic(rng.randint(0, 1)))
        return_map = LinearizedReturnMap(tuple(blocks), winding=rng.randint(1, 2))
        orbits.append(orbit_from_map(f"x{index + 1}", return_map))
    return ReebOrbitSystem(n, tuple(orbits), homotopy_note="synthetic")
