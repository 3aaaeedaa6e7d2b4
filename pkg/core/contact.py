"""
Reeb orbit systems and mean Euler characteristics

A system lists the simple periodic Reeb orbits of a contact manifold of
dimension 2n-1 with their mean indices and Conley-Zehnder iterate laws.
The mean Euler characteristic is computed two ways: the closed-form sum of
sigma/|Delta| over the orbits, and the alternating count of generators of
the chain complex truncated at degree N, divided by N.
"""

import math
import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from core.exactnum import ExactScalar, SymbolTable, evaluate_float
from utils.constants import (
    DIRECTION_NEGATIVE,
    DIRECTION_POSITIVE,
    ENVELOPE_TOL,
    ORBIT_BAD,
    ORBIT_GOOD,
    PARITY_CHECK_ITERATES,
    SUPPORTED_DIRECTIONS
)
from utils.exceptions import (
    DegenerateIterateError,
    DomainError,
    EnumerationBoundError,
    ExtrapolationError,
    InputFormatError,
    MeanIndexZeroError
)

# Set up logging
logger = logging.getLogger(__name__)

Value = Union[Fraction, float]
IterateLaw = Callable[[int], int]


class TableLaw:
    """
    Conley-Zehnder indices of the first iterates, given as a table.

    Beyond the table an index is certified only when exactly one integer of
    the orbit's parity lies strictly within n-1 of k*Delta.
    """

    def __init__(self, values: Sequence[int], delta: Value, n: int, bad: bool = False):
        if not values:
            raise InputFormatError("A table law needs at least one value")
        self.values = tuple(int(value) for value in values)
        self.delta = delta
        self.n = n
        self.bad = bad

    def expected_parity(self, k: int) -> int:
        drift = (k - 1) if self.bad else 0
        return (self.values[0] + drift) % 2

    def __call__(self, k: int) -> int:
        if k < 1:
            raise DomainError(f"Iterate must be positive, got {k}")
        if k <= len(self.values):
            return self.values[k - 1]

        center = k * self.delta
        low, high = center - (self.n - 1), center + (self.n - 1)
        parity = self.expected_parity(k)
        candidates = [
            value for value in range(math.floor(low), math.ceil(high) + 1)
            if low < value < high and value % 2 == parity
        ]
        if len(candidates) != 1:
            raise ExtrapolationError(
                f"Cannot certify the index of iterate {k}: {len(candidates)} candidates in "
                f"({float(low):.6g}, {float(high):.6g})"
            )
        return candidates[0]

    def to_document(self) -> dict:
        return {"type": "table", "values": list(self.values)}


@dataclass(frozen=True)
class ReebOrbit:
    """A simple Reeb orbit; sigma None means it is derived from the law at k = 1"""

    name: str
    parity_class: str
    mean_index: Union[ExactScalar, float]
    cz_iterate_law: IterateLaw = field(compare=False)
    sigma: Optional[int] = None

    @property
    def is_bad(self) -> bool:
        return self.parity_class == ORBIT_BAD

    @property
    def weight(self) -> Fraction:
        return Fraction(1, 2) if self.is_bad else Fraction(1)


@dataclass(frozen=True)
class ReebOrbitSystem:
    """
    The simple orbits of a nondegenerate contact form on a (2n-1)-manifold.

    Construction fixes each orbit's sigma and checks the parity law of its
    iterates for k <= PARITY_CHECK_ITERATES.
    """

    n: int
    orbits: Tuple[ReebOrbit, ...] = ()
    symbols: SymbolTable = field(default_factory=SymbolTable)
    homotopy_note: str = ""
    cf2_enforced: bool = False
    nondegenerate: bool = True

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 2:
            raise InputFormatError(f"Contact parameter n must be an integer >= 2, got {self.n!r}")
        names = [orbit.name for orbit in self.orbits]
        if len(set(names)) != len(names):
            raise InputFormatError(f"Duplicate orbit names: {names}")
        checked = tuple(self._checked(orbit) for orbit in self.orbits)
        object.__setattr__(self, "orbits", checked)

    def _checked(self, orbit: ReebOrbit) -> ReebOrbit:
        if orbit.parity_class not in (ORBIT_GOOD, ORBIT_BAD):
            raise InputFormatError(f"Orbit {orbit.name}: class must be good or bad, got {orbit.parity_class!r}")
        parities = {}
        for k in range(1, PARITY_CHECK_ITERATES + 1):
            try:
                parities[k] = orbit.cz_iterate_law(k) % 2
            except (DegenerateIterateError, ExtrapolationError):
                continue
        if parities:
            first_k = min(parities)
            for k, parity in parities.items():
                drift = (k - first_k) % 2 if orbit.is_bad else 0
                if parity != (parities[first_k] + drift) % 2:
                    raise InputFormatError(
                        f"Orbit {orbit.name}: iterate {k} breaks the {orbit.parity_class} parity law"
                    )
        sigma = orbit.sigma
        if 1 in parities:
            derived = 1 if (parities[1] + self.n - 3) % 2 == 0 else -1
            if sigma is not None and sigma != derived:
                raise InputFormatError(f"Orbit {orbit.name}: sigma {sigma} contradicts its grading")
            sigma = derived
        if sigma not in (1, -1):
            raise InputFormatError(f"Orbit {orbit.name}: sigma cannot be derived and was not given")
        if sigma == orbit.sigma:
            return orbit
        return ReebOrbit(orbit.name, orbit.parity_class, orbit.mean_index, orbit.cz_iterate_law, sigma)

    def delta_value(self, orbit: ReebOrbit) -> Value:
        """Mean index as a Fraction when rational, otherwise as a float"""
        delta = orbit.mean_index
        if isinstance(delta, ExactScalar):
            if delta.is_rational:
                return delta.rational_part
            return evaluate_float(delta, self.symbols)
        return float(delta)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(self.delta_value(orbit), Fraction) for orbit in self.orbits)


@dataclass(frozen=True)
class TruncatedComplex:
    """Generator counts per degree of the chain complex cut to a window"""

    direction: str
    N: int
    window: Tuple[int, int]
    dims: Dict[int, int]
    generator_log: Tuple[Tuple[str, int, int], ...] = ()

    @property
    def total_generators(self) -> int:
        return sum(self.dims.values())

    def to_report(self) -> dict:
        return {
            "direction": self.direction,
            "N": self.N,
            "window": list(self.window),
            "dims": {str(degree): count for degree, count in sorted(self.dims.items())}
        }


@dataclass(frozen=True)
class ChiValue:
    chi_value: int
    normalized: float

    def to_report(self) -> dict:
        return {"chi_value": self.chi_value, "normalized": self.normalized}


@dataclass(frozen=True)
class ComparisonRow:
    N: int
    chi_value: int
    normalized: float
    closed_form: Value
    difference: float
    scaled_difference: float

    def to_report(self) -> dict:
        return {
            "N": self.N,
            "chi_value": self.chi_value,
            "normalized": self.normalized,
            "closed_form": self.closed_form,
            "difference": self.difference,
            "scaled_difference": self.scaled_difference
        }


@dataclass(frozen=True)
class LimitComparison:
    """
    Truncated values against the closed form.

    measured_C is the largest N*|difference| over the two largest N;
    envelope_ok means every N*|difference| stays within remainder_bound.
    """

    direction: str
    rows: Tuple[ComparisonRow, ...]
    measured_C: float
    remainder_bound: float
    envelope_ok: bool
    converged: bool

    def to_report(self) -> dict:
        return {
            "direction": self.direction,
            "rows": list(self.rows),
            "measured_C": self.measured_C,
            "remainder_bound": self.remainder_bound,
            "envelope_ok": self.envelope_ok,
            "converged": self.converged
        }


@dataclass(frozen=True)
class IndexViolation:
    orbit: str
    k: int
    kind: str
    value: float
    margin: float

    def to_report(self) -> dict:
        return {"orbit": self.orbit, "k": self.k, "kind": self.kind, "value": self.value, "margin": self.margin}


@dataclass(frozen=True)
class MorseCheck:
    direction: str
    lhs: Value
    N_list: Tuple[int, ...]
    empirical_rhs: Tuple[float, ...]
    satisfied: bool
    checked_from: int = 0

    @property
    def checked_rhs(self) -> float:
        """Largest density among the readings at N >= checked_from"""
        return max(rhs for N, rhs in zip(self.N_list, self.empirical_rhs) if N >= self.checked_from)

    def to_report(self) -> dict:
        return {
            "direction": self.direction,
            "lhs": self.lhs,
            "N_list": list(self.N_list),
            "empirical_rhs": list(self.empirical_rhs),
            "checked_from": self.checked_from,
            "checked_rhs": self.checked_rhs,
            "satisfied": self.satisfied
        }


@dataclass(frozen=True)
class EulerReport:
    chi_plus: Value
    chi_minus: Value
    chi_mean: Value
    per_orbit_contributions: Tuple[dict, ...]
    truncated_mean: Optional[float] = None
    truncated_mean_N: Optional[int] = None

    def to_report(self) -> dict:
        return {
            "chi_plus": self.chi_plus,
            "chi_minus": self.chi_minus,
            "chi_mean": self.chi_mean,
            "per_orbit_contributions": list(self.per_orbit_contributions),
            "truncated_mean": self.truncated_mean,
            "truncated_mean_N": self.truncated_mean_N
        }


def _check_direction(direction: str) -> None:
    if direction not in SUPPORTED_DIRECTIONS:
        raise DomainError(f"Unknown direction {direction!r}; expected one of {SUPPORTED_DIRECTIONS}")


def _in_direction(delta: Value, direction: str) -> bool:
    return delta > 0 if direction == DIRECTION_POSITIVE else delta < 0


def _total(values: Sequence[Value]) -> Value:
    if any(isinstance(value, float) for value in values):
        return float(sum(float(value) for value in values))
    return sum(values, Fraction(0))


def grade(orbit: ReebOrbit, k: int, n: int) -> int:
    """
    Degree |x^k| = mu_CZ(x^k) + n - 3

    Raises:
        DomainError: If k < 1
    """
    if k < 1:
        raise DomainError(f"Iterate must be positive, got {k}")
    return orbit.cz_iterate_law(k) + n - 3


def window_for(n: int, N: int, direction: str) -> Tuple[int, int]:
    """[2n-4, N] for the positive complex, [-N, -2] for the negative one"""
    _check_direction(direction)
    if direction == DIRECTION_POSITIVE:
        return 2 * n - 4, N
    return -N, -2


def chi_closed_form(system: ReebOrbitSystem, direction: str = DIRECTION_POSITIVE) -> Value:
    """
    Sum of w*sigma/|Delta| over orbits whose mean index has the given sign

    Good orbits weigh 1 and bad orbits 1/2. The result is exact when every
    mean index is rational.

    Raises:
        MeanIndexZeroError: If some orbit has zero mean index
    """
    _check_direction(direction)
    return _total([item["contribution"] for item in orbit_contributions(system, direction)])


def orbit_contributions(system: ReebOrbitSystem, direction: str) -> List[dict]:
    """Per-orbit terms of the closed-form sum for one direction"""
    rows = []
    for orbit in system.orbits:
        delta = system.delta_value(orbit)
        if delta == 0:
            raise MeanIndexZeroError(
                f"Orbit {orbit.name} has zero mean index; 1/Delta is undefined in the resonance sum"
            )
        if not _in_direction(delta, direction):
            continue
        contribution = orbit.weight * orbit.sigma / abs(delta) if isinstance(delta, Fraction) \
            else float(orbit.weight) * orbit.sigma / abs(delta)
        rows.append({
            "orbit": orbit.name,
            "class": orbit.parity_class,
            "sigma": orbit.sigma,
            "delta": delta,
            "direction": direction,
            "contribution": contribution
        })
    return rows


def _enumerate_orbit(orbit: ReebOrbit, delta: Value, n: int, low: int, high: int) -> List[Tuple[str, int, int]]:
    if delta == 0:
        raise EnumerationBoundError(
            f"Orbit {orbit.name} has zero mean index: its iterates never leave the middle degrees"
        )
    reach = max(abs(low), abs(high)) + 2 * n
    k_last = math.ceil(reach / abs(delta)) + 1
    generators = []
    for k in range(1, k_last + 1):
        if orbit.is_bad and k % 2 == 0:
            continue
        degree = grade(orbit, k, n)
        if low <= degree <= high:
            generators.append((orbit.name, k, degree))
    return generators


def _enumerate(system: ReebOrbitSystem, low: int, high: int,
               orbits: Sequence[ReebOrbit], threads: int) -> List[Tuple[str, int, int]]:
    jobs = [(orbit, system.delta_value(orbit)) for orbit in orbits]
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            parts = list(executor.map(lambda job: _enumerate_orbit(job[0], job[1], system.n, low, high), jobs))
    else:
        parts = [_enumerate_orbit(orbit, delta, system.n, low, high) for orbit, delta in jobs]
    return [generator for part in parts for generator in part]


def build_truncated_complex(system: ReebOrbitSystem, N: int, direction: str = DIRECTION_POSITIVE,
                            keep_log: bool = False, threads: int = 1) -> TruncatedComplex:
    """
    Generators x^k with degree in the window, bad orbits at odd k only

    Args:
        system: Orbit system
        N: Truncation degree
        direction: positive ([2n-4, N]) or negative ([-N, -2])
        keep_log: Record (orbit, k, degree) for every generator
        threads: Orbits enumerated in parallel

    Returns:
        TruncatedComplex

    Raises:
        DomainError: If N does not exceed the fixed end of the window
        EnumerationBoundError: If a contributing orbit has zero mean index
    """
    low, high = window_for(system.n, N, direction)
    if low >= high:
        raise DomainError(f"N = {N} leaves an empty {direction} window")
    orbits = []
    for orbit in system.orbits:
        delta = system.delta_value(orbit)
        if delta == 0:
            raise EnumerationBoundError(
                f"Orbit {orbit.name} has zero mean index: its iterates never leave the middle degrees"
            )
        if _in_direction(delta, direction):
            orbits.append(orbit)
    generators = _enumerate(system, low, high, orbits, threads)
    dims = Counter(degree for _, _, degree in generators)
    logger.debug(f"Truncated {direction} complex at N={N}: {len(generators)} generators")
    return TruncatedComplex(
        direction=direction,
        N=N,
        window=(low, high),
        dims=dict(sorted(dims.items())),
        generator_log=tuple(generators) if keep_log else ()
    )


def chi_truncated(complex_: TruncatedComplex) -> ChiValue:
    """Alternating sum of dims over the window, and that sum divided by N"""
    chi = sum(count if degree % 2 == 0 else -count for degree, count in complex_.dims.items())
    return ChiValue(chi, chi / complex_.N)


def chi_mean_truncated(system: ReebOrbitSystem, N: int) -> float:
    """
    Alternating generator count over every degree in [-N, N], divided by 2N+1

    Approximates (chi_plus + chi_minus) / 2.
    """
    if N < 1:
        raise DomainError(f"N must be positive, got {N}")
    generators = _enumerate(system, -N, N, list(system.orbits), 1)
    chi = sum(1 if degree % 2 == 0 else -1 for _, _, degree in generators)
    return chi / (2 * N + 1)


def remainder_bound(system: ReebOrbitSystem, direction: str = DIRECTION_POSITIVE) -> float:
    """
    Bound on N*|chi(C^(N))/N - chi|: each orbit contributes sigma*N/|Delta| up
    to 4n/|Delta| + 3 generators at the two ends of the window
    """
    _check_direction(direction)
    total = 0.0
    for orbit in system.orbits:
        delta = system.delta_value(orbit)
        if delta != 0 and _in_direction(delta, direction):
            total += 4 * system.n / abs(float(delta)) + 3
    return total


def chi_limit_compare(system: ReebOrbitSystem, N_list: Sequence[int],
                      direction: str = DIRECTION_POSITIVE) -> LimitComparison:
    """
    Compare chi(C^(N))/N with the closed form for each N

    Args:
        system: Orbit system
        N_list: Truncation degrees
        direction: positive or negative

    Returns:
        LimitComparison with the fitted O(1/N) constant
    """
    if not N_list:
        raise DomainError("At least one truncation degree is required")
    closed = chi_closed_form(system, direction)
    bound = remainder_bound(system, direction)
    rows = []
    for N in sorted(N_list):
        chi = chi_truncated(build_truncated_complex(system, N, direction))
        difference = chi.normalized - float(closed)
        rows.append(ComparisonRow(N, chi.chi_value, chi.normalized, closed, difference, N * abs(difference)))
    measured = max(row.scaled_difference for row in rows[-2:])
    envelope_ok = all(row.scaled_difference <= bound + 1e-9 for row in rows)
    converged = abs(rows[-1].difference) <= ENVELOPE_TOL
    logger.info(
        f"{direction} limit: closed form {float(closed):.6g}, last difference {rows[-1].difference:.3g}, "
        f"C = {measured:.3g} (bound {bound:.3g})"
    )
    return LimitComparison(direction, tuple(rows), measured, bound, envelope_ok, converged)


def validate_index_bounds(system: ReebOrbitSystem, k_max: int) -> List[IndexViolation]:
    """
    Check |mu(x^k) - k*Delta| < n-1 and -2 < |x^k| - k*Delta < 2n-4

    Degenerate iterates are reported with kind "degenerate".

    Args:
        system: Orbit system
        k_max: Last iterate to check

    Returns:
        Violations with their margins (margin <= 0)
    """
    if k_max < 1:
        raise DomainError(f"k_max must be at least 1, got {k_max}")
    n = system.n
    violations = []
    for orbit in system.orbits:
        delta = system.delta_value(orbit)
        for k in range(1, k_max + 1):
            try:
                mu = orbit.cz_iterate_law(k)
            except (DegenerateIterateError, ExtrapolationError) as e:
                logger.debug(f"Orbit {orbit.name}, k={k}: {e}")
                violations.append(IndexViolation(orbit.name, k, "degenerate", float("nan"), 0.0))
                continue
            drift = mu - k * delta
            margin = (n - 1) - abs(drift)
            if margin <= 0:
                violations.append(IndexViolation(orbit.name, k, "index", float(drift), float(margin)))
            shifted = drift + n - 3
            margin = min(shifted + 2, 2 * n - 4 - shifted)
            if margin <= 0:
                violations.append(IndexViolation(orbit.name, k, "grading", float(shifted), float(margin)))
    if violations:
        logger.info(f"{len(violations)} index-bound violations for k <= {k_max}")
    return violations


def cf2_violations(system: ReebOrbitSystem, k_check: int = PARITY_CHECK_ITERATES) -> List[Tuple[str, int, int]]:
    """
    Iterates of degree -1, 0 or 1

    They are reported, and logged as a warning when the system enforces CF2,
    never raised.
    """
    found = []
    for orbit in system.orbits:
        for k in range(1, k_check + 1):
            if orbit.is_bad and k % 2 == 0:
                continue
            try:
                degree = grade(orbit, k, system.n)
            except (DegenerateIterateError, ExtrapolationError):
                continue
            if degree in (-1, 0, 1):
                found.append((orbit.name, k, degree))
    if found and system.cf2_enforced:
        logger.warning(f"{len(found)} iterates of degree -1, 0 or 1 in a system declared to satisfy CF2")
    return found


def asymptotic_morse(system: ReebOrbitSystem, direction: str, N_list: Sequence[int],
                     checked_from: Optional[int] = None) -> MorseCheck:
    """
    Unsigned closed-form sum against the chain-level generator density

    Generator counts bound homology dimensions from above. The check is
    lhs >= max(density) - ENVELOPE_TOL over every N >= checked_from; by
    default that is every N given. Densities at smaller N are still reported.

    Raises:
        DomainError: If N_list is empty or no N reaches checked_from
    """
    _check_direction(direction)
    if not N_list:
        raise DomainError("At least one truncation degree is required")
    N_sorted = tuple(sorted(N_list))
    checked_from = N_sorted[0] if checked_from is None else checked_from
    if checked_from > N_sorted[-1]:
        raise DomainError(f"No truncation degree reaches {checked_from}")
    terms = []
    for orbit in system.orbits:
        delta = system.delta_value(orbit)
        if delta == 0:
            raise MeanIndexZeroError(f"Orbit {orbit.name} has zero mean index")
        if _in_direction(delta, direction):
            terms.append(orbit.weight / abs(delta) if isinstance(delta, Fraction) else float(orbit.weight) / abs(delta))
    lhs = _total(terms)
    densities = tuple(
        build_truncated_complex(system, N, direction).total_generators / N for N in N_sorted
    )
    checked = max(density for N, density in zip(N_sorted, densities) if N >= checked_from)
    return MorseCheck(direction, lhs, N_sorted, densities, float(lhs) >= checked - ENVELOPE_TOL, checked_from)


def euler_report(system: ReebOrbitSystem, N: Optional[int] = None) -> EulerReport:
    """
    Closed-form chi_plus, chi_minus and their mean, with per-orbit terms

    With N given, the all-degree truncated mean at N is attached for
    comparison with chi_mean.
    """
    chi_plus = chi_closed_form(system, DIRECTION_POSITIVE)
    chi_minus = chi_closed_form(system, DIRECTION_NEGATIVE)
    chi_mean = (chi_plus + chi_minus) / 2
    contributions = tuple(
        orbit_contributions(system, DIRECTION_POSITIVE) + orbit_contributions(system, DIRECTION_NEGATIVE)
    )
    truncated = chi_mean_truncated(system, N) if N else None
    return EulerReport(chi_plus, chi_minus, chi_mean, contributions, truncated, N)
