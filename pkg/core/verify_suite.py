"""
Invariant suite for resochi

Every check generates its own data from a seeded random.Random, so a run is
reproducible from (seed, quick) alone.
"""

import math
import random
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Tuple

import mpmath

from core.contact import (
    ReebOrbit,
    ReebOrbitSystem,
    asymptotic_morse,
    chi_closed_form,
    chi_limit_compare,
    validate_index_bounds
)
from core.exactnum import ExactScalar, SymbolTable
from core.lattice import integer_relation, lattice_index, saturation
from core.models import (
    EllipsoidSpec,
    UstilovskySpec,
    admissible_p,
    cpn_mean_indices,
    ellipsoid_system,
    index_engine,
    planted_resonance_problem,
    random_block_system,
    random_problem,
    ustilovsky_chi
)
from core.resonance import (
    gamma_structure,
    numeric_agreement,
    prohibited_region_scan,
    resonance_lattice_exact,
    theorem_one_report
)
from utils.constants import (
    DIRECTION_NEGATIVE,
    DIRECTION_POSITIVE,
    ENVELOPE_TOL,
    MODE_FORMAL,
    MODE_NUMERIC
)
from utils.exceptions import ResochiError

# Set up logging
logger = logging.getLogger(__name__)

GOLDEN_RATIO = (1 + math.sqrt(5)) / 2


@dataclass(frozen=True)
class InvariantResult:
    name: str
    passed: bool
    seed: int
    detail: str

    def to_report(self) -> dict:
        return {"name": self.name, "passed": self.passed, "seed": self.seed, "detail": self.detail}


@dataclass(frozen=True)
class SuiteReport:
    seed: int
    quick: bool
    results: Tuple[InvariantResult, ...]

    @property
    def all_passed(self) -> bool:
        return all(result.passed for result in self.results)

    def to_report(self) -> dict:
        return {
            "seed": self.seed,
            "quick": self.quick,
            "all_passed": self.all_passed,
            "results": list(self.results)
        }

    def summary_lines(self) -> List[str]:
        return [
            f"{'PASS' if result.passed else 'FAIL'} {result.name} (seed {result.seed}): {result.detail}"
            for result in self.results
        ]


def cpn_symbolic_problem(n: int):
    """CP^n with formal coefficients lambda0..lambdan"""
    return cpn_mean_indices([ExactScalar.symbol(f"lambda{i}") for i in range(n + 1)])


def cpn_sqrt_problem():
    """CP^2 with lambda = (0, sqrt2, sqrt3) and 30-digit witnesses"""
    with mpmath.workdps(30):
        table = SymbolTable.from_witnesses({"sqrt2": mpmath.sqrt(2), "sqrt3": mpmath.sqrt(3)})
    lambdas = [ExactScalar(), ExactScalar.symbol("sqrt2"), ExactScalar.symbol("sqrt3")]
    return cpn_mean_indices(lambdas, symbols=table)


def golden_ellipsoid() -> ReebOrbitSystem:
    """The ellipsoid with weights (1, golden ratio), numeric mode"""
    return ellipsoid_system(EllipsoidSpec((1.0, GOLDEN_RATIO), MODE_NUMERIC))


class InvariantSuite:
    """
    Class running every invariant check and collecting the verdicts
    """

    def __init__(self, seed: int = 0, quick: bool = False):
        """Initialize the suite"""
        self.seed = seed
        self.quick = quick
        self.progress_callback = None

    def set_progress_callback(self, callback: Callable[[int, str], None]) -> None:
        """
        Set a callback function for progress updates

        Args:
            callback: Function that takes progress percentage and status message
        """
        self.progress_callback = callback

    def _update_progress(self, progress: int, message: str) -> None:
        """
        Update progress using the callback if available

        Args:
            progress: Progress percentage (0-100)
            message: Status message
        """
        if self.progress_callback:
            self.progress_callback(progress, message)

    def _scale(self, full: int, quick: int) -> int:
        return quick if self.quick else full

    def _n_list(self) -> Tuple[int, ...]:
        return (100, 1000) if self.quick else (100, 1000, 10_000)

    def checks(self) -> List[Tuple[str, Callable[[random.Random], Tuple[bool, str]]]]:
        return [
            ("cpn_resonance", self.check_cpn_resonance),
            ("theorem_bound", self.check_theorem_bound),
            ("prohibited_scan", self.check_prohibited_scan),
            ("duality", self.check_duality),
            ("ellipsoid_identity", self.check_ellipsoid_identity),
            ("two_route", self.check_two_route),
            ("index_bounds", self.check_index_bounds),
            ("parity_law", self.check_parity_law),
            ("ustilovsky", self.check_ustilovsky),
            ("relation_recovery", self.check_relation_recovery),
            ("asymptotic_morse", self.check_asymptotic_morse),
            ("exact_numeric", self.check_exact_numeric)
        ]

    def run(self) -> SuiteReport:
        """
        Run every check

        Returns:
            SuiteReport with one result per invariant
        """
        checks = self.checks()
        results = []
        for position, (name, check) in enumerate(checks):
            self._update_progress(int(100 * position / len(checks)), f"Checking {name}...")
            check_seed = self.seed * 1000 + position
            try:
                passed, detail = check(random.Random(check_seed))
            except ResochiError as e:
                passed, detail = False, f"{type(e).__name__}: {e}"
            logger.info(f"{name}: {'pass' if passed else 'FAIL'} ({detail})")
            results.append(InvariantResult(name, passed, check_seed, detail))
        self._update_progress(100, "Done")
        return SuiteReport(self.seed, self.quick, tuple(results))

    def check_cpn_resonance(self, rng: random.Random) -> Tuple[bool, str]:
        for n in (2, 3, 4):
            problem = cpn_symbolic_problem(n)
            lattice = resonance_lattice_exact(problem)
            if lattice.basis != ((1,) * (n + 1),):
                return False, f"n={n}: basis {lattice.basis}"
            total = ExactScalar()
            for delta in problem.deltas:
                total = total + delta
            if Fraction(total.rational_part) % (2 * problem.N) != 0 or not total.is_rational:
                return False, f"n={n}: sum of mean indices is {total}"
        return True, "R = span(1,...,1) for n = 2, 3, 4"

    def check_theorem_bound(self, rng: random.Random) -> Tuple[bool, str]:
        report = theorem_one_report(cpn_symbolic_problem(2))
        if not (report.rank_one and report.generator_nonnegative and report.sum_bound_satisfied):
            return False, f"CP^2 verdicts failed: {report.to_report()}"
        if report.sum_value != 3 or report.bound_value != 3:
            return False, f"CP^2 sum {report.sum_value}, bound {report.bound_value}"
        planted = theorem_one_report(planted_resonance_problem((1, 2, 1), 2, 3))
        if planted.generator != (1, 2, 1) or planted.sum_bound_satisfied is not False:
            return False, f"planted (1,2,1): {planted.to_report()}"
        return True, "CP^2 passes at the boundary 3 = 3, planted (1,2,1) fails 4 > 3"

    def check_prohibited_scan(self, rng: random.Random) -> Tuple[bool, str]:
        k_max = self._scale(100_000, 10_000)
        scan = prohibited_region_scan(cpn_sqrt_problem(), k_max)
        if scan.has_violation:
            return False, f"violation at k={scan.violation_k}: {scan.violation_point}"
        return True, f"no prohibited point for k <= {k_max}"

    def check_duality(self, rng: random.Random) -> Tuple[bool, str]:
        trials = self._scale(500, 50)
        for trial in range(trials):
            problem = random_problem(rng)
            structure = gamma_structure(problem)
            if saturation(structure.saturation) != structure.saturation:
                return False, f"trial {trial}: saturation is not idempotent"
            if lattice_index(structure.resonance_lattice, structure.saturation).index != structure.torsion_order:
                return False, f"trial {trial}: torsion order mismatch"
        return True, f"{trials} random problems"

    def check_ellipsoid_identity(self, rng: random.Random) -> Tuple[bool, str]:
        trials = self._scale(200, 20)
        for trial in range(trials):
            n = rng.randint(2, 6)
            weights = tuple(Fraction(rng.randint(1, 30), rng.randint(1, 30)) for _ in range(n))
            system = ellipsoid_system(EllipsoidSpec(weights, MODE_FORMAL))
            plus = chi_closed_form(system, DIRECTION_POSITIVE)
            minus = chi_closed_form(system, DIRECTION_NEGATIVE)
            if plus != Fraction(1, 2) or minus != 0:
                return False, f"weights {weights}: chi+ = {plus}, chi- = {minus}"
        return True, f"chi+ = 1/2 and chi- = 0 for {trials} rational ellipsoids"

    def _two_route(self, system: ReebOrbitSystem, label: str) -> Optional[str]:
        n_list = self._n_list()
        comparison = chi_limit_compare(system, n_list, DIRECTION_POSITIVE)
        if not comparison.envelope_ok:
            return f"{label}: N*|diff| = {comparison.measured_C:.4g} exceeds {comparison.remainder_bound:.4g}"
        if max(n_list) >= 10_000 and not comparison.converged:
            return f"{label}: difference {comparison.rows[-1].difference:.4g} at N = {max(n_list)}"
        k_limit = max(
            math.ceil((max(n_list) + 2 * system.n) / abs(float(system.delta_value(orbit)))) + 1
            for orbit in system.orbits
        ) if system.orbits else 1
        violations = validate_index_bounds(system, min(k_limit, self._scale(10_000, 2_000)))
        if violations:
            first = violations[0]
            return f"{label}: enumeration range not certified ({first.orbit}, k={first.k}, {first.kind})"
        return None

    def check_two_route(self, rng: random.Random) -> Tuple[bool, str]:
        failure = self._two_route(golden_ellipsoid(), "golden ellipsoid")
        if failure:
            return False, failure
        trials = self._scale(50, 5)
        for trial in range(trials):
            system = random_block_system(rng, rng.randint(2, 4), rng.randint(1, 4))
            failure = self._two_route(system, f"system {trial}")
            if failure:
                return False, failure
        return True, f"golden ellipsoid and {trials} block systems within the O(1/N) envelope"

    def check_index_bounds(self, rng: random.Random) -> Tuple[bool, str]:
        k_max = self._scale(10_000, 1_000)
        systems = [golden_ellipsoid()] + [
            random_block_system(rng, rng.randint(2, 4), rng.randint(1, 3)) for _ in range(self._scale(10, 3))
        ]
        for system in systems:
            violations = validate_index_bounds(system, k_max)
            if violations:
                return False, f"{violations[0].orbit} at k={violations[0].k} ({violations[0].kind})"
        planted = ReebOrbitSystem(2, (ReebOrbit("planted", "good", ExactScalar(Fraction(2)), lambda k: 2 * k + 2),))
        flagged = validate_index_bounds(planted, 1)
        if not flagged or flagged[0].k != 1:
            return False, "planted violation not flagged at k = 1"
        return True, f"{len(systems)} systems clean for k <= {k_max}, planted law flagged"

    def check_parity_law(self, rng: random.Random) -> Tuple[bool, str]:
        for trial in range(self._scale(100, 20)):
            system = random_block_system(rng, rng.randint(2, 5), 1)
            orbit = system.orbits[0]
            return_map = orbit.cz_iterate_law.return_map
            parities = [index_engine(return_map, k) % 2 for k in range(1, 9)]
            alternates = all(parities[i] != parities[i + 1] for i in range(len(parities) - 1))
            constant = len(set(parities)) == 1
            if (orbit.is_bad and not alternates) or (not orbit.is_bad and not constant):
                return False, f"trial {trial}: class {orbit.parity_class} with parities {parities}"
        return True, "parity alternates exactly for bad orbits"

    def check_ustilovsky(self, rng: random.Random) -> Tuple[bool, str]:
        if ustilovsky_chi(UstilovskySpec(3, 1))[0] != Fraction(1, 2):
            return False, "chi+(n=3, p=1) != 1/2"
        for n in (3, 5, 7):
            values = [ustilovsky_chi(UstilovskySpec(n, p))[0] for p in admissible_p(10)]
            if any(a >= b for a, b in zip(values, values[1:])):
                return False, f"n={n}: not strictly increasing in p"
            if any(value <= Fraction(1, 2) for value in values[1:]):
                return False, f"n={n}: some p > 1 gives chi+ <= 1/2"
        return True, "chi+(3,1) = 1/2, strictly increasing, above 1/2 for p > 1"

    def check_relation_recovery(self, rng: random.Random) -> Tuple[bool, str]:
        trials = self._scale(1000, 100)
        recovered = 0
        for _ in range(trials):
            recovered += planted_relation_trial(rng)
        rate = recovered / trials
        return rate >= 0.99, f"recovered {recovered}/{trials}"

    def check_asymptotic_morse(self, rng: random.Random) -> Tuple[bool, str]:
        n_list = self._n_list()
        systems = [golden_ellipsoid()] + [
            random_block_system(rng, rng.randint(2, 4), rng.randint(1, 3)) for _ in range(self._scale(10, 3))
        ]
        for index, system in enumerate(systems):
            check = asymptotic_morse(system, DIRECTION_POSITIVE, n_list, checked_from=max(n_list))
            if not check.satisfied:
                return False, f"system {index}: lhs {float(check.lhs):.6g} < density {check.checked_rhs:.6g}"
        golden = asymptotic_morse(systems[0], DIRECTION_POSITIVE, n_list, checked_from=max(n_list))
        if abs(float(golden.lhs) - golden.checked_rhs) > ENVELOPE_TOL * (10 if self.quick else 1):
            return False, "golden ellipsoid density differs from its closed form"
        return True, f"{len(systems)} systems satisfy the chain-level inequality"

    def check_exact_numeric(self, rng: random.Random) -> Tuple[bool, str]:
        agree, offending = numeric_agreement(cpn_sqrt_problem())
        if not agree:
            return False, f"exact and numeric lattices differ at {offending}"
        return True, "numeric candidates span the exact lattice"


def planted_relation_trial(rng: random.Random, tol: float = 1e-10, bound: int = 10) -> bool:
    """
    One planted integer relation: True when integer_relation finds +-a or a
    valid relation of no larger norm
    """
    m = rng.randint(1, 6)
    modulus = float(rng.randint(1, 8))
    a = [0] * m
    while not any(a):
        a = [rng.randint(-bound, bound) for _ in range(m)]
    x = [rng.uniform(0, modulus) for _ in range(m)]
    j = max(i for i in range(m) if a[i] != 0)
    partial = sum(a[i] * x[i] for i in range(m) if i != j)
    x[j] = ((rng.randint(-3, 3) * modulus - partial) / a[j]) % modulus
    norm = math.sqrt(sum(entry * entry for entry in a))
    target = tuple(a) if next(e for e in a if e) > 0 else tuple(-e for e in a)
    for candidate in integer_relation(x, modulus, 2 * bound, tol):
        if candidate.vector == target:
            return True
        if math.sqrt(sum(entry * entry for entry in candidate.vector)) <= norm:
            return True
    return False
