"""
Tests for Reeb orbit systems and mean Euler characteristics
"""

import math
import random
import unittest
from fractions import Fraction

from core.contact import (
    ReebOrbit,
    ReebOrbitSystem,
    TableLaw,
    asymptotic_morse,
    build_truncated_complex,
    cf2_violations,
    chi_closed_form,
    chi_limit_compare,
    chi_mean_truncated,
    chi_truncated,
    euler_report,
    grade,
    remainder_bound,
    validate_index_bounds,
    window_for
)
from core.exactnum import ExactScalar
from core.models import LinearizedReturnMap, negative_hyperbolic, orbit_from_map, random_block_system
from core.verify_suite import golden_ellipsoid
from utils.constants import DIRECTION_NEGATIVE, DIRECTION_POSITIVE
from utils.exceptions import (
    DomainError,
    EnumerationBoundError,
    ExtrapolationError,
    InputFormatError,
    MeanIndexZeroError
)

def bad_orbit(name="x"):
    """Bad orbit with mean index 3"""
    return orbit_from_map(name, LinearizedReturnMap((negative_hyperbolic(1),)))

def reverse_orbit(name="y"):
    """Bad orbit with mean index -3"""
    return orbit_from_map(name, LinearizedReturnMap((negative_hyperbolic(0),), winding=-2))

def mixed_system(rng, n):
    """Random block orbits plus orbits of negative mean index sharing their blocks"""
    forward = random_block_system(rng, n, rng.randint(1, 3))
    orbits = list(forward.orbits)
    for index in range(rng.randint(1, 2)):
        blocks = forward.orbits[index % len(forward.orbits)].cz_iterate_law.return_map.blocks
        orbits.append(orbit_from_map(f"y{index + 1}", LinearizedReturnMap(blocks, winding=-2 * n - 1 - index)))
    return ReebOrbitSystem(n, tuple(orbits))

class TestTableLaw(unittest.TestCase):
    """Test case for TableLaw"""

    def test_table_values(self):
        """Tabulated iterates are returned as given"""
        law = TableLaw([3, 6, 9], Fraction(3), 2, bad=True)
        self.assertEqual(law(1), 3)
        self.assertEqual(law(3), 9)
        with self.assertRaises(DomainError):
            law(0)

    def test_extrapolation(self):
        """A unique integer of the right parity is certified"""
        self.assertEqual(TableLaw([3, 6, 9], Fraction(3), 2, bad=True)(4), 12)
        self.assertEqual(TableLaw([2], Fraction(2), 3)(5), 10)

    def test_extrapolation_error(self):
        """No candidate of the right parity"""
        with self.assertRaises(ExtrapolationError):
            TableLaw([3], Fraction(3), 2)(2)
        with self.assertRaises(InputFormatError):
            TableLaw([], Fraction(3), 2)

class TestReebOrbitSystem(unittest.TestCase):
    """Test case for ReebOrbitSystem construction"""

    def test_sigma_derived(self):
        """sigma is the parity of the degree of the orbit itself"""
        system = ReebOrbitSystem(2, (bad_orbit(),))
        orbit = system.orbits[0]
        self.assertTrue(orbit.is_bad)
        self.assertEqual(orbit.sigma, 1)
        self.assertEqual(system.delta_value(orbit), Fraction(3))
        self.assertTrue(system.is_exact)
        self.assertEqual(grade(orbit, 1, 2), 2)

    def test_invalid_systems(self):
        """Test construction errors"""
        with self.assertRaises(InputFormatError):
            ReebOrbitSystem(1, (bad_orbit(),))
        with self.assertRaises(InputFormatError):
            ReebOrbitSystem(2, (bad_orbit("x"), bad_orbit("x")))

        broken = ReebOrbit("z", "good", ExactScalar(Fraction(3)), TableLaw([3, 4], Fraction(3), 2))
        with self.assertRaises(InputFormatError):
            ReebOrbitSystem(2, (broken,))

        contradicted = ReebOrbit("z", "bad", ExactScalar(Fraction(3)), TableLaw([3, 6], Fraction(3), 2, True), sigma=-1)
        with self.assertRaises(InputFormatError):
            ReebOrbitSystem(2, (contradicted,))

        unknown = ReebOrbit("z", "ugly", ExactScalar(Fraction(3)), lambda k: 3 * k)
        with self.assertRaises(InputFormatError):
            ReebOrbitSystem(2, (unknown,))

class TestClosedForm(unittest.TestCase):
    """Test case for the closed-form mean Euler characteristics"""

    def setUp(self):
        """Set up the test case"""
        self.system = ReebOrbitSystem(2, (bad_orbit("x"), reverse_orbit("y")))

    def test_single_bad_orbit(self):
        """A bad orbit weighs one half"""
        self.assertEqual(chi_closed_form(ReebOrbitSystem(2, (bad_orbit(),))), Fraction(1, 6))

    def test_both_directions(self):
        """Negative orbits enter chi_minus with |Delta|"""
        self.assertEqual(chi_closed_form(self.system, DIRECTION_POSITIVE), Fraction(1, 6))
        self.assertEqual(chi_closed_form(self.system, DIRECTION_NEGATIVE), Fraction(1, 6))
        with self.assertRaises(DomainError):
            chi_closed_form(self.system, "sideways")

    def test_euler_report(self):
        """Mean and per-orbit terms"""
        report = euler_report(self.system, N=300)
        self.assertEqual(report.chi_mean, Fraction(1, 6))
        self.assertEqual(len(report.per_orbit_contributions), 2)
        self.assertEqual(report.truncated_mean_N, 300)
        self.assertAlmostEqual(report.truncated_mean, 1 / 6, delta=0.01)

    def test_average_identity(self):
        """The all-degree truncated mean approaches (chi_plus + chi_minus) / 2"""
        rng = random.Random(29)
        for _ in range(8):
            system = mixed_system(rng, rng.randint(2, 3))
            report = euler_report(system)
            self.assertTrue(any(system.delta_value(orbit) < 0 for orbit in system.orbits))
            self.assertEqual(report.chi_mean, (report.chi_plus + report.chi_minus) / 2)
            self.assertAlmostEqual(chi_mean_truncated(system, 2000), float(report.chi_mean), delta=0.01)

    def test_zero_mean_index(self):
        """An orbit with Delta = 0 has no reciprocal"""
        orbit = ReebOrbit("z", "good", ExactScalar(), lambda k: 2)
        system = ReebOrbitSystem(2, (orbit,))
        with self.assertRaises(MeanIndexZeroError):
            chi_closed_form(system)
        with self.assertRaises(EnumerationBoundError):
            build_truncated_complex(system, 10)

    def test_remainder_bound(self):
        """4n/|Delta| + 3 per orbit in the direction"""
        self.assertAlmostEqual(remainder_bound(self.system, DIRECTION_POSITIVE), 8 / 3 + 3)

class TestTruncatedComplex(unittest.TestCase):
    """Test case for the truncated chain complex"""

    def test_window(self):
        """Test window_for"""
        self.assertEqual(window_for(2, 10, DIRECTION_POSITIVE), (0, 10))
        self.assertEqual(window_for(3, 10, DIRECTION_NEGATIVE), (-10, -2))
        with self.assertRaises(DomainError):
            window_for(2, 10, "up")

    def test_bad_orbit_generators(self):
        """Only odd iterates of a bad orbit are generators"""
        system = ReebOrbitSystem(2, (bad_orbit(),))
        complex_ = build_truncated_complex(system, 20, keep_log=True)
        self.assertEqual(complex_.dims, {2: 1, 8: 1, 14: 1, 20: 1})
        self.assertEqual([k for _, k, _ in complex_.generator_log], [1, 3, 5, 7])
        chi = chi_truncated(complex_)
        self.assertEqual(chi.chi_value, 4)
        self.assertAlmostEqual(chi.normalized, 0.2)

    def test_negative_direction(self):
        """Negative orbits fill [-N, -2]"""
        system = ReebOrbitSystem(2, (reverse_orbit(),))
        complex_ = build_truncated_complex(system, 100, DIRECTION_NEGATIVE)
        self.assertEqual(complex_.window, (-100, -2))
        self.assertEqual(chi_truncated(complex_).chi_value, 17)

    def test_empty_window(self):
        """N must leave room in the window"""
        with self.assertRaises(DomainError):
            build_truncated_complex(ReebOrbitSystem(2, (bad_orbit(),)), 0)

    def test_threads(self):
        """Parallel enumeration gives the same complex"""
        system = golden_ellipsoid()
        single = build_truncated_complex(system, 500)
        parallel = build_truncated_complex(system, 500, threads=2)
        self.assertEqual(single.dims, parallel.dims)

    def test_dimension_bound(self):
        """No degree holds more than orbits * ceil((2n-2)/min|Delta|) generators"""
        rng = random.Random(31)
        for _ in range(12):
            n = rng.randint(2, 4)
            system = mixed_system(rng, n)
            smallest = min(abs(system.delta_value(orbit)) for orbit in system.orbits)
            bound = len(system.orbits) * math.ceil(Fraction(2 * n - 2) / smallest)
            for direction in (DIRECTION_POSITIVE, DIRECTION_NEGATIVE):
                complex_ = build_truncated_complex(system, 400, direction)
                self.assertTrue(complex_.dims)
                self.assertLessEqual(max(complex_.dims.values()), bound)

class TestLimitComparison(unittest.TestCase):
    """Test case for chi_limit_compare and asymptotic_morse"""

    def setUp(self):
        """Set up the test case"""
        self.system = golden_ellipsoid()

    def test_golden_ellipsoid(self):
        """Truncated values approach 1/2 inside the envelope"""
        self.assertAlmostEqual(chi_closed_form(self.system), 0.5)
        comparison = chi_limit_compare(self.system, [100, 1000, 10000])
        self.assertEqual([row.N for row in comparison.rows], [100, 1000, 10000])
        self.assertTrue(comparison.envelope_ok)
        self.assertTrue(comparison.converged)
        self.assertLess(abs(comparison.rows[-1].difference), 0.005)

    def test_empty_direction(self):
        """No negative orbits gives zero on both routes"""
        comparison = chi_limit_compare(self.system, [100], DIRECTION_NEGATIVE)
        self.assertEqual(comparison.rows[0].chi_value, 0)
        self.assertEqual(comparison.rows[0].closed_form, 0)

    def test_asymptotic_morse(self):
        """The unsigned sum bounds the generator density"""
        check = asymptotic_morse(self.system, DIRECTION_POSITIVE, [10000, 1000])
        self.assertEqual(check.N_list, (1000, 10000))
        self.assertAlmostEqual(check.lhs, 0.5)
        self.assertTrue(check.satisfied)
        with self.assertRaises(DomainError):
            asymptotic_morse(self.system, DIRECTION_POSITIVE, [])

    def test_morse_uses_largest_density(self):
        """An early density above lhs fails the check unless it is excluded"""
        system = ReebOrbitSystem(2, (bad_orbit(),))
        check = asymptotic_morse(system, DIRECTION_POSITIVE, [10, 100, 1000])
        self.assertEqual(check.lhs, Fraction(1, 6))
        self.assertEqual(check.empirical_rhs, (0.2, 0.17, 0.167))
        self.assertEqual(check.checked_rhs, 0.2)
        self.assertFalse(check.satisfied)

        late = asymptotic_morse(system, DIRECTION_POSITIVE, [10, 100, 1000], checked_from=1000)
        self.assertEqual(late.empirical_rhs, check.empirical_rhs)
        self.assertEqual(late.checked_rhs, 0.167)
        self.assertTrue(late.satisfied)
        self.assertEqual(late.to_report()["checked_from"], 1000)
        with self.assertRaises(DomainError):
            asymptotic_morse(system, DIRECTION_POSITIVE, [10, 100], checked_from=1000)

class TestIndexBounds(unittest.TestCase):
    """Test case for validate_index_bounds and cf2_violations"""

    def test_engine_orbits_pass(self):
        """Engine laws respect both bounds"""
        self.assertEqual(validate_index_bounds(golden_ellipsoid(), 500), [])
        self.assertEqual(validate_index_bounds(ReebOrbitSystem(2, (bad_orbit(),)), 100), [])

    def test_planted_violation(self):
        """mu = 2k + 2 drifts 2 away from 2k"""
        planted = ReebOrbit("planted", "good", ExactScalar(Fraction(2)), lambda k: 2 * k + 2)
        violations = validate_index_bounds(ReebOrbitSystem(2, (planted,)), 3)
        kinds = {(v.orbit, v.k, v.kind) for v in violations}
        self.assertIn(("planted", 1, "index"), kinds)
        self.assertTrue(all(v.margin <= 0 for v in violations))

    def test_unextrapolated_iterates(self):
        """Iterates a table cannot certify are reported as degenerate"""
        orbit = ReebOrbit("t", "good", ExactScalar(Fraction(3)), TableLaw([3], Fraction(3), 2))
        violations = validate_index_bounds(ReebOrbitSystem(2, (orbit,)), 2)
        self.assertEqual([(v.k, v.kind) for v in violations], [(2, "degenerate")])

    def test_cf2(self):
        """Iterates of degree 1 are reported"""
        low = ReebOrbit("low", "good", ExactScalar(Fraction(2)), lambda k: 2 * k)
        self.assertIn(("low", 1, 1), cf2_violations(ReebOrbitSystem(2, (low,), cf2_enforced=True)))
        self.assertEqual(cf2_violations(ReebOrbitSystem(2, (bad_orbit(),))), [])

if __name__ == "__main__":
    unittest.main()
