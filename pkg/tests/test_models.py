"""
Tests for the rotation-block engine and the model generators
"""

import random
import unittest
from fractions import Fraction

from core.contact import chi_closed_form, grade, validate_index_bounds
from core.exactnum import ExactScalar
from core.models import (
    EllipsoidSpec,
    LinearizedReturnMap,
    RotationBlock,
    UstilovskySpec,
    admissible_p,
    cpn_mean_indices,
    elliptic,
    ellipsoid_cz,
    ellipsoid_system,
    index_engine,
    negative_hyperbolic,
    orbit_from_map,
    planted_resonance_problem,
    positive_hyperbolic,
    random_block_system,
    ustilovsky_chi
)
from core.verify_suite import GOLDEN_RATIO, golden_ellipsoid
from utils.constants import BLOCK_ELLIPTIC, DIRECTION_NEGATIVE, MODE_FORMAL, MODE_NUMERIC, ORBIT_BAD, ORBIT_GOOD
from utils.exceptions import (
    DegenerateIterateError,
    DegenerateSpectrumError,
    DomainError,
    InputFormatError
)

class TestIndexEngine(unittest.TestCase):
    """Test case for the rotation-block engine"""

    def test_elliptic_block(self):
        """theta = 3/10 gives mu_1 = 1, mu_4 = 3 and Delta = 3/5"""
        return_map = LinearizedReturnMap((elliptic(Fraction(3, 10)),))
        self.assertEqual(index_engine(return_map, 1), 1)
        self.assertEqual(index_engine(return_map, 4), 3)
        self.assertEqual(return_map.mean_index, Fraction(3, 5))
        self.assertFalse(return_map.is_bad)

    def test_hyperbolic_blocks(self):
        """Negative hyperbolic blocks add (2w+1)k and decide the class"""
        bad = LinearizedReturnMap((negative_hyperbolic(1), positive_hyperbolic()), winding=1)
        self.assertEqual(index_engine(bad, 3), 15)
        self.assertEqual(bad.mean_index, Fraction(5))
        self.assertEqual(bad.parity_class, ORBIT_BAD)

        good = LinearizedReturnMap((negative_hyperbolic(0), negative_hyperbolic(0)))
        self.assertEqual(good.parity_class, ORBIT_GOOD)
        self.assertEqual(index_engine(good, 2), 4)

    def test_degenerate_iterates(self):
        """Integral k*theta is refused"""
        return_map = LinearizedReturnMap((elliptic(Fraction(1, 2)),))
        self.assertEqual(index_engine(return_map, 1), 1)
        with self.assertRaises(DegenerateIterateError):
            index_engine(return_map, 2)
        with self.assertRaises(DegenerateIterateError):
            LinearizedReturnMap((elliptic(Fraction(1, 3)),), strict=True)
        with self.assertRaises(DomainError):
            index_engine(return_map, 0)

    def test_invalid_blocks(self):
        """Test block validation"""
        with self.assertRaises(InputFormatError):
            elliptic(0)
        with self.assertRaises(InputFormatError):
            positive_hyperbolic(0.5)
        with self.assertRaises(InputFormatError):
            negative_hyperbolic(-1)
        with self.assertRaises(InputFormatError):
            RotationBlock("parabolic")

    def test_to_document(self):
        """Maps serialize with rational rotation numbers as text"""
        document = LinearizedReturnMap((elliptic(Fraction(3, 10)),), winding=1).to_document()
        self.assertEqual(document["type"], "blocks")
        self.assertEqual(document["winding"], 1)
        self.assertEqual(document["blocks"], [{"kind": BLOCK_ELLIPTIC, "theta": "3/10"}])

    def test_orbit_from_map(self):
        """sigma follows from the degree of the first iterate"""
        orbit = orbit_from_map("x", LinearizedReturnMap((elliptic(Fraction(3, 10)),), winding=1))
        self.assertEqual(orbit.mean_index, ExactScalar(Fraction(13, 5)))
        self.assertEqual(orbit.cz_iterate_law(1), 3)

class TestEllipsoid(unittest.TestCase):
    """Test case for ellipsoid models"""

    def test_formal_ellipsoid(self):
        """Weights (1,2,3) give chi_plus = 1/2 and chi_minus = 0"""
        system = ellipsoid_system(EllipsoidSpec((1, 2, 3)))
        self.assertEqual(system.n, 3)
        self.assertEqual(
            [system.delta_value(orbit) for orbit in system.orbits],
            [Fraction(11, 3), Fraction(22, 3), Fraction(11)]
        )
        self.assertEqual(chi_closed_form(system), Fraction(1, 2))
        self.assertEqual(chi_closed_form(system, DIRECTION_NEGATIVE), 0)

    def test_random_formal_ellipsoids(self):
        """chi_plus is 1/2 and chi_minus is 0 for any weights"""
        rng = random.Random(2)
        for _ in range(200):
            weights = [Fraction(rng.randint(1, 30), rng.randint(1, 7)) for _ in range(rng.randint(2, 6))]
            system = ellipsoid_system(EllipsoidSpec(weights, MODE_FORMAL))
            self.assertEqual(chi_closed_form(system), Fraction(1, 2))
            self.assertEqual(chi_closed_form(system, DIRECTION_NEGATIVE), 0)

    def test_golden_ellipsoid(self):
        """Second iterate of the short orbit has degree 6"""
        system = golden_ellipsoid()
        short = system.orbits[0]
        self.assertEqual(grade(short, 2, 2), 6)
        self.assertEqual(ellipsoid_cz((1.0, GOLDEN_RATIO), 0, 2), 7)
        self.assertAlmostEqual(chi_closed_form(system), 0.5)
        self.assertEqual(validate_index_bounds(system, 200), [])

    def test_numeric_degeneracy(self):
        """Rational weight ratios are caught up to k_max"""
        with self.assertRaises(DegenerateIterateError):
            ellipsoid_system(EllipsoidSpec((1.0, 2.0), MODE_NUMERIC, k_max=3))

    def test_invalid_spec(self):
        """Test EllipsoidSpec validation"""
        with self.assertRaises(DomainError):
            EllipsoidSpec((1,))
        with self.assertRaises(DomainError):
            EllipsoidSpec((1, -2))
        with self.assertRaises(DomainError):
            EllipsoidSpec((1, 2), "symbolic")

class TestCPn(unittest.TestCase):
    """Test case for cpn_mean_indices"""

    def test_mean_indices(self):
        """Delta_i = t (sum lambda - (n+1) lambda_i) modulo 2(n+1)"""
        problem = cpn_mean_indices([0, 1, 3], Fraction(1, 2))
        self.assertEqual(
            problem.deltas,
            (ExactScalar(Fraction(2)), ExactScalar(Fraction(1, 2)), ExactScalar(Fraction(7, 2)))
        )
        self.assertEqual((problem.n, problem.N), (2, 3))

    def test_errors(self):
        """Test the cpn_mean_indices errors"""
        with self.assertRaises(DegenerateSpectrumError):
            cpn_mean_indices([0, 1, 1])
        with self.assertRaises(DomainError):
            cpn_mean_indices([0])
        with self.assertRaises(DomainError):
            cpn_mean_indices([0, 1], 0)

class TestUstilovsky(unittest.TestCase):
    """Test case for the Ustilovsky model"""

    def test_values(self):
        """Known values of chi_plus"""
        self.assertEqual(ustilovsky_chi(UstilovskySpec(3, 1)), (Fraction(1, 2), Fraction(0)))
        self.assertEqual(ustilovsky_chi(UstilovskySpec(3, 7))[0], Fraction(5, 6))
        self.assertEqual(ustilovsky_chi(UstilovskySpec(5, 9))[0], Fraction(37, 58))

    def test_distinct_values(self):
        """Different p give different chi_plus"""
        values = {ustilovsky_chi(UstilovskySpec(5, p))[0] for p in admissible_p(6)}
        self.assertEqual(len(values), 6)
        self.assertEqual(admissible_p(4), [1, 7, 9, 15])

    def test_invalid(self):
        """n must be odd and at least 3, p must be +-1 mod 8"""
        with self.assertRaises(DomainError):
            UstilovskySpec(4, 1)
        with self.assertRaises(DomainError):
            UstilovskySpec(3, 3)

class TestGenerators(unittest.TestCase):
    """Test case for the random generators"""

    def test_planted_zero_vector(self):
        """The planted vector must be nonzero"""
        with self.assertRaises(DomainError):
            planted_resonance_problem((0, 0), 1, 2)

    def test_random_block_system(self):
        """Synthetic systems satisfy the index bounds"""
        rng = random.Random(7)
        system = random_block_system(rng, 3, 4)
        self.assertEqual(len(system.orbits), 4)
        for orbit in system.orbits:
            self.assertGreaterEqual(system.delta_value(orbit), 2)
        self.assertEqual(validate_index_bounds(system, 200), [])

if __name__ == "__main__":
    unittest.main()
