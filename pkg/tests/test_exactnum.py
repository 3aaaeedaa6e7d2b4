"""
Tests for exact scalars, circle values and symbol tables
"""

import random
import unittest
from fractions import Fraction

import mpmath

from core.exactnum import (
    CircleValue,
    ExactScalar,
    SymbolEntry,
    SymbolTable,
    coefficient_matrix,
    evaluate_float,
    evaluate_mp,
    format_scalar,
    parse_scalar,
    reduce_mod,
    scalar_arith
)
from utils.exceptions import (
    DomainError,
    InputFormatError,
    UnresolvedSymbolError,
    UnsupportedOperationError
)

class TestExactScalar(unittest.TestCase):
    """Test case for ExactScalar arithmetic"""

    def setUp(self):
        """Set up the test case"""
        self.beta = ExactScalar.symbol("beta")
        self.gamma = ExactScalar.symbol("gamma")

    def test_canonical_form(self):
        """Equal values compare equal whatever the construction order"""
        a = ExactScalar(Fraction(1, 2), (("gamma", Fraction(1)), ("beta", Fraction(2)), ("gamma", Fraction(-1))))
        b = ExactScalar.of(Fraction(1, 2), {"beta": 2})
        self.assertEqual(a, b)
        self.assertEqual(a.irrational_coeffs, (("beta", Fraction(2)),))
        self.assertEqual(hash(a), hash(b))

    def test_add_sub(self):
        """Test addition and subtraction"""
        x = ExactScalar.of(Fraction(1, 2), {"beta": 3})
        y = ExactScalar.of(2, {"beta": -3, "gamma": 1})
        self.assertEqual(x + y, ExactScalar.of(Fraction(5, 2), {"gamma": 1}))
        self.assertEqual(x - x, ExactScalar())
        self.assertTrue((x - x).is_zero)
        self.assertEqual(1 - self.beta, ExactScalar.of(1, {"beta": -1}))
        self.assertEqual(self.beta + 2, ExactScalar.of(2, {"beta": 1}))

    def test_mul_by_rational(self):
        """Products with a rational factor stay exact"""
        self.assertEqual(self.beta * 3, ExactScalar.of(0, {"beta": 3}))
        self.assertEqual(Fraction(1, 2) * (self.beta + 4), ExactScalar.of(2, {"beta": Fraction(1, 2)}))
        self.assertEqual(-(self.beta + 1), ExactScalar.of(-1, {"beta": -1}))
        self.assertEqual((self.beta + 1) / 2, ExactScalar.of(Fraction(1, 2), {"beta": Fraction(1, 2)}))

    def test_irrational_product_is_refused(self):
        """beta * beta is outside the linear model"""
        with self.assertRaises(UnsupportedOperationError):
            scalar_arith(self.beta, self.beta, "mul")
        with self.assertRaises(UnsupportedOperationError):
            self.beta * self.gamma
        with self.assertRaises(UnsupportedOperationError):
            self.beta / self.gamma
        with self.assertRaises(DomainError):
            self.beta / 0

    def test_unknown_operation(self):
        """Test scalar_arith with an unknown operation"""
        with self.assertRaises(ValueError):
            scalar_arith(self.beta, self.gamma, "pow")

    def test_properties(self):
        """Test the rationality and symbol properties"""
        x = ExactScalar.of(3, {"gamma": 1, "beta": -2})
        self.assertFalse(x.is_rational)
        self.assertEqual(x.symbols, ("beta", "gamma"))
        self.assertEqual(x.coefficient("beta"), Fraction(-2))
        self.assertEqual(x.coefficient("delta"), Fraction(0))
        self.assertTrue(ExactScalar(Fraction(7, 3)).is_rational)

    def test_invalid_symbol(self):
        """Symbol names must be identifiers"""
        with self.assertRaises(InputFormatError):
            ExactScalar.symbol("2x")

class TestReduceMod(unittest.TestCase):
    """Test case for reduce_mod and CircleValue"""

    def test_rational_reduction(self):
        """Test reduction of rational values"""
        self.assertEqual(reduce_mod(ExactScalar(Fraction(7)), 6).representative, ExactScalar(Fraction(1)))
        self.assertEqual(reduce_mod(ExactScalar(Fraction(-1, 2)), 4).representative, ExactScalar(Fraction(7, 2)))
        self.assertTrue(reduce_mod(ExactScalar(Fraction(12)), 6).is_zero)

    def test_irrational_part_untouched(self):
        """Only the rational part is reduced"""
        x = ExactScalar.of(13, {"beta": 5})
        value = reduce_mod(x, 6)
        self.assertEqual(value.representative, ExactScalar.of(1, {"beta": 5}))
        self.assertFalse(value.is_rational)
        self.assertEqual(value, CircleValue(ExactScalar.of(-5, {"beta": 5}), 6))

    def test_invalid_modulus(self):
        """The modulus must be positive"""
        with self.assertRaises(DomainError):
            reduce_mod(ExactScalar(Fraction(1)), 0)
        with self.assertRaises(DomainError):
            reduce_mod(ExactScalar(Fraction(1)), -4)

class TestScalarProperties(unittest.TestCase):
    """Test case for algebraic laws on random scalars"""

    def setUp(self):
        """Set up the test case"""
        self.rng = random.Random(7)
        with mpmath.workdps(30):
            self.table = SymbolTable.from_witnesses({"sqrt2": mpmath.sqrt(2), "sqrt3": mpmath.sqrt(3)})

    def random_scalar(self):
        """Random rational plus a random combination of sqrt2 and sqrt3"""
        coeffs = {
            name: Fraction(self.rng.randint(-9, 9), self.rng.randint(1, 6))
            for name in ("sqrt2", "sqrt3") if self.rng.random() < 0.6
        }
        return ExactScalar.of(Fraction(self.rng.randint(-60, 60), self.rng.randint(1, 12)), coeffs)

    def test_addition_laws(self):
        """Addition is commutative and associative"""
        for _ in range(300):
            a, b, c = self.random_scalar(), self.random_scalar(), self.random_scalar()
            self.assertEqual(a + b, b + a)
            self.assertEqual((a + b) + c, a + (b + c))
            self.assertEqual(scalar_arith(a, b, "add"), a + b)
            self.assertEqual((a - b) + b, a)

    def test_reduction_laws(self):
        """reduce_mod is idempotent and periodic in the modulus"""
        for _ in range(300):
            x = self.random_scalar()
            N = self.rng.randint(1, 10)
            modulus = 2 * N
            value = reduce_mod(x, modulus)
            self.assertEqual(reduce_mod(value.representative, modulus), value)
            self.assertEqual(reduce_mod(x + modulus, modulus), value)
            self.assertEqual(reduce_mod(x - 3 * modulus, modulus), value)
            self.assertTrue(0 <= value.representative.rational_part < modulus)

    def test_reduction_agrees_numerically(self):
        """The representative evaluates to the value modulo M"""
        for _ in range(300):
            x = self.random_scalar()
            modulus = Fraction(self.rng.randint(1, 40), self.rng.randint(1, 4))
            representative = reduce_mod(x, modulus).representative
            turns = (evaluate_float(x, self.table) - evaluate_float(representative, self.table)) / float(modulus)
            self.assertLess(abs(turns - round(turns)), 1e-9)

class TestSymbolTable(unittest.TestCase):
    """Test case for symbol tables and evaluation"""

    def setUp(self):
        """Set up the test case"""
        with mpmath.workdps(30):
            self.table = SymbolTable.from_witnesses({"sqrt2": mpmath.sqrt(2), "free": None})

    def test_witness_lookup(self):
        """Test witness lookup and errors"""
        self.assertIn("sqrt2", self.table)
        self.assertEqual(self.table.names, ("sqrt2", "free"))
        self.assertAlmostEqual(float(self.table.witness("sqrt2")), 2 ** 0.5, places=15)
        with self.assertRaises(UnresolvedSymbolError):
            self.table.witness("free")
        with self.assertRaises(UnresolvedSymbolError):
            self.table.witness("missing")

    def test_evaluate(self):
        """Test numeric evaluation"""
        x = ExactScalar.of(Fraction(1, 2), {"sqrt2": 3})
        self.assertAlmostEqual(evaluate_float(x, self.table), 0.5 + 3 * 2 ** 0.5, places=12)
        with mpmath.workdps(30):
            self.assertLess(abs(evaluate_mp(x, self.table) - (mpmath.mpf(1) / 2 + 3 * mpmath.sqrt(2))), mpmath.mpf(10) ** -28)
        with self.assertRaises(UnresolvedSymbolError):
            evaluate_float(ExactScalar.symbol("free"), self.table)

    def test_duplicate_names(self):
        """Duplicate declarations are rejected"""
        with self.assertRaises(InputFormatError):
            SymbolTable((SymbolEntry("a"), SymbolEntry("a")))

    def test_merged(self):
        """Entries of the first table win"""
        other = SymbolTable.from_witnesses({"sqrt2": 5, "phi": "1.618033988749894848204586834"})
        merged = self.table.merged(other)
        self.assertEqual(merged.names, ("sqrt2", "free", "phi"))
        self.assertAlmostEqual(float(merged.witness("sqrt2")), 2 ** 0.5)

class TestScalarText(unittest.TestCase):
    """Test case for format_scalar and parse_scalar"""

    def test_format(self):
        """Test the text form"""
        self.assertEqual(format_scalar(ExactScalar.of(Fraction(1, 2), {"beta": 3, "gamma": -1})), "1/2 + 3*beta - gamma")
        self.assertEqual(format_scalar(ExactScalar.symbol("beta", -1)), "-beta")
        self.assertEqual(format_scalar(ExactScalar()), "0")
        self.assertEqual(format_scalar(ExactScalar.symbol("beta", Fraction(3, 2))), "3/2*beta")

    def test_parse(self):
        """Test parsing"""
        self.assertEqual(parse_scalar("1/2 + 3*beta - gamma"), ExactScalar.of(Fraction(1, 2), {"beta": 3, "gamma": -1}))
        self.assertEqual(parse_scalar("-3/4"), ExactScalar(Fraction(-3, 4)))
        self.assertEqual(parse_scalar("sqrt2"), ExactScalar.symbol("sqrt2"))
        self.assertEqual(parse_scalar("6 - 2*beta"), ExactScalar.of(6, {"beta": -2}))
        self.assertEqual(parse_scalar("beta - beta + 1"), ExactScalar(Fraction(1)))

    def test_parse_errors(self):
        """Malformed text is rejected"""
        for text in ("", "1 +", "2**beta", "beta*2", "1/2*"):
            with self.subTest(text=text):
                with self.assertRaises(InputFormatError):
                    parse_scalar(text)
        with self.assertRaises(InputFormatError):
            parse_scalar(3)

    def test_text_round_trip(self):
        """format_scalar output parses back to the same value"""
        values = [
            ExactScalar.of(Fraction(-7, 3), {"b1": Fraction(5, 2), "b2": -1}),
            ExactScalar.symbol("lambda0"),
            ExactScalar(Fraction(42))
        ]
        for value in values:
            self.assertEqual(parse_scalar(format_scalar(value)), value)

class TestCoefficientMatrix(unittest.TestCase):
    """Test case for coefficient_matrix"""

    def test_split(self):
        """Rows are symbols, columns are values"""
        values = [ExactScalar.of(1, {"b": 2}), ExactScalar.of(Fraction(1, 2), {"a": 1}), ExactScalar(Fraction(3))]
        symbols, matrix, rationals = coefficient_matrix(values)
        self.assertEqual(symbols, ("a", "b"))
        self.assertEqual(matrix, ((0, 1, 0), (2, 0, 0)))
        self.assertEqual(rationals, (1, Fraction(1, 2), 3))

if __name__ == "__main__":
    unittest.main()
