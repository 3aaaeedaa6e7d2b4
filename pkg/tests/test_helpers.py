"""
Tests for the helper functions
"""

import os
import unittest
import tempfile
from fractions import Fraction
from utils.helpers import (
    format_float,
    format_rational,
    parse_rational,
    to_report_value,
    parse_int_list,
    split_list,
    format_vector,
    ensure_directory_exists
)

class TestHelpers(unittest.TestCase):
    """Test case for helper functions"""

    def test_format_float(self):
        """Test the format_float function"""
        self.assertEqual(format_float(0.5), "0.5")
        self.assertEqual(format_float(1 / 3), "0.333333333333")
        self.assertEqual(format_float(float("inf")), "inf")
        self.assertEqual(format_float(float("-inf")), "-inf")
        self.assertEqual(format_float(float("nan")), "nan")

    def test_format_rational(self):
        """Test the format_rational function"""
        self.assertEqual(format_rational(Fraction(1, 2)), "1/2")
        self.assertEqual(format_rational(Fraction(-37, 58)), "-37/58")
        self.assertEqual(format_rational(Fraction(6, 3)), "2")
        self.assertEqual(format_rational(0), "0")

    def test_parse_rational(self):
        """Test the parse_rational function"""
        self.assertEqual(parse_rational("3"), Fraction(3))
        self.assertEqual(parse_rational(" -3/4 "), Fraction(-3, 4))
        self.assertEqual(parse_rational("0.25"), Fraction(1, 4))

        with self.assertRaises(ValueError):
            parse_rational("")
        with self.assertRaises(ValueError):
            parse_rational("sqrt2")

    def test_to_report_value(self):
        """Test the to_report_value function"""
        self.assertEqual(to_report_value(Fraction(5, 6)), "5/6")
        self.assertEqual(to_report_value((1, 2, 3)), [1, 2, 3])
        self.assertEqual(to_report_value(2 / 3), 0.666666666667)
        self.assertEqual(to_report_value({"a": Fraction(1, 2), 3: None}), {"a": "1/2", "3": None})
        self.assertTrue(to_report_value(True))

        class Reported:
            def to_report(self):
                return {"value": Fraction(1, 6)}

        self.assertEqual(to_report_value([Reported()]), [{"value": "1/6"}])

    def test_parse_int_list(self):
        """Test the parse_int_list function"""
        self.assertEqual(parse_int_list("100,1000,10000"), [100, 1000, 10000])
        self.assertEqual(parse_int_list(" 5 , 7 "), [5, 7])
        self.assertEqual(parse_int_list(""), [])

        with self.assertRaises(ValueError):
            parse_int_list("1,x")

    def test_split_list(self):
        """Test the split_list function"""
        self.assertEqual(split_list("0, sqrt2 ,sqrt3,"), ["0", "sqrt2", "sqrt3"])
        self.assertEqual(split_list(""), [])

    def test_format_vector(self):
        """Test the format_vector function"""
        self.assertEqual(format_vector((1, -2, 0)), "(1,-2,0)")

    def test_ensure_directory_exists(self):
        """Test the ensure_directory_exists function"""
        with tempfile.TemporaryDirectory() as temp_dir:
            config_dir = os.path.join(temp_dir, "home", ".resochi", "logs")
            self.assertTrue(ensure_directory_exists(config_dir))
            self.assertTrue(os.path.isdir(config_dir))
            # Already there
            self.assertTrue(ensure_directory_exists(config_dir))

            occupied = os.path.join(temp_dir, "settings")
            with open(occupied, "w") as f:
                f.write("{}")
            self.assertFalse(ensure_directory_exists(occupied))

        self.assertFalse(ensure_directory_exists(""))

if __name__ == "__main__":
    unittest.main()
