"""
Tests para la aritmética exacta en ℚ(√2) y los funcionales matriciales.

Cubre:
    - Operaciones de cuerpo, signo, orden y raíces
    - Conversión a float sin cancelación
    - Determinante (Bareiss) y permanente (Ryser) contra el oráculo de permutaciones
    - Cota configurable del permanente
"""

import math
from fractions import Fraction

from django.test import SimpleTestCase, override_settings
from hypothesis import given, settings as hypothesis_settings, strategies as st
import sympy

from networks.constants import FLOAT_RELATIVE_TOLERANCE, Statistics
from networks.exceptions import DimensionMismatchError, PermanentBoundError, ScalarArithmeticError
from networks.services.oracles import permutation_sum
from networks.services.scalar_algebra import (
    ONE,
    ZERO,
    Scalar,
    ScalarMatrix,
    determinant,
    permanent,
)

INV_SQRT2 = Scalar.inv_sqrt2()
ENTRY_POOL = [Scalar(0), Scalar('1/2'), Scalar(1), INV_SQRT2]

small_fractions = st.fractions(min_value=-8, max_value=8, max_denominator=9)
scalars = st.builds(Scalar, small_fractions, small_fractions)


def square_matrices(min_dim=2, max_dim=6):
    return st.integers(min_dim, max_dim).flatmap(
        lambda k: st.lists(
            st.lists(st.sampled_from(ENTRY_POOL), min_size=k, max_size=k),
            min_size=k,
            max_size=k,
        )
    ).map(ScalarMatrix.from_rows)


class ScalarArithmeticTestCase(SimpleTestCase):
    """Operaciones de cuerpo en ℚ(√2)."""

    def test_inverse_sqrt2_squared_is_half(self):
        self.assertEqual(INV_SQRT2 * INV_SQRT2, Fraction(1, 2))

    def test_conjugate_product(self):
        one_plus = Scalar(1, 1)
        self.assertEqual(one_plus * one_plus.conjugate(), Scalar(-1))
        self.assertEqual(one_plus.field_norm(), -1)

    def test_rational_inverse(self):
        self.assertEqual(Scalar('3/4').inverse(), Scalar('4/3'))

    def test_irrational_inverse_rationalizes(self):
        value = Scalar(3, 2)
        self.assertEqual(value * value.inverse(), ONE)

    def test_division_by_zero_raises(self):
        with self.assertRaises(ScalarArithmeticError):
            Scalar(1) / ZERO
        with self.assertRaises(ScalarArithmeticError):
            ZERO.inverse()

    def test_abs_square(self):
        self.assertEqual(Scalar(1, 1).abs_square(), Scalar(3, 2))

    def test_equality_and_hash_match_fraction(self):
        self.assertEqual(Scalar('1/3'), Fraction(1, 3))
        self.assertEqual(hash(Scalar(5)), hash(5))
        self.assertNotEqual(Scalar(0, 1), Scalar(1))

    def test_sign_with_opposite_components(self):
        # 99 − 70√2 ≈ 0.00505 y 70√2 − 99 < 0
        self.assertEqual(Scalar(99, -70).sign(), 1)
        self.assertEqual(Scalar(-99, 70).sign(), -1)
        self.assertEqual(Scalar(1, -1).sign(), -1)
        self.assertLess(Scalar(1), Scalar(0, 1))
        self.assertGreater(Scalar(3, -2), 0)

    def test_sqrt_inside_field(self):
        self.assertEqual(Scalar('9/16').sqrt(), Scalar('3/4'))
        self.assertEqual(Scalar('1/2').sqrt(), INV_SQRT2)
        self.assertEqual(Scalar(3, 2).sqrt(), Scalar(1, 1))
        self.assertEqual(Scalar('1/8').sqrt(), Scalar(0, '1/4'))

    def test_sqrt_outside_field(self):
        self.assertIsNone(Scalar(3).sqrt())
        self.assertIsNone(Scalar('3/8').sqrt())
        self.assertIsNone(Scalar(-1).sqrt())

    def test_as_fraction_rejects_irrational(self):
        self.assertEqual(Scalar('2/9').as_fraction(), Fraction(2, 9))
        with self.assertRaises(ScalarArithmeticError):
            INV_SQRT2.as_fraction()

    def test_to_float_without_cancellation(self):
        value = Scalar(99, -70)
        expected = 1.0 / (99.0 + 70.0 * math.sqrt(2.0))
        self.assertLess(abs(value.to_float() - expected) / expected, FLOAT_RELATIVE_TOLERANCE)

    @hypothesis_settings(deadline=None, max_examples=80, derandomize=True)
    @given(scalars, scalars, scalars)
    def test_field_axioms(self, a, b, c):
        self.assertEqual(a + b, b + a)
        self.assertEqual(a * b, b * a)
        self.assertEqual((a + b) + c, a + (b + c))
        self.assertEqual((a * b) * c, a * (b * c))
        self.assertEqual(a * (b + c), a * b + a * c)
        if b:
            self.assertEqual((a / b) * b, a)

    @hypothesis_settings(deadline=None, max_examples=80, derandomize=True)
    @given(scalars)
    def test_to_float_relative_error(self, value):
        exact = float((
            sympy.Rational(value.rat_part.numerator, value.rat_part.denominator)
            + sympy.Rational(value.sqrt2_part.numerator, value.sqrt2_part.denominator) * sympy.sqrt(2)
        ).evalf(40))
        if value:
            self.assertLess(abs(value.to_float() - exact), FLOAT_RELATIVE_TOLERANCE * abs(exact))
            self.assertEqual(value.sign(), 1 if exact > 0 else -1)


class MatrixFunctionalTestCase(SimpleTestCase):
    """Determinante y permanente exactos."""

    def test_two_by_two_determinant(self):
        matrix = ScalarMatrix.from_rows([['1', '1/2'], ['1/2', '1']])
        self.assertEqual(determinant(matrix), Scalar('3/4'))

    def test_all_ones_permanent(self):
        matrix = ScalarMatrix.from_rows([[1, 1], [1, 1]])
        self.assertEqual(permanent(matrix), Scalar(2))
        self.assertEqual(determinant(matrix), ZERO)

    def test_determinant_needs_pivot_swap(self):
        matrix = ScalarMatrix.from_rows([[0, 1, 0], [1, 0, 0], [0, 0, 1]])
        self.assertEqual(determinant(matrix), Scalar(-1))
        self.assertEqual(permanent(matrix), ONE)

    def test_identity(self):
        identity = ScalarMatrix.identity(5)
        self.assertEqual(determinant(identity), ONE)
        self.assertEqual(permanent(identity), ONE)

    def test_non_square_rows_rejected(self):
        with self.assertRaises(DimensionMismatchError):
            ScalarMatrix.from_rows([[1, 2], [3]])

    def test_permanent_bound_argument(self):
        with self.assertRaises(PermanentBoundError):
            permanent(ScalarMatrix.identity(4), max_dim=3)

    @override_settings(ENTANGLEMENT={'PERMANENT_MAX_DIM': 3})
    def test_permanent_bound_from_settings(self):
        self.assertEqual(permanent(ScalarMatrix.identity(3)), ONE)
        with self.assertRaises(PermanentBoundError):
            permanent(ScalarMatrix.identity(4))

    def test_to_float_array(self):
        array = ScalarMatrix.from_rows([[INV_SQRT2, 0], [0, 1]]).to_float_array()
        self.assertAlmostEqual(array[0, 0], 1 / math.sqrt(2), places=12)
        self.assertEqual(array.dtype.kind, 'f')

    @hypothesis_settings(deadline=None, max_examples=60, derandomize=True)
    @given(square_matrices())
    def test_matches_permutation_sum(self, matrix):
        self.assertEqual(determinant(matrix), permutation_sum(matrix, Statistics.FERMION))
        self.assertEqual(permanent(matrix), permutation_sum(matrix, Statistics.BOSON))

    @hypothesis_settings(deadline=None, max_examples=10, derandomize=True)
    @given(square_matrices(min_dim=7, max_dim=7))
    def test_matches_permutation_sum_dimension_seven(self, matrix):
        self.assertEqual(determinant(matrix), permutation_sum(matrix, Statistics.FERMION))
        self.assertEqual(permanent(matrix), permutation_sum(matrix, Statistics.BOSON))

    @hypothesis_settings(deadline=None, max_examples=30, derandomize=True)
    @given(square_matrices(max_dim=4))
    def test_direct_sum_squares(self, matrix):
        doubled = matrix.direct_sum(matrix)
        self.assertEqual(determinant(doubled), determinant(matrix) ** 2)
        self.assertEqual(permanent(doubled), permanent(matrix) ** 2)
