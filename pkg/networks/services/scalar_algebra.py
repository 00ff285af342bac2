"""
Aritmética exacta en ℚ(√2) y funcionales matriciales (determinante, permanente).

Todas las amplitudes de los protocolos (divisores de haz 1/√2, normalizaciones
de Bell, normalizador bosónico √2) viven en ℚ(√2), de modo que las
probabilidades se comparan por igualdad exacta (2/9, 6/25, 1/4).
"""

import logging
import math
from fractions import Fraction
from functools import total_ordering
from numbers import Rational
from typing import Iterable, Optional, Sequence

import numpy as np
from django.conf import settings

from networks.exceptions import (
    DimensionMismatchError,
    PermanentBoundError,
    ScalarArithmeticError,
)

logger = logging.getLogger(__name__)

SQRT2_FLOAT = math.sqrt(2.0)
DEFAULT_PERMANENT_MAX_DIM = 20


def _rational_sqrt(value: Fraction) -> Optional[Fraction]:
    """Raíz cuadrada racional exacta, o None si value no es un cuadrado en ℚ."""
    if value < 0:
        return None
    root_num = math.isqrt(value.numerator)
    root_den = math.isqrt(value.denominator)
    if root_num * root_num == value.numerator and root_den * root_den == value.denominator:
        return Fraction(root_num, root_den)
    return None


@total_ordering
class Scalar:
    """
    Elemento de ℚ(√2): rat_part + sqrt2_part·√2.

    La representación es canónica (dos racionales), así que la igualdad es
    componente a componente. Los valores son inmutables y hashables.

    Examples:
        >>> half_root = Scalar(0, Fraction(1, 2))   # 1/√2
        >>> half_root * half_root
        Scalar(1/2)
    """

    __slots__ = ('_rat', '_irr')

    def __init__(self, rat_part=0, sqrt2_part=0):
        self._rat = Fraction(rat_part)
        self._irr = Fraction(sqrt2_part)

    @classmethod
    def _make(cls, rat: Fraction, irr: Fraction) -> 'Scalar':
        obj = cls.__new__(cls)
        obj._rat = rat
        obj._irr = irr
        return obj

    @classmethod
    def coerce(cls, value) -> 'Scalar':
        if isinstance(value, Scalar):
            return value
        if isinstance(value, (Rational, str)):
            return cls._make(Fraction(value), Fraction(0))
        raise TypeError(f"No se puede convertir {value!r} a Scalar")

    @classmethod
    def sqrt2(cls) -> 'Scalar':
        return cls._make(Fraction(0), Fraction(1))

    @classmethod
    def inv_sqrt2(cls) -> 'Scalar':
        return cls._make(Fraction(0), Fraction(1, 2))

    # ------------------------------------------------------------------
    # Componentes
    # ------------------------------------------------------------------

    @property
    def rat_part(self) -> Fraction:
        return self._rat

    @property
    def sqrt2_part(self) -> Fraction:
        return self._irr

    @property
    def is_rational(self) -> bool:
        return self._irr == 0

    def as_fraction(self) -> Fraction:
        if self._irr != 0:
            raise ScalarArithmeticError(f"{self} no es racional")
        return self._rat

    # ------------------------------------------------------------------
    # Aritmética de cuerpo
    # ------------------------------------------------------------------

    def __add__(self, other):
        try:
            other = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return Scalar._make(self._rat + other._rat, self._irr + other._irr)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            other = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return Scalar._make(self._rat - other._rat, self._irr - other._irr)

    def __rsub__(self, other):
        try:
            other = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        try:
            other = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        a, b = self._rat, self._irr
        c, d = other._rat, other._irr
        if b == 0 and d == 0:
            return Scalar._make(a * c, Fraction(0))
        return Scalar._make(a * c + 2 * b * d, a * d + b * c)

    __rmul__ = __mul__

    def __neg__(self):
        return Scalar._make(-self._rat, -self._irr)

    def __pos__(self):
        return self

    def conjugate(self) -> 'Scalar':
        """Conjugado de Galois a − b√2 (no el complejo: todo es real)."""
        return Scalar._make(self._rat, -self._irr)

    def field_norm(self) -> Fraction:
        """Norma de cuerpo a² − 2b², racional."""
        return self._rat * self._rat - 2 * self._irr * self._irr

    def inverse(self) -> 'Scalar':
        if not self:
            raise ScalarArithmeticError("Inverso de cero en ℚ(√2)")
        norm = self.field_norm()
        return Scalar._make(self._rat / norm, -self._irr / norm)

    def __truediv__(self, other):
        try:
            other = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        if not other:
            raise ScalarArithmeticError("División por cero en ℚ(√2)")
        if other._irr == 0:
            return Scalar._make(self._rat / other._rat, self._irr / other._rat)
        return self * other.inverse()

    def __rtruediv__(self, other):
        try:
            other = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return other / self

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = ONE
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def abs_square(self) -> 'Scalar':
        """|a|² = a·a; todas las amplitudes de los protocolos son reales."""
        return self * self

    # ------------------------------------------------------------------
    # Signo, orden y raíces
    # ------------------------------------------------------------------

    def sign(self) -> int:
        a, b = self._rat, self._irr
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return (b > 0) - (b < 0)
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # Signos opuestos: decide la comparación de a² con 2b²
        norm = self.field_norm()
        if a > 0:
            return (norm > 0) - (norm < 0)
        return (norm < 0) - (norm > 0)

    def __bool__(self):
        return self._rat != 0 or self._irr != 0

    def __eq__(self, other):
        try:
            other = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self._rat == other._rat and self._irr == other._irr

    def __lt__(self, other):
        try:
            other = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return (self - other).sign() < 0

    def __hash__(self):
        if self._irr == 0:
            return hash(self._rat)
        return hash((self._rat, self._irr))

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def sqrt(self) -> Optional['Scalar']:
        """
        Raíz cuadrada no negativa dentro de ℚ(√2), o None si no existe.

        Para x = a + b√2 se buscan c, d con c² + 2d² = a y 2cd = b, es decir
        c² = (a ± √(a² − 2b²))/2.
        """
        if not self:
            return ZERO
        if self.sign() < 0:
            return None
        a, b = self._rat, self._irr
        if b == 0:
            root = _rational_sqrt(a)
            if root is not None:
                return Scalar._make(root, Fraction(0))
            root = _rational_sqrt(a / 2)
            if root is not None:
                return Scalar._make(Fraction(0), root)
            return None
        discriminant = _rational_sqrt(self.field_norm())
        if discriminant is None:
            return None
        for c_squared in ((a + discriminant) / 2, (a - discriminant) / 2):
            c = _rational_sqrt(c_squared)
            if not c:
                continue
            root = Scalar._make(c, b / (2 * c))
            if root.sign() < 0:
                root = -root
            if root * root == self:
                return root
        return None

    # ------------------------------------------------------------------
    # Conversión y representación
    # ------------------------------------------------------------------

    def to_float(self) -> float:
        a, b = self._rat, self._irr
        if b == 0:
            return float(a)
        if a == 0 or (a > 0) == (b > 0):
            return float(a) + float(b) * SQRT2_FLOAT
        # Evita la cancelación: x = (a² − 2b²)/(a − b√2)
        return float(self.field_norm()) / (float(a) - float(b) * SQRT2_FLOAT)

    __float__ = to_float

    def __repr__(self):
        if self._irr == 0:
            return f"Scalar({self._rat})"
        return f"Scalar({self._rat} + {self._irr}·√2)"

    def __str__(self):
        if self._irr == 0:
            return str(self._rat)
        if self._rat == 0:
            return f"{self._irr}√2"
        sign = '+' if self._irr > 0 else '-'
        return f"{self._rat} {sign} {abs(self._irr)}√2"


ZERO = Scalar._make(Fraction(0), Fraction(0))
ONE = Scalar._make(Fraction(1), Fraction(0))


def scalar_sum(values: Iterable[Scalar]) -> Scalar:
    total = ZERO
    for value in values:
        total = total + value
    return total


def scalar_product(values: Iterable[Scalar]) -> Scalar:
    """Producto con salida temprana en el primer factor nulo."""
    result = ONE
    for value in values:
        if not value:
            return ZERO
        result = result * value
    return result


class ScalarMatrix:
    """
    Matriz cuadrada de Scalar respaldada por un ndarray de dtype=object.

    Attributes:
        entries (np.ndarray): arreglo dim×dim de Scalar
    """

    __slots__ = ('entries',)

    def __init__(self, entries: np.ndarray):
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionMismatchError(
                f"ScalarMatrix requiere una matriz cuadrada, recibido {entries.shape}"
            )
        self.entries = entries

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> 'ScalarMatrix':
        dim = len(rows)
        entries = np.empty((dim, dim), dtype=object)
        for i, row in enumerate(rows):
            if len(row) != dim:
                raise DimensionMismatchError(
                    f"La fila {i} tiene {len(row)} entradas, se esperaban {dim}"
                )
            for j, value in enumerate(row):
                entries[i, j] = Scalar.coerce(value)
        return cls(entries)

    @classmethod
    def zeros(cls, dim: int) -> 'ScalarMatrix':
        entries = np.empty((dim, dim), dtype=object)
        entries.fill(ZERO)
        return cls(entries)

    @classmethod
    def identity(cls, dim: int) -> 'ScalarMatrix':
        matrix = cls.zeros(dim)
        for i in range(dim):
            matrix.entries[i, i] = ONE
        return matrix

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __getitem__(self, index) -> Scalar:
        return self.entries[index]

    def __eq__(self, other):
        if not isinstance(other, ScalarMatrix):
            return NotImplemented
        return self.dim == other.dim and all(
            self.entries[i, j] == other.entries[i, j]
            for i in range(self.dim)
            for j in range(self.dim)
        )

    def direct_sum(self, other: 'ScalarMatrix') -> 'ScalarMatrix':
        """Suma directa (bloque diagonal) self ⊕ other."""
        result = ScalarMatrix.zeros(self.dim + other.dim)
        result.entries[:self.dim, :self.dim] = self.entries
        result.entries[self.dim:, self.dim:] = other.entries
        return result

    def to_float_array(self) -> np.ndarray:
        return np.vectorize(float, otypes=[float])(self.entries) if self.dim else np.zeros((0, 0))

    def __repr__(self):
        rows = ', '.join(
            '[' + ', '.join(str(value) for value in row) + ']'
            for row in self.entries
        )
        return f"ScalarMatrix([{rows}])"


# ============================================================================
# DETERMINANTE (Bareiss) Y PERMANENTE (Ryser + código Gray)
# ============================================================================

def determinant(matrix: ScalarMatrix) -> Scalar:
    """
    Determinante exacto por eliminación libre de fracciones (Bareiss).

    Cada paso divide exactamente por el pivote anterior, así que el coste es
    O(n³) operaciones en ℚ(√2) sin crecimiento de denominadores intermedios.
    """
    n = matrix.dim
    if n == 0:
        return ONE
    m = matrix.entries.copy()
    sign = 1
    previous_pivot = ONE

    for k in range(n - 1):
        if not m[k, k]:
            swap = next((i for i in range(k + 1, n) if m[i, k]), None)
            if swap is None:
                return ZERO
            m[[k, swap]] = m[[swap, k]]
            sign = -sign
        pivot = m[k, k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i, j] = (m[i, j] * pivot - m[i, k] * m[k, j]) / previous_pivot
        previous_pivot = pivot

    result = m[n - 1, n - 1]
    return result if sign > 0 else -result


def permanent_bound() -> int:
    config = getattr(settings, 'ENTANGLEMENT', {})
    return int(config.get('PERMANENT_MAX_DIM', DEFAULT_PERMANENT_MAX_DIM))


def permanent(matrix: ScalarMatrix, max_dim: Optional[int] = None) -> Scalar:
    """
    Permanente exacto por la fórmula de Ryser recorriendo subconjuntos en
    código Gray: perm(A) = (−1)ⁿ Σ_S (−1)^|S| Πᵢ Σ_{j∈S} aᵢⱼ.

    Cada subconjunto difiere del anterior en una sola columna, así que las
    sumas por fila se actualizan en O(n): coste total O(2ⁿ·n).

    Raises:
        PermanentBoundError: si dim supera la cota (settings PERMANENT_MAX_DIM)
    """
    n = matrix.dim
    bound = permanent_bound() if max_dim is None else max_dim
    if n > bound:
        raise PermanentBoundError(
            f"Permanente de dimensión {n} supera la cota configurada ({bound})"
        )
    if n == 0:
        return ONE

    columns = matrix.entries
    row_sums = np.empty(n, dtype=object)
    row_sums.fill(ZERO)
    total = ZERO
    previous_gray = 0

    for k in range(1, 1 << n):
        gray = k ^ (k >> 1)
        changed = gray ^ previous_gray
        column = changed.bit_length() - 1
        if gray & changed:
            row_sums = row_sums + columns[:, column]
        else:
            row_sums = row_sums - columns[:, column]
        previous_gray = gray

        term = scalar_product(row_sums)
        if not term:
            continue
        if gray.bit_count() % 2:
            total = total - term
        else:
            total = total + term

    return -total if n % 2 else total
