"""
Oráculo de sumas de permutaciones: Σ_P η^P Πᵢ m[i, P(i)] literal.

Coste O(n!·n); solo se usa para contrastar permanent/determinant en
verify_oracles y en los tests.
"""

from itertools import permutations

from sympy.combinatorics import Permutation

from networks.constants import Statistics
from networks.services.scalar_algebra import ONE, ZERO, Scalar, ScalarMatrix


def permutation_sum(matrix: ScalarMatrix, statistics: Statistics) -> Scalar:
    n = matrix.dim
    if n == 0:
        return ONE
    fermionic = Statistics(statistics) == Statistics.FERMION
    total = ZERO
    for columns in permutations(range(n)):
        term = ONE
        for row, column in enumerate(columns):
            entry = matrix[row, column]
            if not entry:
                term = ZERO
                break
            term = term * entry
        if not term:
            continue
        if fermionic and Permutation(list(columns)).signature() < 0:
            term = -term
        total = total + term
    return total
