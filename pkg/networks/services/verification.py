"""
Verificación de los núcleos exactos contra oráculos independientes.

La suma literal de permutaciones es el oráculo de permanente y
determinante; la preparación + proyección sLOCC lo es de las fórmulas
cerradas. El comando verify_oracles presenta los resultados.
"""

import logging
import time
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from django.conf import settings

from networks.constants import (
    DEFAULT_VERIFY_N_MAX,
    MIN_PARTICLES,
    ProtocolKind,
    Statistics,
)
from networks.services import protocols
from networks.services.oracles import permutation_sum
from networks.services.scalar_algebra import ONE, Scalar, ScalarMatrix, determinant, permanent, scalar_sum

logger = logging.getLogger(__name__)

# Entradas de las matrices aleatorias del oráculo: 0, 1/2, 1, 1/√2
RANDOM_ENTRY_POOL = (Scalar(0), Scalar('1/2'), Scalar(1), Scalar.inv_sqrt2())


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ''


class VerificationService:
    """
    Contrasta los núcleos exactos con oráculos independientes.

    Comprobaciones:
        - permanente y determinante contra la suma literal de permutaciones
          (matrices aleatorias y matrices de Gram de los protocolos)
        - probabilidad cerrada contra preparación + proyección sLOCC
        - normalización del árbol de mediciones y fidelidad 1 en cada hoja
    """

    def __init__(self, n_max: int = DEFAULT_VERIFY_N_MAX, random_matrices: Optional[int] = None,
                 max_random_dim: Optional[int] = None, seed: Optional[int] = None):
        config = settings.ENTANGLEMENT
        self.n_max = n_max
        self.random_matrices = config['VERIFY_RANDOM_MATRICES'] if random_matrices is None else random_matrices
        self.max_random_dim = config['VERIFY_MAX_RANDOM_DIM'] if max_random_dim is None else max_random_dim
        self.seed = config['DEFAULT_SEED'] if seed is None else seed

    @property
    def particle_numbers(self) -> range:
        return range(MIN_PARTICLES, self.n_max + 1, 2)

    def run(self) -> List[CheckResult]:
        start_time = time.time()
        results = (
            self.check_random_matrices()
            + self.check_protocol_grams()
            + self.check_closed_forms()
            + self.check_measurement_trees()
        )
        elapsed_ms = (time.time() - start_time) * 1000
        failures = [result for result in results if not result.passed]
        for failure in failures:
            logger.error("Verificación fallida: %s (%s)", failure.name, failure.detail)
        logger.info("Verificación: %d comprobaciones, %d fallos, %.0f ms", len(results), len(failures), elapsed_ms)
        return results

    # ------------------------------------------------------------------
    # Oráculos de permanente y determinante
    # ------------------------------------------------------------------

    @staticmethod
    def _compare_with_oracle(name: str, matrix: ScalarMatrix) -> List[CheckResult]:
        det_value = determinant(matrix)
        det_oracle = permutation_sum(matrix, Statistics.FERMION)
        perm_value = permanent(matrix)
        perm_oracle = permutation_sum(matrix, Statistics.BOSON)
        return [
            CheckResult(f"{name}/det", det_value == det_oracle, f"{det_value} vs {det_oracle}"),
            CheckResult(f"{name}/perm", perm_value == perm_oracle, f"{perm_value} vs {perm_oracle}"),
        ]

    def check_random_matrices(self) -> List[CheckResult]:
        rng = np.random.default_rng(self.seed)
        passed_det = passed_perm = 0
        failures = []
        for index in range(self.random_matrices):
            dim = int(rng.integers(2, self.max_random_dim + 1))
            choices = rng.integers(0, len(RANDOM_ENTRY_POOL), size=(dim, dim))
            matrix = ScalarMatrix.from_rows([[RANDOM_ENTRY_POOL[c] for c in row] for row in choices])
            for result in self._compare_with_oracle(f"random[{index}]", matrix):
                if result.passed:
                    if result.name.endswith('det'):
                        passed_det += 1
                    else:
                        passed_perm += 1
                else:
                    failures.append(result)
        summary = CheckResult(
            'random_matrices',
            not failures,
            f"{passed_det}/{self.random_matrices} det, {passed_perm}/{self.random_matrices} perm",
        )
        return [summary] + failures

    def check_protocol_grams(self) -> List[CheckResult]:
        results = []
        for kind in ProtocolKind:
            for n in self.particle_numbers:
                spec = protocols.NetworkSpec.for_kind(kind, n // 2)
                results.extend(self._compare_with_oracle(f"gram/{kind.value}/{n}", protocols.gram_matrix(spec)))
        return results

    # ------------------------------------------------------------------
    # Protocolos
    # ------------------------------------------------------------------

    def check_closed_forms(self) -> List[CheckResult]:
        results = []
        for kind in ProtocolKind:
            for n in self.particle_numbers:
                closed = protocols.closed_form_probability(kind, n)
                direct = protocols.direct_probability(kind, n)
                results.append(CheckResult(f"closed_form/{kind.value}/{n}", closed == direct, f"{closed} vs {direct}"))
        return results

    def check_measurement_trees(self) -> List[CheckResult]:
        runs = []
        for n in self.particle_numbers:
            pairs = n // 2
            runs.append((f"fermionic_shared/{n}", protocols.run_fermionic_transfer(pairs)))
            runs.append((f"bosonic_shared/{n}", protocols.run_bosonic_cascade(pairs)))
            for statistics in Statistics:
                runs.append((f"separated/{statistics.slug}/{n}", protocols.run_separated_swap(pairs, statistics)))

        results = []
        for name, run in runs:
            total = scalar_sum(branch.branch_probability for branch in run.branches)
            worst = min((branch.final_fidelity for branch in run.branches), default=Scalar(0))
            results.append(CheckResult(f"tree/{name}", total == ONE, f"Σ ramas = {total}"))
            results.append(CheckResult(f"leaves/{name}", worst == ONE, f"fidelidad mínima = {worst}"))
        return results
