"""
Tests para VerificationService.

Cubre:
    - Matrices de Gram de los tres protocolos hasta n = 8 contra la suma de permutaciones
    - Fórmulas cerradas contra la proyección directa hasta n = 8
    - Normalización de los árboles de medición
    - Detección de un núcleo alterado
"""

from unittest.mock import patch

from django.test import SimpleTestCase

from networks.constants import ProtocolKind
from networks.services import VerificationService
from networks.services.scalar_algebra import ZERO


class VerificationServiceTestCase(SimpleTestCase):

    def test_protocol_grams_up_to_eight_particles(self):
        results = VerificationService(n_max=8, random_matrices=0).check_protocol_grams()
        names = [result.name for result in results]
        self.assertEqual(len(results), len(ProtocolKind) * 3 * 2)
        self.assertIn('gram/bosonic_shared/8/perm', names)
        self.assertIn('gram/fermionic_shared/8/det', names)
        self.assertTrue(all(result.passed for result in results), [r for r in results if not r.passed])

    def test_closed_forms_up_to_eight_particles(self):
        results = VerificationService(n_max=8, random_matrices=0).check_closed_forms()
        self.assertEqual(len(results), len(ProtocolKind) * 3)
        self.assertTrue(all(result.passed for result in results), [r for r in results if not r.passed])

    def test_measurement_trees(self):
        results = VerificationService(n_max=6, random_matrices=0).check_measurement_trees()
        self.assertTrue(all(result.passed for result in results), [r for r in results if not r.passed])
        self.assertIn('leaves/separated/fermion/6', [result.name for result in results])

    def test_random_matrices_summary(self):
        results = VerificationService(n_max=4, random_matrices=20, seed=3).check_random_matrices()
        self.assertEqual(len(results), 1)
        self.assertTrue(results[0].passed)
        self.assertEqual(results[0].detail, '20/20 det, 20/20 perm')

    def test_altered_determinant_is_detected(self):
        with patch('networks.services.verification.determinant', return_value=ZERO):
            results = VerificationService(n_max=4, random_matrices=20, seed=3).check_random_matrices()
        self.assertFalse(results[0].passed)
        self.assertTrue(all(result.name.endswith('/det') for result in results[1:]))
