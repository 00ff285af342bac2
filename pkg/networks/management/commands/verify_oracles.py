"""
Management command para verificar los núcleos exactos contra oráculos.

Comprueba permanente/determinante contra la suma literal de permutaciones,
probabilidades cerradas contra la proyección directa y la normalización de
los árboles de medición. Termina con código 1 si algo falla.

Usage:
    python manage.py verify_oracles
    python manage.py verify_oracles --n-max 8 --random-matrices 500 --seed 11
"""

import logging
import time

from django.core.management.base import BaseCommand, CommandError

from networks.constants import DEFAULT_VERIFY_N_MAX
from networks.exceptions import EntanglementSimulationError
from networks.serializers import VerifyRequestSerializer
from networks.services import VerificationService

from ._common import EXIT_VERIFICATION_FAILURE, usage_error, validate_options

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Verifica permanente, determinante y probabilidades contra oráculos independientes'

    def add_arguments(self, parser):
        parser.add_argument('--n-max', type=int, default=DEFAULT_VERIFY_N_MAX, help='n máximo (par)')
        parser.add_argument('--random-matrices', type=int, help='Matrices aleatorias del oráculo')
        parser.add_argument('--seed', type=int, help='Semilla de las matrices aleatorias')

    def handle(self, *args, **options):
        request = validate_options(VerifyRequestSerializer, {
            'n_max': options['n_max'],
            'random_matrices': options.get('random_matrices'),
            'seed': options.get('seed'),
        })

        start_time = time.time()
        service = VerificationService(
            n_max=request['n_max'],
            random_matrices=request.get('random_matrices'),
            seed=request.get('seed'),
        )
        try:
            results = service.run()
        except EntanglementSimulationError as exc:
            raise usage_error(exc)
        elapsed_ms = (time.time() - start_time) * 1000

        failures = [result for result in results if not result.passed]
        for result in results:
            if result.passed:
                self.stdout.write(self.style.SUCCESS(f'✓ {result.name}'))
            else:
                self.stdout.write(self.style.ERROR(f'✗ {result.name}: {result.detail}'))

        self.stdout.write('=' * 70)
        self.stdout.write(
            f'{len(results) - len(failures)}/{len(results)} comprobaciones correctas en {elapsed_ms:.0f} ms'
        )

        if failures:
            raise CommandError(
                f'{len(failures)} comprobaciones fallidas',
                returncode=EXIT_VERIFICATION_FAILURE,
            )
        self.stdout.write(self.style.SUCCESS('Todas las comprobaciones pasaron'))
