"""
Management command para ejecutar un protocolo de activación remota de entrelazamiento.

Imprime en stdout un RunReport en JSON: probabilidad exacta ("p/q") y
flotante, ramas de las mediciones de Bell y estadística de etiquetas AB.

Usage:
    python manage.py run_protocol fermionic_shared --pairs 2
    python manage.py run_protocol bosonic_shared --pairs 3 --mode sample --seed 7
    python manage.py run_protocol separated --pairs 3 --statistics boson --pairing right_to_left
    python manage.py run_protocol separated --pairs 2 --species 0,1 0,0
    python manage.py run_protocol fermionic_shared --pairs 2 --spin-pattern aligned
"""

import logging
import time

from django.core.management.base import BaseCommand

from networks.constants import SpinPattern, Statistics
from networks.exceptions import EntanglementSimulationError
from networks.serializers import RunReportSerializer, RunRequestSerializer
from networks.services import RunReportPresenter
from networks.services.protocols import run_protocol

from ._common import render_json, usage_error, validate_options

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Ejecuta un protocolo y emite el RunReport en JSON'

    def add_arguments(self, parser):
        parser.add_argument('kind', help='fermionic_shared, bosonic_shared o separated')
        parser.add_argument('--pairs', type=int, required=True, help='Número de pares N (n = 2N)')
        parser.add_argument('--statistics', help='boson o fermion (solo separated)')
        parser.add_argument('--mode', default='enumerate', help='enumerate o sample')
        parser.add_argument('--seed', type=int, help='Semilla del modo sample')
        parser.add_argument('--pairing', default='left_to_right', help='left_to_right o right_to_left')
        parser.add_argument('--spin-pattern', default='opposite', help='opposite o aligned (control negativo)')
        parser.add_argument('--species', nargs='+', help='Especies "a,b" de cada par (solo separated)')
        parser.add_argument('--timing', action='store_true', help='Incluir elapsed_ms en el reporte')

    def handle(self, *args, **options):
        request = validate_options(RunRequestSerializer, {
            'kind': options['kind'],
            'pairs': options['pairs'],
            'statistics': options.get('statistics'),
            'mode': options['mode'],
            'seed': options.get('seed'),
            'pairing': options['pairing'],
            'spin_pattern': options['spin_pattern'],
            'species': options.get('species') or [],
            'timing': options['timing'],
        })

        start_time = time.time()
        try:
            result = run_protocol(
                request['kind'],
                request['pairs'],
                Statistics.from_slug(request['statistics']),
                request['mode'],
                request['seed'],
                request['pairing'],
                SpinPattern(request['spin_pattern']),
                request['species'],
            )
        except EntanglementSimulationError as exc:
            raise usage_error(exc)
        elapsed_ms = (time.time() - start_time) * 1000

        report = RunReportPresenter.build_run_report(
            result,
            request['mode'],
            elapsed_ms if request['timing'] else None,
        )
        logger.info("run_protocol %s N=%d: %s", request['kind'], request['pairs'], result.success_probability)
        self.stdout.write(render_json(RunReportSerializer(report).data))
