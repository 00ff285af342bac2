"""
Management command para barrer la probabilidad de éxito en función de n.

Una fila por (kind, n) con n = 4, 6, …, n_max; la columna flotante lleva el
valor exacto a 12 cifras significativas.

Usage:
    python manage.py sweep_probabilities --n-max 12
    python manage.py sweep_probabilities --kinds fermionic_shared --n-max 8 --format json --method direct
"""

import csv
import io
import logging

from django.core.management.base import BaseCommand

from networks.constants import CSV_HEADER, OutputFormat
from networks.exceptions import EntanglementSimulationError
from networks.serializers import SweepRequestSerializer, SweepRowSerializer
from networks.services import RunReportPresenter
from networks.services.protocols import sweep_probabilities

from ._common import render_json, usage_error, validate_options

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Barre la probabilidad de éxito de los protocolos para n = 4, 6, …, n_max'

    def add_arguments(self, parser):
        parser.add_argument('--kinds', nargs='+', help='Protocolos a incluir (por defecto todos)')
        parser.add_argument('--n-max', type=int, required=True, help='n máximo (par)')
        parser.add_argument('--format', default='csv', help='csv o json')
        parser.add_argument('--method', default='closed_form', help='closed_form o direct')
        parser.add_argument('--n-jobs', type=int, help='Workers de joblib (por defecto SWEEP_N_JOBS)')

    def handle(self, *args, **options):
        data = {
            'n_max': options['n_max'],
            'format': options['format'],
            'method': options['method'],
        }
        if options.get('kinds'):
            data['kinds'] = options['kinds']
        request = validate_options(SweepRequestSerializer, data)

        try:
            rows = sweep_probabilities(
                request['kinds'],
                request['n_max'],
                request['method'],
                options.get('n_jobs'),
            )
        except EntanglementSimulationError as exc:
            raise usage_error(exc)
        logger.info("Barrido de %d puntos (%s)", len(rows), request['method'])

        if request['format'] == OutputFormat.JSON:
            payload = SweepRowSerializer(RunReportPresenter.build_sweep_rows(rows), many=True).data
            self.stdout.write(render_json(payload))
            return

        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(CSV_HEADER)
        for kind, n, probability in rows:
            writer.writerow(RunReportPresenter.csv_row(kind, n, probability))
        self.stdout.write(buffer.getvalue(), ending='')
