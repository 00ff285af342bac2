"""
Management command para listar la expansión localizada del estado preparado.

Sin --post-select lista el estado preparado normalizado; con --post-select
lista el estado tras la proyección sLOCC junto con su probabilidad.

Usage:
    python manage.py expand_state fermionic_shared --pairs 2
    python manage.py expand_state bosonic_shared --pairs 2 --post-select
    python manage.py expand_state separated --pairs 2 --statistics boson
"""

import logging

from django.core.management.base import BaseCommand, CommandError

from networks.constants import Statistics
from networks.exceptions import EntanglementSimulationError
from networks.serializers import ExpandRequestSerializer, StateListingSerializer
from networks.services import RunReportPresenter
from networks.services.protocols import NetworkSpec, prepare_state
from networks.services.slocc import slocc_project
from networks.services.states import NormalizedState, expand_localized

from ._common import EXIT_USAGE_ERROR, render_json, usage_error, validate_options

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Lista los términos localizados canónicos del estado de un protocolo'

    def add_arguments(self, parser):
        parser.add_argument('kind', help='fermionic_shared, bosonic_shared o separated')
        parser.add_argument('--pairs', type=int, required=True, help='Número de pares N')
        parser.add_argument('--statistics', help='boson o fermion (solo separated)')
        parser.add_argument('--post-select', action='store_true', help='Aplicar la post-selección sLOCC')

    def handle(self, *args, **options):
        request = validate_options(ExpandRequestSerializer, {
            'kind': options['kind'],
            'pairs': options['pairs'],
            'statistics': options.get('statistics'),
            'post_select': options['post_select'],
        })

        try:
            spec = NetworkSpec.for_kind(request['kind'], request['pairs'], Statistics.from_slug(request['statistics']))
            prepared = prepare_state(spec)
            probability = None
            if request['post_select']:
                projection = slocc_project(prepared, spec.post_selection_config())
                if not projection.succeeded:
                    raise CommandError("La post-selección tiene probabilidad 0", returncode=EXIT_USAGE_ERROR)
                state = projection.post_state
                probability = projection.probability
            else:
                state = NormalizedState(expand_localized(prepared), prepared.norm_squared)
        except EntanglementSimulationError as exc:
            raise usage_error(exc)

        listing = RunReportPresenter.build_state_listing(
            request['kind'],
            request['pairs'],
            request['statistics'],
            state,
            request['post_select'],
            probability,
        )
        logger.debug("expand_state %s N=%d: %d términos", request['kind'], request['pairs'], listing['term_count'])
        self.stdout.write(render_json(StateListingSerializer(listing).data))
