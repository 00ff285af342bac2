"""Utilidades compartidas por los comandos del simulador."""

import logging

from django.core.management.base import CommandError
from rest_framework.renderers import JSONRenderer

from networks.exceptions import EntanglementSimulationError

logger = logging.getLogger(__name__)

# Códigos de salida
EXIT_VERIFICATION_FAILURE = 1
EXIT_USAGE_ERROR = 2


def _flatten_errors(errors, prefix=''):
    if isinstance(errors, dict):
        for field_name, nested in errors.items():
            label = field_name if field_name != 'non_field_errors' else ''
            yield from _flatten_errors(nested, f"{prefix}{label}: " if label else prefix)
    elif isinstance(errors, list):
        for nested in errors:
            yield from _flatten_errors(nested, prefix)
    else:
        yield f"{prefix}{errors}"


def validate_options(serializer_class, data):
    """Valida las opciones con el serializer o termina con error de uso (código 2)."""
    serializer = serializer_class(data=data)
    if not serializer.is_valid():
        message = '; '.join(_flatten_errors(serializer.errors))
        raise CommandError(f"Opciones inválidas: {message}", returncode=EXIT_USAGE_ERROR)
    return serializer.validated_data


def usage_error(exc: EntanglementSimulationError) -> CommandError:
    logger.warning("Error de dominio: %s", exc)
    return CommandError(str(exc), returncode=EXIT_USAGE_ERROR)


def render_json(data) -> str:
    return JSONRenderer().render(data).decode('utf-8')
