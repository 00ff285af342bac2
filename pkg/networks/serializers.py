from django.conf import settings
from django.utils.translation import gettext_lazy as _
from rest_framework import serializers

from networks.constants import (
    MIN_PAIRS,
    MIN_PARTICLES,
    STATISTICS_SLUGS,
    MeasurementMode,
    OutputFormat,
    PairingOrder,
    ProtocolKind,
    SpinPattern,
    SweepMethod,
)
from networks.services.scalar_algebra import permanent_bound


# ============================================================================
# CAMPOS EXACTOS
# ============================================================================

class ScalarField(serializers.Field):
    """Scalar de ℚ(√2) como par de racionales {"rational": "p/q", "sqrt2": "p/q"}."""

    def to_representation(self, value):
        return {
            'rational': str(value.rat_part),
            'sqrt2': str(value.sqrt2_part),
        }


class ExactProbabilityField(serializers.Field):
    """
    Probabilidad exacta como cadena "p/q".

    Las probabilidades son racionales; si apareciera una parte en √2 se
    emite la forma "a + b√2" en lugar de perderla.
    """

    def to_representation(self, value):
        if value.is_rational:
            return str(value.as_fraction())
        return str(value)


# ============================================================================
# REPRESENTACIÓN DE ESTADOS Y REPORTES
# ============================================================================

class ModeSerializer(serializers.Serializer):
    node = serializers.CharField()
    spin = serializers.CharField()


class TermSerializer(serializers.Serializer):
    ket = serializers.CharField()
    modes = ModeSerializer(many=True)
    coefficient = ScalarField()
    coefficient_squared = ExactProbabilityField()
    probability = ExactProbabilityField()


class StateListingSerializer(serializers.Serializer):
    """Listado canónico de los términos localizados de un estado."""
    kind = serializers.CharField()
    pairs = serializers.IntegerField()
    n = serializers.IntegerField()
    statistics = serializers.CharField()
    post_selected = serializers.BooleanField()
    norm_squared = ScalarField()
    probability = ExactProbabilityField(required=False)
    term_count = serializers.IntegerField()
    terms = TermSerializer(many=True)


class OutcomeStepSerializer(serializers.Serializer):
    target = serializers.CharField()
    label = serializers.CharField()


class BranchOutcomeSerializer(serializers.Serializer):
    outcome_sequence = OutcomeStepSerializer(many=True)
    probability = ExactProbabilityField()
    probability_float = serializers.FloatField()
    final_ab_label = serializers.CharField()
    final_fidelity = ExactProbabilityField()


class LabelStatisticSerializer(serializers.Serializer):
    label = serializers.CharField()
    probability = ExactProbabilityField()


class RunReportSerializer(serializers.Serializer):
    """
    Reporte de una ejecución de protocolo.

    elapsed_ms solo aparece con --timing; sin él la salida es determinista
    byte a byte. ab_fidelity y post_state_fidelity solo existen en el
    protocolo fermiónico. notes aclara los casos en que branch_probability_sum
    no vale 1: estado preparado nulo o modo sample (probabilidades de camino).
    """
    kind = serializers.CharField()
    pairs = serializers.IntegerField()
    n = serializers.IntegerField()
    statistics = serializers.CharField()
    mode = serializers.CharField()
    probability = ExactProbabilityField()
    probability_float = serializers.FloatField()
    branch_count = serializers.IntegerField()
    branch_probability_sum = ExactProbabilityField()
    branches = BranchOutcomeSerializer(many=True)
    label_statistics = LabelStatisticSerializer(many=True)
    ab_fidelity = ExactProbabilityField(required=False)
    post_state_fidelity = ExactProbabilityField(required=False)
    species = serializers.ListField(child=serializers.ListField(child=serializers.IntegerField()), required=False)
    notes = serializers.ListField(child=serializers.CharField(), required=False)
    elapsed_ms = serializers.FloatField(required=False)


class SweepRowSerializer(serializers.Serializer):
    kind = serializers.CharField()
    n = serializers.IntegerField()
    probability_exact = ExactProbabilityField()
    probability_float = serializers.FloatField()


# ============================================================================
# VALIDACIÓN DE OPCIONES DE LOS COMANDOS
# ============================================================================

def _validate_permanent_size(particle_number):
    bound = permanent_bound()
    if particle_number > bound:
        raise serializers.ValidationError(
            _("n = %(n)s supera la cota del permanente (%(bound)s); ajuste PERMANENT_MAX_DIM")
            % {'n': particle_number, 'bound': bound}
        )


class SpeciesPairField(serializers.Field):
    """Especies (↓, ↑) de un par como "a,b" o [a, b] con enteros ≥ 0."""

    default_error_messages = {
        'invalid': _('Especies de un par inválidas: "{value}" (formato "a,b", enteros ≥ 0)'),
    }

    def to_internal_value(self, data):
        parts = data.split(',') if isinstance(data, str) else data
        try:
            pair = tuple(int(part) for part in parts)
        except (TypeError, ValueError):
            self.fail('invalid', value=data)
        if len(pair) != 2 or any(value < 0 for value in pair):
            self.fail('invalid', value=data)
        return pair

    def to_representation(self, value):
        return list(value)


class ProtocolRequestSerializer(serializers.Serializer):
    """Campos comunes a run_protocol y expand_state."""

    kind = serializers.ChoiceField(choices=ProtocolKind.choices)
    pairs = serializers.IntegerField(
        min_value=MIN_PAIRS,
        help_text="Número de pares N (n = 2N partículas)"
    )
    statistics = serializers.ChoiceField(
        choices=STATISTICS_SLUGS,
        required=False,
        allow_null=True,
        help_text="Solo para separated; los protocolos compartidos fijan su estadística"
    )

    def validate(self, data):
        kind = data['kind']
        statistics = data.get('statistics')
        implied = {
            ProtocolKind.FERMIONIC_SHARED: 'fermion',
            ProtocolKind.BOSONIC_SHARED: 'boson',
        }.get(kind)

        if implied and statistics and statistics != implied:
            raise serializers.ValidationError({
                'statistics': _("%(kind)s requiere estadística %(implied)s") % {'kind': kind, 'implied': implied}
            })
        data['statistics'] = implied or statistics or 'fermion'

        if data['statistics'] == 'boson':
            _validate_permanent_size(2 * data['pairs'])
        return data


class RunRequestSerializer(ProtocolRequestSerializer):
    mode = serializers.ChoiceField(choices=MeasurementMode.choices, default=MeasurementMode.ENUMERATE)
    seed = serializers.IntegerField(required=False, allow_null=True, min_value=0)
    pairing = serializers.ChoiceField(choices=PairingOrder.choices, default=PairingOrder.LEFT_TO_RIGHT)
    spin_pattern = serializers.ChoiceField(choices=SpinPattern.choices, default=SpinPattern.OPPOSITE)
    species = serializers.ListField(
        child=SpeciesPairField(),
        required=False,
        allow_empty=True,
        help_text="Especies (↓, ↑) de cada par; solo separated"
    )
    timing = serializers.BooleanField(default=False)

    def validate(self, data):
        data = super().validate(data)
        species = data.get('species') or []
        if species:
            if data['kind'] != ProtocolKind.SEPARATED:
                raise serializers.ValidationError({
                    'species': _("Solo separated admite especies por par")
                })
            if len(species) != data['pairs']:
                raise serializers.ValidationError({
                    'species': _("Se esperaban %(pairs)s pares de especies, recibidos %(count)s")
                    % {'pairs': data['pairs'], 'count': len(species)}
                })
        data['species'] = tuple(species)
        if data.get('seed') is None:
            data['seed'] = settings.ENTANGLEMENT['DEFAULT_SEED']
        return data


class ExpandRequestSerializer(ProtocolRequestSerializer):
    post_select = serializers.BooleanField(default=False)


class SweepRequestSerializer(serializers.Serializer):
    kinds = serializers.ListField(
        child=serializers.ChoiceField(choices=ProtocolKind.choices),
        required=False,
        allow_empty=False,
    )
    n_max = serializers.IntegerField(min_value=MIN_PARTICLES)
    format = serializers.ChoiceField(choices=OutputFormat.choices, default=OutputFormat.CSV)
    method = serializers.ChoiceField(choices=SweepMethod.choices, default=SweepMethod.CLOSED_FORM)

    def validate_n_max(self, value):
        if value % 2:
            raise serializers.ValidationError(_("n_max debe ser par"))
        _validate_permanent_size(value)
        return value

    def validate(self, data):
        if not data.get('kinds'):
            data['kinds'] = [kind.value for kind in ProtocolKind]
        # Orden determinista (kind, n) independiente del orden de los flags
        order = [kind.value for kind in ProtocolKind]
        data['kinds'] = sorted(set(data['kinds']), key=order.index)
        return data


class VerifyRequestSerializer(serializers.Serializer):
    n_max = serializers.IntegerField(min_value=MIN_PARTICLES)
    random_matrices = serializers.IntegerField(min_value=0, required=False, allow_null=True)
    seed = serializers.IntegerField(min_value=0, required=False, allow_null=True)

    def validate_n_max(self, value):
        if value % 2:
            raise serializers.ValidationError(_("n_max debe ser par"))
        _validate_permanent_size(value)
        return value
