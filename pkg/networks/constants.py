"""
Constantes del simulador de redes cuánticas.

Centraliza enumeraciones y valores numéricos para evitar números mágicos
en los servicios y comandos.
"""

from django.db import models
from django.utils.translation import gettext_lazy as _


# ============================================================================
# GRADOS DE LIBERTAD DE UNA PARTÍCULA
# ============================================================================

class Spin(models.IntegerChoices):
    """Pseudoespín de dos niveles; el orden canónico es ↓ < ↑."""
    DOWN = 0, '↓'
    UP = 1, '↑'


class Statistics(models.IntegerChoices):
    """η = +1 para bosones (permanente), η = −1 para fermiones (determinante)."""
    BOSON = 1, _('boson')
    FERMION = -1, _('fermion')

    @property
    def slug(self) -> str:
        return 'boson' if self is Statistics.BOSON else 'fermion'

    @classmethod
    def from_slug(cls, slug: str) -> 'Statistics':
        return cls.BOSON if slug == 'boson' else cls.FERMION


STATISTICS_SLUGS = ['boson', 'fermion']


# ============================================================================
# TOPOLOGÍAS Y PROTOCOLOS
# ============================================================================

class Topology(models.TextChoices):
    SHARED_CHAIN = 'shared_chain', _('Shared intermediate nodes')
    SEPARATED = 'separated', _('Separated intermediate nodes')


class ProtocolKind(models.TextChoices):
    SEPARATED = 'separated', _('Separated nodes (bosons or fermions)')
    FERMIONIC_SHARED = 'fermionic_shared', _('Shared nodes with fermions')
    BOSONIC_SHARED = 'bosonic_shared', _('Shared nodes with bosons')


class SpinPattern(models.TextChoices):
    # Preparación estándar: cada par con pseudoespines opuestos
    OPPOSITE = 'opposite', _('Opposite pseudospins per pair')
    # Control negativo: todas las partículas en ↓
    ALIGNED = 'aligned', _('All pseudospins down')


class MeasurementMode(models.TextChoices):
    ENUMERATE = 'enumerate', _('Exhaustive branch enumeration')
    SAMPLE = 'sample', _('Seeded sampling of one branch')


class PairingOrder(models.TextChoices):
    LEFT_TO_RIGHT = 'left_to_right', _('C1D1 first')
    RIGHT_TO_LEFT = 'right_to_left', _('Last central pair first')


class SweepMethod(models.TextChoices):
    CLOSED_FORM = 'closed_form', _('Closed-form expression')
    DIRECT = 'direct', _('Preparation + sLOCC projection')


class BellLabel(models.TextChoices):
    """Estados de Bell entre dos nodos distintos (orden IJ = orden de nodos) y en un mismo nodo."""
    PSI_PLUS = 'psi_plus', 'Ψ⁺'
    PSI_MINUS = 'psi_minus', 'Ψ⁻'
    PHI_PLUS = 'phi_plus', 'Φ⁺'
    PHI_MINUS = 'phi_minus', 'Φ⁻'
    PSI_M = 'psi_m', 'Ψ_M'
    PHI_PLUS_M = 'phi_plus_m', 'Φ⁺_M'
    PHI_MINUS_M = 'phi_minus_m', 'Φ⁻_M'

    @property
    def is_same_node(self) -> bool:
        return self.value.endswith('_m')


DISTINCT_SITE_LABELS = (
    BellLabel.PSI_PLUS,
    BellLabel.PSI_MINUS,
    BellLabel.PHI_PLUS,
    BellLabel.PHI_MINUS,
)

SAME_NODE_LABELS = {
    # Pauli deja un único estado de dos fermiones en un nodo con dos niveles
    -1: (BellLabel.PSI_M,),
    1: (BellLabel.PSI_M, BellLabel.PHI_PLUS_M, BellLabel.PHI_MINUS_M),
}


class OutputFormat(models.TextChoices):
    CSV = 'csv', 'CSV'
    JSON = 'json', 'JSON'


# ============================================================================
# NOMBRES DE NODOS
# ============================================================================

ENDPOINT_LEFT = 'A'
ENDPOINT_RIGHT = 'B'
SHARED_NODE_PREFIX = 'M'
SEPARATED_LEFT_PREFIX = 'C'
SEPARATED_RIGHT_PREFIX = 'D'

# ============================================================================
# LÍMITES NUMÉRICOS
# ============================================================================

MIN_PAIRS = 2
MIN_PARTICLES = 2 * MIN_PAIRS

# Ocupación de un nodo medido en la base de Bell
BELL_TARGET_OCCUPANCY = 2

# Tolerancia relativa entre la columna exacta y la flotante de los reportes
FLOAT_RELATIVE_TOLERANCE = 1e-12

# Dígitos significativos de la columna flotante del barrido
FLOAT_SIGNIFICANT_DIGITS = 12

DEFAULT_VERIFY_N_MAX = 6

# Especie por defecto de todas las partículas (idénticas)
DEFAULT_SPECIES = 0

# ============================================================================
# NOTAS DEL REPORTE
# ============================================================================

NULL_STATE_NOTE = 'fidelity 0 (null state)'
SAMPLED_BRANCH_NOTE = (
    'sample mode: one sampled branch; probabilities are path probabilities '
    'and do not sum to 1'
)

CSV_HEADER = ['kind', 'n', 'probability_exact', 'probability_float']
