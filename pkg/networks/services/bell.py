"""
Bases de Bell, medición de Bell sobre un subespacio de dos partículas y fidelidades.

Bases:
    - Nodos distintos I < J: Ψ± = (|I↓,J↑⟩ ± |I↑,J↓⟩)/√2, Φ± = (|I↓,J↓⟩ ± |I↑,J↑⟩)/√2
    - Mismo nodo M con bosones: Ψ_M = |M↑,M↓⟩, Φ±_M = (|M↓,M↓⟩ ± |M↑,M↑⟩)/2
    - Mismo nodo M con fermiones: solo Ψ_M

La medición actúa sobre el espín. Si las partículas medidas pueden ser de
especies distintas, el detector registra también la especie de cada una y
cada firma de especies da resultados propios; la fidelidad suma los
sectores de especie (traza sobre la especie).
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from networks.constants import (
    BELL_TARGET_OCCUPANCY,
    DEFAULT_SPECIES,
    DISTINCT_SITE_LABELS,
    SAME_NODE_LABELS,
    BellLabel,
    Spin,
    Statistics,
)
from networks.exceptions import (
    InvalidConfigurationError,
    MeasurementTargetError,
    StatisticsMismatchError,
)
from networks.services.scalar_algebra import ZERO, Scalar, scalar_sum
from networks.services.states import (
    LocalMode,
    ManyBodyState,
    Node,
    NormalizedState,
    ProductKet,
    StateLike,
    as_state,
    expand_localized,
    known_norm_squared,
    norm_squared,
    normalize,
    state_inner_product,
)

logger = logging.getLogger(__name__)

Target = Union[Node, Sequence[Node]]
SpeciesSignature = Tuple[int, int]
UNIFORM_SPECIES = (DEFAULT_SPECIES, DEFAULT_SPECIES)

DOWN, UP = Spin.DOWN, Spin.UP

# (espín I, espín J, signo relativo) de cada estado de Bell; Ψ_M se lista como |M↑,M↓⟩
_BELL_COMPONENTS = {
    BellLabel.PSI_PLUS: (((DOWN, UP), 1), ((UP, DOWN), 1)),
    BellLabel.PSI_MINUS: (((DOWN, UP), 1), ((UP, DOWN), -1)),
    BellLabel.PHI_PLUS: (((DOWN, DOWN), 1), ((UP, UP), 1)),
    BellLabel.PHI_MINUS: (((DOWN, DOWN), 1), ((UP, UP), -1)),
    BellLabel.PSI_M: (((UP, DOWN), 1),),
    BellLabel.PHI_PLUS_M: (((DOWN, DOWN), 1), ((UP, UP), 1)),
    BellLabel.PHI_MINUS_M: (((DOWN, DOWN), 1), ((UP, UP), -1)),
}


@dataclass(frozen=True)
class BellOutcome:
    """Un resultado de una medición de Bell: etiqueta, probabilidad y estado residual."""
    target: Tuple[Node, ...]
    label: BellLabel
    probability: Scalar
    residual: NormalizedState
    species: SpeciesSignature = UNIFORM_SPECIES

    @property
    def target_name(self) -> str:
        name = ''.join(node.name for node in self.target)
        if self.species != UNIFORM_SPECIES:
            name += '[' + ','.join(str(value) for value in self.species) + ']'
        return name


def target_nodes(target: Target) -> Tuple[Node, ...]:
    if isinstance(target, Node):
        return (target,)
    nodes = tuple(sorted(set(target)))
    if len(nodes) not in (1, 2):
        raise MeasurementTargetError(f"El blanco de una medición de Bell tiene 1 o 2 nodos, recibido {len(nodes)}")
    return nodes


def bell_state(label: BellLabel, nodes: Sequence[Node], statistics: Statistics,
               species: SpeciesSignature = UNIFORM_SPECIES) -> ManyBodyState:
    """
    Estado de Bell normalizado en forma localizada canónica.

    species asigna la especie de la partícula en I y en J; en un mismo nodo
    ambas deben coincidir.
    """
    label = BellLabel(label)
    statistics = Statistics(statistics)
    nodes = target_nodes(nodes)

    if label.is_same_node:
        if len(nodes) != 1:
            raise InvalidConfigurationError(f"{label.label} requiere un único nodo")
        if statistics == Statistics.FERMION and label != BellLabel.PSI_M:
            raise StatisticsMismatchError(f"{label.label} no existe para fermiones (Pauli)")
        if species[0] != species[1]:
            raise InvalidConfigurationError(f"{label.label} requiere partículas de la misma especie")
        first = second = nodes[0]
        prefactor = Scalar(1, 0) if label == BellLabel.PSI_M else Scalar('1/2')
    else:
        if len(nodes) != 2:
            raise InvalidConfigurationError(f"{label.label} requiere dos nodos distintos")
        first, second = nodes
        prefactor = Scalar.inv_sqrt2()

    terms = [
        (
            ProductKet.from_modes(
                (LocalMode(first, spin_i, species[0]), LocalMode(second, spin_j, species[1])),
                statistics,
            ),
            prefactor * sign,
        )
        for (spin_i, spin_j), sign in _BELL_COMPONENTS[label]
    ]
    return expand_localized(ManyBodyState.from_terms(terms, statistics, 2))


def bell_basis(nodes: Target, statistics: Statistics,
               species: SpeciesSignature = UNIFORM_SPECIES) -> List[Tuple[BellLabel, ManyBodyState]]:
    nodes = target_nodes(nodes)
    labels = DISTINCT_SITE_LABELS if len(nodes) == 2 else SAME_NODE_LABELS[int(statistics)]
    if len(nodes) == 1 and species[0] != species[1]:
        return []
    return [(label, bell_state(label, nodes, statistics, species)) for label in labels]


def species_signature(ket: ProductKet) -> SpeciesSignature:
    """Especies de las dos partículas de un ket localizado canónico, en orden de modo."""
    first, second = ket.local_modes
    return first.species, second.species


def _split_target(state: ManyBodyState, nodes: Tuple[Node, ...]) -> Dict[ProductKet, Dict[ProductKet, Scalar]]:
    """
    Reescribe cada término como |objetivo⟩ ∧ |resto⟩.

    Llevar las dos partículas del objetivo al frente cuesta η^(partículas
    cruzadas) en el coeficiente.
    """
    fermionic = state.statistics == Statistics.FERMION
    groups: Dict[ProductKet, Dict[ProductKet, Scalar]] = {}

    for ket, coefficient in state.terms.items():
        modes = ket.local_modes
        positions = [index for index, mode in enumerate(modes) if mode.node in nodes]
        if len(positions) != BELL_TARGET_OCCUPANCY:
            raise MeasurementTargetError(
                f"El término {ket} tiene {len(positions)} partículas en {[n.name for n in nodes]}"
            )
        if len(nodes) == 2 and modes[positions[0]].node == modes[positions[1]].node:
            raise MeasurementTargetError(
                f"El término {ket} no tiene una partícula en cada nodo del par"
            )
        crossings = sum(position - k for k, position in enumerate(positions))
        if fermionic and crossings % 2:
            coefficient = -coefficient

        target_ket = ProductKet.from_modes((modes[p] for p in positions), state.statistics)
        rest_ket = ProductKet.from_modes(
            (mode for index, mode in enumerate(modes) if index not in positions),
            state.statistics,
        )
        bucket = groups.setdefault(target_ket, {})
        bucket[rest_ket] = bucket.get(rest_ket, ZERO) + coefficient
    return groups


def bell_measure(state: StateLike, target: Target) -> List[BellOutcome]:
    """
    Mide el objetivo en la base de Bell que corresponde a η y al número de nodos.

    Cada resultado lleva P(B) = ‖⟨B|Ψ⟩‖² / (⟨B|B⟩⟨Ψ|Ψ⟩) y el residual
    normalizado sobre las partículas restantes; los resultados de probabilidad
    cero se omiten. Los resultados se agrupan por firma de especies del
    objetivo y, dentro de cada firma, siguen el orden de la base.

    Raises:
        MeasurementTargetError: si algún término no tiene exactamente dos
            partículas en el objetivo
    """
    nodes = target_nodes(target)
    expanded = expand_localized(state)
    total = known_norm_squared(state)
    statistics = expanded.statistics
    rest_number = expanded.particle_number - BELL_TARGET_OCCUPANCY
    groups = _split_target(expanded, nodes)

    outcomes = []
    for species in sorted({species_signature(target_ket) for target_ket in groups}):
        for label, reference in bell_basis(nodes, statistics, species):
            residual_terms: Dict[ProductKet, Scalar] = {}
            for target_ket, rest_terms in groups.items():
                amplitude = reference.coefficient(target_ket) * target_ket.self_overlap()
                if not amplitude:
                    continue
                for rest_ket, coefficient in rest_terms.items():
                    residual_terms[rest_ket] = residual_terms.get(rest_ket, ZERO) + coefficient * amplitude

            residual = ManyBodyState(residual_terms, statistics, rest_number)
            if not residual:
                continue
            probability = norm_squared(residual) / (norm_squared(reference) * total)
            outcomes.append(BellOutcome(nodes, label, probability, normalize(residual), species))
            logger.debug("Bell %s en %s (especies %s): probabilidad %s", label.label, nodes, species, probability)

    return outcomes


def support_nodes(state: StateLike) -> Tuple[Node, ...]:
    return tuple(sorted({
        mode.node
        for ket in expand_localized(state).terms
        for mode in ket.local_modes
    }))


def fidelity(ab_state: StateLike, label: BellLabel, nodes: Sequence[Node] = None) -> Scalar:
    """
    Σ_σ |⟨Bell_σ|ψ⟩|² / (⟨Bell|Bell⟩⟨ψ|ψ⟩), sumando sobre las firmas de
    especies σ presentes en el estado.

    Con una sola especie es la fidelidad usual. Con especies distintas la
    suma equivale a trazar la especie: un estado producto de espín en cada
    sector da fidelidad 1/2. Sin nodos explícitos se usan los nodos donde el
    estado tiene soporte.

    Raises:
        StatisticsMismatchError: si el estado no tiene dos partículas
    """
    base = as_state(ab_state)
    if base.particle_number != BELL_TARGET_OCCUPANCY:
        raise StatisticsMismatchError(
            f"La fidelidad de Bell requiere 2 partículas, el estado tiene {base.particle_number}"
        )
    if nodes is None:
        nodes = support_nodes(ab_state)
    expanded = expand_localized(base)
    overlaps = []
    reference_norm: Optional[Scalar] = None
    for species in sorted({species_signature(ket) for ket in expanded.terms}):
        if len(target_nodes(nodes)) == 1 and species[0] != species[1]:
            continue
        reference = bell_state(label, nodes, base.statistics, species)
        reference_norm = norm_squared(reference)
        overlaps.append(state_inner_product(expanded, reference).abs_square())
    if reference_norm is None:
        return ZERO
    return scalar_sum(overlaps) / (reference_norm * known_norm_squared(ab_state))


def identify_bell_label(ab_state: StateLike) -> Tuple[BellLabel, Scalar]:
    """Etiqueta de Bell de máxima fidelidad (la primera en caso de empate)."""
    base = as_state(ab_state)
    nodes = support_nodes(ab_state)
    labels = DISTINCT_SITE_LABELS if len(nodes) == 2 else SAME_NODE_LABELS[int(base.statistics)]
    best_label, best_fidelity = None, None
    for label in labels:
        value = fidelity(ab_state, label, nodes)
        if best_fidelity is None or value > best_fidelity:
            best_label, best_fidelity = label, value
    return best_label, best_fidelity
