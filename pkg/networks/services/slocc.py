"""
Post-selección sLOCC: proyección sobre una configuración de conteos por nodo.

La proyección se calcula sobre la expansión localizada del estado: la base
del subespacio consistente con los conteos está formada por kets localizados
canónicos, ortogonales entre sí, con norma² Π mᵢ! (bosones) o 1 (fermiones).
"""

import logging
from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement, product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from networks.constants import DEFAULT_SPECIES, Spin, Statistics
from networks.exceptions import InvalidConfigurationError
from networks.services.scalar_algebra import ZERO, Scalar, scalar_sum
from networks.services.states import (
    LocalMode,
    ManyBodyState,
    Node,
    NormalizedState,
    ProductKet,
    StateLike,
    expand_localized,
    known_norm_squared,
    normalize,
)

logger = logging.getLogger(__name__)

SPIN_LEVELS = (Spin.DOWN, Spin.UP)


@dataclass(frozen=True)
class CountConfiguration:
    """
    Conteo de partículas por nodo (los nodos ausentes cuentan 0).

    Attributes:
        counts: pares (nodo, conteo) ordenados por rango del nodo
    """
    counts: Tuple[Tuple[Node, int], ...]

    def __post_init__(self):
        merged: Dict[Node, int] = {}
        for node, count in self.counts:
            if count < 0:
                raise InvalidConfigurationError(f"Conteo negativo en el nodo {node}: {count}")
            merged[node] = merged.get(node, 0) + count
        object.__setattr__(self, 'counts', tuple(sorted(merged.items())))

    @property
    def total(self) -> int:
        return sum(count for _, count in self.counts)

    @property
    def nodes(self) -> Tuple[Node, ...]:
        return tuple(node for node, _ in self.counts)

    def count(self, node: Node) -> int:
        return dict(self.counts).get(node, 0)

    def matches(self, modes: Sequence[LocalMode]) -> bool:
        observed: Dict[Node, int] = {}
        for mode in modes:
            observed[mode.node] = observed.get(mode.node, 0) + 1
        expected = {node: count for node, count in self.counts if count}
        return observed == expected

    def __str__(self):
        return '{' + ', '.join(f"{node.name}:{count}" for node, count in self.counts) + '}'


@dataclass(frozen=True)
class BasisKet:
    """Ket localizado canónico del subespacio de conteos con su norma² ⟨b|b⟩."""
    ket: ProductKet
    norm_squared: Scalar

    @property
    def normalizer(self) -> Optional[Scalar]:
        """N = √⟨b|b⟩ (√2 para una doble ocupación bosónica), o None fuera de ℚ(√2)."""
        return self.norm_squared.sqrt()


@dataclass(frozen=True)
class ProjectionResult:
    """
    Resultado de una post-selección.

    post_state es None cuando la probabilidad es 0; null_state indica que el
    estado de entrada era nulo (prohibido por Pauli) y no hubo nada que proyectar.
    """
    probability: Scalar
    post_state: Optional[NormalizedState]
    config: CountConfiguration
    null_state: bool = False

    @property
    def succeeded(self) -> bool:
        return bool(self.probability)


def _internal_levels(species: Sequence[int]) -> List[Tuple[Spin, int]]:
    """Niveles (espín, especie) de un nodo en el orden canónico de LocalMode."""
    return sorted((spin, value) for spin in SPIN_LEVELS for value in set(species))


def _level_multisets(count: int, statistics: Statistics, species: Sequence[int]):
    levels = _internal_levels(species)
    if statistics == Statistics.FERMION:
        return combinations(levels, count)
    return combinations_with_replacement(levels, count)


def state_species(state: ManyBodyState) -> Tuple[int, ...]:
    """Especies presentes en un estado localizado (la por defecto si está vacío)."""
    found = {mode.species for ket in state.terms for mode in ket.local_modes}
    return tuple(sorted(found)) or (DEFAULT_SPECIES,)


def enumerate_basis(config: CountConfiguration, statistics: Statistics,
                    particle_number: Optional[int] = None,
                    species: Sequence[int] = (DEFAULT_SPECIES,)) -> List[BasisKet]:
    """
    Base ortogonal del subespacio con los conteos dados.

    Por nodo se toman todos los multiconjuntos de niveles (espín, especie)
    del tamaño del conteo (sin repetición para fermiones). Con una sola
    especie, un nodo fermiónico con más de dos partículas deja la base vacía.

    Raises:
        InvalidConfigurationError: si Σ conteos ≠ particle_number
    """
    statistics = Statistics(statistics)
    if particle_number is not None and config.total != particle_number:
        raise InvalidConfigurationError(
            f"La configuración {config} suma {config.total} partículas, el estado tiene {particle_number}"
        )

    per_node = [
        [
            tuple(LocalMode(node, spin, value) for spin, value in levels)
            for levels in _level_multisets(count, statistics, species)
        ]
        for node, count in config.counts
        if count
    ]
    basis = []
    for blocks in product(*per_node):
        modes = tuple(mode for block in blocks for mode in block)
        ket = ProductKet.from_modes(modes, statistics)
        basis.append(BasisKet(ket, ket.self_overlap()))
    logger.debug("Base de %s (%s): %d kets", config, statistics.slug, len(basis))
    return basis


def filter_by_counts(state: StateLike, config: CountConfiguration) -> ManyBodyState:
    """Π|Ψ⟩ descartando los términos localizados inconsistentes con los conteos."""
    expanded = expand_localized(state)
    return ManyBodyState(
        {ket: coefficient for ket, coefficient in expanded.terms.items() if config.matches(ket.local_modes)},
        expanded.statistics,
        expanded.particle_number,
    )


def _fix_phase(state: ManyBodyState) -> ManyBodyState:
    _, first_coefficient = state.sorted_terms()[0]
    return -state if first_coefficient.sign() < 0 else state


def slocc_project(state: StateLike, config: CountConfiguration) -> ProjectionResult:
    """
    Proyecta el estado sobre la configuración de conteos.

    probability = Σ_b |⟨b|Ψ⟩|² / (⟨b|b⟩⟨Ψ|Ψ⟩) y post_state = Σ_b |b⟩⟨b|Ψ⟩/⟨b|b⟩
    renormalizado, con el primer coeficiente canónico no negativo.
    """
    expanded = expand_localized(state)
    total_norm = known_norm_squared(state)
    basis = enumerate_basis(config, expanded.statistics, expanded.particle_number, state_species(expanded))

    projected: Dict[ProductKet, Scalar] = {}
    weights = []
    for element in basis:
        if not element.norm_squared:
            continue
        amplitude = expanded.coefficient(element.ket) * element.norm_squared
        if not amplitude:
            continue
        weights.append(amplitude.abs_square() / element.norm_squared)
        projected[element.ket] = amplitude / element.norm_squared

    probability = scalar_sum(weights) / total_norm
    if not probability:
        logger.debug("Proyección %s con probabilidad 0", config)
        return ProjectionResult(ZERO, None, config)

    post = ManyBodyState(projected, expanded.statistics, expanded.particle_number)
    post_state = normalize(_fix_phase(post))
    logger.debug("Proyección %s: probabilidad %s, %d términos", config, probability, len(post))
    return ProjectionResult(probability, post_state, config)


def count_configurations(nodes: Sequence[Node], particle_number: int) -> List[CountConfiguration]:
    """Todas las composiciones de n sobre la lista de nodos (conteos ≥ 0)."""
    nodes = list(nodes)
    if not nodes:
        return []
    slots = particle_number + len(nodes) - 1
    configurations = []
    for bars in combinations(range(slots), len(nodes) - 1):
        counts = []
        previous = -1
        for bar in bars + (slots,):
            counts.append(bar - previous - 1)
            previous = bar
        configurations.append(CountConfiguration(tuple(zip(nodes, counts))))
    return configurations


def projection_probabilities(state: StateLike, configurations: Iterable[CountConfiguration]) -> List[Scalar]:
    return [slocc_project(state, config).probability for config in configurations]
