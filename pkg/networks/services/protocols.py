"""
Protocolos de activación remota de entrelazamiento.

Tres esquemas sobre una cadena de N pares (n = 2N partículas):
    - fermionic_shared: nodos intermedios compartidos con fermiones; la
      post-selección ya deja A y B en Ψ⁻.
    - bosonic_shared: nodos compartidos con bosones; la post-selección va
      seguida de mediciones de Bell en cascada sobre M₁…M_k.
    - separated: nodos intermedios separados Cᵢ, Dᵢ; intercambio de
      entrelazamiento por mediciones de Bell sobre cada par (Cᵢ, Dᵢ).
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from django.conf import settings
from joblib import Parallel, delayed

from networks.constants import (
    DEFAULT_SPECIES,
    ENDPOINT_LEFT,
    ENDPOINT_RIGHT,
    MIN_PAIRS,
    MIN_PARTICLES,
    SEPARATED_LEFT_PREFIX,
    SEPARATED_RIGHT_PREFIX,
    SHARED_NODE_PREFIX,
    BellLabel,
    MeasurementMode,
    PairingOrder,
    ProtocolKind,
    Spin,
    SpinPattern,
    Statistics,
    SweepMethod,
    Topology,
)
from networks.exceptions import DegeneratePreparationError, InvalidNetworkError
from networks.services.bell import bell_measure, bell_state, fidelity, identify_bell_label
from networks.services.scalar_algebra import ONE, ZERO, Scalar, ScalarMatrix, determinant, permanent
from networks.services.slocc import CountConfiguration, ProjectionResult, slocc_project
from networks.services.states import (
    LocalMode,
    ManyBodyState,
    Node,
    NormalizedState,
    ProductKet,
    SingleParticleState,
    StateLike,
    normalize,
    norm_squared,
    overlap_matrix,
    state_fidelity,
    wedge_all,
)

logger = logging.getLogger(__name__)


# ============================================================================
# ESPECIFICACIÓN DE LA RED
# ============================================================================

def _indexed(prefix: str, index: int, pairs: int) -> str:
    return prefix if pairs == MIN_PAIRS else f"{prefix}{index}"


@dataclass(frozen=True)
class NetworkSpec:
    """
    Red de N pares con su topología, estadística y patrón de espines.

    Nodos:
        - shared_chain: A, M₁…M_{N−1}, B ("M" sin índice cuando N = 2)
        - separated: A, C₁, D₁, …, C_{N−1}, D_{N−1}, B ("C", "D" cuando N = 2)

    El par j ocupa el modo αⱼ, repartido con amplitud 1/√2 entre dos nodos
    consecutivos de la lista.

    species asigna a cada par la especie de su partícula ↓ y de su partícula
    ↑ (vacío: todas idénticas). Solo la topología separada admite especies
    distintas.
    """
    pairs: int
    topology: Topology
    statistics: Statistics
    spin_pattern: SpinPattern = SpinPattern.OPPOSITE
    species: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        if not isinstance(self.pairs, int) or self.pairs < MIN_PAIRS:
            raise InvalidNetworkError(f"Se requieren al menos {MIN_PAIRS} pares, recibido {self.pairs}")
        try:
            object.__setattr__(self, 'topology', Topology(self.topology))
            object.__setattr__(self, 'statistics', Statistics(self.statistics))
            object.__setattr__(self, 'spin_pattern', SpinPattern(self.spin_pattern))
        except ValueError as exc:
            raise InvalidNetworkError(str(exc)) from exc
        object.__setattr__(self, 'species', self._validated_species(self.species))

    def _validated_species(self, species) -> Tuple[Tuple[int, int], ...]:
        species = tuple(tuple(pair) for pair in species)
        if not species:
            return ()
        if len(species) != self.pairs:
            raise InvalidNetworkError(f"Se esperaban especies para {self.pairs} pares, recibidas {len(species)}")
        for pair in species:
            if len(pair) != 2 or any(not isinstance(value, int) or value < 0 for value in pair):
                raise InvalidNetworkError(f"Especies inválidas para un par: {pair}")
        distinct = any(value != DEFAULT_SPECIES for pair in species for value in pair)
        if distinct and self.topology != Topology.SEPARATED:
            raise InvalidNetworkError("Solo la topología separada admite partículas de especies distintas")
        return species

    @classmethod
    def for_kind(cls, kind: ProtocolKind, pairs: int, statistics: Optional[Statistics] = None,
                 spin_pattern: SpinPattern = SpinPattern.OPPOSITE,
                 species: Sequence[Tuple[int, int]] = ()) -> 'NetworkSpec':
        try:
            kind = ProtocolKind(kind)
        except ValueError as exc:
            raise InvalidNetworkError(f"Protocolo desconocido: {kind}") from exc
        if kind == ProtocolKind.FERMIONIC_SHARED:
            return cls(pairs, Topology.SHARED_CHAIN, Statistics.FERMION, spin_pattern, species)
        if kind == ProtocolKind.BOSONIC_SHARED:
            return cls(pairs, Topology.SHARED_CHAIN, Statistics.BOSON, spin_pattern, species)
        return cls(pairs, Topology.SEPARATED, statistics or Statistics.FERMION, spin_pattern, species)

    @property
    def particle_number(self) -> int:
        return 2 * self.pairs

    @cached_property
    def nodes(self) -> Tuple[Node, ...]:
        names = [ENDPOINT_LEFT]
        for index in range(1, self.pairs):
            if self.topology == Topology.SHARED_CHAIN:
                names.append(_indexed(SHARED_NODE_PREFIX, index, self.pairs))
            else:
                names.append(_indexed(SEPARATED_LEFT_PREFIX, index, self.pairs))
                names.append(_indexed(SEPARATED_RIGHT_PREFIX, index, self.pairs))
        names.append(ENDPOINT_RIGHT)
        return tuple(Node(rank, name) for rank, name in enumerate(names))

    def node(self, name: str) -> Node:
        for node in self.nodes:
            if node.name == name:
                return node
        raise InvalidNetworkError(f"Nodo desconocido: {name}")

    @property
    def endpoints(self) -> Tuple[Node, Node]:
        return self.nodes[0], self.nodes[-1]

    def mode_nodes(self, j: int) -> Tuple[Node, Node]:
        """Nodos que abarca αⱼ (j empieza en 1)."""
        if self.topology == Topology.SHARED_CHAIN:
            return self.nodes[j - 1], self.nodes[j]
        return self.nodes[2 * j - 2], self.nodes[2 * j - 1]

    def pair_spins(self) -> Tuple[Spin, Spin]:
        if self.spin_pattern == SpinPattern.ALIGNED:
            return Spin.DOWN, Spin.DOWN
        return Spin.DOWN, Spin.UP

    def pair_species(self, j: int) -> Tuple[int, int]:
        return self.species[j - 1] if self.species else (DEFAULT_SPECIES, DEFAULT_SPECIES)

    @property
    def has_distinct_species(self) -> bool:
        return any(value != DEFAULT_SPECIES for pair in self.species for value in pair)

    def single_particle_states(self) -> Tuple[SingleParticleState, ...]:
        """(α₁↓, α₁↑, …, α_N↓, α_N↑) para el patrón opuesto."""
        return tuple(
            SingleParticleState.delocalized(self.mode_nodes(j), spin, species=species)
            for j in range(1, self.pairs + 1)
            for spin, species in zip(self.pair_spins(), self.pair_species(j))
        )

    def measurement_targets(self, pairing_order: PairingOrder = PairingOrder.LEFT_TO_RIGHT) -> List[Tuple[Node, ...]]:
        if self.topology == Topology.SHARED_CHAIN:
            targets = [(node,) for node in self.nodes[1:-1]]
        else:
            targets = [(self.nodes[2 * i - 1], self.nodes[2 * i]) for i in range(1, self.pairs)]
        if PairingOrder(pairing_order) == PairingOrder.RIGHT_TO_LEFT:
            targets.reverse()
        return targets

    def post_selection_config(self) -> CountConfiguration:
        """Una partícula en cada extremo; dos en cada nodo compartido o una en cada nodo separado."""
        intermediate = 2 if self.topology == Topology.SHARED_CHAIN else 1
        return CountConfiguration(tuple(
            (node, 1 if node in self.endpoints else intermediate)
            for node in self.nodes
        ))


# ============================================================================
# RESULTADOS
# ============================================================================

@dataclass(frozen=True)
class BranchOutcome:
    """Hoja del árbol de mediciones: secuencia de resultados y estado final de A y B."""
    outcome_sequence: Tuple[Tuple[str, BellLabel], ...]
    branch_probability: Scalar
    final_ab_label: BellLabel
    final_ab_state: NormalizedState
    final_fidelity: Scalar


@dataclass(frozen=True)
class CascadeResult:
    kind: ProtocolKind
    spec: NetworkSpec
    projection: ProjectionResult
    branches: Tuple[BranchOutcome, ...]

    @property
    def success_probability(self) -> Scalar:
        return self.projection.probability

    @property
    def post_state(self) -> Optional[NormalizedState]:
        return self.projection.post_state

    @property
    def null_state(self) -> bool:
        return self.projection.null_state


@dataclass(frozen=True)
class TransferResult(CascadeResult):
    """Resultado del protocolo fermiónico: AB queda en Ψ⁻ tras la post-selección."""
    ab_fidelity: Scalar = field(default=ZERO)
    post_state_fidelity: Scalar = field(default=ZERO)

    @property
    def probability(self) -> Scalar:
        return self.projection.probability

    @property
    def ab_state(self) -> Optional[NormalizedState]:
        return self.branches[0].final_ab_state if self.branches else None


# ============================================================================
# PREPARACIÓN Y FÓRMULAS CERRADAS
# ============================================================================

def prepare_state(spec: NetworkSpec) -> NormalizedState:
    """
    |α₁↓,α₁↑,…,α_N↓,α_N↑⟩ normalizado; su norma² es det/perm de la matriz de Gram.

    Raises:
        DegeneratePreparationError: si el ket tiene norma cero (fermiones alineados)
    """
    ket = ProductKet(spec.single_particle_states(), spec.statistics)
    state = ManyBodyState.from_ket(ket)
    value = norm_squared(state)
    if not value:
        raise DegeneratePreparationError(
            f"El ket preparado de {spec.pairs} pares ({spec.statistics.slug}, {spec.spin_pattern}) tiene norma cero"
        )
    if spec.spin_pattern != SpinPattern.OPPOSITE:
        logger.warning("Preparación con patrón %s: no es la preparación de pares opuestos", spec.spin_pattern)
    logger.debug("Preparado %s N=%d: norma² %s", spec.topology, spec.pairs, value)
    return normalize(state)


def gram_matrix(spec: NetworkSpec) -> ScalarMatrix:
    states = spec.single_particle_states()
    return overlap_matrix(states, states)


def _validate_particle_number(n: int) -> int:
    if not isinstance(n, int) or n < MIN_PARTICLES or n % 2:
        raise InvalidNetworkError(f"n debe ser par y al menos {MIN_PARTICLES}, recibido {n}")
    return n // 2


def closed_form_probability(kind: ProtocolKind, n: int) -> Scalar:
    """
    Probabilidad de éxito en forma cerrada.

        separated:         1/2^(n/2)
        fermionic_shared:  1/(2^(n−1)·det M⁽ⁿ⁾)
        bosonic_shared:    3^(n/2−1)/(2^(n−1)·perm M⁽ⁿ⁾)
    """
    pairs = _validate_particle_number(n)
    spec = NetworkSpec.for_kind(kind, pairs)
    kind = ProtocolKind(kind)
    if kind == ProtocolKind.SEPARATED:
        return Scalar(Fraction(1, 2 ** pairs))
    matrix = gram_matrix(spec)
    if kind == ProtocolKind.FERMIONIC_SHARED:
        return Scalar(1) / (Scalar(2 ** (n - 1)) * determinant(matrix))
    return Scalar(3 ** (pairs - 1)) / (Scalar(2 ** (n - 1)) * permanent(matrix))


def direct_probability(kind: ProtocolKind, n: int, statistics: Optional[Statistics] = None) -> Scalar:
    """Probabilidad de post-selección calculada preparando y proyectando el estado."""
    spec = NetworkSpec.for_kind(kind, _validate_particle_number(n), statistics)
    return slocc_project(prepare_state(spec), spec.post_selection_config()).probability


def sweep_probabilities(kinds: Sequence[ProtocolKind], n_max: int,
                        method: SweepMethod = SweepMethod.CLOSED_FORM,
                        n_jobs: Optional[int] = None) -> List[Tuple[ProtocolKind, int, Scalar]]:
    """
    Filas (kind, n, probabilidad) para n = 4, 6, …, n_max en orden (kind, n).

    Los puntos son independientes y se reparten con joblib; el orden de salida
    es el de entrada.
    """
    _validate_particle_number(n_max)
    if n_jobs is None:
        n_jobs = settings.ENTANGLEMENT.get('SWEEP_N_JOBS', 1)
    evaluate = direct_probability if SweepMethod(method) == SweepMethod.DIRECT else closed_form_probability
    points = [(ProtocolKind(kind), n) for kind in kinds for n in range(MIN_PARTICLES, n_max + 1, 2)]
    values = Parallel(n_jobs=n_jobs)(delayed(evaluate)(kind, n) for kind, n in points)
    return [(kind, n, value) for (kind, n), value in zip(points, values)]


# ============================================================================
# ÁRBOL DE MEDICIONES DE BELL
# ============================================================================

def _sample_index(probabilities: Sequence[Scalar], rng: np.random.Generator) -> int:
    draw = Scalar(Fraction(rng.random()))
    cumulative = ZERO
    for index, probability in enumerate(probabilities):
        cumulative = cumulative + probability
        if draw < cumulative:
            return index
    return len(probabilities) - 1


def explore_branches(state: StateLike, targets: Sequence[Tuple[Node, ...]],
                     mode: MeasurementMode = MeasurementMode.ENUMERATE,
                     rng: Optional[np.random.Generator] = None) -> List[BranchOutcome]:
    """
    Mide los objetivos en orden y devuelve las hojas del árbol.

    En modo enumerate se recorren todas las ramas; en modo sample se elige
    una rama por nivel con rng sobre las probabilidades exactas.
    """
    mode = MeasurementMode(mode)
    if mode == MeasurementMode.SAMPLE and rng is None:
        rng = np.random.default_rng(settings.ENTANGLEMENT.get('DEFAULT_SEED'))

    leaves: List[BranchOutcome] = []
    pending = [(state, (), ONE, 0)]
    while pending:
        current, sequence, probability, depth = pending.pop(0)
        if depth == len(targets):
            label, value = identify_bell_label(current)
            leaves.append(BranchOutcome(sequence, probability, label, current, value))
            continue
        outcomes = bell_measure(current, targets[depth])
        if mode == MeasurementMode.SAMPLE:
            outcomes = [outcomes[_sample_index([o.probability for o in outcomes], rng)]]
        for outcome in outcomes:
            pending.append((
                outcome.residual,
                sequence + ((outcome.target_name, outcome.label),),
                probability * outcome.probability,
                depth + 1,
            ))
    return leaves


def label_statistics(branches: Sequence[BranchOutcome]) -> Dict[BellLabel, Scalar]:
    """Probabilidad condicional total de cada etiqueta final de AB."""
    totals: Dict[BellLabel, Scalar] = {}
    for branch in branches:
        totals[branch.final_ab_label] = totals.get(branch.final_ab_label, ZERO) + branch.branch_probability
    order = list(BellLabel)
    return dict(sorted(totals.items(), key=lambda item: order.index(item[0])))


# ============================================================================
# ESTADOS DE REFERENCIA
# ============================================================================

def shared_node_singlet(node: Node, statistics: Statistics) -> ManyBodyState:
    """|M↑,M↓⟩ tal como se escribe, sin reordenar."""
    return ManyBodyState.from_ket(ProductKet.from_modes(
        (LocalMode(node, Spin.UP), LocalMode(node, Spin.DOWN)),
        statistics,
    ))


def fermionic_chain_reference(spec: NetworkSpec) -> ManyBodyState:
    """⊗ᵢ|Mᵢ↑,Mᵢ↓⟩ ∧ Ψ⁻_AB."""
    parts = [shared_node_singlet(node, spec.statistics) for node in spec.nodes[1:-1]]
    parts.append(bell_state(BellLabel.PSI_MINUS, spec.endpoints, spec.statistics))
    return wedge_all(parts)


def separated_pairs_reference(spec: NetworkSpec, label: Optional[BellLabel] = None) -> ManyBodyState:
    """
    Producto de estados de Bell sobre (A, C₁), (D₁, C₂), …, (D_{N−1}, B).

    Por defecto cada par está en Ψ⁺ para bosones y Ψ⁻ para fermiones, que es
    lo que deja la post-selección de una partícula por nodo.
    """
    if label is None:
        label = BellLabel.PSI_PLUS if spec.statistics == Statistics.BOSON else BellLabel.PSI_MINUS
    return wedge_all([
        bell_state(label, spec.mode_nodes(j), spec.statistics)
        for j in range(1, spec.pairs + 1)
    ])


# ============================================================================
# EJECUTORES
# ============================================================================

def _rng(seed: Optional[int]) -> np.random.Generator:
    if seed is None:
        seed = settings.ENTANGLEMENT.get('DEFAULT_SEED')
    return np.random.default_rng(seed)


def _project(spec: NetworkSpec) -> ProjectionResult:
    """Prepara y post-selecciona; un ket preparado nulo da probabilidad y fidelidad 0."""
    try:
        prepared = prepare_state(spec)
    except DegeneratePreparationError as exc:
        logger.warning("%s; se reporta fidelidad 0", exc)
        return ProjectionResult(ZERO, None, spec.post_selection_config(), null_state=True)
    projection = slocc_project(prepared, spec.post_selection_config())
    logger.info(
        "Post-selección %s N=%d (%s): probabilidad %s",
        spec.topology, spec.pairs, spec.statistics.slug, projection.probability,
    )
    return projection


def run_fermionic_transfer(pairs: int, spin_pattern: SpinPattern = SpinPattern.OPPOSITE) -> TransferResult:
    """
    Cadena fermiónica con nodos compartidos.

    Tras la post-selección cada Mᵢ queda en |Mᵢ↑,Mᵢ↓⟩ y AB en Ψ⁻; la medición
    de Bell de cada Mᵢ tiene un único resultado Ψ_M y libera el estado AB.
    Con espines alineados el ket preparado es nulo por Pauli: el resultado no
    tiene ramas y ab_fidelity vale 0.
    """
    spec = NetworkSpec(pairs, Topology.SHARED_CHAIN, Statistics.FERMION, spin_pattern)
    projection = _project(spec)
    if not projection.succeeded:
        return TransferResult(ProtocolKind.FERMIONIC_SHARED, spec, projection, ())

    branches = explore_branches(projection.post_state, spec.measurement_targets())
    reference = fermionic_chain_reference(spec)
    return TransferResult(
        ProtocolKind.FERMIONIC_SHARED,
        spec,
        projection,
        tuple(branches),
        ab_fidelity=fidelity(branches[0].final_ab_state, BellLabel.PSI_MINUS),
        post_state_fidelity=state_fidelity(projection.post_state, reference),
    )


def run_bosonic_cascade(pairs: int, mode: MeasurementMode = MeasurementMode.ENUMERATE,
                        seed: Optional[int] = None,
                        spin_pattern: SpinPattern = SpinPattern.OPPOSITE) -> CascadeResult:
    """Cadena bosónica: post-selección y mediciones de Bell en cascada sobre M₁…M_k."""
    spec = NetworkSpec(pairs, Topology.SHARED_CHAIN, Statistics.BOSON, spin_pattern)
    projection = _project(spec)
    branches = ()
    if projection.succeeded:
        branches = tuple(explore_branches(projection.post_state, spec.measurement_targets(), mode, _rng(seed)))
    return CascadeResult(ProtocolKind.BOSONIC_SHARED, spec, projection, branches)


def run_separated_swap(pairs: int, statistics: Statistics = Statistics.FERMION,
                       pairing_order: PairingOrder = PairingOrder.LEFT_TO_RIGHT,
                       mode: MeasurementMode = MeasurementMode.ENUMERATE,
                       seed: Optional[int] = None,
                       spin_pattern: SpinPattern = SpinPattern.OPPOSITE,
                       species: Sequence[Tuple[int, int]] = ()) -> CascadeResult:
    """
    Nodos separados: una partícula por nodo y mediciones de Bell sobre cada (Cᵢ, Dᵢ).

    Con species = ((0, 1), …) las dos partículas del primer par son
    distinguibles y la post-selección no entrelaza ese par; con especies
    distintas entre pares, pero iguales dentro de cada par, el intercambio
    funciona igual que con partículas idénticas.
    """
    spec = NetworkSpec(pairs, Topology.SEPARATED, statistics, spin_pattern, species)
    projection = _project(spec)
    branches = ()
    if projection.succeeded:
        targets = spec.measurement_targets(pairing_order)
        branches = tuple(explore_branches(projection.post_state, targets, mode, _rng(seed)))
    return CascadeResult(ProtocolKind.SEPARATED, spec, projection, branches)


def run_protocol(kind: ProtocolKind, pairs: int, statistics: Optional[Statistics] = None,
                 mode: MeasurementMode = MeasurementMode.ENUMERATE, seed: Optional[int] = None,
                 pairing_order: PairingOrder = PairingOrder.LEFT_TO_RIGHT,
                 spin_pattern: SpinPattern = SpinPattern.OPPOSITE,
                 species: Sequence[Tuple[int, int]] = ()) -> CascadeResult:
    kind = ProtocolKind(kind)
    if kind == ProtocolKind.FERMIONIC_SHARED:
        return run_fermionic_transfer(pairs, spin_pattern)
    if kind == ProtocolKind.BOSONIC_SHARED:
        return run_bosonic_cascade(pairs, mode, seed, spin_pattern)
    return run_separated_swap(pairs, statistics or Statistics.FERMION, pairing_order, mode, seed, spin_pattern, species)
