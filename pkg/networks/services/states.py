"""
Álgebra de estados de muchas partículas sin etiquetas.

Un ProductKet es una lista ordenada de estados de una partícula con su
estadística η; el producto interno entre dos kets es el permanente (bosones)
o el determinante (fermiones) de la matriz de solapamientos. Los kets
localizados (un solo (nodo, espín) por partícula) se guardan en orden
canónico (rango del nodo, espín) con el signo fermiónico absorbido en el
coeficiente, lo que permite comparar estados término a término.
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Dict, Iterable, Iterator, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

from sympy.combinatorics import Permutation

from networks.constants import DEFAULT_SPECIES, Spin, Statistics
from networks.exceptions import (
    DimensionMismatchError,
    StatisticsMismatchError,
    ZeroStateError,
)
from networks.services.scalar_algebra import (
    ONE,
    ZERO,
    Scalar,
    ScalarMatrix,
    determinant,
    permanent,
    scalar_sum,
)

logger = logging.getLogger(__name__)


# ============================================================================
# NODOS Y MODOS LOCALES
# ============================================================================

@dataclass(frozen=True, order=True)
class Node:
    """Nodo de la red; el orden total es la posición en la lista de nodos."""
    rank: int
    name: str

    def __str__(self):
        return self.name


class LocalMode(NamedTuple):
    """
    Ket localizado |nodo, espín⟩ de una partícula.

    species distingue partículas no idénticas: modos de especies distintas
    son ortogonales, así que nunca se simetrizan entre sí.
    """
    node: Node
    spin: Spin
    species: int = DEFAULT_SPECIES

    def __str__(self):
        suffix = f"[{self.species}]" if self.species != DEFAULT_SPECIES else ''
        return f"{self.node.name}{Spin(self.spin).label}{suffix}"


def _coerce_amplitudes(amplitudes: Iterable[Tuple[LocalMode, object]]) -> Tuple[Tuple[LocalMode, Scalar], ...]:
    merged: Dict[LocalMode, Scalar] = {}
    for mode, amplitude in amplitudes:
        merged[mode] = merged.get(mode, ZERO) + Scalar.coerce(amplitude)
    return tuple(sorted(
        ((mode, amp) for mode, amp in merged.items() if amp),
        key=lambda item: item[0],
    ))


@dataclass(frozen=True)
class SingleParticleState:
    """
    Combinación lineal real de kets localizados (nodo, espín).

    Las amplitudes se guardan en forma canónica (ordenadas por modo, sin
    ceros), así que dos estados iguales tienen la misma representación.
    """
    amplitudes: Tuple[Tuple[LocalMode, Scalar], ...]

    def __post_init__(self):
        canonical = _coerce_amplitudes(self.amplitudes)
        if not canonical:
            raise ZeroStateError("Un estado de una partícula necesita al menos una amplitud no nula")
        object.__setattr__(self, 'amplitudes', canonical)

    @classmethod
    def localized(cls, node: Node, spin: Spin, species: int = DEFAULT_SPECIES) -> 'SingleParticleState':
        return cls(((LocalMode(node, Spin(spin), species), ONE),))

    @classmethod
    def delocalized(cls, nodes: Sequence[Node], spin: Spin, amplitude: Optional[Scalar] = None,
                    species: int = DEFAULT_SPECIES) -> 'SingleParticleState':
        """
        Modo deslocalizado con igual amplitud en cada nodo.

        Por defecto la amplitud es 1/√2, la del divisor de haz sobre dos nodos.
        """
        weight = Scalar.inv_sqrt2() if amplitude is None else Scalar.coerce(amplitude)
        return cls(tuple((LocalMode(node, Spin(spin), species), weight) for node in nodes))

    @property
    def local_mode(self) -> Optional[LocalMode]:
        """El modo si el estado es un ket localizado de amplitud 1; si no, None."""
        if len(self.amplitudes) == 1 and self.amplitudes[0][1] == ONE:
            return self.amplitudes[0][0]
        return None

    @property
    def nodes(self) -> Tuple[Node, ...]:
        return tuple(sorted({mode.node for mode, _ in self.amplitudes}))

    def overlap(self, other: 'SingleParticleState') -> Scalar:
        """⟨self|other⟩; las amplitudes son reales, no hay conjugación."""
        theirs = dict(other.amplitudes)
        return scalar_sum(amp * theirs[mode] for mode, amp in self.amplitudes if mode in theirs)

    def sort_key(self):
        return tuple(
            (mode.node.rank, int(mode.spin), mode.species, amp.rat_part, amp.sqrt2_part)
            for mode, amp in self.amplitudes
        )

    def __str__(self):
        mode = self.local_mode
        if mode is not None:
            return str(mode)
        return '(' + ' + '.join(f"{amp}·{mode}" for mode, amp in self.amplitudes) + ')'


def localized_parity(modes: Sequence[LocalMode]) -> Tuple[int, Tuple[LocalMode, ...]]:
    """
    Ordena los modos canónicamente y devuelve (paridad, modos ordenados).

    La paridad es la signatura de la permutación de ordenamiento; el
    ordenamiento es estable, así que los modos repetidos no la alteran.
    """
    order = sorted(range(len(modes)), key=lambda index: modes[index])
    ordered = tuple(modes[index] for index in order)
    if len(order) < 2:
        return 1, ordered
    return Permutation(order).signature(), ordered


# ============================================================================
# KETS PRODUCTO Y ESTADOS DE MUCHAS PARTÍCULAS
# ============================================================================

@dataclass(frozen=True)
class ProductKet:
    """|φ₁, φ₂, …, φₙ⟩ con estadística η; el orden es convencional."""
    particles: Tuple[SingleParticleState, ...]
    statistics: Statistics

    def __post_init__(self):
        object.__setattr__(self, 'particles', tuple(self.particles))
        object.__setattr__(self, 'statistics', Statistics(self.statistics))

    @classmethod
    def from_modes(cls, modes: Iterable[LocalMode], statistics: Statistics) -> 'ProductKet':
        return cls(
            tuple(SingleParticleState.localized(mode.node, mode.spin, mode.species) for mode in modes),
            statistics,
        )

    @property
    def particle_number(self) -> int:
        return len(self.particles)

    @cached_property
    def local_modes(self) -> Optional[Tuple[LocalMode, ...]]:
        modes = tuple(particle.local_mode for particle in self.particles)
        if any(mode is None for mode in modes):
            return None
        return modes

    @property
    def is_localized(self) -> bool:
        return self.local_modes is not None

    @cached_property
    def is_canonical(self) -> bool:
        modes = self.local_modes
        return modes is not None and all(modes[i] <= modes[i + 1] for i in range(len(modes) - 1))

    def canonical(self) -> Tuple[int, 'ProductKet']:
        """(signo, ket canónico) para un ket localizado; el signo es η^paridad."""
        modes = self.local_modes
        if modes is None:
            raise StatisticsMismatchError("Solo los kets localizados tienen forma canónica")
        parity, ordered = localized_parity(modes)
        sign = parity if self.statistics == Statistics.FERMION else 1
        return sign, ProductKet.from_modes(ordered, self.statistics)

    def self_overlap(self) -> Scalar:
        """⟨k|k⟩ de un ket localizado: Π mᵢ! (bosones) o 1/0 (fermiones, Pauli)."""
        modes = self.local_modes
        if modes is None:
            return inner_product(self, self)
        multiplicities = Counter(modes).values()
        if self.statistics == Statistics.FERMION:
            return ZERO if any(m > 1 for m in multiplicities) else ONE
        weight = 1
        for multiplicity in multiplicities:
            weight *= math.factorial(multiplicity)
        return Scalar(weight)

    def swapped(self, i: int, j: int) -> 'ProductKet':
        particles = list(self.particles)
        particles[i], particles[j] = particles[j], particles[i]
        return ProductKet(tuple(particles), self.statistics)

    def sort_key(self):
        return tuple(particle.sort_key() for particle in self.particles)

    def __str__(self):
        return '|' + ','.join(str(particle) for particle in self.particles) + '⟩'


def _check_compatible(n_a: int, eta_a: Statistics, n_b: int, eta_b: Statistics):
    if eta_a != eta_b:
        raise StatisticsMismatchError(f"Estadísticas distintas: {eta_a} y {eta_b}")
    if n_a != n_b:
        raise StatisticsMismatchError(f"Número de partículas distinto: {n_a} y {n_b}")


def overlap_matrix(bras: Sequence[SingleParticleState], kets: Sequence[SingleParticleState]) -> ScalarMatrix:
    """Matriz de solapamientos con entrada (i, j) = ⟨braᵢ|ketⱼ⟩."""
    if len(bras) != len(kets):
        raise DimensionMismatchError(
            f"overlap_matrix requiere listas de igual longitud ({len(bras)} ≠ {len(kets)})"
        )
    return ScalarMatrix.from_rows([[bra.overlap(ket) for ket in kets] for bra in bras])


def inner_product(bra: ProductKet, ket: ProductKet) -> Scalar:
    """
    Producto interno sin etiquetas Σ_P η^P Πᵢ⟨φ′ᵢ|φ_{Pᵢ}⟩.

    Se evalúa como permanente (η = +1) o determinante (η = −1) de la matriz
    de solapamientos. Dos kets localizados se resuelven sin la matriz: solo
    solapan si tienen los mismos modos, con valor ±Π mᵢ!.

    Raises:
        StatisticsMismatchError: si difieren n o η
    """
    _check_compatible(bra.particle_number, bra.statistics, ket.particle_number, ket.statistics)

    if bra.is_localized and ket.is_localized:
        bra_sign, bra_canonical = bra.canonical()
        ket_sign, ket_canonical = ket.canonical()
        if bra_canonical.local_modes != ket_canonical.local_modes:
            return ZERO
        weight = ket_canonical.self_overlap()
        return weight if bra_sign * ket_sign > 0 else -weight

    matrix = overlap_matrix(bra.particles, ket.particles)
    if bra.statistics == Statistics.FERMION:
        return determinant(matrix)
    return permanent(matrix)


@dataclass(frozen=True)
class ManyBodyState:
    """
    Combinación lineal de ProductKet con estadística y número de partículas fijos.

    Los términos nulos se podan al construir. El estado cero se representa con
    un diccionario vacío y conserva η y n.
    """
    terms: Mapping[ProductKet, Scalar]
    statistics: Statistics
    particle_number: int

    def __post_init__(self):
        pruned = {}
        for ket, coefficient in self.terms.items():
            _check_compatible(ket.particle_number, ket.statistics, self.particle_number, self.statistics)
            coefficient = Scalar.coerce(coefficient)
            if coefficient:
                pruned[ket] = coefficient
        object.__setattr__(self, 'terms', pruned)
        object.__setattr__(self, 'statistics', Statistics(self.statistics))

    @classmethod
    def zero(cls, statistics: Statistics, particle_number: int) -> 'ManyBodyState':
        return cls({}, statistics, particle_number)

    @classmethod
    def from_ket(cls, ket: ProductKet, coefficient=ONE) -> 'ManyBodyState':
        return cls({ket: coefficient}, ket.statistics, ket.particle_number)

    @classmethod
    def from_terms(cls, pairs: Iterable[Tuple[ProductKet, Scalar]], statistics: Statistics,
                   particle_number: int) -> 'ManyBodyState':
        """Construye el estado sumando coeficientes de kets repetidos."""
        accumulated: Dict[ProductKet, Scalar] = {}
        for ket, coefficient in pairs:
            accumulated[ket] = accumulated.get(ket, ZERO) + Scalar.coerce(coefficient)
        return cls(accumulated, statistics, particle_number)

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __iter__(self) -> Iterator[Tuple[ProductKet, Scalar]]:
        return iter(self.sorted_terms())

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda item: item[0].sort_key())

    def coefficient(self, ket: ProductKet) -> Scalar:
        return self.terms.get(ket, ZERO)

    @property
    def is_localized(self) -> bool:
        return all(ket.is_canonical for ket in self.terms)

    def __add__(self, other: 'ManyBodyState') -> 'ManyBodyState':
        if not isinstance(other, ManyBodyState):
            return NotImplemented
        _check_compatible(self.particle_number, self.statistics, other.particle_number, other.statistics)
        return ManyBodyState.from_terms(
            list(self.terms.items()) + list(other.terms.items()),
            self.statistics,
            self.particle_number,
        )

    def __neg__(self) -> 'ManyBodyState':
        return self.scaled(-ONE)

    def __sub__(self, other: 'ManyBodyState') -> 'ManyBodyState':
        return self + (-other)

    def scaled(self, factor) -> 'ManyBodyState':
        factor = Scalar.coerce(factor)
        return ManyBodyState(
            {ket: coefficient * factor for ket, coefficient in self.terms.items()},
            self.statistics,
            self.particle_number,
        )

    def __str__(self):
        if not self.terms:
            return '0'
        return ' + '.join(f"({coefficient}){ket}" for ket, coefficient in self.sorted_terms())


@dataclass(frozen=True)
class NormalizedState:
    """
    Estado junto con su norma² exacta.

    norm_squared es 1 cuando la raíz cabía en ℚ(√2) y se absorbió en los
    coeficientes; en otro caso el estado físico es state/√norm_squared.
    """
    state: ManyBodyState
    norm_squared: Scalar = field(default=ONE)

    @property
    def is_unit(self) -> bool:
        return self.norm_squared == ONE

    @property
    def statistics(self) -> Statistics:
        return self.state.statistics

    @property
    def particle_number(self) -> int:
        return self.state.particle_number

    def weight(self, ket: ProductKet) -> Scalar:
        """Coeficiente² normalizado de un término."""
        return self.state.coefficient(ket).abs_square() / self.norm_squared


StateLike = Union[ManyBodyState, NormalizedState]


def as_state(value: StateLike) -> ManyBodyState:
    return value.state if isinstance(value, NormalizedState) else value


def known_norm_squared(value: StateLike) -> Scalar:
    if isinstance(value, NormalizedState):
        return value.norm_squared
    return norm_squared(value)


# ============================================================================
# PRODUCTOS INTERNOS DE ESTADOS
# ============================================================================

def state_inner_product(a: StateLike, b: StateLike) -> Scalar:
    """Extensión bilineal de inner_product sobre los términos."""
    a, b = as_state(a), as_state(b)
    _check_compatible(a.particle_number, a.statistics, b.particle_number, b.statistics)
    if a.is_localized and b.is_localized:
        smaller, larger = (a, b) if len(a) <= len(b) else (b, a)
        return scalar_sum(
            coefficient * larger.coefficient(ket) * ket.self_overlap()
            for ket, coefficient in smaller.terms.items()
            if ket in larger.terms
        )
    return scalar_sum(
        coef_a * coef_b * inner_product(ket_a, ket_b)
        for ket_a, coef_a in a.terms.items()
        for ket_b, coef_b in b.terms.items()
    )


def norm_squared(state: StateLike) -> Scalar:
    return state_inner_product(state, state)


def normalize(state: StateLike) -> NormalizedState:
    """
    Normaliza el estado dentro de ℚ(√2).

    Si √norm² no pertenece al cuerpo se devuelve el estado sin escalar con su
    norma² exacta; las probabilidades se calculan como cocientes de normas.

    Raises:
        ZeroStateError: si el estado es nulo
    """
    base = as_state(state)
    value = known_norm_squared(state)
    if not value:
        raise ZeroStateError("No se puede normalizar el estado nulo")
    root = value.sqrt()
    if root is None:
        logger.debug("Norma² %s sin raíz en ℚ(√2); se conserva exacta", value)
        return NormalizedState(base, value)
    return NormalizedState(base.scaled(root.inverse()), ONE)


def state_fidelity(a: StateLike, b: StateLike) -> Scalar:
    """|⟨a|b⟩|² / (⟨a|a⟩⟨b|b⟩)."""
    overlap = state_inner_product(a, b)
    return overlap.abs_square() / (known_norm_squared(a) * known_norm_squared(b))


# ============================================================================
# EXPANSIÓN LOCALIZADA Y PRODUCTO CUÑA
# ============================================================================

def expand_localized(state: StateLike) -> ManyBodyState:
    """
    Expande multilinealmente cada término sobre kets localizados canónicos.

    El signo fermiónico del reordenamiento se absorbe en el coeficiente y
    los términos nulos por Pauli se descartan.
    """
    base = as_state(state)
    if base.is_localized:
        return base

    accumulated: Dict[ProductKet, Scalar] = {}
    fermionic = base.statistics == Statistics.FERMION

    for ket, coefficient in base.terms.items():
        for choice in product(*(particle.amplitudes for particle in ket.particles)):
            modes = tuple(mode for mode, _ in choice)
            if fermionic and len(set(modes)) < len(modes):
                continue
            weight = coefficient
            for _, amplitude in choice:
                weight = weight * amplitude
            if fermionic:
                parity, ordered = localized_parity(modes)
                if parity < 0:
                    weight = -weight
            else:
                ordered = tuple(sorted(modes))
            key = ProductKet.from_modes(ordered, base.statistics)
            accumulated[key] = accumulated.get(key, ZERO) + weight

    expanded = ManyBodyState(accumulated, base.statistics, base.particle_number)
    logger.debug("Expansión localizada: %d términos de entrada, %d canónicos", len(base), len(expanded))
    return expanded


def wedge(a: StateLike, b: StateLike) -> ManyBodyState:
    """
    Producto cuña sin etiquetas: concatena las partículas de cada par de términos.

    Sirve para construir estados de referencia como |M↑,M↓⟩ ∧ Ψ⁻_AB.
    """
    a, b = as_state(a), as_state(b)
    if a.statistics != b.statistics:
        raise StatisticsMismatchError(f"Estadísticas distintas: {a.statistics} y {b.statistics}")
    return ManyBodyState.from_terms(
        (
            (ProductKet(ket_a.particles + ket_b.particles, a.statistics), coef_a * coef_b)
            for ket_a, coef_a in a.terms.items()
            for ket_b, coef_b in b.terms.items()
        ),
        a.statistics,
        a.particle_number + b.particle_number,
    )


def wedge_all(states: Sequence[StateLike]) -> ManyBodyState:
    result = as_state(states[0])
    for state in states[1:]:
        result = wedge(result, state)
    return result
