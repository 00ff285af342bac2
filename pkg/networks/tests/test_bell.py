"""
Tests para la medición de Bell y las fidelidades.
"""

from django.test import SimpleTestCase

from networks.constants import BellLabel, ProtocolKind, Spin, Statistics
from networks.exceptions import (
    InvalidConfigurationError,
    MeasurementTargetError,
    StatisticsMismatchError,
)
from networks.services.bell import (
    bell_basis,
    bell_measure,
    bell_state,
    fidelity,
    identify_bell_label,
    target_nodes,
)
from networks.services.protocols import NetworkSpec, prepare_state
from networks.services.scalar_algebra import ONE, ZERO, Scalar, scalar_sum
from networks.services.slocc import slocc_project
from networks.services.states import (
    LocalMode,
    ManyBodyState,
    Node,
    ProductKet,
    state_inner_product,
)

A, M, B = Node(0, 'A'), Node(1, 'M'), Node(2, 'B')
THIRD = Scalar('1/3')


def post_selected(kind, pairs=2, statistics=None):
    spec = NetworkSpec.for_kind(kind, pairs, statistics)
    projection = slocc_project(prepare_state(spec), spec.post_selection_config())
    return spec, projection.post_state


def localized_state(statistics, *modes):
    return ManyBodyState.from_ket(ProductKet.from_modes(modes, statistics))


class BellStateTestCase(SimpleTestCase):

    def test_basis_sizes(self):
        self.assertEqual(len(bell_basis((A, B), Statistics.FERMION)), 4)
        self.assertEqual(len(bell_basis(M, Statistics.BOSON)), 3)
        self.assertEqual([label for label, _ in bell_basis(M, Statistics.FERMION)], [BellLabel.PSI_M])

    def test_fermionic_same_node_singlet_sign(self):
        state = bell_state(BellLabel.PSI_M, (M,), Statistics.FERMION)
        canonical = ProductKet.from_modes((LocalMode(M, Spin.DOWN), LocalMode(M, Spin.UP)), Statistics.FERMION)
        self.assertEqual(state.coefficient(canonical), Scalar(-1))

    def test_fermionic_phi_on_one_node_rejected(self):
        with self.assertRaises(StatisticsMismatchError):
            bell_state(BellLabel.PHI_PLUS_M, (M,), Statistics.FERMION)

    def test_node_count_must_match_label(self):
        with self.assertRaises(InvalidConfigurationError):
            bell_state(BellLabel.PSI_PLUS, (M,), Statistics.BOSON)
        with self.assertRaises(InvalidConfigurationError):
            bell_state(BellLabel.PSI_M, (A, B), Statistics.BOSON)

    def test_target_with_three_nodes(self):
        with self.assertRaises(MeasurementTargetError):
            target_nodes((A, M, B))


class FidelityTestCase(SimpleTestCase):

    def test_orthogonal_bell_states(self):
        plus = bell_state(BellLabel.PSI_PLUS, (A, B), Statistics.FERMION)
        self.assertEqual(fidelity(plus, BellLabel.PSI_MINUS), ZERO)
        self.assertEqual(fidelity(plus, BellLabel.PSI_PLUS), ONE)

    def test_product_state_half_fidelity(self):
        state = localized_state(Statistics.BOSON, LocalMode(A, Spin.DOWN), LocalMode(B, Spin.UP))
        self.assertEqual(fidelity(state, BellLabel.PSI_PLUS), Scalar('1/2'))
        self.assertEqual(fidelity(state, BellLabel.PSI_MINUS), Scalar('1/2'))

    def test_requires_two_particles(self):
        _, post = post_selected(ProtocolKind.FERMIONIC_SHARED)
        with self.assertRaises(StatisticsMismatchError):
            fidelity(post, BellLabel.PSI_MINUS)

    def test_identify_aligned_leaf(self):
        state = localized_state(Statistics.BOSON, LocalMode(A, Spin.DOWN), LocalMode(B, Spin.DOWN))
        self.assertEqual(identify_bell_label(state), (BellLabel.PHI_PLUS, Scalar('1/2')))
        self.assertEqual(fidelity(state, BellLabel.PSI_MINUS), ZERO)


class BellMeasurementTestCase(SimpleTestCase):

    def test_bosonic_shared_node(self):
        spec, post = post_selected(ProtocolKind.BOSONIC_SHARED)
        outcomes = bell_measure(post, spec.node('M'))

        self.assertEqual(
            [outcome.label for outcome in outcomes],
            [BellLabel.PSI_M, BellLabel.PHI_PLUS_M, BellLabel.PHI_MINUS_M],
        )
        self.assertTrue(all(outcome.probability == THIRD for outcome in outcomes))
        self.assertEqual(
            [identify_bell_label(outcome.residual) for outcome in outcomes],
            [(BellLabel.PSI_PLUS, ONE), (BellLabel.PHI_PLUS, ONE), (BellLabel.PHI_MINUS, ONE)],
        )

    def test_bosonic_phi_minus_keeps_sign(self):
        spec, post = post_selected(ProtocolKind.BOSONIC_SHARED)
        outcome = bell_measure(post, spec.node('M'))[2]
        self.assertTrue(outcome.residual.is_unit)
        reference = bell_state(BellLabel.PHI_MINUS, spec.endpoints, Statistics.BOSON)
        self.assertEqual(state_inner_product(outcome.residual, reference), Scalar(-1))

    def test_fermionic_shared_node(self):
        spec, post = post_selected(ProtocolKind.FERMIONIC_SHARED)
        outcomes = bell_measure(post, spec.node('M'))
        self.assertEqual(len(outcomes), 1)
        self.assertEqual(outcomes[0].label, BellLabel.PSI_M)
        self.assertEqual(outcomes[0].probability, ONE)
        self.assertEqual(fidelity(outcomes[0].residual, BellLabel.PSI_MINUS), ONE)

    def test_separated_pair_outcomes(self):
        listings = {}
        for statistics in Statistics:
            spec, post = post_selected(ProtocolKind.SEPARATED, statistics=statistics)
            outcomes = bell_measure(post, (spec.node('C'), spec.node('D')))
            self.assertEqual(len(outcomes), 4)
            self.assertEqual(scalar_sum(outcome.probability for outcome in outcomes), ONE)
            self.assertTrue(all(outcome.probability == Scalar('1/4') for outcome in outcomes))
            self.assertTrue(all(identify_bell_label(outcome.residual)[1] == ONE for outcome in outcomes))
            listings[statistics] = [(outcome.target_name, outcome.label) for outcome in outcomes]
        self.assertEqual(listings[Statistics.BOSON], listings[Statistics.FERMION])

    def test_target_with_wrong_occupancy(self):
        spec, post = post_selected(ProtocolKind.FERMIONIC_SHARED)
        with self.assertRaises(MeasurementTargetError):
            bell_measure(post, spec.node('A'))
        with self.assertRaises(MeasurementTargetError):
            bell_measure(post, (spec.node('M'), spec.node('B')))

    def test_pair_target_needs_one_particle_per_node(self):
        state = localized_state(
            Statistics.BOSON,
            LocalMode(A, Spin.DOWN), LocalMode(A, Spin.UP), LocalMode(M, Spin.DOWN), LocalMode(M, Spin.UP),
        )
        with self.assertRaises(MeasurementTargetError):
            bell_measure(state, (A, B))
