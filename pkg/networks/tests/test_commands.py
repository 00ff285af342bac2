"""
Tests para los management commands del simulador.

Cubre:
    - run_protocol: reporte JSON, determinismo, notas, especies y errores de uso (código 2)
    - sweep_probabilities: CSV y JSON, anclas exactas
    - expand_state: listados canónicos con y sin post-selección
    - verify_oracles: éxito y fallo (código 1) con un núcleo alterado
"""

import json
from fractions import Fraction
from io import StringIO
from unittest.mock import patch

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from networks.constants import FLOAT_RELATIVE_TOLERANCE, NULL_STATE_NOTE, SAMPLED_BRANCH_NOTE
from networks.services import protocols
from networks.services.scalar_algebra import ScalarMatrix


def run(command, *args, **options):
    out = StringIO()
    call_command(command, *args, stdout=out, **options)
    return out.getvalue()


class RunProtocolCommandTestCase(SimpleTestCase):

    def test_fermionic_shared(self):
        report = json.loads(run('run_protocol', 'fermionic_shared', pairs=2))
        self.assertEqual(report['probability'], '2/9')
        self.assertEqual(report['statistics'], 'fermion')
        self.assertEqual(report['ab_fidelity'], '1')
        self.assertEqual(report['post_state_fidelity'], '1')
        self.assertEqual(report['branches'][0]['final_ab_label'], 'Ψ⁻')
        self.assertEqual(report['probability_float'], 2 / 9)
        self.assertEqual(report['branch_probability_sum'], '1')
        self.assertNotIn('notes', report)

    def assert_floats_match_exact(self, report):
        pairs = [(report['probability'], report['probability_float'])]
        pairs += [(branch['probability'], branch['probability_float']) for branch in report['branches']]
        for exact, value in pairs:
            expected = Fraction(exact)
            if not expected:
                self.assertEqual(value, 0.0)
                continue
            self.assertLessEqual(abs(Fraction(value) - expected) / expected, FLOAT_RELATIVE_TOLERANCE)

    def test_report_floats_match_exact_values(self):
        cases = [
            ('fermionic_shared', {'pairs': 2}),
            ('fermionic_shared', {'pairs': 4}),
            ('bosonic_shared', {'pairs': 2}),
            ('bosonic_shared', {'pairs': 3}),
            ('separated', {'pairs': 3, 'statistics': 'boson'}),
        ]
        for kind, options in cases:
            with self.subTest(kind=kind, options=options):
                self.assert_floats_match_exact(json.loads(run('run_protocol', kind, **options)))

    def test_aligned_fermions_report_null_state(self):
        report = json.loads(run('run_protocol', 'fermionic_shared', pairs=2, spin_pattern='aligned'))
        self.assertEqual(report['probability'], '0')
        self.assertEqual(report['probability_float'], 0.0)
        self.assertEqual(report['ab_fidelity'], '0')
        self.assertEqual(report['branch_count'], 0)
        self.assertEqual(report['branch_probability_sum'], '0')
        self.assertEqual(report['notes'], [NULL_STATE_NOTE])

    def test_sample_mode_notes_path_probabilities(self):
        report = json.loads(run('run_protocol', 'bosonic_shared', pairs=3, mode='sample', seed=7))
        self.assertEqual(report['branch_count'], 1)
        self.assertEqual(report['notes'], [SAMPLED_BRANCH_NOTE])
        self.assertEqual(report['branch_probability_sum'], report['branches'][0]['probability'])
        self.assertEqual(report['label_statistics'][0]['probability'], report['branches'][0]['probability'])

    def test_distinguishable_pair_species(self):
        report = json.loads(run('run_protocol', 'separated', pairs=2, species=['0,1', '0,0']))
        self.assertEqual(report['probability'], '1/4')
        self.assertEqual(report['species'], [[0, 1], [0, 0]])
        self.assertEqual(report['branch_count'], 8)
        self.assertEqual({branch['final_fidelity'] for branch in report['branches']}, {'1/2'})
        self.assertEqual(report['branch_probability_sum'], '1')

    def test_species_per_pair(self):
        report = json.loads(run('run_protocol', 'separated', pairs=2, species=['0,0', '1,1']))
        self.assertEqual(report['branch_count'], 4)
        self.assertEqual({branch['final_fidelity'] for branch in report['branches']}, {'1'})
        self.assertEqual({branch['outcome_sequence'][0]['target'] for branch in report['branches']}, {'CD[0,1]'})

    def test_separated_bosons(self):
        report = json.loads(run('run_protocol', 'separated', pairs=2, statistics='boson'))
        self.assertEqual(report['probability'], '1/4')
        self.assertEqual(report['branch_count'], 4)
        self.assertNotIn('ab_fidelity', report)

    def test_bosonic_cascade_branches(self):
        report = json.loads(run('run_protocol', 'bosonic_shared', pairs=2))
        self.assertEqual(report['probability'], '6/25')
        self.assertEqual([branch['probability'] for branch in report['branches']], ['1/3'] * 3)
        self.assertEqual(
            [branch['outcome_sequence'][0] for branch in report['branches']],
            [{'target': 'M', 'label': 'Ψ_M'}, {'target': 'M', 'label': 'Φ⁺_M'}, {'target': 'M', 'label': 'Φ⁻_M'}],
        )
        self.assertEqual(
            report['label_statistics'],
            [{'label': 'Ψ⁺', 'probability': '1/3'}, {'label': 'Φ⁺', 'probability': '1/3'},
             {'label': 'Φ⁻', 'probability': '1/3'}],
        )

    def test_output_is_deterministic(self):
        first = run('run_protocol', 'bosonic_shared', pairs=3, mode='sample', seed=7)
        second = run('run_protocol', 'bosonic_shared', pairs=3, mode='sample', seed=7)
        self.assertEqual(first, second)
        self.assertNotIn('elapsed_ms', first)

    def test_timing_flag(self):
        report = json.loads(run('run_protocol', 'separated', pairs=2, timing=True))
        self.assertIn('elapsed_ms', report)

    def test_usage_errors(self):
        cases = [
            (('run_protocol', 'bosonic_shared'), {'pairs': 2, 'statistics': 'fermion'}),
            (('run_protocol', 'ring'), {'pairs': 2}),
            (('run_protocol', 'separated'), {'pairs': 1}),
            (('run_protocol', 'separated'), {'pairs': 2, 'mode': 'guess'}),
            (('run_protocol', 'bosonic_shared'), {'pairs': 11}),
            (('run_protocol', 'bosonic_shared'), {'pairs': 2, 'species': ['0,1', '0,0']}),
            (('run_protocol', 'separated'), {'pairs': 2, 'species': ['0,1']}),
            (('run_protocol', 'separated'), {'pairs': 2, 'species': ['x', '0,0']}),
            (('run_protocol', 'separated'), {'pairs': 2, 'species': ['0,1,2', '0,0']}),
            (('run_protocol', 'separated'), {'pairs': 2, 'spin_pattern': 'sideways'}),
        ]
        for args, options in cases:
            with self.subTest(args=args, options=options):
                with self.assertRaises(CommandError) as ctx:
                    run(*args, **options)
                self.assertEqual(ctx.exception.returncode, 2)


class SweepCommandTestCase(SimpleTestCase):

    def test_csv_output(self):
        lines = run('sweep_probabilities', n_max=8).splitlines()
        self.assertEqual(lines[0], 'kind,n,probability_exact,probability_float')
        self.assertEqual(len(lines), 10)
        self.assertIn('separated,8,1/16,0.0625', lines)
        self.assertIn('fermionic_shared,4,2/9,0.222222222222', lines)
        self.assertIn('bosonic_shared,4,6/25,0.24', lines)
        self.assertEqual([line.split(',')[0] for line in lines[1:4]], ['separated'] * 3)

    def test_kinds_are_deduplicated(self):
        lines = run('sweep_probabilities', n_max=6, kinds=['bosonic_shared', 'fermionic_shared', 'bosonic_shared'])
        self.assertEqual(
            [line.split(',')[:2] for line in lines.splitlines()[1:]],
            [['fermionic_shared', '4'], ['fermionic_shared', '6'], ['bosonic_shared', '4'], ['bosonic_shared', '6']],
        )

    def test_json_output_direct_method(self):
        rows = json.loads(run('sweep_probabilities', n_max=6, kinds=['fermionic_shared'], format='json', method='direct'))
        self.assertEqual(rows, [
            {'kind': 'fermionic_shared', 'n': 4, 'probability_exact': '2/9', 'probability_float': 2 / 9},
            {'kind': 'fermionic_shared', 'n': 6, 'probability_exact': '1/8', 'probability_float': 0.125},
        ])

    def test_usage_errors(self):
        for options in ({'n_max': 7}, {'n_max': 22}, {'n_max': 8, 'format': 'xml'}, {'n_max': 8, 'kinds': ['ring']}):
            with self.subTest(options=options):
                with self.assertRaises(CommandError) as ctx:
                    run('sweep_probabilities', **options)
                self.assertEqual(ctx.exception.returncode, 2)


class ExpandStateCommandTestCase(SimpleTestCase):

    FIRST_FERMIONIC_TERM = (
        '{"ket":"|A↓,A↑,M↓,M↑⟩","modes":[{"node":"A","spin":"↓"},{"node":"A","spin":"↑"},'
        '{"node":"M","spin":"↓"},{"node":"M","spin":"↑"}],"coefficient":{"rational":"1/3","sqrt2":"0"},'
        '"coefficient_squared":"1/9","probability":"1/9"}'
    )

    # (ket, signo) del listado canónico de la cadena fermiónica de dos pares
    FERMIONIC_CHAIN_LISTING = [
        ('|A↓,A↑,M↓,M↑⟩', '1/3'),
        ('|A↓,A↑,M↓,B↑⟩', '1/3'),
        ('|A↓,A↑,M↑,B↓⟩', '-1/3'),
        ('|A↓,A↑,B↓,B↑⟩', '1/3'),
        ('|A↓,M↓,M↑,B↑⟩', '-1/3'),
        ('|A↓,M↑,B↓,B↑⟩', '1/3'),
        ('|A↑,M↓,M↑,B↓⟩', '1/3'),
        ('|A↑,M↓,B↓,B↑⟩', '-1/3'),
        ('|M↓,M↑,B↓,B↑⟩', '1/3'),
    ]

    def test_fermionic_chain_listing(self):
        output = run('expand_state', 'fermionic_shared', pairs=2)
        self.assertIn(self.FIRST_FERMIONIC_TERM, output)
        listing = json.loads(output)
        self.assertEqual(listing['term_count'], 9)
        self.assertEqual(
            [(term['ket'], term['coefficient']['rational']) for term in listing['terms']],
            self.FERMIONIC_CHAIN_LISTING,
        )
        self.assertTrue(all(term['coefficient']['sqrt2'] == '0' for term in listing['terms']))

    def test_separated_listing(self):
        listing = json.loads(run('expand_state', 'separated', pairs=2, statistics='boson'))
        self.assertEqual(listing['term_count'], 16)
        self.assertEqual({term['coefficient']['rational'] for term in listing['terms']}, {'1/4'})
        self.assertEqual({term['coefficient_squared'] for term in listing['terms']}, {'1/16'})
        self.assertNotIn('probability', listing)

    # Signo canónico de cada par: negativo cuando ↓ está en el nodo derecho y ↑ en el izquierdo
    SEPARATED_PAIR_ONE = [('A↓,A↑', 1), ('A↓,C↑', 1), ('A↑,C↓', -1), ('C↓,C↑', 1)]
    SEPARATED_PAIR_TWO = [('D↓,D↑', 1), ('D↓,B↑', 1), ('D↑,B↓', -1), ('B↓,B↑', 1)]

    def test_separated_fermionic_sign_pattern(self):
        listing = json.loads(run('expand_state', 'separated', pairs=2, statistics='fermion'))
        expected = [
            (f'|{first},{second}⟩', '1/4' if first_sign * second_sign > 0 else '-1/4')
            for first, first_sign in self.SEPARATED_PAIR_ONE
            for second, second_sign in self.SEPARATED_PAIR_TWO
        ]
        self.assertEqual(listing['term_count'], 16)
        self.assertEqual(
            [(term['ket'], term['coefficient']['rational']) for term in listing['terms']],
            expected,
        )

    def test_bosonic_post_selection(self):
        listing = json.loads(run('expand_state', 'bosonic_shared', pairs=2, post_select=True))
        self.assertEqual(listing['probability'], '6/25')
        self.assertEqual(listing['term_count'], 4)
        self.assertEqual({term['coefficient_squared'] for term in listing['terms']}, {'1/6'})
        self.assertEqual(
            sorted(term['probability'] for term in listing['terms']),
            ['1/3', '1/3', '1/6', '1/6'],
        )

    def test_fermionic_post_selection(self):
        listing = json.loads(run('expand_state', 'fermionic_shared', pairs=2, post_select=True))
        self.assertEqual(listing['probability'], '2/9')
        self.assertEqual([term['ket'] for term in listing['terms']], ['|A↓,M↓,M↑,B↑⟩', '|A↑,M↓,M↑,B↓⟩'])
        self.assertEqual([term['coefficient_squared'] for term in listing['terms']], ['1/2', '1/2'])


class VerifyOraclesCommandTestCase(SimpleTestCase):

    def test_all_checks_pass(self):
        output = run('verify_oracles', n_max=6, random_matrices=200)
        self.assertIn('Todas las comprobaciones pasaron', output)
        self.assertIn('closed_form/bosonic_shared/6', output)
        self.assertNotIn('✗', output)

    def test_oracles_up_to_eight_particles(self):
        output = run('verify_oracles', n_max=8, random_matrices=0)
        for name in ('gram/fermionic_shared/8/det', 'gram/bosonic_shared/8/perm',
                     'closed_form/bosonic_shared/8', 'tree/separated/boson/8', 'leaves/bosonic_shared/8'):
            self.assertIn(f'✓ {name}', output)
        self.assertNotIn('✗', output)
        self.assertIn('Todas las comprobaciones pasaron', output)

    def test_tampered_gram_matrix_fails(self):
        original = protocols.gram_matrix

        def tampered(spec):
            matrix = original(spec)
            if spec.statistics == protocols.Statistics.FERMION and spec.topology == protocols.Topology.SHARED_CHAIN:
                return ScalarMatrix.identity(matrix.dim)
            return matrix

        with patch('networks.services.protocols.gram_matrix', side_effect=tampered):
            with self.assertRaises(CommandError) as ctx:
                run('verify_oracles', n_max=4, random_matrices=0)
        self.assertEqual(ctx.exception.returncode, 1)

    def test_tampered_failure_is_listed(self):
        original = protocols.gram_matrix
        out = StringIO()

        def tampered(spec):
            matrix = original(spec)
            return ScalarMatrix.identity(matrix.dim) if spec.statistics == protocols.Statistics.FERMION else matrix

        with patch('networks.services.protocols.gram_matrix', side_effect=tampered):
            with self.assertRaises(CommandError):
                call_command('verify_oracles', n_max=4, random_matrices=0, stdout=out)
        self.assertIn('✗ closed_form/fermionic_shared/4', out.getvalue())

    def test_odd_n_max(self):
        with self.assertRaises(CommandError) as ctx:
            run('verify_oracles', n_max=5)
        self.assertEqual(ctx.exception.returncode, 2)
