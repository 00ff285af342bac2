from typing import Any, Dict, List, Optional, Sequence, Tuple

from networks.constants import (
    FLOAT_SIGNIFICANT_DIGITS,
    NULL_STATE_NOTE,
    SAMPLED_BRANCH_NOTE,
    MeasurementMode,
    ProtocolKind,
    Spin,
)
from networks.services.protocols import (
    BranchOutcome,
    CascadeResult,
    TransferResult,
    label_statistics,
)
from networks.services.scalar_algebra import Scalar, scalar_sum
from networks.services.states import NormalizedState


class RunReportPresenter:
    """
    Prepara los datos de los comandos para los serializers.

    Responsabilidades:
        - Reporte de ejecución de un protocolo (RunReport)
        - Filas del barrido de probabilidades
        - Listado canónico de términos de un estado
    """

    @staticmethod
    def format_float(value: Scalar) -> str:
        """Columna flotante del CSV: 12 cifras significativas."""
        return f"{value.to_float():.{FLOAT_SIGNIFICANT_DIGITS}g}"

    @classmethod
    def build_branch(cls, branch: BranchOutcome) -> Dict[str, Any]:
        return {
            'outcome_sequence': [
                {'target': target, 'label': label.label}
                for target, label in branch.outcome_sequence
            ],
            'probability': branch.branch_probability,
            'probability_float': branch.branch_probability.to_float(),
            'final_ab_label': branch.final_ab_label.label,
            'final_fidelity': branch.final_fidelity,
        }

    @staticmethod
    def build_notes(result: CascadeResult, mode: MeasurementMode) -> List[str]:
        notes = []
        if result.null_state:
            notes.append(NULL_STATE_NOTE)
        if MeasurementMode(mode) == MeasurementMode.SAMPLE and result.branches:
            notes.append(SAMPLED_BRANCH_NOTE)
        return notes

    @classmethod
    def build_run_report(cls, result: CascadeResult, mode: MeasurementMode,
                         elapsed_ms: Optional[float] = None) -> Dict[str, Any]:
        """
        Args:
            result: resultado de cualquiera de los tres ejecutores
            mode: modo de medición usado
            elapsed_ms: tiempo de ejecución; solo se incluye si se pidió

        Returns:
            Dict listo para RunReportSerializer
        """
        spec = result.spec
        report = {
            'kind': ProtocolKind(result.kind).value,
            'pairs': spec.pairs,
            'n': spec.particle_number,
            'statistics': spec.statistics.slug,
            'mode': MeasurementMode(mode).value,
            'probability': result.success_probability,
            'probability_float': result.success_probability.to_float(),
            'branch_count': len(result.branches),
            'branch_probability_sum': scalar_sum(branch.branch_probability for branch in result.branches),
            'branches': [cls.build_branch(branch) for branch in result.branches],
            'label_statistics': [
                {'label': label.label, 'probability': probability}
                for label, probability in label_statistics(result.branches).items()
            ],
        }
        if spec.has_distinct_species:
            report['species'] = [list(pair) for pair in spec.species]
        if isinstance(result, TransferResult):
            report['ab_fidelity'] = result.ab_fidelity
            report['post_state_fidelity'] = result.post_state_fidelity
        notes = cls.build_notes(result, mode)
        if notes:
            report['notes'] = notes
        if elapsed_ms is not None:
            report['elapsed_ms'] = round(elapsed_ms, 2)
        return report

    @classmethod
    def build_sweep_rows(cls, rows: Sequence[Tuple[ProtocolKind, int, Scalar]]) -> List[Dict[str, Any]]:
        return [
            {
                'kind': ProtocolKind(kind).value,
                'n': n,
                'probability_exact': probability,
                'probability_float': probability.to_float(),
            }
            for kind, n, probability in rows
        ]

    @classmethod
    def csv_row(cls, kind: ProtocolKind, n: int, probability: Scalar) -> List[str]:
        return [ProtocolKind(kind).value, str(n), str(probability.as_fraction()), cls.format_float(probability)]

    @staticmethod
    def build_terms(state: NormalizedState) -> List[Dict[str, Any]]:
        """Términos en orden canónico con coeficiente² y probabilidad normalizados."""
        terms = []
        for ket, coefficient in state.state:
            terms.append({
                'ket': str(ket),
                'modes': [
                    {'node': mode.node.name, 'spin': Spin(mode.spin).label}
                    for mode in ket.local_modes
                ],
                'coefficient': coefficient,
                'coefficient_squared': state.weight(ket),
                'probability': state.weight(ket) * ket.self_overlap(),
            })
        return terms

    @classmethod
    def build_state_listing(cls, kind: ProtocolKind, pairs: int, statistics: str, state: NormalizedState,
                            post_selected: bool, probability: Optional[Scalar] = None) -> Dict[str, Any]:
        listing = {
            'kind': ProtocolKind(kind).value,
            'pairs': pairs,
            'n': state.particle_number,
            'statistics': statistics,
            'post_selected': post_selected,
            'norm_squared': state.norm_squared,
            'term_count': len(state.state),
            'terms': cls.build_terms(state),
        }
        if probability is not None:
            listing['probability'] = probability
        return listing
