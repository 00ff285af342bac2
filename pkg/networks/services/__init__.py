"""
Servicios del simulador de redes cuánticas.

    - scalar_algebra: aritmética exacta en ℚ(√2), determinante y permanente
    - states: estados de muchas partículas sin etiquetas
    - slocc: post-selección por conteo de partículas
    - bell: bases y mediciones de Bell
    - protocols: los tres protocolos y sus fórmulas cerradas
    - VerificationService: contraste con oráculos
    - RunReportPresenter: formato de salida de los comandos
"""

from .report_presenter import RunReportPresenter
from .verification import CheckResult, VerificationService

__all__ = [
    'CheckResult',
    'RunReportPresenter',
    'VerificationService',
]
