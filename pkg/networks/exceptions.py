"""
Excepciones del dominio.

Todas heredan de EntanglementSimulationError; las que representan entradas
inválidas heredan además de ValueError para que los comandos las traduzcan
a errores de uso.
"""


class EntanglementSimulationError(Exception):
    """Error base del simulador."""


class ScalarArithmeticError(EntanglementSimulationError, ArithmeticError):
    """División por cero o valor irracional donde se requiere un racional."""


class PermanentBoundError(EntanglementSimulationError, ValueError):
    """La dimensión supera la cota configurada para el permanente."""


class StatisticsMismatchError(EntanglementSimulationError, ValueError):
    """Número de partículas o estadística η incompatibles."""


class DimensionMismatchError(EntanglementSimulationError, ValueError):
    """Listas o matrices de dimensiones incompatibles."""


class ZeroStateError(EntanglementSimulationError, ValueError):
    """Se intentó normalizar el estado nulo."""


class InvalidConfigurationError(EntanglementSimulationError, ValueError):
    """Configuración de conteo inconsistente con el estado."""


class MeasurementTargetError(EntanglementSimulationError, ValueError):
    """El subespacio medido no contiene exactamente dos partículas."""


class InvalidNetworkError(EntanglementSimulationError, ValueError):
    """Red o número de partículas fuera del dominio de los protocolos."""


class DegeneratePreparationError(EntanglementSimulationError, ValueError):
    """El ket preparado tiene norma cero (por ejemplo, prohibido por Pauli)."""
