# Management commands del simulador
