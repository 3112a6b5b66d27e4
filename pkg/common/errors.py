class SpectralPinnError(Exception):
    pass


class ShapeError(SpectralPinnError, ValueError):
    pass


class ContractError(SpectralPinnError, ValueError):
    pass


class NumericalError(SpectralPinnError, ArithmeticError):
    pass


class SolverBlowUpError(NumericalError):
    pass


class UnsupportedOrderError(ContractError):
    pass


class MissingJetComponentError(ContractError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class ParameterBudgetError(ContractError):
    pass


class ConfigError(SpectralPinnError, ValueError):
    pass
