"""Exception hierarchy shared by all modules."""


class BuresAlgError(Exception):
    """Base class for every error raised by the package."""


class AlgebraMismatch(BuresAlgError, ValueError):
    """Operands live on different algebras."""


class NonHermitian(BuresAlgError, ValueError):
    pass


class NotPositive(BuresAlgError, ValueError):
    pass


class NotInvertiblePositive(BuresAlgError, ValueError):
    pass


class PositivityViolated(BuresAlgError, ValueError):
    """A product required to be positive (such as a*b) is not."""


class NotDominated(BuresAlgError, ValueError):
    """The domination relation rho <= lambda * nu fails."""


class NotDominatedOnR(NotDominated):
    """Domination fails on the atoms of an abelian subalgebra."""


class InvalidDecomposition(BuresAlgError, ValueError):
    pass


class InvalidPartition(BuresAlgError, ValueError):
    pass


class TargetMismatch(BuresAlgError, ValueError):
    pass


class SplitMismatch(BuresAlgError, ValueError):
    pass


class PreconditionViolated(BuresAlgError, ValueError):
    def __init__(self, premise: str, detail: str = ""):
        self.premise = premise
        super().__init__(f"{premise}: {detail}" if detail else premise)


class FullSupport(BuresAlgError, ValueError):
    pass


class ConfigError(BuresAlgError, ValueError):
    pass


class ParseError(BuresAlgError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class ValidationError(BuresAlgError):
    def __init__(self, message: str, invariant: str = ""):
        self.invariant = invariant
        super().__init__(message)


class UnknownAnalysis(BuresAlgError):
    pass


class UnknownSuite(BuresAlgError):
    pass
