"""Exception hierarchy shared by every module.

Input problems derive from :class:`ValidationError` (also a ``ValueError``);
failures of the numerics themselves derive from :class:`NumericalError`.
The CLI maps the first family to exit code 2 and the second to exit code 3.
"""


class CollectibilityError(Exception):
    """Base class for all package errors."""


class ValidationError(CollectibilityError, ValueError):
    pass


class NumericalError(CollectibilityError, ArithmeticError):
    pass


class ShapeMismatch(ValidationError):
    pass


class HermiticityViolation(ValidationError):
    pass


class TraceViolation(ValidationError):
    pass


class NormViolation(ValidationError):
    pass


class NegativeEigenvalue(ValidationError):
    def __init__(self, min_eig, tol=None):
        self.min_eig = float(min_eig)
        msg = f"minimum eigenvalue {self.min_eig:.3e}"
        if tol is not None:
            msg += f" below tolerance -{tol:.1e}"
        super().__init__(msg)


class BadSubset(ValidationError):
    pass


class NotBipartite(ValidationError):
    pass


class NotQubits(ValidationError):
    pass


class NotTwoQubits(ValidationError):
    pass


class NotUnitary(ValidationError):
    pass


class NegativeRadicand(ValidationError):
    pass


class XiOutOfRange(ValidationError):
    pass


class Unsupported(ValidationError):
    pass


class BadLambda(ValidationError):
    pass


class BadParams(ValidationError):
    pass


class AxesNotComplementary(ValidationError):
    pass


class DegenerateBranch(ValidationError):
    pass


class InsufficientCounts(ValidationError):
    pass


class NoRoot(NumericalError):
    pass
