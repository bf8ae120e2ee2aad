"""Exception hierarchy shared by every engine module.

The CLI maps these onto process exit codes, so the distinctions matter:
a violated mathematical hypothesis is not the same failure as a missing
root in the coefficient field or an inconsistent homological system.
"""


class JetprepError(Exception):
    """Base class for all engine errors."""


class ShapeMismatchError(JetprepError):
    """Operands disagree on variable count or truncation order."""


class NotAUnitError(JetprepError):
    """Inversion of a series whose constant term vanishes."""


class DomainError(JetprepError):
    """Substitution image has a constant term where none is allowed."""


class HypothesisError(JetprepError):
    """A stated precondition of a preparation operation fails.

    The message names the violated condition so the CLI can surface it.
    """


class NotClosedError(HypothesisError):
    """Integration of a 1-form that is not closed."""


class FieldExtensionError(JetprepError):
    """A required k-th root does not exist in the Gaussian rationals."""


class SolverInconsistentError(JetprepError):
    """The degree-by-degree linear solve hit an inconsistent system."""

    def __init__(self, degree, message=""):
        self.degree = degree
        super().__init__(message or f"inconsistent homological system at degree {degree}")


class UnsupportedCaseError(JetprepError):
    """Input falls outside the refinement cases the engine handles."""


class RealityError(JetprepError):
    """Real-mode computation produced or received a non-real coefficient."""


class VerificationError(JetprepError):
    """A certificate failed re-verification; names the offending monomial."""
