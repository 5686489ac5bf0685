"""Exception types shared across the package."""


class ZnCoverError(Exception):
    """Base class for all library errors."""


class ValidationError(ZnCoverError):
    """Bad input data (arity, duplicates, ranges)."""


class DuplicatePoints(ValidationError):
    pass


class BadArity(ValidationError):
    pass


class ZeroConstant(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class NumericalError(ZnCoverError):
    """A numerical procedure failed to reach its target accuracy."""


class NonConvergence(NumericalError):
    pass


class AmbiguousMatching(NumericalError):
    pass


class IllConditioned(NumericalError):
    pass


class SingularNormalization(NumericalError):
    pass


class StepUnderflow(NumericalError):
    pass


class ConventionMismatch(NumericalError):
    pass


class CutAmbiguity(ValidationError):
    pass


class PathThroughBranchPoint(ValidationError):
    pass


class SolvabilityViolation(ZnCoverError):
    """theta[eps, delta](0) vanishes: the monodromy data sits on the Malgrange divisor."""


class SingularCharacteristics(ZnCoverError):
    pass


class NoneFound(ZnCoverError):
    pass


class BranchSelection(NumericalError):
    pass


class OnCut(CutAmbiguity):
    """Evaluation point lies on the contour and no side was given."""


class ThetaDenominatorZero(NumericalError):
    """A sample point sits on the theta divisor; pick another point."""
