"""Exception types raised across the package."""


class PLSplitError(Exception):
    """Base class for all package errors."""


class InvalidGluing(PLSplitError):
    """Bad gluing table; ``tet`` names the offending tetrahedron when known."""

    def __init__(self, message, tet=None):
        self.tet = tet
        super().__init__(message)


class GeneratorExhausted(PLSplitError):
    pass


class NotCovered(PLSplitError):
    pass


class Disconnected(PLSplitError):
    pass


class BoundViolated(PLSplitError):
    pass


class SameSide(PLSplitError):
    pass


class NotNormal(PLSplitError):
    pass


class WindowTooLarge(PLSplitError):
    """Raised when a search would exceed its configured budget."""


class QuadConflict(PLSplitError):
    pass


class NotGeneralPosition(PLSplitError):
    pass


class NotTransverse(PLSplitError):
    pass


class NoEssentialIntersections(PLSplitError):
    pass


class ConflictingWitnesses(PLSplitError):
    """Intersection patterns disagree on the class of their circles."""

    def __init__(self, message, classes=()):
        self.classes = tuple(classes)
        super().__init__(message)


class NonParallelCircles(PLSplitError):
    pass


class NotMonotone(PLSplitError):
    pass


class Unstable(PLSplitError):
    pass


class BudgetExceeded(PLSplitError):
    pass


class OneSided(PLSplitError):
    pass


class SeedDegenerate(PLSplitError):
    pass


class OverlapUnresolved(PLSplitError):
    pass


class UnknownExample(PLSplitError):
    pass


class ParseError(PLSplitError):
    """Malformed input file; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
