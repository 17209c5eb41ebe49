"""Exception types shared across the package."""


class BasinError(Exception):
    """Base class for all package-specific errors."""


# exact combinatorics ---------------------------------------------------------

class IndexOutOfRange(BasinError):
    pass


class BadBase(BasinError):
    pass


class MixedBase(BasinError):
    pass


class DegenerateTriple(BasinError):
    pass


class DepthLimitExceeded(BasinError):
    pass


class InvalidGraph(BasinError):
    pass


class InvalidCertificate(BasinError):
    pass


# symbolic portraits ----------------------------------------------------------

class InvalidPortrait(BasinError):
    pass


class EmptySpec(BasinError):
    pass


class OnBoundary(BasinError):
    pass


class GenericityViolation(BasinError):
    pass


# polynomial dynamics ---------------------------------------------------------

class RootFindingDiverged(BasinError):
    pass


class IllConditioned(BasinError):
    pass


class NonEscaping(BasinError):
    """Orbit stayed inside the escape radius for the full iteration budget."""

    def __init__(self, message="orbit did not escape", iterations=None):
        super().__init__(message)
        self.iterations = iterations


class BranchAmbiguity(BasinError):
    """Argument tracking hit a correction too large to resolve a branch."""


class RayTraceFailure(BasinError):
    pass


# grid oracle -----------------------------------------------------------------

class BadBox(BasinError):
    pass


class OutsideBand(BasinError):
    pass


class NearBoundary(BasinError):
    pass


class ResolutionTooCoarse(BasinError):
    pass


class InconsistentCombinatorics(BasinError):
    """Symbolic compound numbers disagree with flood-fill containment."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


# cli / serialization ---------------------------------------------------------

class ParseError(BasinError):
    pass
