"""Exception hierarchy shared by every module."""


class RainbowError(Exception):
    """Base class for all library errors."""


class InputError(RainbowError, ValueError):
    """Malformed input or violated precondition."""


# graph_core
class DuplicateEdge(InputError):
    pass


class SelfLoop(InputError):
    pass


class VertexOutOfRange(InputError):
    pass


class EmptyGraph(InputError):
    pass


class FormatError(InputError):
    pass


# regularity
class PartsOverlap(InputError):
    pass


class EmptyPart(InputError):
    pass


# pattern_count
class PatternTooLarge(InputError):
    pass


class NoEdges(InputError):
    pass


class AnchorNotInGraph(InputError):
    pass


class CostGuardExceeded(RainbowError):
    pass


# partition
class BadDistribution(InputError):
    pass


class RetriesExhausted(RainbowError):
    def __init__(self, message, last_report=None):
        super().__init__(message)
        self.last_report = last_report


# designs
class OddOrder(InputError):
    pass


class UnsupportedParameters(RainbowError):
    pass


class NonPrimeOrder(InputError):
    pass


class TooManySquares(InputError):
    pass


# hmatch
class CapExceeded(RainbowError):
    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class DesignUnavailable(RainbowError):
    pass


class CoverageNotReached(RainbowError):
    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


# rainbow_decomp
class NonRainbowMember(InputError):
    pass


class FamilyTooSmall(RainbowError):
    pass


class LinkingFailed(RainbowError):
    def __init__(self, message, failed_link=None):
        super().__init__(message)
        self.failed_link = failed_link


# cli / generators
class InfeasibleParams(InputError):
    pass
