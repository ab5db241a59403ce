"""Exception hierarchy shared by every depthlab service."""


class DepthLabError(Exception):
    """Base class for all depthlab errors."""

    exit_code = 1


class MalformedEncoding(DepthLabError):
    """A self-delimited field did not decode."""

    exit_code = 2


class InvalidProgram(DepthLabError):
    """A bit string is not a valid program for the fixed machine."""

    exit_code = 2


class BudgetExceeded(DepthLabError):
    """A procedure overran its declared step budget."""

    exit_code = 3

    def __init__(self, message, steps=None, budget=None):
        super().__init__(message)
        self.steps = steps
        self.budget = budget


class SearchBudgetExceeded(DepthLabError):
    """An exhaustive search hit its ceiling before finding a witness."""

    exit_code = 3

    def __init__(self, message, lower_bound):
        super().__init__(message)
        self.lower_bound = lower_bound


class CacheCorrupt(DepthLabError):
    """A stored run record failed its checksum."""

    exit_code = 3


class MdCapViolation(DepthLabError):
    """A decompressor tried to output more than MD(j) bits."""

    exit_code = 4

    def __init__(self, message, j, cap):
        super().__init__(message)
        self.j = j
        self.cap = cap


class TableIncomplete(DepthLabError):
    """The halting table ceiling is too low for the requested index."""

    exit_code = 3


class NonDyadicValue(DepthLabError):
    """A martingale produced a value whose denominator is not a power of two."""

    exit_code = 4


class ScheduleMismatch(DepthLabError):
    """A diagonal schedule does not fit the sequence it is applied to."""

    exit_code = 4


class WindowUncovered(DepthLabError):
    """A trace does not cover the requested window."""

    exit_code = 3


class PreconditionFailed(DepthLabError):
    """An operation's documented precondition does not hold."""

    exit_code = 4


class NoChunkFound(DepthLabError):
    """Inversion found no chunk consistent with the target image."""

    exit_code = 4

    def __init__(self, message, round_index=None):
        super().__init__(message)
        self.round_index = round_index


class AmbiguousChunk(DepthLabError):
    """Two chunks were consistent with the target: monotone injectivity fails."""

    exit_code = 4

    def __init__(self, message, witness):
        super().__init__(message)
        self.witness = witness


class HypothesisUnmet(DepthLabError):
    """The source-side margin premise of the slow growth chain failed."""

    exit_code = 4
