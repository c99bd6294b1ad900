"""Exception hierarchy shared by all engine modules.

Every error carries a stable machine-readable ``code`` string that is
reused verbatim by the CLI diagnostics and the HTTP service payloads.
"""


class SeqAssignError(Exception):
    """Base class for all errors raised by this package."""

    code = "Error"


class LengthMismatchError(SeqAssignError):
    code = "LengthMismatch"


class UnsortedSupportError(SeqAssignError):
    code = "UnsortedSupport"


class NonPositiveProbError(SeqAssignError):
    code = "NonPositiveProb"


class ProbSumOutOfToleranceError(SeqAssignError):
    code = "ProbSumOutOfTolerance"


class DomainError(SeqAssignError):
    code = "DomainError"


class IndexOutOfRangeError(SeqAssignError):
    code = "IndexOutOfRange"


class InvalidDistributionFileError(SeqAssignError):
    code = "InvalidDistributionFile"


class CapacityError(SeqAssignError):
    code = "CapacityError"


class UnsortedRewardsError(SeqAssignError):
    code = "UnsortedRewards"


class ValueNotInSupportError(SeqAssignError):
    code = "ValueNotInSupport"


class EmptyRewardsError(SeqAssignError):
    code = "EmptyRewards"


class TooManySlotsError(SeqAssignError):
    code = "TooManySlots"


class UnknownKindError(SeqAssignError):
    code = "UnknownKind"


class RewardOverflowError(SeqAssignError):
    code = "RewardOverflow"
