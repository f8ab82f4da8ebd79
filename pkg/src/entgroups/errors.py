"""Exception hierarchy.

Two families matter to callers: :class:`ValidationError` for bad input or an
exhausted budget (the CLI exits with status 2), and :class:`CheckFailed` for a
verification that should hold by construction (status 3, indicates a bug).
"""


class EntanglementError(Exception):
    """Base class for all package errors."""


class ValidationError(EntanglementError, ValueError):
    """Input rejected before or during computation."""


class CheckFailed(EntanglementError, AssertionError):
    """A theorem-guaranteed verification failed."""

    def __init__(self, message, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample


# statecore
class ZeroVectorError(ValidationError):
    pass


class DimensionMismatchError(ValidationError):
    pass


class InvalidPartitionError(ValidationError):
    pass


class ShapeMismatchError(ValidationError):
    pass


class NonUnitaryError(ValidationError):
    pass


class EmptySubsetError(ValidationError):
    pass


class UnknownNameError(ValidationError):
    pass


class MissingParamError(ValidationError):
    pass


class NotNormalizableError(ValidationError):
    pass


# schmidt
class RankExceedsDimensionError(ValidationError):
    pass


# stabilizer
class ProblemTooLargeError(ValidationError):
    pass


class PartitionMismatchError(ValidationError):
    pass


class SubsetTooSmallError(ValidationError):
    pass


class NoSharedBlockError(ValidationError):
    pass


class NotAStabilizerError(ValidationError):
    pass


class SearchBudgetExceededError(ValidationError):
    pass


# entclass
class TooManyFactorsError(ValidationError):
    pass


# goursat
class OrderBudgetExceededError(ValidationError):
    pass


class NotNormalError(ValidationError):
    pass


class NotAnIsomorphismError(ValidationError):
    pass


class NotASubgroupError(CheckFailed):
    pass


# dmalgebra
class MaxDimExceededError(ValidationError):
    pass


# tasks
class ZeroProbabilityOutcomeError(ValidationError):
    pass


class InsufficientRankError(ValidationError):
    pass


class InvalidInstanceError(ValidationError):
    pass


class NotNormalizedError(ValidationError):
    pass
