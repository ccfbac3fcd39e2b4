"""Exception hierarchy shared across the package."""

from __future__ import annotations


class PinnbenchError(Exception):
    """Base class for all package errors."""


class ContractError(PinnbenchError):
    """An operation was called with arguments that violate its contract."""


class InvalidOrderError(ContractError):
    """Jet order outside the supported range [0, 3]."""


class OrderMismatchError(ContractError):
    """Binary jet operation on jets of different truncation orders."""


class UnsupportedActivationError(ContractError):
    """Activation name not in the derivative table."""


class MissingTapeError(PinnbenchError):
    """A gradient was requested for a value that was not recorded on a tape."""


class NonFiniteGradientError(PinnbenchError):
    """A reverse sweep produced a non-finite adjoint."""

    def __init__(self, message: str, epoch: int | None = None, sample: int | None = None):
        super().__init__(message)
        self.epoch = epoch
        self.sample = sample


class NonFiniteLossError(PinnbenchError):
    """A loss term evaluated to a non-finite value."""

    def __init__(self, message: str, epoch: int | None = None, sample: int | None = None):
        super().__init__(message)
        self.epoch = epoch
        self.sample = sample


class NotOnBoundaryError(ContractError):
    """Boundary data requested at a point not on any boundary face."""


class SingularityError(PinnbenchError):
    """Evaluation requested too close to a solution singularity."""


class NoInitialConditionError(ContractError):
    """Initial data requested for a problem without a time axis."""


class UndefinedDenominatorError(PinnbenchError):
    """Fractional error undefined because the reference norm is zero."""


class ConfigurationError(PinnbenchError):
    """Experiment configuration is inconsistent or incomplete."""
