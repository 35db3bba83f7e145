"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    """An argument violates an operation's precondition."""


class IncompatibleOutcomeError(ArithmeticError):
    """A projection annihilates the state (requested outcome has ~zero weight)."""


class RankDeficientError(ValueError):
    """A sensing matrix has a singular value at or below the rank tolerance."""


class NumericOverflowError(ArithmeticError):
    """A log-likelihood term underflows to an unusable value."""


class TrainingFailure(RuntimeError):
    """Repeat-until-success training exhausted its attempt budget."""

    def __init__(self, message, success_rate):
        super().__init__(message)
        self.success_rate = success_rate
