""" Exception classes raised across the ellie package."""

# License: BSD 3 clause


class EllieError(Exception):
    """Base class for every error raised by ellie."""


class ShapeError(EllieError, ValueError):
    """Array or tensor has the wrong number of channels or mismatched
    dimensions."""


class DomainError(EllieError, ValueError):
    """Argument lies outside the mathematical domain of an operation."""


class ConfigError(EllieError, ValueError):
    """Configuration value is invalid or inconsistent."""


class DataError(EllieError):
    """Input data is missing, empty or incomplete."""


class BudgetError(DataError):
    """Model exceeds its parameter or size budget."""


class IntegrityError(DataError):
    """Serialized artefact is corrupt or truncated."""


class ConversionError(EllieError):
    """Model graph cannot be structurally reparameterized."""


class UsageError(EllieError):
    """Command line was used incorrectly."""


class TrainingAbortedError(EllieError):
    """Training produced a non-finite loss.

    Parameters
    ----------
    step: int
        Step index at which the loss became non-finite.
    breakdown: dict
        Per-term loss values at that step.
    """

    def __init__(self, step, breakdown):
        self.step = step
        self.breakdown = dict(breakdown)
        terms = ', '.join(f'{n}:[{v}]' for n, v in self.breakdown.items())
        super().__init__(f'non-finite loss at step {step} ({terms})')


class BackendError(EllieError):
    """A pluggable feature or metric backend failed.

    Parameters
    ----------
    backend: str
        Name of the failing backend.
    cause: Exception
        Original error.
    """

    def __init__(self, backend, cause):
        self.backend = backend
        super().__init__(f'backend {backend!r} failed: {cause}')
