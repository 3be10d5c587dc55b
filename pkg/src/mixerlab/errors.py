"""Exception hierarchy shared across the package."""


class MixerError(Exception):
    """Base class for all mixerlab errors."""


class MalformedQueryError(MixerError):
    """A query string has the wrong width or contains non-binary characters."""


class InvalidArgumentError(MixerError):
    """An argument is outside the oracle's declared domain."""


class BudgetExhaustedError(MixerError):
    """A query session exceeded its configured query budget."""


class PromiseViolationError(MixerError):
    """An instance violates the promise required by a protocol."""
