"""Exception types shared across the package."""


class ErgorateError(Exception):
    """Base class for all package errors."""


class PrecisionExhausted(ErgorateError):
    """A decimal-string frequency ran out of certified digits.

    Carries the partial expansion (everything certified so far) in
    ``partial`` so callers can still inspect it.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class Uncertified(ErgorateError):
    """A query reached past the certified prefix of an expansion."""


class NotIrrational(ErgorateError):
    """A Diophantine predicate was asked about a rational test frequency."""


class HypothesisNotMet(ErgorateError):
    """A lower-bound construction's gap hypothesis fails at the given index."""


class DomainError(ErgorateError):
    """Argument outside the domain of a closed-form evaluation."""


class DimensionTooLarge(ErgorateError):
    """A grid sweep would exceed the configured point budget."""


class Timeout(ErgorateError):
    """A harness scenario exceeded its wall-clock budget."""


class ConfigError(ErgorateError):
    """Config file could not be parsed; message carries line diagnostics."""
