"""Error types raised by the services.

None of them derive from ``ValueError``, so they pass through pydantic
validators unwrapped.
"""


class SubagError(Exception):
    """Base class for every error raised by the package."""


class DomainError(SubagError):
    """An input lies outside the domain of an operation."""


class ConfigurationError(SubagError):
    """A scheme, learner or run configuration is inconsistent."""


class RefusedError(SubagError):
    """The operation is not defined for the given input and refuses to guess."""
