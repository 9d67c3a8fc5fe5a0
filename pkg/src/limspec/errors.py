"""Exception types shared across the library."""
from __future__ import annotations


class LimspecError(Exception):
    """Base class for all library errors."""


class ConfigError(LimspecError):
    """A scenario configuration is malformed.

    Carries the dotted path of the offending field so CLI diagnostics can
    point at it directly.
    """

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(message if field is None else f"{field}: {message}")


class DenseCapError(LimspecError):
    """A dense-matrix operation would exceed the configured row cap."""

    def __init__(self, needed: int, cap: int):
        self.needed = needed
        self.cap = cap
        super().__init__(
            f"dense compression needs {needed} rows but the cap is {cap}; "
            f"pass cap={needed} or larger to override"
        )


class WindowSizeError(LimspecError):
    """A window is too small for the requested computation."""

    def __init__(self, message: str, min_side: int | None = None):
        self.min_side = min_side
        super().__init__(message)


class MarginError(LimspecError):
    """A support region violates the bandwidth margin precondition."""

    def __init__(self, message: str, required: int | None = None):
        self.required = required
        super().__init__(message)


class SymbolPolicyError(LimspecError):
    """An unbounded potential symbol was used without the window-clamp policy."""


class NotSelfAdjointError(LimspecError):
    """A self-adjoint-only routine received a non-self-adjoint operator."""


class NoLimitDirectionError(LimspecError):
    """A direction sequence produced no localization at infinity."""
