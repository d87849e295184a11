"""Exception hierarchy shared by the library and the CLI.

The CLI maps these onto its exit-code contract: input problems exit 2,
violated mathematical preconditions exit 3, numerical failures exit 4.
"""


class HliftError(Exception):
    """Base class for all errors raised by this package."""


class InputError(HliftError):
    """Malformed documents, bad grammar, dimension mismatches."""


class PreconditionError(HliftError):
    """A mathematical precondition does not hold (zero fiber, wrong kernel
    rank, curve not regular, point off a stratum, ...)."""


class NumericalError(HliftError):
    """Floating-point stage failed: step underflow, Newton divergence,
    rank change mid-integration."""
