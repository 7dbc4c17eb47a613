"""Exception hierarchy shared by every module.

The CLI maps each family to a distinct exit status, so callers should raise
the most specific class available.
"""


class OcrsLabError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class InputError(OcrsLabError, ValueError):
    """Malformed user input: bad indices, parameters out of range, bad files."""

    exit_code = 2


class CapabilityError(InputError):
    """The requested computation exceeds a documented size guard."""


class ContractViolation(InputError):
    """A caller broke an operation's precondition."""


class IndeterminateComparisonError(OcrsLabError):
    """A Monte Carlo estimate could not be separated from its threshold."""

    exit_code = 3

    def __init__(self, message, *, element=None, estimate=None, threshold=None, radius=None):
        super().__init__(message)
        self.element = element
        self.estimate = estimate
        self.threshold = threshold
        self.radius = radius

    @property
    def margin(self):
        if self.estimate is None or self.threshold is None:
            return None
        return self.estimate - self.threshold


class InvariantError(OcrsLabError, AssertionError):
    """An internal invariant failed; this indicates a bug, not bad input."""

    exit_code = 4
