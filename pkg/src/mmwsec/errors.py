"""Exception types shared across the package."""


class InfeasibleError(ValueError):
    """A model configuration or regime that admits no valid solution."""


class SilentSourceError(InfeasibleError):
    """The on-off protocol suspends transmission for this channel state."""


class DegenerateChannelError(ValueError):
    """A channel realization with no usable signal direction."""


class ConvergenceError(RuntimeError):
    """An iterative solver exhausted its iteration budget."""
