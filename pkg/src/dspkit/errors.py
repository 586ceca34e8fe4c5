"""Exception hierarchy shared across the toolkit."""


class DspkitError(Exception):
    """Base class for all toolkit errors."""


class PreconditionError(DspkitError):
    """An operation was called outside its stated preconditions."""


class CapExceededError(DspkitError):
    """A configured enumeration/search cap was exceeded."""


class ProcedureBlocked(DspkitError):
    """The eigenvalue-shift gauge step is undefined (pivot entry is zero)."""


class SearchFailure(DspkitError):
    """A constructive search gave up; does not imply non-existence."""


class DivergenceError(DspkitError):
    """An iterative correction failed to reach its target within the cap."""
