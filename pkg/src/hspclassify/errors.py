"""Exception types shared across the package.

The CLI maps these onto process exit codes: usage problems exit 2,
data/format problems exit 3 and contract violations exit 4.
"""


class HspError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatchError(HspError, ValueError):
    """Two vectors (or a vector and a dataset) disagree on dimensionality."""


class EmptyDatasetError(HspError, ValueError):
    """An operation that needs at least one stored vector got none."""


class EmptyCandidatesError(HspError, ValueError):
    """The half-space proximal test was handed an empty candidate set."""


class EmptyNeighborhoodError(HspError, ValueError):
    """Vote tallying was handed an empty neighborhood."""


class StaleIndexError(HspError):
    """A search index does not match the dataset it is being used with."""


class DisconnectedGraphError(HspError):
    """A graph operation that needs connectivity found an unreachable pair."""

    def __init__(self, source: int, target: int):
        self.source = source
        self.target = target
        super().__init__(f"no path between nodes {source} and {target}")


class FormatError(HspError, ValueError):
    """A file does not follow its declared binary or text layout."""


class DataError(HspError, ValueError):
    """File contents parse but violate a data invariant (e.g. NaN values)."""


class ContractViolationError(HspError):
    """A caller-side or internal invariant was broken."""
