"""Exception hierarchy for the retrieval engine.

Every library error derives from RetrievalError so callers (CLI, service)
can map failures to a single error surface.
"""


class RetrievalError(Exception):
    """Base class for all errors raised by this package."""


# --- linear algebra ---------------------------------------------------------

class DimensionError(RetrievalError):
    """Shapes or index ranges are inconsistent."""


class DegenerateInputError(RetrievalError):
    """Input carries no usable signal (zero variance, constant column)."""


class NotSymmetricError(RetrievalError):
    """Matrix expected to be symmetric is not."""


class NotPositiveDefiniteError(RetrievalError):
    """Matrix expected to be positive definite is not."""


class ConvergenceFailureError(RetrievalError):
    """LAPACK eigensolver failed to converge."""


class SingularSystemError(RetrievalError):
    """Linear system is rank-deficient with no consistent solution."""


# --- eigenfunction basis ----------------------------------------------------

class NotEnoughEigenfunctionsError(RetrievalError):
    """Fewer surviving eigenfunctions than requested."""


# --- taxonomy ---------------------------------------------------------------

class TaxonomyError(RetrievalError):
    """Base class for taxonomy validation failures."""


class CycleDetectedError(TaxonomyError):
    pass


class MultipleRootsError(TaxonomyError):
    pass


class UnknownParentError(TaxonomyError):
    pass


class ZeroTotalItemsError(TaxonomyError):
    pass


class EmptySubtreeError(TaxonomyError):
    """A node's subtree holds zero items, making its occurrence prior 0."""


class DuplicateNodeError(TaxonomyError):
    pass


class RootOperandError(TaxonomyError):
    """Similarity asked for a node with occurrence probability 1."""


class UnknownClassError(TaxonomyError):
    pass


# --- solving / fusion -------------------------------------------------------

class NoLabelsError(RetrievalError):
    """A solve was requested with an empty label set."""


class MissingModalityError(RetrievalError):
    """Fusion weights and label functions do not cover the same modalities."""


# --- active learning --------------------------------------------------------

class PoolExhaustedError(RetrievalError):
    """No unlabeled candidate remains to query."""


# --- experiment harness -----------------------------------------------------

class InfeasibleConfigError(RetrievalError):
    pass


class InfeasibleSplitError(RetrievalError):
    pass


class InfeasibleConceptError(RetrievalError):
    """Concept lacks enough positives/negatives in the pool for seeding."""


class NoPositivesError(RetrievalError):
    """Ranking metric needs at least one actually-positive item."""


# --- service ----------------------------------------------------------------

class IngestError(RetrievalError):
    """Collection ingestion failed; carries the offending file's role."""

    def __init__(self, source: str, reason: str):
        super().__init__(f"{source}: {reason}")
        self.source = source
        self.reason = reason


class UnknownCollectionError(RetrievalError):
    pass


class UnknownSessionError(RetrievalError):
    pass


class NoPositiveSeedError(RetrievalError):
    pass


class NotPendingItemError(RetrievalError):
    pass
