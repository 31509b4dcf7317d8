"""Exception hierarchy shared by all qhitting modules."""


class QHittingError(Exception):
    """Base class for every error raised by this package."""


class GraphValidationError(QHittingError, ValueError):
    """A graph record violates one of its invariants."""


class GraphFileError(GraphValidationError):
    """A graph file could not be parsed or failed schema validation."""


class GraphGenerationError(QHittingError, RuntimeError):
    """A random generator exhausted its retry budget."""


class ChainError(QHittingError, ValueError):
    """Invalid transition matrix, distribution or marked set."""


class DanglingNodeError(ChainError):
    def __init__(self, node, direction="outgoing"):
        self.node = int(node)
        super().__init__(f"node {self.node} has no {direction} edge of positive weight")


class ReducibleChainError(ChainError):
    """The transition matrix is not irreducible (graph not strongly connected)."""


class UnreachableTargetError(ChainError):
    """Some unmarked node cannot reach the marked set, so hitting times diverge."""


class ConvergenceError(QHittingError, RuntimeError):
    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)


class DefectiveEigenbasisError(ChainError):
    """Eigenvector matrix too ill-conditioned for the spectral hitting-time formula."""


class WalkConstructionError(QHittingError, RuntimeError):
    """Internal guard: a constructed walk failed its structural self-check."""


class SweepError(QHittingError, RuntimeError):
    def __init__(self, message, node=None):
        self.node = node
        super().__init__(message)
