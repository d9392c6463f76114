"""Exception types raised across the skeletonization pipeline.

Stage-1 failures subclass :class:`Rejection` so that the separator builder can
turn them into a rejection record instead of aborting a run.
"""


class SkelError(Exception):
    """Base class for all library errors."""


# geometry
class NonManifoldEdge(SkelError):
    pass


class DegenerateFace(SkelError):
    pass


class TooFewPoints(SkelError):
    pass


class FlipLimitExceeded(SkelError):
    pass


class UnsupportedFormat(SkelError):
    pass


# geodesics
class SolverFailure(SkelError):
    pass


# stage 1 - each of these aborts a single separator, never the run
class Rejection(SkelError):
    reason = "Rejection"


class EmptyCutLocus(Rejection):
    reason = "EmptyCutLocus"


class NoSplitFound(Rejection):
    reason = "NoSplitFound"


class LocalMinTrap(Rejection):
    reason = "LocalMinTrap"


class DegenerateLoop(Rejection):
    reason = "DegenerateLoop"


class ConstraintDisconnects(Rejection):
    reason = "ConstraintDisconnects"


class CollapseDetected(Rejection):
    reason = "CollapseDetected"


class NoSupport(Rejection):
    reason = "NoSupport"


# stage 2 / evaluation
class NoRegions(SkelError):
    pass


class BinMismatch(SkelError):
    pass
