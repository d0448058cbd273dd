"""Exception types raised across the pipeline.

Each error carries a stable ``code`` string so the CLI and HTTP service can
report machine-readable failures.
"""


class ReliefError(Exception):
    code = "ReliefError"


class MissingNormals(ReliefError):
    code = "MissingNormals"


class MalformedFile(ReliefError):
    code = "MalformedFile"


class TooFewPoints(ReliefError):
    code = "TooFewPoints"


class EmptyMesh(ReliefError):
    code = "EmptyMesh"


class IOFailure(ReliefError):
    code = "IOFailure"


class ZeroDirection(ReliefError):
    code = "ZeroDirection"


class DegenerateNeighborhood(ReliefError):
    code = "DegenerateNeighborhood"


class TargetTooSmall(ReliefError):
    code = "TargetTooSmall"


class TargetExceedsInput(ReliefError):
    code = "TargetExceedsInput"


class FloatingComponent(ReliefError):
    code = "FloatingComponent"


class FactorizationFailure(ReliefError):
    code = "FactorizationFailure"


class NonFiniteSolution(ReliefError):
    code = "NonFiniteSolution"


class TargetUnreachable(ReliefError):
    code = "TargetUnreachable"

    def __init__(self, msg, best=None):
        super().__init__(msg)
        self.best = best  # (alpha, beta, span) of the closest attempt


class NoFrameYet(ReliefError):
    code = "NoFrameYet"


class DegenerateInput(ReliefError):
    code = "DegenerateInput"


class PrepareTimeout(ReliefError):
    code = "PrepareTimeout"
