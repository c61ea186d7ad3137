"""Exception types shared by all herm2 modules."""

from __future__ import annotations


class Herm2Error(Exception):
    """Base class; `stage` names the pipeline step that failed."""

    stage = "unknown"


class NonUnitParam(Herm2Error):
    stage = "ring"


class UnsupportedDegree(Herm2Error):
    stage = "ring"


class NonUnitInverse(Herm2Error):
    stage = "ring"


class ContextMismatch(Herm2Error):
    stage = "ring"


class NotHermitian(Herm2Error):
    stage = "lattice"


class Degenerate(Herm2Error):
    stage = "lattice"


class SingularU(Herm2Error):
    stage = "lattice"


class PrecisionExhausted(Herm2Error):
    """Raised by pipelines when the working precision is too small; callers retry with larger k."""

    stage = "precision"


class CanonFail(Herm2Error):
    stage = "canonicalize"


class CaseMismatch(Herm2Error):
    stage = "quotient"


class BudgetExceeded(Herm2Error):
    stage = "oracle"

    def __init__(self, message: str, profile=None):
        super().__init__(message)
        self.profile = profile
