"""Exception hierarchy for framekit."""


class FrameError(Exception):
    """Base class for all framekit errors."""


class RankDeficient(FrameError):
    pass


class BadDims(FrameError):
    pass


class ShapeMismatch(FrameError):
    pass


class NotTight(FrameError):
    pass


class NotHermitian(FrameError):
    pass


class CriterionDisagreement(FrameError):
    """The operator-identity and containment membership tests disagree.

    Usually means the membership tolerance is too tight (or too loose)
    for the eigenvalue separation of the frame operator.
    """


class NotInClassE(FrameError):
    pass


class NotSorted(FrameError):
    pass


class DimensionDeficit(FrameError):
    pass


class StructureMismatch(FrameError):
    def __init__(self, clause: str, message: str = ""):
        self.clause = clause
        super().__init__(f"{clause}: {message}" if message else clause)


class InternalInvariantViolation(FrameError):
    pass


class ParseError(FrameError):
    pass


class ToleranceError(FrameError):
    pass


class VerificationFailed(FrameError):
    def __init__(self, clause: str, message: str = ""):
        self.clause = clause
        super().__init__(f"{clause}: {message}" if message else clause)
