"""Exception hierarchy.

Every error carries the CLI exit code it maps to: 2 for malformed input,
3 for contract violations, 4 for failed verification.
"""


class ResolventError(Exception):
    exit_code = 3

    def __init__(self, message="", **context):
        super().__init__(message)
        self.context = context

    @property
    def reason(self):
        return type(self).__name__


class InputError(ResolventError):
    exit_code = 2


class ParseError(InputError):
    """Syntax error in a polynomial string; ``offset`` is a byte offset."""

    def __init__(self, message, offset, text=""):
        super().__init__(f"{message} at byte {offset}", offset=offset)
        self.offset = offset
        self.text = text


class UnknownVariable(ParseError):
    pass


class ContextMismatch(ResolventError):
    pass


class InvalidArgument(ResolventError):
    pass


class UndecidedPrincipality(ResolventError):
    pass


class ZeroCenter(ResolventError):
    pass


class DepthExceeded(ResolventError):
    pass


class NotPrincipal(ResolventError):
    def __init__(self, stage, ideal):
        super().__init__(f"stage {stage} ideal is not principal", stage=stage)
        self.stage = stage
        self.ideal = ideal


class NoUnitPivot(ResolventError):
    pass


class PointOffChart(ResolventError):
    pass


class MatrixTooLarge(ResolventError):
    pass


class NoCommonLeaf(ResolventError):
    pass


class DegreeCapExceeded(ResolventError):
    pass


class RankDimensionMismatch(ResolventError):
    def __init__(self, message, cycle=None):
        super().__init__(message)
        self.cycle = cycle


class UnsupportedProblem(ResolventError):
    pass


class VerificationFailure(ResolventError):
    exit_code = 4
