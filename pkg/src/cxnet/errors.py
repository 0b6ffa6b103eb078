"""Exception hierarchy shared by every module."""


class CxnError(ValueError):
    """Base class for all errors raised by cxnet.

    ``line`` is set when the error was traced back to a line of an input file.
    """

    def __init__(self, message="", line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DanglingFacet(CxnError):
    pass


class DimensionMismatch(CxnError):
    pass


class DuplicateFacet(CxnError):
    pass


class DuplicateId(CxnError):
    pass


class SignInUnoriented(CxnError):
    pass


class InvalidCellId(CxnError):
    pass


class UnknownCell(CxnError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class DuplicateVertexInSimplex(CxnError):
    pass


class CycleTooShort(CxnError):
    pass


class RepeatedVertex(CxnError):
    pass


class VertexIndexOutOfRange(CxnError):
    pass


class KOutOfRange(CxnError):
    pass


class NotSquare(CxnError):
    pass


class WidthMismatch(CxnError):
    pass


class ShapeMismatch(CxnError):
    pass


class MissingFeature(CxnError):
    pass


class NotOriented(CxnError):
    pass


class MissingContext(CxnError):
    pass


class ConfigInvalid(CxnError):
    pass


class ParseError(CxnError):
    """Malformed input text."""
