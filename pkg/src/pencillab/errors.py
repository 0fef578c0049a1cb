"""Exception hierarchy shared by the library and the CLI exit-code table."""


class PencilError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ParseError(PencilError):
    exit_code = 3


class MalformedPencil(PencilError):
    """Identically-zero determinant, wrong shapes, non-symmetric input."""

    exit_code = 3


class SingularPencil(PencilError):
    exit_code = 4

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class SubspaceNotOnX(PencilError):
    exit_code = 5


class RankDeficient(PencilError):
    exit_code = 5


class DegenerateConfiguration(PencilError):
    exit_code = 6


class InternalInconsistency(PencilError):
    exit_code = 6


class MalformedInvariant(PencilError):
    exit_code = 3


class BadReduction(PencilError):
    exit_code = 7


class CeilingExceeded(PencilError):
    exit_code = 8

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class InvalidDimension(PencilError):
    exit_code = 10
