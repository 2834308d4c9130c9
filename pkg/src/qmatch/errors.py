"""Exception hierarchy shared across the package.

Every error raised deliberately by qmatch derives from QmatchError so the
command line layer can map failure classes to exit codes.  Index/key
failures use the builtin LookupError family instead.
"""


class QmatchError(Exception):
    """Base class for all deliberate qmatch failures."""


class ShapeError(QmatchError):
    """Array arguments have incompatible or unexpected shapes."""


class DomainError(QmatchError):
    """A value is outside the mathematical domain of the operation."""


class DegenerateInputError(DomainError):
    """Input is structurally empty (e.g. a sentence with no tokens)."""


class NumericError(QmatchError):
    """An iteration failed to converge or produced non-finite values."""


class ParseError(QmatchError):
    """A file could not be parsed; message carries path and line number."""


class ConfigError(QmatchError):
    """Configuration values are inconsistent or out of range."""


class DataError(QmatchError):
    """A dataset violates a structural requirement."""
