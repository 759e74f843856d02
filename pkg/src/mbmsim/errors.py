"""Exception types raised across the package."""


class MbmSimError(Exception):
    """Base class for all package errors."""


class UnsupportedCardinality(MbmSimError):
    """Alphabet size M is not valid for the requested alphabet kind."""


class SetTooLarge(MbmSimError):
    """Signal set (or pair enumeration) exceeds the configured cap."""


class LengthMismatch(MbmSimError):
    """Bit string length does not match the signal-set rate."""


class NotInSet(MbmSimError):
    """Vector is not a member of the signal set."""


class ShapeMismatch(MbmSimError):
    """Array shapes are inconsistent with the configuration."""


class NotPSD(MbmSimError):
    """Correlation matrix is not positive semidefinite."""


class DegeneratePair(MbmSimError):
    """Pairwise error probability requested for identical vectors."""


class SearchTooLarge(MbmSimError):
    """Exhaustive subset search exceeds the pair-evaluation cap."""


class NonToneAlphabet(MbmSimError):
    """Phase compensation requires a tone alphabet."""


class BadGenerator(MbmSimError):
    """Convolutional generator matrix is inconsistent with the trellis size."""


class LengthError(MbmSimError):
    """Input bit length is not a multiple of the encoder input width."""


class InsufficientPoints(MbmSimError):
    """Not enough usable BER points in the requested fit window."""


class ParseError(MbmSimError):
    """Malformed curve CSV or configuration file."""
