"""Exception types raised by qclone contract violations.

All derive from QcloneError (a ValueError), so callers can catch either the
specific condition or anything the library rejects.
"""


class QcloneError(ValueError):
    """Base class for all qclone contract violations."""


class DimensionTooSmall(QcloneError):
    """Dimension below the minimum of 2."""


class ZeroVector(QcloneError):
    """All amplitudes numerically zero; no state can be normalized."""


class DimensionMismatch(QcloneError):
    """Operands live in spaces of different dimension."""


class NotBipartite(QcloneError):
    """Operator dimension is not a perfect square d**2."""


class NotHermitian(QcloneError):
    """Matrix deviates from Hermiticity beyond tolerance."""


class NotPositive(QcloneError):
    """Matrix has an eigenvalue below the PSD tolerance floor."""


class BasisNotOrthonormal(QcloneError):
    """Gram matrix of the supplied basis deviates from identity."""


class InvalidArgument(QcloneError):
    """Argument outside its contract (e.g. zero events, bad HOM model)."""


class EmptyRecord(QcloneError):
    """Coincidence record holds no counts."""


class NotPrime(QcloneError):
    """Dimension is not prime; the basis construction does not apply."""


class IndexOutOfRange(QcloneError):
    """Basis, state, or label index outside its valid range."""


class EvenDimension(QcloneError):
    """Symmetric angular-momentum labels need an odd dimension."""


class IncompleteCounts(QcloneError):
    """Measurement counts do not cover every basis."""


class InvalidShots(QcloneError):
    """Shot count below 1."""


class InvalidConfig(QcloneError):
    """Key-distribution configuration violates its invariants."""


class NoSiftedRounds(QcloneError):
    """Transcript contains no rounds with matching bases."""


class OutOfRange(QcloneError):
    """Numeric argument outside its stated interval."""


class UnsupportedDimension(QcloneError):
    """No tabulated value exists for this dimension."""


class KeyTooShort(QcloneError):
    """One-time-pad key shorter than the message."""


class InvalidDigit(QcloneError):
    """Symbol outside [0, base) encountered while decoding."""


class ImageParse(QcloneError):
    """Input image is not a well-formed 8-bit binary PGM."""
