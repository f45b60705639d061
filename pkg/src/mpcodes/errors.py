"""Exception hierarchy for mpcodes.

Every library-raised error derives from :class:`MPCError` so callers (and
the CLI) can distinguish semantic failures from programming errors.
"""

from __future__ import annotations


class MPCError(Exception):
    """Base class for all mpcodes errors."""


# --- field construction / arithmetic ---------------------------------------

class NonPrimeP(MPCError):
    """Field characteristic is not prime."""


class ReducibleModulus(MPCError):
    """Extension modulus polynomial is reducible over Z_p."""


class DegreeMismatch(MPCError):
    """Modulus polynomial is missing, has the wrong degree, or is not monic."""


class ZeroInverse(MPCError):
    """Multiplicative inverse of zero requested."""


class FieldMismatch(MPCError):
    """Operands belong to different fields (or carry out-of-range codes)."""


# --- linear algebra ---------------------------------------------------------

class ShapeError(MPCError):
    """Operand dimensions are inconsistent."""


class DependentRows(MPCError):
    """Rows expected to be linearly independent are not."""


class Singular(MPCError):
    """Matrix inversion of a singular (or non-square) matrix."""


class Inconsistent(MPCError):
    """Linear system has no solution."""


class NotInRowSpace(MPCError):
    """Row-expression target lies outside the spanning row space."""


# --- sources -----------------------------------------------------------------

class ShiftCollision(MPCError):
    """Two representatives differ by a uniform shift (same equivalence class)."""


class NotInSource(MPCError):
    """Tuple does not belong to the source."""


class ZeroInL(MPCError):
    """Deviation scalar set contains zero."""


class TooLarge(MPCError):
    """Enumeration exceeds the configured cap."""


# --- parent matrices ---------------------------------------------------------

class ZeroSumViolation(MPCError):
    """Parent blocks do not sum to the zero matrix."""


class NoDecomposition(MPCError):
    """No coset decomposition of the nonzero elements exists for this scalar set."""


class NotPerfectSize(MPCError):
    """Representative-set size is not a power of the field order."""


class IndivisibleSN(MPCError):
    """Coset count does not divide the total column count."""


class SearchExhausted(MPCError):
    """Backtracking search gave up within its node budget."""

    def __init__(self, message: str, nodes_explored: int = 0):
        super().__init__(message)
        self.nodes_explored = nodes_explored


class ProportionalColumns(MPCError):
    """Two columns are scalar multiples of each other."""


# --- code construction -------------------------------------------------------

class BadPartition(MPCError):
    """Row partition does not match the rows available."""


class NonInvertibleU(MPCError):
    """Supplied mixing matrix is not invertible (or has the wrong size)."""


class NotInjectiveStack(MPCError):
    """Stacked blocks plus completion rows do not form an injective map."""


class WrongNullspace(MPCError):
    """Override encoding matrix has the wrong nullspace."""


class InvalidCompression(MPCError):
    """Encoding matrices do not compress the source losslessly."""


# --- decoding ---------------------------------------------------------------

class NoWitness(MPCError):
    """Operation needs construction witnesses the code does not carry."""


class DuplicateSyndrome(MPCError):
    """Two representatives share a syndrome (parent not injective)."""


class UnknownSyndrome(MPCError):
    """Received word is not the encoding of any source tuple."""


class Ambiguous(MPCError):
    """Brute-force decoding found multiple preimages (compression invalid)."""


class NotFound(MPCError):
    """Brute-force decoding found no preimage."""


# --- analysis ----------------------------------------------------------------

class DecompositionMismatch(MPCError):
    """Nullspace decomposition preconditions do not hold."""
