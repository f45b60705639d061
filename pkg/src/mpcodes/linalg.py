"""Dense exact linear algebra over a finite field.

All operations are pure: matrices are immutable values and every function
returns fresh results, so verification loops can run concurrently without
locks.  Zero-row and zero-column matrices are first-class (void completions,
zero blocks and empty row bases all occur naturally downstream).

Elimination uses Gauss-Jordan with exact field inverses; the pivot in each
column is the first row with a nonzero entry, which makes every output
deterministic.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    DependentRows,
    FieldMismatch,
    Inconsistent,
    NotInRowSpace,
    ShapeError,
    Singular,
)
from .field import CODE_DTYPE, Field


def as_vector(field: Field, data, length: int | None = None) -> np.ndarray:
    """Normalize array-like input to a 1-D read-only code vector."""
    v = np.asarray(data)
    if v.ndim != 1:
        raise ShapeError(f"expected a vector, got shape {v.shape}")
    if length is not None and v.shape[0] != length:
        raise ShapeError(f"expected length {length}, got {v.shape[0]}")
    if v.dtype == object or not np.issubdtype(v.dtype, np.integer):
        v = np.array([field.element_from_json(x) for x in v.tolist()], dtype=CODE_DTYPE)
    elif field.prime:
        v = (v % field.p).astype(CODE_DTYPE)
    else:
        if v.size and (v.min() < 0 or v.max() >= field.q):
            raise FieldMismatch("element code out of range")
        v = v.astype(CODE_DTYPE)
    v.flags.writeable = False
    return v


class FMatrix:
    """Immutable dense matrix over a :class:`Field`, stored as a code array.

    Prime-field integer entries are reduced mod p on construction (so the
    usual ``-1`` notation works); extension-field entries must be valid codes
    or coefficient lists.
    """

    __slots__ = ("field", "_a")

    def __init__(self, field: Field, entries, *, copy: bool = True):
        a = np.asarray(entries)
        if a.ndim != 2:
            if a.ndim == 1 and a.size == 0:
                a = a.reshape(0, 0)
            else:
                raise ShapeError(f"matrix entries must be 2-D, got shape {a.shape}")
        if a.dtype == object or not np.issubdtype(a.dtype, np.integer):
            flat = [field.element_from_json(x) for row in a.tolist() for x in row]
            a = np.array(flat, dtype=CODE_DTYPE).reshape(a.shape)
        elif field.prime:
            a = (a % field.p).astype(CODE_DTYPE)
        else:
            if a.size and (a.min() < 0 or a.max() >= field.q):
                raise FieldMismatch("element code out of range")
            a = a.astype(CODE_DTYPE) if copy or a.dtype != CODE_DTYPE else a
        if copy:
            a = a.copy()
        a.flags.writeable = False
        self.field = field
        self._a = a

    # -- constructors --

    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int) -> "FMatrix":
        return cls(field, np.zeros((rows, cols), dtype=CODE_DTYPE), copy=False)

    @classmethod
    def identity(cls, field: Field, n: int) -> "FMatrix":
        return cls(field, np.eye(n, dtype=CODE_DTYPE), copy=False)

    @classmethod
    def from_rows(cls, field: Field, rows: Sequence[Sequence]) -> "FMatrix":
        """Build from nested element encodings (ints, or coefficient lists)."""
        if not rows:
            raise ShapeError("from_rows needs at least one row; use zeros() for void matrices")
        cols = len(rows[0])
        if any(len(r) != cols for r in rows):
            raise ShapeError("rows have unequal lengths")
        arr = np.zeros((len(rows), cols), dtype=CODE_DTYPE)
        for i, r in enumerate(rows):
            for j, e in enumerate(r):
                arr[i, j] = field.element_from_json(e)
        return cls(field, arr, copy=False)

    # -- basic views --

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape  # type: ignore[return-value]

    @property
    def array(self) -> np.ndarray:
        """Read-only view of the underlying code array."""
        return self._a

    @property
    def T(self) -> "FMatrix":
        return FMatrix(self.field, self._a.T)

    def row(self, i: int) -> np.ndarray:
        return self._a[i]

    def col(self, j: int) -> np.ndarray:
        return self._a[:, j]

    def take_rows(self, idx) -> "FMatrix":
        return FMatrix(self.field, self._a[list(idx), :])

    def is_zero(self) -> bool:
        return not self._a.any()

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FMatrix)
            and self.field == other.field
            and self.shape == other.shape
            and bool(np.array_equal(self._a, other._a))
        )

    def __hash__(self) -> int:
        return hash((self.field, self.shape, self._a.tobytes()))

    def __repr__(self) -> str:
        if self.rows == 0 or self.cols == 0:
            return f"FMatrix({self.field!r}, void {self.rows}x{self.cols})"
        body = "; ".join(
            " ".join(self.field.format_element(int(x)) for x in r) for r in self._a
        )
        return f"FMatrix({self.field!r}, [{body}])"

    # -- arithmetic --

    def _check_same_field(self, other: "FMatrix") -> None:
        if self.field != other.field:
            raise FieldMismatch("matrices belong to different fields")

    def __add__(self, other: "FMatrix") -> "FMatrix":
        self._check_same_field(other)
        if self.shape != other.shape:
            raise ShapeError(f"shape mismatch {self.shape} + {other.shape}")
        return FMatrix(self.field, self.field.add_arr(self._a, other._a), copy=False)

    def __sub__(self, other: "FMatrix") -> "FMatrix":
        self._check_same_field(other)
        if self.shape != other.shape:
            raise ShapeError(f"shape mismatch {self.shape} - {other.shape}")
        return FMatrix(self.field, self.field.sub_arr(self._a, other._a), copy=False)

    def __neg__(self) -> "FMatrix":
        return FMatrix(self.field, self.field.neg_arr(self._a), copy=False)

    def scale(self, c: int) -> "FMatrix":
        c = self.field.check(c)
        arr = np.full_like(self._a, c)
        return FMatrix(self.field, self.field.mul_arr(self._a, arr), copy=False)

    def __matmul__(self, other: "FMatrix") -> "FMatrix":
        self._check_same_field(other)
        if self.cols != other.rows:
            raise ShapeError(f"shape mismatch {self.shape} @ {other.shape}")
        return FMatrix(self.field, self.field.matmul(self._a, other._a), copy=False)

    def apply(self, vec) -> np.ndarray:
        """Matrix-vector product, returning a fresh 1-D code array."""
        v = as_vector(self.field, vec, self.cols)
        return self.field.matmul(self._a, v.reshape(-1, 1))[:, 0]

    # -- JSON --

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[self.field.element_to_json(int(x)) for x in r] for r in self._a],
        }

    @classmethod
    def from_json(cls, field: Field, doc: dict) -> "FMatrix":
        r, c = int(doc["rows"]), int(doc["cols"])
        entries = doc["entries"]
        if len(entries) != r or any(len(row) != c for row in entries):
            raise ShapeError("matrix entries do not match declared shape")
        if r == 0 or c == 0:
            return cls.zeros(field, r, c)
        return cls.from_rows(field, entries)


def vstack(mats: Sequence[FMatrix]) -> FMatrix:
    if not mats:
        raise ShapeError("vstack needs at least one matrix")
    field = mats[0].field
    cols = mats[0].cols
    for m in mats[1:]:
        if m.field != field:
            raise FieldMismatch("matrices belong to different fields")
        if m.cols != cols:
            raise ShapeError("column counts differ")
    return FMatrix(field, np.vstack([m.array for m in mats]), copy=False)


def hstack(mats: Sequence[FMatrix]) -> FMatrix:
    if not mats:
        raise ShapeError("hstack needs at least one matrix")
    field = mats[0].field
    rows = mats[0].rows
    for m in mats[1:]:
        if m.field != field:
            raise FieldMismatch("matrices belong to different fields")
        if m.rows != rows:
            raise ShapeError("row counts differ")
    return FMatrix(field, np.hstack([m.array for m in mats]), copy=False)


class RREF(NamedTuple):
    matrix: FMatrix
    rank: int
    pivots: tuple[int, ...]


def _rref_array(field: Field, a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    a = a.copy()
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            a[[r, pr]] = a[[pr, r]]
        inv = field.inv(int(a[r, c]))
        a[r] = field.mul_arr(a[r], np.full(cols, inv, dtype=CODE_DTYPE))
        other = np.nonzero(a[:, c])[0]
        other = other[other != r]
        if other.size:
            factors = a[other, c][:, None]
            a[other] = field.sub_arr(a[other], field.mul_arr(np.broadcast_to(a[r], (other.size, cols)), factors))
        pivots.append(c)
        r += 1
    return a, pivots


def rref(m: FMatrix) -> RREF:
    """Reduced row-echelon form with rank and pivot columns."""
    a, pivots = _rref_array(m.field, m.array)
    return RREF(FMatrix(m.field, a, copy=False), len(pivots), tuple(pivots))


def rank(m: FMatrix) -> int:
    return rref(m).rank


def nullspace_basis(m: FMatrix) -> FMatrix:
    """Columns form a basis of ``null m``; ``cols - rank`` of them."""
    red, rk, pivots = rref(m)
    n = m.cols
    free = [c for c in range(n) if c not in pivots]
    basis = np.zeros((n, len(free)), dtype=CODE_DTYPE)
    a = red.array
    for k, fc in enumerate(free):
        basis[fc, k] = 1
        for i, pc in enumerate(pivots):
            basis[pc, k] = m.field.neg(int(a[i, fc]))
    return FMatrix(m.field, basis, copy=False)


def row_basis(m: FMatrix) -> FMatrix:
    """The nonzero rows of ``rref(m)``: a canonical row-space basis."""
    red, rk, _ = rref(m)
    return FMatrix(m.field, red.array[:rk], copy=False)


def complete_to_invertible(y: FMatrix) -> FMatrix:
    """Standard-basis rows at the non-pivot coordinates of ``y``.

    Stacking ``y`` over the result is an invertible cols-by-cols matrix.
    Raises :class:`DependentRows` if the rows of ``y`` are dependent.
    """
    red, rk, pivots = rref(y)
    if rk != y.rows:
        raise DependentRows(f"rows are dependent (rank {rk} < {y.rows})")
    n = y.cols
    free = [c for c in range(n) if c not in pivots]
    t = np.zeros((len(free), n), dtype=CODE_DTYPE)
    for i, c in enumerate(free):
        t[i, c] = 1
    return FMatrix(y.field, t, copy=False)


def inverse(m: FMatrix) -> FMatrix:
    if m.rows != m.cols:
        raise Singular(f"cannot invert a {m.rows}x{m.cols} matrix")
    n = m.rows
    if n == 0:
        return FMatrix.zeros(m.field, 0, 0)
    aug = np.hstack([m.array, np.eye(n, dtype=CODE_DTYPE)])
    red, pivots = _rref_array(m.field, aug)
    if len(pivots) < n or pivots[:n] != list(range(n)):
        raise Singular("matrix is singular")
    return FMatrix(m.field, red[:, n:], copy=False)


def solve(m: FMatrix, b) -> np.ndarray:
    """One solution x of ``m x = b`` (free variables set to zero)."""
    v = as_vector(m.field, b, m.rows)
    aug = np.hstack([m.array, v.reshape(-1, 1)])
    red, pivots = _rref_array(m.field, aug)
    if m.cols in pivots:
        raise Inconsistent("right-hand side is outside the column space")
    x = np.zeros(m.cols, dtype=CODE_DTYPE)
    for i, c in enumerate(pivots):
        x[c] = red[i, m.cols]
    return x


def express_rows(a: FMatrix, b: FMatrix) -> FMatrix:
    """R with ``R @ b == a`` exactly; requires row(a) within row(b)."""
    a._check_same_field(b)
    if a.cols != b.cols:
        raise ShapeError(f"column counts differ: {a.shape} vs {b.shape}")
    # Solve b^T x = (row of a)^T for every row at once.
    aug = np.hstack([b.array.T, a.array.T])
    red, pivots = _rref_array(a.field, aug)
    if any(p >= b.rows for p in pivots):
        raise NotInRowSpace("some row lies outside the spanning row space")
    r = np.zeros((a.rows, b.rows), dtype=CODE_DTYPE)
    for i, c in enumerate(pivots):
        r[:, c] = red[i, b.rows:]
    return FMatrix(a.field, r, copy=False)


def left_annihilator(m: FMatrix) -> FMatrix:
    """Rows form a basis of ``{x : x @ m == 0}``; ``rows - rank`` of them."""
    return nullspace_basis(m.T).T


def surjective_with_nullspace(basis: FMatrix) -> FMatrix:
    """Full-row-rank matrix whose nullspace is the span of ``basis``'s columns.

    ``basis`` is an ambient-by-d column matrix with independent columns;
    the result has ``ambient - d`` rows.
    """
    d = basis.cols
    if d and rank(basis) != d:
        raise DependentRows("nullspace basis columns are dependent")
    return nullspace_basis(basis.T).T
