"""Deviation-symmetric source models.

A source is the set S = {(v,...,v) + delta : v in F^n, delta in D} for a
representative set D holding exactly one member of each uniform-shift
equivalence class.  D is stored in user order; the canonical identity of a
representative is its last-terminal component-fixed form, which makes the
no-two-representatives-share-a-class check (and membership testing) a hash
lookup instead of an enumeration of S.
"""

from __future__ import annotations

from typing import Callable, Iterator, Sequence

import numpy as np

from .errors import NotInSource, ShapeError, ShiftCollision, TooLarge, ZeroInL
from .field import CODE_DTYPE, Field
from .linalg import FMatrix

DEFAULT_ENUM_CAP = 2_000_000


def all_vectors(field: Field, n: int) -> np.ndarray:
    """All q^n vectors as a (q^n, n) code array, first coordinate slowest."""
    q = field.q
    idx = np.arange(q**n, dtype=np.int64)
    out = np.zeros((q**n, n), dtype=CODE_DTYPE)
    for j in range(n - 1, -1, -1):
        out[:, j] = idx % q
        idx //= q
    return out


def _normalize_tuple(field: Field, s: int, n: int, sigma) -> np.ndarray:
    a = np.asarray(sigma)
    if a.ndim == 1 and a.dtype == object:
        a = np.stack([np.asarray(c) for c in sigma])
    if a.shape != (s, n):
        raise ShapeError(f"expected an {s}-tuple of length-{n} vectors, got shape {a.shape}")
    if not np.issubdtype(a.dtype, np.integer):
        flat = [field.element_from_json(x) for row in a.tolist() for x in row]
        a = np.array(flat, dtype=CODE_DTYPE).reshape(s, n)
    elif field.prime:
        a = (a % field.p).astype(CODE_DTYPE)
    else:
        a = a.astype(CODE_DTYPE)
    return a


class Source:
    """A deviation-symmetric source over ``field`` with ``s`` terminals.

    ``d_array`` has shape (|D|, s, n).  ``size_s`` is |S| = q^n * |D|.
    Instances are immutable.
    """

    def __init__(
        self,
        field: Field,
        n: int,
        s: int,
        d_array: np.ndarray,
        *,
        kind: str = "explicit",
        scalars: tuple[int, ...] | None = None,
    ):
        if n < 1 or s < 2:
            raise ShapeError(f"need n >= 1 and s >= 2, got n={n}, s={s}")
        if d_array.ndim != 3 or d_array.shape[1:] != (s, n) or d_array.shape[0] == 0:
            raise ShapeError(f"representative array must be (|D|, {s}, {n}), got {d_array.shape}")
        self.field = field
        self.n = n
        self.s = s
        a = d_array.astype(CODE_DTYPE, copy=True)
        a.flags.writeable = False
        self.d_array = a
        self.kind = kind
        self.scalars = scalars
        self._canon_index: dict[bytes, int] = {}
        canon = self._canonical(a)
        for i in range(a.shape[0]):
            key = canon[i].tobytes()
            if key in self._canon_index:
                raise ShiftCollision(
                    f"representatives {self._canon_index[key]} and {i} differ by a uniform shift"
                )
            self._canon_index[key] = i
        self._dtilde: np.ndarray | None = None

    def _canonical(self, tuples: np.ndarray) -> np.ndarray:
        # subtract the last component uniformly; kills the shift freedom
        last = tuples[..., -1:, :]
        return self.field.sub_arr(tuples, np.broadcast_to(last, tuples.shape))

    # -- sizes --

    @property
    def num_representatives(self) -> int:
        return self.d_array.shape[0]

    @property
    def size_s(self) -> int:
        """|S| = |F|^n * |D| (exact integer)."""
        return self.field.q**self.n * self.num_representatives

    def __repr__(self) -> str:
        return (
            f"Source({self.field!r}, n={self.n}, s={self.s}, |D|={self.num_representatives},"
            f" kind={self.kind!r})"
        )

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Source)
            and self.field == other.field
            and (self.n, self.s) == (other.n, other.s)
            and bool(np.array_equal(self.d_array, other.d_array))
        )

    # -- vectorization --

    def dtilde(self) -> np.ndarray:
        """Stacked representatives: row k is the length-sn vector of D[k]."""
        if self._dtilde is None:
            d = self.d_array.reshape(self.num_representatives, self.s * self.n).copy()
            d.flags.writeable = False
            self._dtilde = d
        return self._dtilde

    def dtilde_matrix(self) -> FMatrix:
        return FMatrix(self.field, self.dtilde())

    # -- membership / decomposition --

    def decompose(self, sigma) -> tuple[np.ndarray, np.ndarray]:
        """The unique (v, delta) with sigma = (v,...,v) + delta, delta in D."""
        t = _normalize_tuple(self.field, self.s, self.n, sigma)
        key = self._canonical(t[None])[0].tobytes()
        idx = self._canon_index.get(key)
        if idx is None:
            raise NotInSource("tuple is not in the source")
        delta = self.d_array[idx]
        v = self.field.sub_arr(t[0], delta[0])
        return v, delta

    def contains(self, sigma) -> bool:
        try:
            self.decompose(sigma)
            return True
        except (NotInSource, ShapeError):
            return False

    def representative_index(self, sigma) -> int:
        t = _normalize_tuple(self.field, self.s, self.n, sigma)
        key = self._canonical(t[None])[0].tobytes()
        idx = self._canon_index.get(key)
        if idx is None:
            raise NotInSource("tuple is not in the source")
        return idx

    def compose(self, v, delta: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=CODE_DTYPE)
        return self.field.add_arr(delta, np.broadcast_to(v, (self.s, self.n)))

    # -- enumeration --

    def iter_s_batches(self, cap: int = DEFAULT_ENUM_CAP) -> Iterator[tuple[int, np.ndarray]]:
        """Yield (representative index, batch) covering S once.

        Each batch has shape (q^n, s, n): every uniform shift of one
        representative.  Raises :class:`TooLarge` beyond ``cap`` tuples.
        """
        if cap is not None and self.size_s > cap:
            raise TooLarge(f"|S| = {self.size_s} exceeds cap {cap}")
        w = all_vectors(self.field, self.n)
        for i in range(self.num_representatives):
            batch = self.field.add_arr(self.d_array[i][None], w[:, None, :])
            yield i, batch

    def s_plus_elements(self, cap: int = DEFAULT_ENUM_CAP) -> Iterator[np.ndarray]:
        """All nonzero tuples (w + d_i - f_i)_i over w, delta, zeta; may repeat.

        This is the raw difference-set generator used by the brute-force
        verification oracle; the count is q^n * |D|^2.
        """
        total = self.field.q**self.n * self.num_representatives**2
        if cap is not None and total > cap:
            raise TooLarge(f"|F|^n |D|^2 = {total} exceeds cap {cap}")
        w = all_vectors(self.field, self.n)
        d = self.d_array
        for i in range(d.shape[0]):
            for j in range(d.shape[0]):
                gamma = self.field.sub_arr(d[i], d[j])
                batch = self.field.add_arr(gamma[None], w[:, None, :])
                for t in batch:
                    if t.any():
                        yield t

    # -- derived sources --

    def rerepresent(self, vmap: Callable[[np.ndarray], Sequence] | Sequence) -> "Source":
        """Replace each delta by (v(delta),...,v(delta)) + delta; same S."""
        d = self.d_array
        shifts = np.zeros((d.shape[0], self.n), dtype=CODE_DTYPE)
        for i in range(d.shape[0]):
            v = vmap(d[i]) if callable(vmap) else vmap[i]
            v = np.asarray(v)
            if v.shape != (self.n,):
                raise ShapeError(f"shift {i} has shape {v.shape}, expected ({self.n},)")
            if self.field.prime:
                shifts[i] = v % self.field.p
            else:
                shifts[i] = v
        new_d = self.field.add_arr(d, shifts[:, None, :])
        return Source(self.field, self.n, self.s, new_d, kind=self.kind, scalars=self.scalars)

    def component_fix(self, terminal: int) -> "Source":
        """Zero the given terminal (0-based) in every representative; same S."""
        if not 0 <= terminal < self.s:
            raise ShapeError(f"terminal {terminal} out of range for s={self.s}")
        d = self.d_array
        fixed = self.field.sub_arr(d, np.broadcast_to(d[:, terminal:terminal + 1, :], d.shape))
        return Source(self.field, self.n, self.s, fixed, kind=self.kind, scalars=self.scalars)

    # -- JSON --

    def to_json(self) -> dict:
        doc: dict = {
            "field": self.field.to_json(),
            "n": self.n,
            "s": self.s,
            "kind": self.kind,
        }
        if self.scalars is not None:
            doc["L"] = [self.field.element_to_json(c) for c in self.scalars]
        doc["D"] = [
            [[self.field.element_to_json(int(x)) for x in comp] for comp in rep]
            for rep in self.d_array
        ]
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "Source":
        field = Field.from_json(doc["field"])
        n, s = int(doc["n"]), int(doc["s"])
        reps = doc["D"]
        arr = np.zeros((len(reps), s, n), dtype=CODE_DTYPE)
        for i, rep in enumerate(reps):
            arr[i] = _normalize_tuple(field, s, n, rep)
        scalars = doc.get("L")
        if scalars is not None:
            scalars = tuple(field.element_from_json(c) for c in scalars)
        return cls(field, n, s, arr, kind=doc.get("kind", "explicit"), scalars=scalars)


def make_source(field: Field, n: int, s: int, representatives: Sequence) -> Source:
    """Source from an explicit representative list (tuples of s length-n vectors)."""
    reps = list(representatives)
    if not reps:
        raise ShapeError("representative set must be nonempty")
    arr = np.zeros((len(reps), s, n), dtype=CODE_DTYPE)
    for i, rep in enumerate(reps):
        arr[i] = _normalize_tuple(field, s, n, rep)
    return Source(field, n, s, arr)


def hamming_source(field: Field, n: int, s: int) -> Source:
    """At most one terminal deviates from the common word in one coordinate.

    |D| = 1 + s(q-1)n for s >= 3 and 1 + (q-1)n for s = 2 (where the
    deviation is confined to the second terminal).
    """
    return generalized_hamming_source(field, n, s, field.nonzero_elements(), kind="hamming")


def generalized_hamming_source(
    field: Field, n: int, s: int, scalars: Sequence[int], *, kind: str = "generalized_hamming"
) -> Source:
    """Hamming-style source with deviation scalars restricted to ``scalars``.

    For s >= 3 the representative set is {0} plus every single-coordinate
    deviation lambda*e_j at every terminal (|D| = 1 + |L|sn); for s = 2 the
    deviation sits on terminal 2 with scalars L u -L (|D| = 1 + n|L u -L|).
    """
    if n < 1 or s < 2:
        raise ShapeError(f"need n >= 1 and s >= 2, got n={n}, s={s}")
    scal = []
    seen = set()
    for c in scalars:
        code = field.check(int(c)) if field.prime else field.element_from_json(c)
        if code == 0:
            raise ZeroInL("deviation scalar set must not contain zero")
        if code not in seen:
            seen.add(code)
            scal.append(code)
    if not scal:
        raise ZeroInL("deviation scalar set must be nonempty")
    if s == 2:
        ext = []
        ext_seen = set()
        for c in scal:
            for cc in (c, field.neg(c)):
                if cc not in ext_seen:
                    ext_seen.add(cc)
                    ext.append(cc)
        reps = [np.zeros((s, n), dtype=CODE_DTYPE)]
        for j in range(n):
            for c in sorted(ext):
                rep = np.zeros((s, n), dtype=CODE_DTYPE)
                rep[1, j] = c
                reps.append(rep)
    else:
        reps = [np.zeros((s, n), dtype=CODE_DTYPE)]
        for i in range(s):
            for j in range(n):
                for c in sorted(scal):
                    rep = np.zeros((s, n), dtype=CODE_DTYPE)
                    rep[i, j] = c
                    reps.append(rep)
    return Source(field, n, s, np.stack(reps), kind=kind, scalars=tuple(sorted(scal)))
