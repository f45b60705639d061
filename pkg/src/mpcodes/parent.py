"""Parent matrices P = [Q_1 | ... | Q_s] and their construction.

A parent matrix must (a) restrict injectively to the stacked representative
set and (b) have blocks summing to the zero matrix.  Injectivity is checked
by hashing the image of the representative set (O(|D|) exact-vector hashes);
the zero-block-sum is enforced at construction.

The perfect-size builder lays coset representatives over pairwise
non-proportional direction vectors; it guarantees bijectivity on the stacked
representatives but not the zero block-sum, which a bounded backtracking
search then repairs column-offset by column-offset.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from .errors import (
    DuplicateSyndrome,
    IndivisibleSN,
    NoDecomposition,
    NotPerfectSize,
    ProportionalColumns,
    SearchExhausted,
    ShapeError,
    ZeroInL,
    ZeroSumViolation,
)
from .field import CODE_DTYPE, Field
from .linalg import FMatrix, hstack, nullspace_basis
from .source import Source


class ParentMatrix:
    """Validated block matrix [Q_1 | ... | Q_s] with zero block-sum.

    Injectivity on a particular source's stacked representatives is checked
    separately by :func:`validate_parent` (it depends on the source).
    """

    def __init__(self, blocks: Sequence[FMatrix]):
        if len(blocks) < 2:
            raise ShapeError("a parent matrix needs at least two blocks")
        f = blocks[0].field
        r, n = blocks[0].shape
        for b in blocks[1:]:
            if b.field != f or b.shape != (r, n):
                raise ShapeError("blocks must share one field and one shape")
        total = blocks[0]
        for b in blocks[1:]:
            total = total + b
        if not total.is_zero():
            raise ZeroSumViolation("blocks do not sum to the zero matrix")
        self.field = f
        self.r = r
        self.n = n
        self.s = len(blocks)
        self.blocks = tuple(blocks)

    @property
    def matrix(self) -> FMatrix:
        """The r x sn concatenation of the blocks."""
        return hstack(self.blocks)

    def __repr__(self) -> str:
        return f"ParentMatrix({self.field!r}, r={self.r}, s={self.s}, n={self.n})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ParentMatrix) and self.blocks == getattr(other, "blocks", None)

    def to_json(self) -> dict:
        return {
            "field": self.field.to_json(),
            "r": self.r,
            "s": self.s,
            "n": self.n,
            "blocks": [b.to_json() for b in self.blocks],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ParentMatrix":
        f = Field.from_json(doc["field"])
        return cls([FMatrix.from_json(f, b) for b in doc["blocks"]])


@dataclass
class ParentReport:
    """Outcome of validating a candidate parent against a source."""

    zero_sum_ok: bool
    injective: bool
    bijective: bool
    image_size: int
    num_representatives: int
    collision: tuple[int, int] | None = None

    @property
    def ok(self) -> bool:
        return self.zero_sum_ok and self.injective

    def to_json(self) -> dict:
        return {
            "zero_sum_ok": self.zero_sum_ok,
            "injective": self.injective,
            "bijective": self.bijective,
            "image_size": self.image_size,
            "num_representatives": self.num_representatives,
            "collision": list(self.collision) if self.collision else None,
        }


def _split_blocks(m: FMatrix, s: int) -> list[FMatrix]:
    if m.cols % s:
        raise ShapeError(f"{m.cols} columns do not split into {s} equal blocks")
    n = m.cols // s
    return [FMatrix(m.field, m.array[:, i * n:(i + 1) * n]) for i in range(s)]


def validate_parent(p: ParentMatrix | FMatrix | Sequence[FMatrix], source: Source) -> ParentReport:
    """Check the zero block-sum and injectivity on the stacked representatives.

    The injectivity check hashes P @ d for every representative; the
    bijective flag additionally requires the image to fill all of F^r.
    The verdict does not depend on the choice of representative set.
    """
    if isinstance(p, ParentMatrix):
        blocks = list(p.blocks)
        zero_ok = True
    else:
        blocks = list(p) if not isinstance(p, FMatrix) else _split_blocks(p, source.s)
        total = blocks[0]
        for b in blocks[1:]:
            total = total + b
        zero_ok = total.is_zero()
    f = source.field
    if len(blocks) != source.s or any(b.cols != source.n for b in blocks):
        raise ShapeError("parent blocks do not match the source shape")
    pm = hstack(blocks)
    syndromes = f.matmul(source.dtilde(), pm.array.T)
    seen: dict[bytes, int] = {}
    collision = None
    for i in range(syndromes.shape[0]):
        key = syndromes[i].tobytes()
        if key in seen and collision is None:
            collision = (seen[key], i)
        seen.setdefault(key, i)
    image_size = len(seen)
    injective = collision is None
    bijective = injective and image_size == f.q ** pm.rows
    return ParentReport(
        zero_sum_ok=zero_ok,
        injective=injective,
        bijective=bijective,
        image_size=image_size,
        num_representatives=source.num_representatives,
        collision=collision,
    )


# --- projective machinery ----------------------------------------------------

def projective_key(field: Field, vec: np.ndarray) -> bytes:
    """Canonical representative key: scale so the first nonzero entry is 1."""
    nz = np.nonzero(vec)[0]
    if nz.size == 0:
        raise ProportionalColumns("zero vector has no projective class")
    inv = field.inv(int(vec[nz[0]]))
    scaled = field.mul_arr(vec.astype(CODE_DTYPE), np.full(vec.shape, inv, dtype=CODE_DTYPE))
    return scaled.astype(CODE_DTYPE).tobytes()


def projective_points(field: Field, r: int) -> np.ndarray:
    """All (q^r - 1)/(q - 1) pairwise non-proportional vectors of F^r.

    Each point is normalized (first nonzero entry 1) and the order is
    deterministic: by leading coordinate, then by trailing digits.
    """
    if r < 1:
        raise ShapeError("dimension must be >= 1")
    q = field.q
    rows = []
    for lead in range(r):
        tail = r - lead - 1
        count = q**tail
        block = np.zeros((count, r), dtype=CODE_DTYPE)
        block[:, lead] = 1
        idx = np.arange(count, dtype=np.int64)
        for j in range(r - 1, lead, -1):
            block[:, j] = idx % q
            idx //= q
        rows.append(block)
    return np.vstack(rows)


def hamming_parent_check(p: ParentMatrix | FMatrix) -> bool:
    """No column is a scalar multiple of another (s=2: second block only).

    This is the exact injectivity condition on full Hamming representative
    sets, where every single-coordinate deviation scalar is allowed.
    """
    if isinstance(p, ParentMatrix) and p.s == 2:
        m = p.blocks[1]
    elif isinstance(p, ParentMatrix):
        m = p.matrix
    else:
        m = p
    seen = set()
    for j in range(m.cols):
        col = m.col(j)
        if not col.any():
            return False
        key = projective_key(m.field, col)
        if key in seen:
            return False
        seen.add(key)
    return True


def min_r(field: Field, count: int) -> int:
    """Smallest r with count <= (q^r - 1)/(q - 1)."""
    if count < 1:
        raise ShapeError("count must be >= 1")
    r = 1
    while (field.q**r - 1) // (field.q - 1) < count:
        r += 1
    return r


# --- coset decompositions ----------------------------------------------------

@dataclass(frozen=True)
class CosetDecomposition:
    """Representatives a_1..a_k with {a_i * l} tiling the nonzero elements."""

    field: Field
    scalars: tuple[int, ...]
    k: int
    reps: tuple[int, ...]

    def check(self) -> bool:
        covered = set()
        for a in self.reps:
            for lam in self.scalars:
                covered.add(self.field.mul(a, lam))
        return len(covered) == self.field.q - 1 and 0 not in covered


def _normalized_scalars(field: Field, scalars: Sequence[int]) -> tuple[int, ...]:
    out = []
    seen = set()
    for c in scalars:
        code = field.element_from_json(c)
        if code == 0:
            raise ZeroInL("scalar set must not contain zero")
        if code not in seen:
            seen.add(code)
            out.append(code)
    if not out:
        raise ZeroInL("scalar set must be nonempty")
    return tuple(sorted(out))


def _transversal_search(field: Field, scalars: tuple[int, ...], find_all: bool) -> list[tuple[int, ...]]:
    q = field.q
    if (q - 1) % len(scalars):
        return []
    k = (q - 1) // len(scalars)
    results: list[tuple[int, ...]] = []

    def recurse(remaining: frozenset[int], chosen: tuple[int, ...]) -> bool:
        if not remaining:
            results.append(chosen)
            return not find_all
        target = min(remaining)
        for lam in scalars:
            a = field.mul(target, field.inv(lam))
            coset = {field.mul(a, x) for x in scalars}
            if len(coset) == len(scalars) and coset <= remaining:
                if recurse(remaining - frozenset(coset), chosen + (a,)):
                    return True
        return False

    recurse(frozenset(range(1, q)), ())
    return [tuple(r) for r in results if len(r) == k]


def coset_decompose(field: Field, scalars: Sequence[int]) -> CosetDecomposition:
    """Find a_1..a_k with {a_i * l : l in scalars} = F - {0}, no repetition.

    Deterministic backtracking over the smallest uncovered element; raises
    :class:`NoDecomposition` when none exists (including |L| not dividing
    q - 1).
    """
    scal = _normalized_scalars(field, scalars)
    if (field.q - 1) % len(scal):
        raise NoDecomposition(
            f"|L| = {len(scal)} does not divide q - 1 = {field.q - 1}"
        )
    found = _transversal_search(field, scal, find_all=False)
    if not found:
        raise NoDecomposition(f"no coset decomposition exists for L = {list(scal)}")
    reps = tuple(sorted(found[0]))
    return CosetDecomposition(field, scal, (field.q - 1) // len(scal), reps)


def all_transversals(field: Field, scalars: Sequence[int]) -> list[frozenset[int]]:
    """Every valid representative set for the given scalar set, as sets."""
    scal = _normalized_scalars(field, scalars)
    raw = _transversal_search(field, scal, find_all=True)
    return sorted({frozenset(t) for t in raw}, key=sorted)


# --- perfect-size construction ------------------------------------------------

def build_parent_thm7(field: Field, scalars: Sequence[int], s: int, n: int) -> FMatrix:
    """Candidate parent for a generalized Hamming source of perfect size.

    Columns are a_i * v_j over all coset representatives a_i and all
    pairwise non-proportional direction vectors v_j, which makes the matrix
    bijective on the stacked representatives by construction.  The zero
    block-sum is NOT guaranteed; see :func:`zero_sum_repair`.
    """
    scal = _normalized_scalars(field, scalars)
    target = 1 + len(scal) * s * n
    q = field.q
    r, power = 1, q
    while power < target:
        r += 1
        power *= q
    if power != target:
        raise NotPerfectSize(f"1 + |L|sn = {target} is not a power of {q}")
    decomp = coset_decompose(field, scal)
    k = decomp.k
    if (s * n) % k:
        raise IndivisibleSN(f"coset count {k} does not divide sn = {s * n}")
    points = projective_points(field, r)
    if points.shape[0] != (s * n) // k:
        raise IndivisibleSN(
            f"need {(s * n) // k} direction vectors, have {points.shape[0]}"
        )
    cols = np.zeros((r, s * n), dtype=CODE_DTYPE)
    for j in range(points.shape[0]):
        for i, a in enumerate(decomp.reps):
            cols[:, i + j * k] = field.mul_arr(
                points[j], np.full(r, a, dtype=CODE_DTYPE)
            )
    return FMatrix(field, cols, copy=False)


def s2_parent(q2: FMatrix) -> ParentMatrix:
    """[-Q_2 | Q_2]: the canonical two-terminal parent.

    Requires the columns of Q_2 to be pairwise non-proportional and nonzero.
    """
    if not hamming_parent_check(q2):
        raise ProportionalColumns("columns of Q_2 must be nonzero and pairwise non-proportional")
    return ParentMatrix([-q2, q2])


# --- zero-sum repair ----------------------------------------------------------

@dataclass
class _ClassState:
    rep: np.ndarray
    remaining: int
    used: set = dc_field(default_factory=set)
    # allowed is None for free choice (full Hamming); a list of frozensets of
    # coefficients for transversal-constrained choice; or a fixed multiset.
    allowed: list | None = None
    fixed_pool: dict | None = None

    def options(self, field: Field) -> list[int]:
        if self.remaining == 0:
            return []
        if self.fixed_pool is not None:
            return sorted(c for c, cnt in self.fixed_pool.items() if cnt > 0)
        if self.allowed is None:
            return [c for c in range(1, field.q) if c not in self.used]
        opts: set[int] = set()
        for t in self.allowed:
            if self.used <= t:
                opts |= t - self.used
        return sorted(opts)

    def take(self, c: int) -> None:
        self.remaining -= 1
        if self.fixed_pool is not None:
            self.fixed_pool[c] -= 1
        else:
            self.used.add(c)

    def put(self, c: int) -> None:
        self.remaining += 1
        if self.fixed_pool is not None:
            self.fixed_pool[c] += 1
        else:
            self.used.discard(c)


def zero_sum_repair(
    candidate: FMatrix,
    source: Source,
    *,
    max_nodes: int = 200_000,
    require_minimal: bool | None = None,
) -> ParentMatrix:
    """Rearrange and rescale candidate columns so the blocks sum to zero.

    The search assigns one column per terminal to each column offset,
    backtracking over projective classes and over coefficients that keep the
    class packing valid for the source (any nonzero coefficient for full
    Hamming scalar sets, transversal-compatible coefficients for generalized
    Hamming, and the candidate's own coefficients otherwise).  The result is
    re-validated before it is returned.

    ``require_minimal`` additionally demands an arrangement whose least code
    length is n + r, the value a perfect code needs; by default this is
    required exactly when the candidate is bijective on the stacked
    representatives (i.e. came from the perfect-size builder).

    Raises :class:`SearchExhausted` with the node count when the budget runs
    out or no arrangement exists within the allowed moves.
    """
    f = candidate.field
    s, n = source.s, source.n
    if candidate.cols != s * n:
        raise ShapeError(f"candidate has {candidate.cols} columns, expected {s * n}")
    pre = validate_parent(_split_blocks(candidate, s), source)
    if not pre.injective:
        raise DuplicateSyndrome("candidate is not injective on the stacked representatives")
    if require_minimal is None:
        require_minimal = pre.bijective
    if pre.zero_sum_ok:
        return ParentMatrix(_split_blocks(candidate, s))

    if s == 2:
        q2 = _split_blocks(candidate, 2)[1]
        repaired = ParentMatrix([-q2, q2])
        if validate_parent(repaired, source).injective:
            return repaired

    # group candidate columns by projective class
    arr = candidate.array
    classes: dict[bytes, _ClassState] = {}
    for j in range(arr.shape[1]):
        col = arr[:, j]
        if not col.any():
            raise SearchExhausted(
                "repair search requires nonzero candidate columns", 0
            )
        key = projective_key(f, col)
        rep = np.frombuffer(key, dtype=CODE_DTYPE).copy()
        nz = np.nonzero(col)[0]
        coeff = int(col[nz[0]])  # rep has 1 at the first nonzero position
        st = classes.get(key)
        if st is None:
            st = _ClassState(rep=rep, remaining=0)
            classes[key] = st
        st.remaining += 1
        if st.fixed_pool is None:
            st.fixed_pool = {}
        st.fixed_pool[coeff] = st.fixed_pool.get(coeff, 0) + 1

    if source.kind in ("hamming", "generalized_hamming") and source.scalars:
        full = len(source.scalars) == f.q - 1
        trans = None if full else [
            frozenset(t) for t in all_transversals(f, source.scalars)
        ]
        for st in classes.values():
            st.fixed_pool = None
            st.allowed = None if full else trans

    keys = sorted(classes)
    r = candidate.rows
    result = np.zeros((r, s * n), dtype=CODE_DTYPE)
    nodes = 0

    def coeff_choices(chosen_keys: list[bytes]) -> list[tuple[int, ...]]:
        # all nonzero coefficient vectors in the nullspace of [v_1 | ... | v_s]
        v = np.stack([classes[k].rep for k in chosen_keys], axis=1)
        basis = nullspace_basis(FMatrix(f, v)).array  # (s, dim)
        dim = basis.shape[1]
        out = []
        for combo in itertools.product(range(f.q), repeat=dim):
            if not any(combo):
                continue
            coeffs = np.zeros(s, dtype=CODE_DTYPE)
            for t, c in enumerate(combo):
                coeffs = f.add_arr(
                    coeffs, f.mul_arr(basis[:, t], np.full(s, c, dtype=CODE_DTYPE))
                )
            if all(int(c) for c in coeffs):
                out.append(tuple(int(c) for c in coeffs))
        return sorted(set(out))

    def arrangement_minimal() -> bool:
        # a perfect code from this parent needs sum(rank Q_i) - rank(stack) = r
        from .linalg import rank, vstack

        blocks = _split_blocks(FMatrix(f, result), s)
        return sum(rank(q) for q in blocks) - rank(vstack(blocks)) == r

    def place(offset: int) -> bool:
        nonlocal nodes
        if offset == n:
            return not require_minimal or arrangement_minimal()
        avail = [k for k in keys if classes[k].remaining > 0]
        for combo in itertools.combinations_with_replacement(avail, s):
            counts: dict[bytes, int] = {}
            ok = True
            for k in combo:
                counts[k] = counts.get(k, 0) + 1
                if counts[k] > classes[k].remaining:
                    ok = False
                    break
            if not ok:
                continue
            nodes += 1
            if nodes > max_nodes:
                raise SearchExhausted(
                    f"zero-sum repair exceeded {max_nodes} nodes", nodes
                )
            for coeffs in coeff_choices(list(combo)):
                taken: list[tuple[bytes, int]] = []
                feasible = True
                for k, c in zip(combo, coeffs):
                    if c in classes[k].options(f):
                        classes[k].take(c)
                        taken.append((k, c))
                    else:
                        feasible = False
                        break
                if feasible:
                    for t, (k, c) in enumerate(taken):
                        result[:, t * n + offset] = f.mul_arr(
                            classes[k].rep, np.full(r, c, dtype=CODE_DTYPE)
                        )
                    if place(offset + 1):
                        return True
                for k, c in reversed(taken):
                    classes[k].put(c)
        return False

    if not place(0):
        raise SearchExhausted(f"no zero-sum arrangement found ({nodes} nodes)", nodes)
    repaired = ParentMatrix(_split_blocks(FMatrix(f, result, copy=False), s))
    report = validate_parent(repaired, source)
    if not report.injective:
        raise SearchExhausted(
            f"arrangement found but failed revalidation ({nodes} nodes)", nodes
        )
    return repaired
