"""Structural transformations and small-scale optimality oracles.

nullspace_shift moves a shared nullspace component between terminals without
breaking losslessness; extract_parent recovers a parent matrix from any
verified compression (the route by which every lossless linear compression
is a partition code); compressible decides whether a source admits any
strict compression at all; brute_min_m exhausts nullspace tuples on tiny
sources as an independent ground truth for all of the above.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DecompositionMismatch,
    DependentRows,
    InvalidCompression,
    ShapeError,
    TooLarge,
)
from .field import CODE_DTYPE, Field
from .linalg import (
    FMatrix,
    complete_to_invertible,
    hstack,
    inverse,
    nullspace_basis,
    rank,
    row_basis,
    rref,
    surjective_with_nullspace,
    vstack,
)
from .code import PartitionCode, VerificationReport, _as_h_list, verify_compression
from .parent import ParentMatrix, projective_key
from .source import Source, all_vectors


@dataclass
class SubspaceBasis:
    """Independent column basis of a subspace of F^ambient."""

    field: Field
    ambient: int
    basis: FMatrix  # ambient x dim, columns independent

    def __post_init__(self):
        if self.basis.rows != self.ambient or self.basis.field != self.field:
            raise ShapeError("basis does not match the ambient space")
        if self.basis.cols and rank(self.basis) != self.basis.cols:
            raise DependentRows("basis columns are dependent")

    @property
    def dim(self) -> int:
        return self.basis.cols

    @classmethod
    def from_vectors(cls, field: Field, ambient: int, vectors: Sequence) -> "SubspaceBasis":
        if not vectors:
            return cls(field, ambient, FMatrix.zeros(field, ambient, 0))
        cols = FMatrix.from_rows(field, [list(v) for v in vectors]).T
        return cls(field, ambient, cols)


def _null_cols(h: FMatrix) -> FMatrix:
    return nullspace_basis(h)


def nullspace_shift(
    code: PartitionCode | Sequence[FMatrix],
    perm: Sequence[int],
    k: SubspaceBasis | FMatrix,
) -> list[FMatrix]:
    """Move the shared component K off terminal perm[0] and onto perm[-1].

    Preconditions (checked exactly): K sits inside the nullspace of every
    terminal perm[0..s-2] and meets the nullspace of perm[-1] trivially.
    The returned matrices are surjective; terminals other than perm[0] and
    perm[-1] keep their nullspaces (re-based to a canonical row basis).
    """
    hs = _as_h_list(code)
    s = len(hs)
    n = hs[0].cols
    f = hs[0].field
    perm = list(perm)
    if sorted(perm) != list(range(s)):
        raise ShapeError(f"perm must be a permutation of 0..{s - 1}, got {perm}")
    kb = k.basis if isinstance(k, SubspaceBasis) else k
    if kb.rows != n:
        raise ShapeError(f"K lives in F^{kb.rows}, expected F^{n}")
    if kb.cols and rank(kb) != kb.cols:
        raise DecompositionMismatch("K basis columns are dependent")
    for t in perm[:-1]:
        if not (hs[t] @ kb).is_zero():
            raise DecompositionMismatch(f"K is not inside null H[{t}]")
    last_null = _null_cols(hs[perm[-1]])
    if kb.cols and rank(hstack([kb, last_null])) != kb.cols + last_null.cols:
        raise DecompositionMismatch(f"K meets null H[{perm[-1]}] nontrivially")

    # complement of K inside null H[perm[0]]
    first_null = _null_cols(hs[perm[0]])
    joint = hstack([kb, first_null])
    pivots = rref(joint).pivots  # pivot columns = independent columns of joint
    comp_cols = [p - kb.cols for p in pivots if p >= kb.cols]
    complement = FMatrix(f, first_null.array[:, comp_cols])

    out = list(hs)
    out[perm[0]] = surjective_with_nullspace(complement)
    for t in perm[1:-1]:
        out[t] = row_basis(hs[t])
    out[perm[-1]] = surjective_with_nullspace(hstack([kb, last_null]))
    return out


def extract_parent(
    code: PartitionCode | Sequence[FMatrix],
    source: Source,
    *,
    verification: VerificationReport | None = None,
) -> ParentMatrix:
    """Parent matrix of an arbitrary verified compression.

    The parent is the surjective matrix annihilating exactly the uniform
    diagonal plus the product of the per-terminal nullspaces; its blocks sum
    to zero automatically and it restricts injectively to the stacked
    representatives.  With surjective encoding matrices it has M - n rows,
    and it is bijective on the stacked representatives exactly for perfect
    codes.
    """
    hs = _as_h_list(code)
    if verification is None:
        verification = verify_compression(hs, source, mode="structural")
    if not verification.ok:
        raise InvalidCompression("encoding matrices do not compress the source")
    f = source.field
    s, n = source.s, source.n
    uniform = np.tile(np.eye(n, dtype=CODE_DTYPE), (s, 1))  # sn x n
    cols = [FMatrix(f, uniform)]
    for i, h in enumerate(hs):
        nb = _null_cols(h)
        if nb.cols:
            block = np.zeros((s * n, nb.cols), dtype=CODE_DTYPE)
            block[i * n:(i + 1) * n, :] = nb.array
            cols.append(FMatrix(f, block))
    w = hstack(cols)
    if rank(w) != w.cols:
        raise InvalidCompression("nullspace sum is not direct")
    p = surjective_with_nullspace(w)
    blocks = [FMatrix(f, p.array[:, i * n:(i + 1) * n]) for i in range(s)]
    return ParentMatrix(blocks)


# --- compressibility ----------------------------------------------------------

@dataclass
class CompressReport:
    compressible: bool
    terminal: int | None = None
    direction: np.ndarray | None = None
    forbidden_counts: tuple[int, ...] = ()
    direction_classes: int = 0

    def to_json(self) -> dict:
        return {
            "compressible": self.compressible,
            "witness": None
            if not self.compressible
            else {"terminal": self.terminal, "v": self.direction.tolist()},
            "forbidden_counts": list(self.forbidden_counts),
            "direction_classes": self.direction_classes,
        }


def _iter_projective(field: Field, n: int):
    q = field.q
    for lead in range(n):
        for tail in range(q ** (n - lead - 1)):
            v = np.zeros(n, dtype=CODE_DTYPE)
            v[lead] = 1
            t = tail
            for j in range(n - 1, lead, -1):
                v[j] = t % q
                t //= q
            yield v


def compressible(source: Source, cap: int = 4_000_000) -> CompressReport:
    """Can the source be compressed into dimension strictly below s*n?

    A terminal can drop a direction v exactly when no difference of source
    tuples is supported on that terminal alone with value proportional to v;
    the forbidden directions are collected from all representative pairs
    whose difference is uniform outside one terminal.
    """
    d = source.d_array
    nd = d.shape[0]
    if nd * nd * source.s * source.n > cap:
        raise TooLarge(f"|D|^2 = {nd * nd} pair enumeration exceeds cap")
    f = source.field
    s, n = source.s, source.n
    gamma = f.sub_arr(d[:, None, :, :], d[None, :, :, :])  # (nd, nd, s, n)
    forbidden: list[set[bytes]] = [set() for _ in range(s)]
    for i in range(s):
        others = [j for j in range(s) if j != i]
        common = gamma[:, :, others[0], :]
        mask = np.ones((nd, nd), dtype=bool)
        for j in others[1:]:
            mask &= np.all(gamma[:, :, j, :] == common, axis=-1)
        x = f.sub_arr(gamma[:, :, i, :], common)
        mask &= np.any(x != 0, axis=-1)
        for a, b in zip(*np.nonzero(mask)):
            forbidden[i].add(projective_key(f, x[a, b]))
    classes = (f.q**n - 1) // (f.q - 1)
    counts = tuple(len(fb) for fb in forbidden)
    for i in range(s):
        if counts[i] < classes:
            for v in _iter_projective(f, n):
                if projective_key(f, v) not in forbidden[i]:
                    return CompressReport(True, i, v, counts, classes)
    return CompressReport(False, None, None, counts, classes)


@dataclass
class QuotientWitness:
    """Concrete single-terminal quotient witness for a compressible source.

    ``perm`` places the compressed terminal first; ``b`` is invertible with
    the dropped direction as its first column; ``f_table`` recovers the
    dropped coordinate of the first component from everything else.
    """

    perm: tuple[int, ...]
    b: FMatrix
    f_table: dict[bytes, int]


def compressible_witness(source: Source, terminal: int, direction) -> QuotientWitness:
    """Materialize (perm, B, f) for a verified compressible direction."""
    f = source.field
    n, s = source.n, source.s
    v = np.asarray(direction, dtype=CODE_DTYPE)
    if v.shape != (n,) or not v.any():
        raise ShapeError("direction must be a nonzero length-n vector")
    perm = (terminal,) + tuple(j for j in range(s) if j != terminal)
    vrow = FMatrix(f, v.reshape(1, n))
    b = vstack([vrow, complete_to_invertible(vrow)]).T
    binv = inverse(b)
    table: dict[bytes, int] = {}
    d = source.d_array[:, perm, :]  # permuted components
    fixed = f.sub_arr(d, np.broadcast_to(d[:, -1:, :], d.shape))
    for idx in range(fixed.shape[0]):
        first = fixed[idx, 0]
        coords = binv.apply(first)
        key = coords[1:].tobytes() + fixed[idx, 1:-1].tobytes()
        t = int(coords[0])
        if table.get(key, t) != t:
            raise DecompositionMismatch(
                f"direction is not a valid quotient witness for terminal {terminal}"
            )
        table[key] = t
    return QuotientWitness(perm, b, table)


# --- brute-force optimum -------------------------------------------------------

def enumerate_subspaces(field: Field, n: int) -> list[FMatrix]:
    """All subspaces of F^n as canonical echelon-form row bases."""
    out = [FMatrix.zeros(field, 0, n)]
    for d in range(1, n + 1):
        for pivots in itertools.combinations(range(n), d):
            free = [
                (i, j)
                for i in range(d)
                for j in range(pivots[i] + 1, n)
                if j not in pivots
            ]
            for vals in itertools.product(range(field.q), repeat=len(free)):
                basis = np.zeros((d, n), dtype=CODE_DTYPE)
                for i, p in enumerate(pivots):
                    basis[i, p] = 1
                for (i, j), val in zip(free, vals):
                    basis[i, j] = val
                out.append(FMatrix(field, basis, copy=False))
    return out


def _pack_vec(vec: np.ndarray, q: int) -> int:
    code = 0
    for x in reversed(vec.tolist()):
        code = code * q + int(x)
    return code


def _span_mask(field: Field, basis: FMatrix, n: int) -> int:
    d = basis.rows
    if d == 0:
        return 1  # just the zero vector
    members = field.matmul(all_vectors(field, d), basis.array)
    mask = 0
    for row in members:
        mask |= 1 << _pack_vec(row, field.q)
    return mask


def _shift_mask(field: Field, mask: int, gamma: np.ndarray, n: int) -> int:
    # mask of {w : w + gamma in N} given the membership mask of N
    if not gamma.any():
        return mask
    out = 0
    vecs = all_vectors(field, n)
    shifted = field.add_arr(vecs, gamma[None, :])
    packed = (vecs.astype(np.int64) * (field.q ** np.arange(n, dtype=np.int64))).sum(axis=1)
    packed_shift = (shifted.astype(np.int64) * (field.q ** np.arange(n, dtype=np.int64))).sum(axis=1)
    for w_code, m_code in zip(packed.tolist(), packed_shift.tolist()):
        if mask >> m_code & 1:
            out |= 1 << w_code
    return out


def brute_optimal_tuple(
    source: Source, *, max_space: int = 16, max_s: int = 3
) -> tuple[int, list[FMatrix]]:
    """Exhaust all nullspace tuples; return (min total length, best bases).

    Ground-truth oracle: valid tuples are those whose nullspace product
    meets the difference set only in zero; the optimum is s*n minus the
    best achievable nullspace dimension sum.
    """
    f = source.field
    n, s = source.n, source.s
    if f.q**n > max_space or s > max_s:
        raise TooLarge(f"brute force limited to q^n <= {max_space} and s <= {max_s}")
    subs = enumerate_subspaces(f, n)
    masks = [_span_mask(f, b, n) for b in subs]
    dims = [b.rows for b in subs]
    order = sorted(range(len(subs)), key=lambda i: -dims[i])
    d = source.d_array
    nd = d.shape[0]
    pairs = [(a, b) for a in range(nd) for b in range(a + 1, nd)]
    shift_cache: dict[tuple[int, int], int] = {}

    def shifted(sub_idx: int, a: int, b: int, t: int) -> int:
        gamma = f.sub_arr(d[a, t], d[b, t])
        g_code = _pack_vec(gamma, f.q)
        key = (sub_idx, g_code)
        hit = shift_cache.get(key)
        if hit is None:
            hit = _shift_mask(f, masks[sub_idx], gamma, n)
            shift_cache[key] = hit
        return hit

    best_sum = -1
    best: list[int] | None = None

    def recurse(level: int, chosen: list[int], inter: int, pair_masks: list[int], dimsum: int):
        nonlocal best_sum, best
        if dimsum + (s - level) * n <= best_sum:
            return
        if level == s:
            if inter == 1 and all(m == 0 for m in pair_masks):
                if dimsum > best_sum:
                    best_sum = dimsum
                    best = list(chosen)
            return
        for idx in order:
            if dimsum + dims[idx] + (s - level - 1) * n <= best_sum:
                break  # order is descending in dimension
            new_inter = inter & masks[idx]
            if level == s - 1 and new_inter != 1:
                continue
            new_pairs = [
                pm & shifted(idx, a, b, level)
                for pm, (a, b) in zip(pair_masks, pairs)
            ]
            if level == s - 1 and any(new_pairs):
                continue
            chosen.append(idx)
            recurse(level + 1, chosen, new_inter, new_pairs, dimsum + dims[idx])
            chosen.pop()

    full = (1 << (f.q**n)) - 1
    recurse(0, [], full, [full] * len(pairs), 0)
    assert best is not None  # the all-identity tuple is always valid
    return s * n - best_sum, [subs[i] for i in best]


def brute_min_m(source: Source, *, max_space: int = 16, max_s: int = 3) -> int:
    """Least total code length over all linear compressions (tiny sources)."""
    return brute_optimal_tuple(source, max_space=max_space, max_s=max_s)[0]
