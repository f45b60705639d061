"""Construction and verification of (pre-)matrix partition codes.

A matrix partition code derives its encoding matrices from a parent matrix:
each terminal concatenates a row basis of its own block with its share of a
completion matrix T, optionally mixed by an invertible matrix.  The
construction witness (parent, bases, completion, mixers and the derived
change-of-basis matrices) is retained on the code object; the joint decoder
is pure witness algebra.

Verification reduces the lossless-compression criterion to two exact checks:
the stacked encoding matrices must have full column rank, and the
left-annihilator image of the representative encodings must be collision
free.  Both are linear in the representative count, so structural
verification stays cheap even when S itself is astronomically large.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import (
    BadPartition,
    NonInvertibleU,
    NotInjectiveStack,
    NoWitness,
    ShapeError,
    Singular,
    TooLarge,
    WrongNullspace,
)
from .field import CODE_DTYPE, Field
from .linalg import (
    FMatrix,
    complete_to_invertible,
    express_rows,
    inverse,
    left_annihilator,
    nullspace_basis,
    rank,
    row_basis,
    solve,
    vstack,
)
from .parent import ParentMatrix, validate_parent
from .source import DEFAULT_ENUM_CAP, Source, all_vectors


@dataclass
class Witness:
    """Construction data retained by a partition code.

    ``pre_only`` marks codes built through the general (pre) route, which
    carry the parent and the completion partition but not the decoder
    algebra.
    """

    parent: ParentMatrix
    pre_only: bool = False
    y: FMatrix | None = None
    t: FMatrix | None = None
    c: tuple[FMatrix, ...] | None = None
    g: tuple[FMatrix, ...] | None = None
    u: tuple[FMatrix, ...] | None = None
    r: tuple[FMatrix, ...] | None = None
    e: FMatrix | None = None
    winv: FMatrix | None = None
    tprime: FMatrix | None = None
    gprime: tuple[FMatrix, ...] | None = None

    def to_json(self) -> dict:
        def m(x):
            return x.to_json() if x is not None else None

        def ms(xs):
            return [x.to_json() for x in xs] if xs is not None else None

        return {
            "parent": self.parent.to_json(),
            "pre_only": self.pre_only,
            "Y": m(self.y),
            "T": m(self.t),
            "C": ms(self.c),
            "G": ms(self.g),
            "U": ms(self.u),
            "R": ms(self.r),
            "E": m(self.e),
            "Winv": m(self.winv),
            "Tprime": m(self.tprime),
            "Gprime": ms(self.gprime),
        }

    @classmethod
    def from_json(cls, field: Field, doc: dict) -> "Witness":
        def m(x):
            return FMatrix.from_json(field, x) if x is not None else None

        def ms(xs):
            return tuple(FMatrix.from_json(field, x) for x in xs) if xs is not None else None

        return cls(
            parent=ParentMatrix.from_json(doc["parent"]),
            pre_only=bool(doc.get("pre_only", False)),
            y=m(doc.get("Y")),
            t=m(doc.get("T")),
            c=ms(doc.get("C")),
            g=ms(doc.get("G")),
            u=ms(doc.get("U")),
            r=ms(doc.get("R")),
            e=m(doc.get("E")),
            winv=m(doc.get("Winv")),
            tprime=m(doc.get("Tprime")),
            gprime=ms(doc.get("Gprime")),
        )


class PartitionCode:
    """Encoding matrices H_1..H_s plus an optional construction witness."""

    def __init__(self, h_matrices: Sequence[FMatrix], witness: Witness | None = None):
        if len(h_matrices) < 2:
            raise ShapeError("a code needs at least two terminals")
        f = h_matrices[0].field
        n = h_matrices[0].cols
        for h in h_matrices[1:]:
            if h.field != f or h.cols != n:
                raise ShapeError("encoding matrices must share one field and one input length")
        self.field = f
        self.n = n
        self.s = len(h_matrices)
        self.h = tuple(h_matrices)
        self.witness = witness

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(h.rows for h in self.h)

    @property
    def total_length(self) -> int:
        return sum(h.rows for h in self.h)

    def __repr__(self) -> str:
        return (
            f"PartitionCode({self.field!r}, n={self.n}, s={self.s},"
            f" m={list(self.lengths)}, witness={'yes' if self.witness else 'no'})"
        )

    def to_json(self, source: Source | None = None) -> dict:
        doc: dict = {
            "field": self.field.to_json(),
            "n": self.n,
            "s": self.s,
            "H": [h.to_json() for h in self.h],
            "witness": self.witness.to_json() if self.witness else None,
        }
        if source is not None:
            doc["source"] = source.to_json()
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "PartitionCode":
        f = Field.from_json(doc["field"])
        hs = [FMatrix.from_json(f, h) for h in doc["H"]]
        wit = doc.get("witness")
        return cls(hs, Witness.from_json(f, wit) if wit else None)


def _row_slices(t: FMatrix, partition: Sequence[int]) -> list[FMatrix]:
    out = []
    at = 0
    for cnt in partition:
        out.append(FMatrix(t.field, t.array[at:at + cnt]))
        at += cnt
    return out


def construct_mpc(
    parent: ParentMatrix,
    partition: Sequence[int] | None = None,
    u_matrices: Sequence[FMatrix | None] | None = None,
) -> PartitionCode:
    """Minimal-length code from a parent matrix.

    ``partition`` distributes the rows of the completion matrix T over the
    terminals (default: all on terminal 0).  ``u_matrices`` optionally mixes
    each terminal by an invertible matrix (default: identity).  The total
    length always equals :func:`min_total_length` of the parent.
    """
    f = parent.field
    n, s = parent.n, parent.s
    stack_q = vstack(parent.blocks)
    y = row_basis(stack_q)
    t = complete_to_invertible(y)
    if partition is None:
        partition = [t.rows] + [0] * (s - 1)
    partition = [int(x) for x in partition]
    if len(partition) != s or any(x < 0 for x in partition) or sum(partition) != t.rows:
        raise BadPartition(
            f"partition {partition} must be {s} nonnegative counts summing to {t.rows}"
        )
    g = _row_slices(t, partition)
    c = [
        q if rank(q) == q.rows else row_basis(q)
        for q in parent.blocks
    ]
    hs = []
    us = []
    for i in range(s):
        base = vstack([c[i], g[i]])
        if u_matrices is None or u_matrices[i] is None:
            u = FMatrix.identity(f, base.rows)
        else:
            u = u_matrices[i]
            if u.shape != (base.rows, base.rows):
                raise NonInvertibleU(
                    f"U[{i}] must be {base.rows}x{base.rows}, got {u.shape}"
                )
            try:
                inverse(u)
            except Singular:
                raise NonInvertibleU(f"U[{i}] is singular") from None
        us.append(u)
        hs.append(u @ base)
    r = [express_rows(parent.blocks[i], c[i]) for i in range(s)]
    e = express_rows(y, vstack(c))
    winv = inverse(vstack([y, t]))
    wit = Witness(
        parent=parent,
        y=y,
        t=t,
        c=tuple(c),
        g=tuple(g),
        u=tuple(us),
        r=tuple(r),
        e=e,
        winv=winv,
    )
    return PartitionCode(hs, wit)


def construct_pre_mpc(
    parent: ParentMatrix,
    tprime: FMatrix,
    partition: Sequence[int] | None = None,
    h_override: Sequence[FMatrix | None] | None = None,
) -> PartitionCode:
    """General (pre) construction: any completion T' making the stack injective.

    Default encoding matrices stack each terminal's share of T' on top of its
    block; overrides are accepted when they have exactly the required
    nullspace (checked by rank identities).  Zero-row padding is legal, so
    the result may exceed the minimal total length.
    """
    f = parent.field
    n, s = parent.n, parent.s
    if tprime.cols != n or tprime.field != f:
        raise ShapeError("completion matrix shape does not match the parent")
    if rank(vstack(list(parent.blocks) + [tprime])) != n:
        raise NotInjectiveStack("blocks plus completion do not form an injective map")
    if partition is None:
        partition = [tprime.rows] + [0] * (s - 1)
    partition = [int(x) for x in partition]
    if len(partition) != s or any(x < 0 for x in partition) or sum(partition) != tprime.rows:
        raise BadPartition(
            f"partition {partition} must be {s} nonnegative counts summing to {tprime.rows}"
        )
    gprime = _row_slices(tprime, partition)
    hs = []
    for i in range(s):
        base = vstack([gprime[i], parent.blocks[i]])
        if h_override is None or h_override[i] is None:
            hs.append(base)
            continue
        h = h_override[i]
        if h.cols != n or h.field != f:
            raise ShapeError(f"override H[{i}] has the wrong shape")
        rb, rh = rank(base), rank(h)
        if not (rb == rh == rank(vstack([h, base]))):
            raise WrongNullspace(f"override H[{i}] does not have the required nullspace")
        hs.append(h)
    wit = Witness(parent=parent, pre_only=True, tprime=tprime, gprime=tuple(gprime))
    return PartitionCode(hs, wit)


def min_total_length(parent: ParentMatrix) -> int:
    """Least achievable total length for this parent: sum of block ranks
    plus the completion size n - rank of the stacked blocks."""
    return sum(rank(q) for q in parent.blocks) + parent.n - rank(vstack(parent.blocks))


@dataclass
class RatioReport:
    """Per-terminal lengths against the parent's lower bound."""

    n: int
    lengths: tuple[int, ...]
    block_ranks: tuple[int, ...]
    excess: tuple[int, ...]
    excess_bound: int
    minimal: bool

    @property
    def total_length(self) -> int:
        return sum(self.lengths)

    @property
    def ratios(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(m, self.n) for m in self.lengths)

    @property
    def sum_ratio(self) -> Fraction:
        return Fraction(self.total_length, self.n)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": list(self.lengths),
            "M": self.total_length,
            "ratios": [str(r) for r in self.ratios],
            "sum_ratio": str(self.sum_ratio),
            "block_ranks": list(self.block_ranks),
            "excess": list(self.excess),
            "excess_bound": self.excess_bound,
            "minimal": self.minimal,
        }


def ratio_report(code: PartitionCode) -> RatioReport:
    """Lengths, per-terminal excess over block rank, and minimality flag.

    The excesses sum to at least n - rank(stacked blocks); equality holds
    exactly for the minimal (partition-code) construction.
    """
    if code.witness is None:
        raise NoWitness("ratio report needs the construction witness (parent blocks)")
    blocks = code.witness.parent.blocks
    ranks = tuple(rank(q) for q in blocks)
    lengths = code.lengths
    excess = tuple(m - r for m, r in zip(lengths, ranks))
    bound = code.n - rank(vstack(blocks))
    return RatioReport(
        n=code.n,
        lengths=lengths,
        block_ranks=ranks,
        excess=excess,
        excess_bound=bound,
        minimal=sum(excess) == bound,
    )


# --- verification -------------------------------------------------------------

@dataclass
class VerificationReport:
    ok: bool
    mode: str
    total_length: int
    stack_rank: int
    n: int
    counterexample: tuple[np.ndarray, np.ndarray] | None = None
    image_size: int | None = None
    expected_size: int | None = None

    @property
    def zero_common_nullspace(self) -> bool:
        """The intersection of all per-terminal nullspaces is {0}."""
        return self.stack_rank == self.n

    def to_json(self) -> dict:
        ce = None
        if self.counterexample is not None:
            ce = [t.tolist() for t in self.counterexample]
        return {
            "ok": self.ok,
            "mode": self.mode,
            "M": self.total_length,
            "stack_rank": self.stack_rank,
            "n": self.n,
            "zero_common_nullspace": self.zero_common_nullspace,
            "counterexample": ce,
            "image_size": self.image_size,
            "expected_size": self.expected_size,
        }


def _as_h_list(code: PartitionCode | Sequence[FMatrix]) -> list[FMatrix]:
    if isinstance(code, PartitionCode):
        return list(code.h)
    return list(code)


def verify_compression(
    code: PartitionCode | Sequence[FMatrix],
    source: Source,
    mode: str = "structural",
    cap: int = DEFAULT_ENUM_CAP,
) -> VerificationReport:
    """Decide whether the encoding matrices compress the source losslessly.

    structural: exact criterion on the difference set, evaluated as (a) the
    stacked matrices have full column rank and (b) no two representatives
    have the same image under the left annihilator of the stack.  Linear in
    |D|.

    exhaustive: encodes every member of S (subject to ``cap``) and checks
    that the images are pairwise distinct.
    """
    hs = _as_h_list(code)
    f = source.field
    if len(hs) != source.s or any(h.cols != source.n or h.field != f for h in hs):
        raise ShapeError("encoding matrices do not match the source shape")
    stack_h = vstack(hs)
    total = stack_h.rows
    stack_rank = rank(stack_h)
    base = dict(mode=mode, total_length=total, stack_rank=stack_rank, n=source.n)
    if stack_rank != source.n:
        w = nullspace_first_col(stack_h)
        delta = source.d_array[0]
        sigma1 = source.compose(w, delta)
        return VerificationReport(ok=False, counterexample=(sigma1, delta.copy()), **base)

    if mode == "structural":
        ann = left_annihilator(stack_h)  # (M - n) x M
        enc = np.hstack([
            f.matmul(source.d_array[:, i, :], hs[i].array.T) for i in range(source.s)
        ])
        keys = f.matmul(enc, ann.array.T)
        seen: dict[bytes, int] = {}
        for idx in range(keys.shape[0]):
            key = keys[idx].tobytes()
            prev = seen.get(key)
            if prev is not None:
                b = f.sub_arr(enc[idx], enc[prev])
                w = solve(stack_h, b)
                sigma1 = source.compose(w, source.d_array[prev])
                sigma2 = source.d_array[idx].copy()
                return VerificationReport(
                    ok=False, counterexample=(sigma1, sigma2), **base
                )
            seen[key] = idx
        return VerificationReport(ok=True, **base)

    if mode == "exhaustive":
        if source.size_s > cap:
            raise TooLarge(f"|S| = {source.size_s} exceeds cap {cap}")
        keys = []
        for _, batch in source.iter_s_batches(cap):
            enc = np.hstack([
                f.matmul(batch[:, i, :], hs[i].array.T) for i in range(source.s)
            ])
            keys.append(pack_rows(enc, f.q))
        allk = np.concatenate(keys)
        order = np.argsort(allk, kind="stable")
        sk = allk[order]
        dup = np.nonzero(sk[1:] == sk[:-1])[0]
        if dup.size:
            qn = f.q**source.n
            w_all = all_vectors(f, source.n)
            i1, i2 = int(order[dup[0]]), int(order[dup[0] + 1])
            sigma1 = source.compose(w_all[i1 % qn], source.d_array[i1 // qn])
            sigma2 = source.compose(w_all[i2 % qn], source.d_array[i2 // qn])
            return VerificationReport(
                ok=False,
                counterexample=(sigma1, sigma2),
                image_size=int(np.unique(sk).size),
                expected_size=source.size_s,
                **base,
            )
        return VerificationReport(
            ok=True, image_size=int(allk.size), expected_size=source.size_s, **base
        )

    raise ShapeError(f"unknown verification mode {mode!r}")


def nullspace_first_col(m: FMatrix) -> np.ndarray:
    """First basis vector of null(m); requires a nontrivial nullspace."""
    nb = nullspace_basis(m)
    if nb.cols == 0:
        raise ShapeError("matrix has a trivial nullspace")
    return nb.array[:, 0].copy()


def pack_rows(arr: np.ndarray, q: int) -> np.ndarray:
    """Injectively pack code rows into int64 radix keys (length permitting)."""
    n = arr.shape[1]
    if n == 0:
        return np.zeros(arr.shape[0], dtype=np.int64)
    if q**n >= 2**62:
        raise TooLarge(f"rows of length {n} over q={q} do not fit radix keys")
    weights = (q ** np.arange(n, dtype=object)).astype(np.int64)
    return arr.astype(np.int64) @ weights


# --- perfectness ----------------------------------------------------------------

@dataclass
class PerfectReport:
    perfect: bool
    total_length: int
    n: int
    codeword_excess: int
    num_representatives: int
    verified: bool
    parent_bijective: bool | None = None

    def to_json(self) -> dict:
        return {
            "perfect": self.perfect,
            "M": self.total_length,
            "n": self.n,
            "q_power_excess": self.codeword_excess,
            "num_representatives": self.num_representatives,
            "verified": self.verified,
            "parent_bijective": self.parent_bijective,
        }


def is_perfect(
    code: PartitionCode | Sequence[FMatrix],
    source: Source,
    *,
    verification: VerificationReport | None = None,
) -> PerfectReport:
    """Perfect means the codeword space is exactly filled: q^M = |S|.

    Equivalently q^(M-n) = |D|.  The certificate additionally reports, when
    a construction witness is available, whether the witness parent is
    bijective on the stacked representatives (the necessary condition for
    perfect codes).
    """
    hs = _as_h_list(code)
    if verification is None:
        verification = verify_compression(hs, source, mode="structural")
    total = sum(h.rows for h in hs)
    q = source.field.q
    excess = q ** (total - source.n) if total >= source.n else 0
    perfect = verification.ok and excess == source.num_representatives
    parent_bij = None
    if isinstance(code, PartitionCode) and code.witness is not None:
        parent_bij = validate_parent(code.witness.parent, source).bijective
    return PerfectReport(
        perfect=perfect,
        total_length=total,
        n=source.n,
        codeword_excess=excess,
        num_representatives=source.num_representatives,
        verified=verification.ok,
        parent_bijective=parent_bij,
    )
