"""Hand-verified reference constructions used by the test-suite and demos.

Each entry bundles a source, a set of encoding matrices known to compress
it, and (when the code comes from an explicit parent) the parent blocks.
GF(4) elements use the coefficient codes 0, 1, 2 = a, 3 = a + 1 for the
generator a with a^2 + a + 1 = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import CODE_DTYPE, Field
from .linalg import FMatrix, hstack, vstack
from .source import Source, hamming_source, generalized_hamming_source


@dataclass(frozen=True)
class ReferenceCode:
    name: str
    source: Source
    h_matrices: tuple[FMatrix, ...]
    blocks: tuple[FMatrix, ...] | None
    expected_perfect: bool
    note: str = ""


def field_z2() -> Field:
    return Field(2)


def field_z5() -> Field:
    return Field(5)


def field_z11() -> Field:
    return Field(11)


def field_gf4() -> Field:
    return Field(2, 2, [1, 1, 1])


# --- three-terminal codes from explicit parents ------------------------------

def z11_hamming_blocks(f: Field | None = None) -> tuple[FMatrix, ...]:
    f = f or field_z11()
    q1 = FMatrix(f, [[1, 1, -2, -2], [0, 2, -1, -7]])
    q2 = FMatrix(f, [[0, 9, 1, 1], [1, 5, 5, 8]])
    q3 = FMatrix(f, [[-1, 1, 1, 1], [-1, 4, 7, -1]])
    return (q1, q2, q3)


def z11_hamming() -> ReferenceCode:
    f = field_z11()
    blocks = z11_hamming_blocks(f)
    return ReferenceCode(
        name="z11-hamming-n4s3",
        source=hamming_source(f, 4, 3),
        h_matrices=blocks,
        blocks=blocks,
        expected_perfect=True,
        note="each nonzero vector of F^2 appears exactly once projectively among the columns",
    )


def z5_pm1() -> ReferenceCode:
    f = field_z5()
    q1 = FMatrix(f, [[1, 0, 1, 1], [0, 2, 2, -2]])
    q2 = FMatrix(f, [[0, 2, -2, 2], [1, 0, -1, -1]])
    q3 = FMatrix(f, [[-1, -2, 1, 2], [-1, -2, -1, -2]])
    return ReferenceCode(
        name="z5-pm1-n4s3",
        source=generalized_hamming_source(f, 4, 3, [1, -1 % 5]),
        h_matrices=(q1, q2, q3),
        blocks=(q1, q2, q3),
        expected_perfect=True,
        note="coset representatives {1, 2} over the six projective directions",
    )


def z5_single() -> ReferenceCode:
    f = field_z5()
    q1 = FMatrix(f, [[1, 0, 1, 1, 2, 2], [0, 1, 1, 2, -2, -1]])
    q2 = FMatrix(f, [[-1, 0, 2, -1, 2, -1], [0, 2, 2, -2, 1, 1]])
    q3 = FMatrix(f, [[2, 0, -2, 1, -2, 1], [0, -1, -2, -2, 2, -1]])
    q4 = FMatrix(f, [[-2, 0, -1, -1, -2, -2], [0, -2, -1, 2, -1, 1]])
    return ReferenceCode(
        name="z5-single-n6s4",
        source=generalized_hamming_source(f, 6, 4, [1]),
        h_matrices=(q1, q2, q3, q4),
        blocks=(q1, q2, q3, q4),
        expected_perfect=True,
        note="the 24 columns are all nonzero vectors of F^2 without repetition",
    )


def gf4_hamming_blocks(f: Field | None = None) -> tuple[FMatrix, ...]:
    f = f or field_gf4()
    q1 = FMatrix(f, [[1, 1, 0, 0, 1, 2, 2], [1, 0, 1, 0, 2, 1, 2], [0, 0, 0, 1, 2, 2, 1]])
    q2 = FMatrix(f, [[1, 3, 0, 1, 2, 3, 3], [0, 1, 3, 0, 1, 3, 1], [1, 0, 1, 3, 1, 1, 3]])
    q3 = FMatrix(f, [[0, 2, 0, 1, 3, 1, 1], [1, 1, 2, 0, 3, 2, 3], [1, 0, 1, 2, 3, 3, 2]])
    return (q1, q2, q3)


def gf4_hamming(carrier: int = 0) -> ReferenceCode:
    """GF(4) n=7 s=3 code; ``carrier`` picks which terminal takes the T row."""
    f = field_gf4()
    blocks = gf4_hamming_blocks(f)
    t = FMatrix(f, [[0, 0, 0, 0, 0, 0, 1]])
    hs = list(blocks)
    hs[carrier] = vstack([t, blocks[carrier]])
    return ReferenceCode(
        name=f"gf4-hamming-n7s3-t{carrier + 1}",
        source=hamming_source(f, 7, 3),
        h_matrices=tuple(hs),
        blocks=blocks,
        expected_perfect=True,
        note="completion row stacked on one terminal; all three placements are perfect",
    )


# --- two-terminal codes --------------------------------------------------------

def gf4_q2(f: Field | None = None) -> FMatrix:
    f = f or field_gf4()
    return FMatrix(f, [[1, 0, 1, 1, 1], [0, 1, 1, 2, 3]])


def gf4_pair(which: int) -> ReferenceCode:
    f = field_gf4()
    q2 = gf4_q2(f)
    src = hamming_source(f, 5, 2)
    if which == 1:
        h1: FMatrix = FMatrix.identity(f, 5)
        h2 = q2
    elif which == 2:
        h1 = vstack([FMatrix(f, [[0, 0, 1, 0, 0], [0, 0, 0, 1, 0], [0, 0, 0, 0, 1]]), q2])
        h2 = q2
    elif which == 3:
        h1 = vstack([FMatrix(f, [[0, 0, 1, 0, 0], [0, 0, 0, 0, 1]]), q2])
        h2 = vstack([FMatrix(f, [[0, 0, 0, 1, 0]]), q2])
    else:
        raise ValueError("which must be 1, 2 or 3")
    return ReferenceCode(
        name=f"gf4-s2-pair{which}",
        source=src,
        h_matrices=(h1, h2),
        blocks=(-q2, q2),
        expected_perfect=True,
        note="two-terminal family sharing one deviation-detecting block",
    )


def z5_s2() -> ReferenceCode:
    f = field_z5()
    q2 = FMatrix(f, [[0, 1, 1, 1, 1, 1], [1, 0, 1, 2, 3, 4]])
    return ReferenceCode(
        name="z5-s2-n6",
        source=hamming_source(f, 6, 2),
        h_matrices=(FMatrix.identity(f, 6), q2),
        blocks=(-q2, q2),
        expected_perfect=True,
        note="columns are the six projective directions of F^2",
    )


def z2_s2() -> ReferenceCode:
    f = field_z2()
    q2 = FMatrix(f, [[1, 0, 1], [0, 1, 1]])
    return ReferenceCode(
        name="z2-s2-n3",
        source=hamming_source(f, 3, 2),
        h_matrices=(FMatrix.identity(f, 3), q2),
        blocks=(-q2, q2),
        expected_perfect=True,
        note="binary parity-check pair",
    )


def z2_s2_wide() -> ReferenceCode:
    """Valid but non-perfect binary pair (full-rank deviation block)."""
    f = field_z2()
    q2 = FMatrix.identity(f, 3)
    return ReferenceCode(
        name="z2-s2-n3-wide",
        source=hamming_source(f, 3, 2),
        h_matrices=(FMatrix.identity(f, 3), q2),
        blocks=(-q2, q2),
        expected_perfect=False,
        note="syndrome space strictly larger than the representative set",
    )


# --- sources beyond the homogeneous family -------------------------------------

def _single_deviation_reps(f: Field, n: int, s: int, terminals: int, coords: int) -> list[np.ndarray]:
    reps = [np.zeros((s, n), dtype=CODE_DTYPE)]
    for i in range(terminals):
        for j in range(coords):
            for a in range(1, f.q):
                rep = np.zeros((s, n), dtype=CODE_DTYPE)
                rep[i, j] = a
                reps.append(rep)
    return reps


def z11_padded() -> ReferenceCode:
    """Three active terminals embedded in a five-terminal, length-6 space."""
    f = field_z11()
    reps = _single_deviation_reps(f, n=6, s=5, terminals=3, coords=4)
    src = Source(f, 6, 5, np.stack(reps))
    base = z11_hamming_blocks(f)
    pad = FMatrix.zeros(f, 2, 2)
    q = [hstack([b, pad]) for b in base] + [FMatrix.zeros(f, 2, 6), FMatrix.zeros(f, 2, 6)]
    hs = (
        q[0],
        q[1],
        q[2],
        FMatrix(f, [[0, 0, 0, 0, 1, 0]]),
        FMatrix(f, [[0, 0, 0, 0, 0, 1]]),
    )
    return ReferenceCode(
        name="z11-padded-n6s5",
        source=src,
        h_matrices=hs,
        blocks=tuple(q),
        expected_perfect=True,
        note="inactive terminals send one completion coordinate each",
    )


def z11_shifted() -> ReferenceCode:
    """Deviation support trimmed by three scalar families; not perfect."""
    f = field_z11()
    reps = _single_deviation_reps(f, n=5, s=4, terminals=3, coords=5)
    removed = []
    for a in range(f.q):
        for (ti, tj) in ((0, 0), (1, 0), (2, 1)):
            rep = np.zeros((4, 5), dtype=CODE_DTYPE)
            rep[ti, tj] = a
            removed.append(rep.tobytes())
    kept = [r for r in reps if r.tobytes() not in set(removed)]
    src = Source(f, 5, 4, np.stack(kept))
    q1 = FMatrix(f, [[1, 1, -2, -2, 1], [0, 2, -1, -7, 0]])
    q2 = FMatrix(f, [[0, 9, 1, 1, 0], [1, 5, 5, 8, 1]])
    q3 = FMatrix(f, [[-1, 1, 1, 1, 1], [-1, 4, 7, -1, 4]])
    q4 = FMatrix(f, [[0, 0, 0, 0, -2], [0, 0, 0, 0, -5]])
    hs = (q1, q2, q3, FMatrix(f, [[0, 0, 0, 0, 1]]))
    return ReferenceCode(
        name="z11-shifted-n5s4",
        source=src,
        h_matrices=hs,
        blocks=(q1, q2, q3, q4),
        expected_perfect=False,
        note="last terminal sends a row basis of its (rank-one) block",
    )


def z5_custom() -> ReferenceCode:
    """Hand-picked 25-element representative set reusing the z5-single code."""
    f = field_z5()
    n, s = 6, 4

    def rep(*components) -> np.ndarray:
        out = np.zeros((s, n), dtype=CODE_DTYPE)
        for t, comp in enumerate(components):
            for j, val in comp:
                out[t, j - 1] = val % f.q
        return out

    def e(j: int, v: int = 1) -> list[tuple[int, int]]:
        return [(j, v)]

    reps = []
    for j in range(1, 7):
        reps.append(rep(e(j, 1), [], [], []))
        reps.append(rep(e(j, -1), [], [], []))
    for j in (2, 3, 5, 6):
        reps.append(rep([], e(j, 1), [], []))
    reps.append(rep(e(3), [], e(1), e(3)))
    reps.append(rep([(1, 1), (2, 1)], [], e(3), e(3)))
    reps.append(rep([], [(1, 1), (2, 1), (4, 1)], [], []))
    reps.append(rep(e(1, 3), e(2, 2), e(1, -2), [(4, 1), (2, 1)]))
    reps.append(rep([], [], [], e(4)))
    reps.append(rep(e(5), e(6), [], []))
    reps.append(rep([], [], e(4), []))
    reps.append(rep([], [], [], e(2)))
    reps.append(rep([], [], [], []))
    src = Source(f, n, s, np.stack(reps))
    base = z5_single()
    return ReferenceCode(
        name="z5-custom-n6s4",
        source=src,
        h_matrices=base.h_matrices,
        blocks=base.blocks,
        expected_perfect=True,
        note="same code as z5-single-n6s4 on a reshaped representative set",
    )


def reference_codes() -> list[ReferenceCode]:
    """Every catalog entry, in a stable order."""
    return [
        z11_hamming(),
        z5_pm1(),
        z5_single(),
        gf4_hamming(0),
        gf4_hamming(1),
        gf4_hamming(2),
        gf4_pair(1),
        gf4_pair(2),
        gf4_pair(3),
        z5_s2(),
        z2_s2(),
        z2_s2_wide(),
        z11_padded(),
        z11_shifted(),
        z5_custom(),
    ]
