"""Encoder and zero-error joint decoder for matrix partition codes.

Encoding is plain per-terminal matrix multiplication.  Decoding uses the
construction witness: undo the mixers, cancel the uniform part through the
zero block-sum to expose the syndrome P @ d, look the deviation up in a
table, then recover the uniform word by one precomputed change of basis.
Everything is a (batched) matrix product plus one table lookup, so
exhaustive million-tuple round trips stay fast.

Codes without a full witness (padded pre-codes, raw fixtures) fall back to
table decoding: enumerate S once, hash every encoding, invert by lookup.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import (
    Ambiguous,
    DuplicateSyndrome,
    NotFound,
    NoWitness,
    ShapeError,
    TooLarge,
    UnknownSyndrome,
)
from .field import CODE_DTYPE
from .linalg import as_vector, inverse
from .code import PartitionCode, pack_rows
from .source import DEFAULT_ENUM_CAP, Source, all_vectors


def encode(code: PartitionCode, sigma) -> list[np.ndarray]:
    """Per-terminal codewords y_i = H_i x_i."""
    a = np.asarray(sigma)
    if a.ndim == 1 and a.dtype == object:
        a = np.stack([np.asarray(c) for c in sigma])
    if a.shape != (code.s, code.n):
        raise ShapeError(f"expected {code.s} vectors of length {code.n}, got {a.shape}")
    return [code.h[i].apply(a[i]) for i in range(code.s)]


def encode_batch(code: PartitionCode, batch: np.ndarray) -> np.ndarray:
    """Encode a (N, s, n) batch into concatenated (N, M) codewords."""
    f = code.field
    return np.hstack([f.matmul(batch[:, i, :], code.h[i].array.T) for i in range(code.s)])


class Decoder:
    """Precomputed joint decoder for a witnessed matrix partition code.

    The syndrome table maps P @ d (as a radix key) to the representative
    index; it has exactly |D| entries and is a bijection onto F^r exactly
    when the code is perfect.
    """

    def __init__(self, code: PartitionCode, source: Source):
        if code.witness is None or code.witness.pre_only:
            raise NoWitness("decoding needs a full construction witness")
        wit = code.witness
        f = code.field
        self.code = code
        self.source = source
        self.field = f
        self.n = code.n
        self.s = code.s
        self.lengths = code.lengths
        self.r = wit.parent.r
        self._uinv = [inverse(u).array for u in wit.u]
        self._c = [c.array for c in wit.c]
        self._g = [g.array for g in wit.g]
        self._rmats = [r.array for r in wit.r]
        self._e = wit.e.array
        self._winv = wit.winv.array
        self._c_rows = [c.shape[0] for c in self._c]
        syndromes = f.matmul(source.dtilde(), wit.parent.matrix.array.T)
        keys = pack_rows(syndromes, f.q)
        order = np.argsort(keys, kind="stable")
        sorted_keys = keys[order]
        if np.any(sorted_keys[1:] == sorted_keys[:-1]):
            raise DuplicateSyndrome("two representatives share a syndrome")
        self._table_keys = sorted_keys
        self._table_idx = order.astype(np.int64)

    @property
    def table_size(self) -> int:
        return int(self._table_keys.size)

    @property
    def covers_all_syndromes(self) -> bool:
        return self.table_size == self.field.q**self.r

    def _split(self, y: np.ndarray) -> list[np.ndarray]:
        out = []
        at = 0
        for m in self.lengths:
            out.append(y[:, at:at + m])
            at += m
        return out

    def decode_batch(self, y: np.ndarray) -> np.ndarray:
        """Decode (N, M) concatenated codewords to (N, s, n) source tuples."""
        f = self.field
        if y.ndim != 2 or y.shape[1] != sum(self.lengths):
            raise ShapeError(f"expected (N, {sum(self.lengths)}) codewords, got {y.shape}")
        parts = self._split(y)
        a_parts, b_parts = [], []
        for i in range(self.s):
            z = f.matmul(parts[i], self._uinv[i].T)
            a_parts.append(z[:, : self._c_rows[i]])
            b_parts.append(z[:, self._c_rows[i]:])
        synd = np.zeros((y.shape[0], self.r), dtype=CODE_DTYPE)
        for i in range(self.s):
            synd = f.add_arr(synd, f.matmul(a_parts[i], self._rmats[i].T))
        keys = pack_rows(synd, f.q)
        pos = np.searchsorted(self._table_keys, keys)
        pos_clip = np.minimum(pos, self._table_keys.size - 1)
        bad = self._table_keys[pos_clip] != keys
        if np.any(bad):
            raise UnknownSyndrome(
                f"{int(bad.sum())} codeword(s) are not encodings of any source tuple"
            )
        d_idx = self._table_idx[pos_clip]
        d = self.source.d_array[d_idx]  # (N, s, n)
        cv = np.hstack([
            f.sub_arr(a_parts[i], f.matmul(d[:, i, :], self._c[i].T))
            for i in range(self.s)
        ])
        tv = np.hstack([
            f.sub_arr(b_parts[i], f.matmul(d[:, i, :], self._g[i].T))
            for i in range(self.s)
        ])
        yv = f.matmul(cv, self._e.T)
        v = f.matmul(np.hstack([yv, tv]), self._winv.T)
        return f.add_arr(d, v[:, None, :])

    def decode(self, y) -> np.ndarray:
        """Decode one codeword (list of per-terminal vectors) to an (s, n) tuple."""
        if len(y) != self.s:
            raise ShapeError(f"expected {self.s} codeword parts, got {len(y)}")
        parts = [as_vector(self.field, y[i], self.lengths[i]) for i in range(self.s)]
        flat = np.concatenate(parts).reshape(1, -1)
        return self.decode_batch(flat)[0]


def build_decoder(code: PartitionCode, source: Source) -> Decoder:
    """Syndrome-table decoder from a witnessed code; see :class:`Decoder`."""
    return Decoder(code, source)


def oracle_decode(
    code: PartitionCode,
    source: Source,
    y,
    cap: int = DEFAULT_ENUM_CAP,
) -> np.ndarray:
    """Ground-truth decoder: scan all of S for tuples encoding to y.

    Only for tests and witnessless codes; raises :class:`Ambiguous` when the
    compression is invalid and :class:`NotFound` when y is out of the image.
    """
    target = np.concatenate([as_vector(code.field, v) for v in y])
    if target.size != code.total_length:
        raise ShapeError(f"codeword has length {target.size}, expected {code.total_length}")
    match: np.ndarray | None = None
    for _, batch in source.iter_s_batches(cap):
        enc = encode_batch(code, batch)
        hits = np.nonzero(np.all(enc == target[None, :], axis=1))[0]
        for h in hits:
            if match is not None:
                raise Ambiguous("two source tuples encode identically")
            match = batch[h].copy()
    if match is None:
        raise NotFound("codeword is not the encoding of any source tuple")
    return match


@dataclass
class RoundtripReport:
    tuples: int
    failures: int
    method: str
    first_failure: np.ndarray | None = None

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def to_json(self) -> dict:
        return {
            "tuples": self.tuples,
            "failures": self.failures,
            "method": self.method,
            "ok": self.ok,
            "first_failure": None
            if self.first_failure is None
            else self.first_failure.tolist(),
        }


def _roundtrip_indices(args) -> tuple[int, int]:
    decoder, indices = args
    source = decoder.source
    w = all_vectors(source.field, source.n)
    tuples = failures = 0
    for i in indices:
        batch = source.field.add_arr(source.d_array[i][None], w[:, None, :])
        enc = encode_batch(decoder.code, batch)
        dec = decoder.decode_batch(enc)
        bad = np.any(dec != batch, axis=(1, 2))
        tuples += batch.shape[0]
        failures += int(bad.sum())
    return tuples, failures


def roundtrip_report(
    code: PartitionCode,
    source: Source,
    *,
    exhaustive: bool = False,
    samples: int = 10_000,
    seed: int = 0,
    cap: int = DEFAULT_ENUM_CAP,
    workers: int = 1,
) -> RoundtripReport:
    """decode(encode(sigma)) == sigma over all of S or a uniform sample.

    Witnessed codes use the syndrome decoder.  Witnessless codes run the
    exhaustive table method instead: hash every encoding, fail on any
    collision (sampling is not available for them).
    """
    f = code.field
    has_witness = code.witness is not None and not code.witness.pre_only
    if not has_witness:
        if not exhaustive:
            raise NoWitness("sampled round trips need a full construction witness")
        if source.size_s > cap:
            raise TooLarge(f"|S| = {source.size_s} exceeds cap {cap}")
        seen: dict[int, int] = {}
        tuples = failures = 0
        first = None
        for _, batch in source.iter_s_batches(cap):
            keys = pack_rows(encode_batch(code, batch), f.q)
            for j, k in enumerate(keys.tolist()):
                tuples += 1
                if k in seen:
                    failures += 1
                    if first is None:
                        first = batch[j].copy()
                else:
                    seen[k] = 1
        return RoundtripReport(tuples, failures, "table", first)

    decoder = build_decoder(code, source)
    if exhaustive:
        if source.size_s > cap:
            raise TooLarge(f"|S| = {source.size_s} exceeds cap {cap}")
        idx = list(range(source.num_representatives))
        if workers > 1:
            chunks = [idx[k::workers] for k in range(workers)]
            with ProcessPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(_roundtrip_indices, [(decoder, c) for c in chunks]))
            tuples = sum(t for t, _ in parts)
            failures = sum(x for _, x in parts)
            return RoundtripReport(tuples, failures, "decoder-exhaustive")
        tuples, failures = _roundtrip_indices((decoder, idx))
        return RoundtripReport(tuples, failures, "decoder-exhaustive")

    rng = np.random.default_rng(seed)
    w = rng.integers(0, f.q, size=(samples, source.n), dtype=np.int64).astype(CODE_DTYPE)
    d_idx = rng.integers(0, source.num_representatives, size=samples)
    batch = f.add_arr(source.d_array[d_idx], w[:, None, :])
    enc = encode_batch(code, batch)
    dec = decoder.decode_batch(enc)
    bad = np.any(dec != batch, axis=(1, 2))
    failures = int(bad.sum())
    first = batch[int(np.nonzero(bad)[0][0])].copy() if failures else None
    return RoundtripReport(samples, failures, "decoder-sampled", first)
