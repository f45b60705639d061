"""Exact arithmetic in GF(p^u) with an explicit irreducible modulus.

Elements are represented by integer *codes* in ``[0, p^u)``: the code of an
element with coefficient vector ``(c_0, ..., c_{u-1})`` (``c_0`` the constant
term) is ``sum(c_i * p**i)``.  For prime fields the code is simply the
residue, so codes and ordinary integers mod p coincide.  Codes make equality
structural and let matrices live in plain numpy integer arrays.

Prime fields use direct modular arithmetic (vectorizable with ``%``);
extension fields use q-by-q lookup tables built once at construction, which
is exact and fast for the small orders this library targets.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import DegreeMismatch, FieldMismatch, NonPrimeP, ReducibleModulus, ZeroInverse

CODE_DTYPE = np.int16


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


# --- polynomial helpers over Z_p (coefficient lists, constant term first) ---

def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(out)


def _poly_mod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    # m must be monic
    a = _poly_trim(list(a))
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        shift = len(a) - 1 - dm
        factor = a[-1]
        for i in range(len(m)):
            a[shift + i] = (a[shift + i] - factor * m[i]) % p
        a = _poly_trim(a)
    return a


def _monic_polys(degree: int, p: int) -> Iterable[list[int]]:
    # all monic polynomials of exactly the given degree
    for packed in range(p**degree):
        coeffs = []
        v = packed
        for _ in range(degree):
            coeffs.append(v % p)
            v //= p
        coeffs.append(1)
        yield coeffs


def _is_irreducible(modulus: Sequence[int], p: int) -> bool:
    u = len(modulus) - 1
    for d in range(1, u // 2 + 1):
        for cand in _monic_polys(d, p):
            if not _poly_mod(modulus, cand, p):
                return False
    return True


class Field:
    """GF(p^u) defined by characteristic ``p``, degree ``u`` and a modulus.

    The modulus is a monic degree-u coefficient list (constant term first),
    required exactly when ``u > 1``; it is verified irreducible by exhaustive
    factor search.  Instances are immutable and safe to share.
    """

    def __init__(self, p: int, u: int = 1, modulus: Sequence[int] | None = None):
        if not _is_prime(p):
            raise NonPrimeP(f"characteristic {p} is not prime")
        if u < 1:
            raise DegreeMismatch(f"extension degree must be >= 1, got {u}")
        if u == 1:
            if modulus is not None:
                raise DegreeMismatch("modulus must be omitted for prime fields")
            self.modulus: tuple[int, ...] | None = None
        else:
            if modulus is None:
                raise DegreeMismatch(f"degree-{u} extension requires a modulus")
            mod = [c % p for c in modulus]
            if len(mod) != u + 1:
                raise DegreeMismatch(
                    f"modulus must list {u + 1} coefficients (constant term first), got {len(mod)}"
                )
            if mod[-1] != 1:
                raise DegreeMismatch("modulus must be monic")
            if not _is_irreducible(mod, p):
                raise ReducibleModulus(f"modulus {mod} is reducible over Z_{p}")
            self.modulus = tuple(mod)
        self.p = p
        self.u = u
        self.q = p**u
        self.prime = u == 1
        if not self.prime:
            if self.q > 256:
                raise DegreeMismatch(f"extension order {self.q} exceeds the supported table size")
            self._build_tables()

    # -- construction of extension-field tables --

    def _build_tables(self) -> None:
        p, u, q = self.p, self.u, self.q
        powers = p ** np.arange(u, dtype=np.int64)
        coeffs = (np.arange(q)[:, None] // powers[None, :]) % p  # (q, u)
        self._coeffs = coeffs.astype(CODE_DTYPE)
        self.add_table = (((coeffs[:, None, :] + coeffs[None, :, :]) % p) @ powers).astype(CODE_DTYPE)
        self.neg_table = (((-coeffs) % p) @ powers).astype(CODE_DTYPE)
        mul = np.zeros((q, q), dtype=CODE_DTYPE)
        mod = list(self.modulus)  # type: ignore[arg-type]
        for a in range(q):
            pa = _poly_trim([int(c) for c in coeffs[a]])
            for b in range(a, q):
                pb = [int(c) for c in coeffs[b]]
                r = _poly_mod(_poly_mul(pa, pb, p), mod, p)
                code = sum(c * p**i for i, c in enumerate(r))
                mul[a, b] = code
                mul[b, a] = code
        self.mul_table = mul
        inv = np.zeros(q, dtype=CODE_DTYPE)
        for a in range(1, q):
            hits = np.nonzero(mul[a] == 1)[0]
            inv[a] = hits[0]
        self.inv_table = inv
        self.sub_table = self.add_table[:, self.neg_table]

    # -- identity / hashing --

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Field)
            and self.p == other.p
            and self.u == other.u
            and self.modulus == other.modulus
        )

    def __hash__(self) -> int:
        return hash((self.p, self.u, self.modulus))

    def __repr__(self) -> str:
        if self.prime:
            return f"Field(Z_{self.p})"
        return f"Field(GF({self.p}^{self.u}), modulus={list(self.modulus)})"  # type: ignore[arg-type]

    # -- scalar operations (codes in, codes out) --

    def check(self, a: int) -> int:
        a = int(a)
        if self.prime:
            return a % self.p
        if not 0 <= a < self.q:
            raise FieldMismatch(f"code {a} out of range for {self!r}")
        return a

    def add(self, a: int, b: int) -> int:
        if self.prime:
            return (a + b) % self.p
        return int(self.add_table[self.check(a), self.check(b)])

    def sub(self, a: int, b: int) -> int:
        if self.prime:
            return (a - b) % self.p
        return int(self.sub_table[self.check(a), self.check(b)])

    def mul(self, a: int, b: int) -> int:
        if self.prime:
            return (a * b) % self.p
        return int(self.mul_table[self.check(a), self.check(b)])

    def neg(self, a: int) -> int:
        if self.prime:
            return (-a) % self.p
        return int(self.neg_table[self.check(a)])

    def inv(self, a: int) -> int:
        a = self.check(a)
        if a == 0:
            raise ZeroInverse("zero has no multiplicative inverse")
        if self.prime:
            return pow(a, self.p - 2, self.p)
        return int(self.inv_table[a])

    def pow(self, a: int, k: int) -> int:
        a = self.check(a)
        if k < 0:
            a, k = self.inv(a), -k
        out = 1
        while k:
            if k & 1:
                out = self.mul(out, a)
            a = self.mul(a, a)
            k >>= 1
        return out

    # -- element views --

    def elements(self) -> list[int]:
        """All codes, zero first, in ascending code order."""
        return list(range(self.q))

    def nonzero_elements(self) -> list[int]:
        return list(range(1, self.q))

    def coeffs(self, a: int) -> tuple[int, ...]:
        """Coefficient vector (constant term first) of an element code."""
        a = self.check(a)
        if self.prime:
            return (a,)
        return tuple(int(c) for c in self._coeffs[a])

    def from_coeffs(self, coeffs: Sequence[int]) -> int:
        if len(coeffs) != self.u:
            raise FieldMismatch(f"expected {self.u} coefficients, got {len(coeffs)}")
        return sum((int(c) % self.p) * self.p**i for i, c in enumerate(coeffs))

    def format_element(self, a: int) -> str:
        a = self.check(a)
        if self.prime:
            return str(a)
        terms = []
        for i, c in enumerate(self.coeffs(a)):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                var = "a" if i == 1 else f"a^{i}"
                terms.append(var if c == 1 else f"{c}*{var}")
        return "+".join(reversed(terms)) if terms else "0"

    # -- vectorized kernels on raw code arrays --

    def add_arr(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        if self.prime:
            return (x + y) % self.p
        return self.add_table[x, y]

    def sub_arr(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        if self.prime:
            return (x - y) % self.p
        return self.sub_table[x, y]

    def mul_arr(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        if self.prime:
            return (x * y.astype(np.int64)) % self.p
        return self.mul_table[x, y]

    def neg_arr(self, x: np.ndarray) -> np.ndarray:
        if self.prime:
            return (-x) % self.p
        return self.neg_table[x]

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Exact product of two 2-D code arrays."""
        if a.shape[1] != b.shape[0]:
            raise FieldMismatch(f"inner dimensions differ: {a.shape} @ {b.shape}")
        if self.prime:
            return ((a.astype(np.int64) @ b.astype(np.int64)) % self.p).astype(CODE_DTYPE)
        out = np.zeros((a.shape[0], b.shape[1]), dtype=CODE_DTYPE)
        for k in range(a.shape[1]):
            out = self.add_table[out, self.mul_table[a[:, k][:, None], b[k, :][None, :]]]
        return out

    # -- JSON --

    def element_to_json(self, a: int) -> int | list[int]:
        if self.prime:
            return int(self.check(a))
        return [int(c) for c in self.coeffs(a)]

    def element_from_json(self, obj: int | Sequence[int]) -> int:
        if isinstance(obj, (list, tuple)):
            return self.from_coeffs(obj)
        return self.check(int(obj))

    def to_json(self) -> dict:
        doc: dict = {"p": self.p, "u": self.u}
        if self.modulus is not None:
            doc["modulus"] = list(self.modulus)
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "Field":
        return cls(int(doc["p"]), int(doc.get("u", 1)), doc.get("modulus"))


def make_field(p: int, u: int = 1, modulus: Sequence[int] | None = None) -> Field:
    """Validated field constructor; see :class:`Field`."""
    return Field(p, u, modulus)
