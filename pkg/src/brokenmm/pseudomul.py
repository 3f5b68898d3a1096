"""Broken ("opportunistic") Strassen recursion.

One step multiplies 2x2 block matrices with 6 block products and 14 block
additions, returning the ordinary product except that the ``A11 B11`` summand
of ``C11`` is missing.  The scheme is Winograd's variant of Strassen applied to
``A Q`` and ``Q B`` (``Q`` swaps the two halves of the inner index); under that
swap the Winograd product ``A~12 B~21`` becomes exactly ``A11 B11`` and feeds
only ``C11``, so it is simply not computed.

Iterating for ``s`` levels over ``b x b`` base blocks yields the pseudo-product
``C[x][y] = sum over z with x' | y' | z' == 1...1 of A[x][z] B[z][y]`` where
``u' = u // b`` read as an s-bit vector.

The recursion is evaluated level-synchronously: every level stacks the six
sub-problems of each pending problem along a leading batch axis, so the whole
tree costs ``s`` vectorised split passes, one batched base multiply and ``s``
combine passes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Ring",
    "GF2",
    "IntModRing",
    "INT64",
    "PseudoParams",
    "CounterReport",
    "broken_step_2x2",
    "triple_survives",
    "survivor_mask",
    "pseudo_product_oracle",
    "pseudo_product",
    "pseudo_product_bitplanes",
]

MAX_DEPTH = 40


# -- rings -----------------------------------------------------------------

class Ring:
    """Elementwise ring operations on numpy arrays plus a (batched) matrix product.

    Elements are stored as unsigned integers; every ring here is a quotient of
    the integers mod 2^64, so ``coerce`` of a wrapped ``uint64`` result is exact.
    """

    name = "ring"
    dtype: np.dtype

    def coerce(self, a) -> np.ndarray:
        raise NotImplementedError

    def zeros(self, shape) -> np.ndarray:
        return np.zeros(shape, dtype=self.dtype)

    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        raise NotImplementedError

    def matmul(self, a, b):
        raise NotImplementedError

    def __repr__(self):
        return f"<{self.name}>"


class _GF2(Ring):
    name = "GF(2)"
    dtype = np.dtype(np.uint8)

    def coerce(self, a):
        return (np.asarray(a) & 1).astype(np.uint8)

    def add(self, a, b):
        return a ^ b

    sub = add

    def matmul(self, a, b):
        if a.shape[-1] == 1:
            return a * b
        # float32 BLAS is exact while inner sums stay below 2^24
        prod = np.matmul(a.astype(np.float32), b.astype(np.float32))
        return (prod.astype(np.int64) & 1).astype(np.uint8)


class IntModRing(Ring):
    """Integers modulo ``2**bits`` (``bits <= 64``)."""

    dtype = np.dtype(np.uint64)

    def __init__(self, bits: int = 64):
        if not 1 <= bits <= 64:
            raise ValueError("bits must lie in 1..64")
        self.bits = bits
        self.name = f"Z/2^{bits}"
        self._mask = np.uint64((1 << bits) - 1)

    def coerce(self, a):
        arr = np.asarray(a)
        if arr.dtype.kind in "ib":
            # negative inputs wrap to their residue mod 2^64
            arr = arr.astype(np.int64)
        return arr.astype(np.uint64) & self._mask

    def add(self, a, b):
        return (a + b) & self._mask

    def sub(self, a, b):
        return (a - b) & self._mask

    def matmul(self, a, b):
        if a.shape[-1] == 1:
            return (a * b) & self._mask
        return np.matmul(a, b) & self._mask


GF2 = _GF2()
INT64 = IntModRing(64)


# -- parameters and counters -----------------------------------------------

@dataclass(frozen=True)
class PseudoParams:
    """Recursion depth ``s`` and base block size ``b``; the operand size is ``m = b * 2**s``."""

    s: int
    b: int

    def __post_init__(self):
        if not isinstance(self.s, (int, np.integer)) or not 0 <= self.s <= MAX_DEPTH:
            raise ValueError(f"s must be an integer in 0..{MAX_DEPTH}, got {self.s!r}")
        if not isinstance(self.b, (int, np.integer)) or self.b < 1:
            raise ValueError(f"b must be a positive integer, got {self.b!r}")
        object.__setattr__(self, "s", int(self.s))
        object.__setattr__(self, "b", int(self.b))

    @property
    def m(self) -> int:
        return self.b << self.s


@dataclass
class CounterReport:
    """Work done by one pseudo-product, in units of ``b x b`` blocks."""

    base_mults: int = 0
    block_adds: int = 0

    def __add__(self, other: "CounterReport") -> "CounterReport":
        return CounterReport(self.base_mults + other.base_mults,
                             self.block_adds + other.block_adds)

    @staticmethod
    def expected(s: int) -> "CounterReport":
        return CounterReport(6 ** s, 7 * (6 ** s - 4 ** s))


# -- one broken step -------------------------------------------------------

def _quadrants(x):
    h = x.shape[-1] // 2
    return x[..., :h, :h], x[..., :h, h:], x[..., h:, :h], x[..., h:, h:]


def _split_left(a, ring):
    """Six left operands of the broken step, stacked on a new axis 1 (4 additions)."""
    a11, a12, a21, a22 = _quadrants(a)
    s1 = ring.add(a22, a21)
    s2 = ring.sub(s1, a12)
    s3 = ring.sub(a12, a22)
    s4 = ring.sub(a11, s2)
    return np.stack([a12, s4, a21, s1, s2, s3], axis=1)


def _split_right(b, ring):
    """Six right operands of the broken step, stacked on a new axis 1 (4 additions)."""
    b11, b12, b21, b22 = _quadrants(b)
    t1 = ring.sub(b22, b21)
    t2 = ring.sub(b12, t1)
    t3 = ring.sub(b12, b22)
    t4 = ring.sub(t2, b11)
    return np.stack([b21, b12, t4, t1, t2, t3], axis=1)


def _combine(prods, ring):
    """Assemble the 2x2 block result from products stacked on axis 1 (6 additions)."""
    m1, m3, m4, m5, m6, m7 = (prods[:, i] for i in range(6))
    u2 = ring.add(m1, m6)
    u3 = ring.add(u2, m7)
    u4 = ring.add(u2, m5)
    h = m1.shape[-1]
    out = np.empty(m1.shape[:-2] + (2 * h, 2 * h), dtype=m1.dtype)
    out[..., :h, :h] = m1
    out[..., :h, h:] = ring.add(u4, m3)
    out[..., h:, :h] = ring.sub(u3, m4)
    out[..., h:, h:] = ring.add(u3, m5)
    return out


def _as_square(x, name):
    x = np.asarray(x)
    if x.ndim < 2 or x.shape[-1] != x.shape[-2]:
        raise ValueError(f"{name} must be square, got shape {x.shape}")
    return x


def broken_step_2x2(A, B, ring: Ring = INT64):
    """One broken step on ``A``, ``B`` viewed as 2x2 block matrices.

    Returns ``(C, CounterReport)``; block products are exact ring products,
    so the report always reads 6 multiplications and 14 additions.
    """
    A = ring.coerce(_as_square(A, "A"))
    B = ring.coerce(_as_square(B, "B"))
    n = A.shape[-1]
    if B.shape[-1] != n or n % 2:
        raise ValueError(f"need conformable even-sized operands, got {A.shape} and {B.shape}")
    left = _split_left(A[None], ring)
    right = _split_right(B[None], ring)
    prods = ring.matmul(left, right)
    return _combine(prods, ring)[0], CounterReport(base_mults=6, block_adds=14)


# -- surviving triples -----------------------------------------------------

def _check_index(u: int, m: int) -> None:
    if not 0 <= u < m:
        raise IndexError(f"index {u} outside [0, {m})")


def triple_survives(x: int, y: int, z: int, p: PseudoParams) -> bool:
    """Whether the summand ``A[x][z] B[z][y]`` is kept by the depth-``s`` recursion.

    Each index splits as ``(u // b, u % b)``; the first part, read as ``s`` bits
    with the most significant bit picking the top-level half, must OR to all-ones.
    """
    m = p.m
    for u in (x, y, z):
        _check_index(u, m)
    full = (1 << p.s) - 1
    return ((x // p.b) | (y // p.b) | (z // p.b)) == full


def survivor_mask(p: PseudoParams) -> np.ndarray:
    """Boolean array ``mask[x, y, z]`` of all surviving triples (``m**3`` entries)."""
    hi = np.arange(p.m) // p.b
    full = (1 << p.s) - 1
    return (hi[:, None, None] | hi[None, :, None] | hi[None, None, :]) == full


def pseudo_product_oracle(A, B, p: PseudoParams, ring: Ring = INT64) -> np.ndarray:
    """Direct O(m^3) evaluation of the pseudo-product from the triple predicate."""
    A = ring.coerce(_as_square(A, "A"))
    B = ring.coerce(_as_square(B, "B"))
    m = p.m
    if A.shape != (m, m) or B.shape != (m, m):
        raise ValueError(f"operands must be {m}x{m} for s={p.s}, b={p.b}")
    hi = np.arange(m) // p.b
    full = (1 << p.s) - 1
    a64 = A.astype(np.uint64)
    b64 = B.astype(np.uint64)
    out = np.empty((m, m), dtype=np.uint64)
    for x in range(m):
        keep = ((hi[x] | hi[None, :] | hi[:, None]) == full)  # keep[z, y]
        terms = a64[x][:, None] * b64 * keep  # wraps mod 2^64
        out[x] = terms.sum(axis=0, dtype=np.uint64)
    return ring.coerce(out)


# -- iterated pseudo-product -----------------------------------------------

def _run(A, B, p: PseudoParams, ring: Ring):
    counters = CounterReport()
    a, b = A[None], B[None]
    size = p.m
    for _ in range(p.s):
        size //= 2
        blocks = (size // p.b) ** 2
        a = _split_left(a, ring)
        b = _split_right(b, ring)
        batch = a.shape[0]
        a = a.reshape((batch * 6,) + a.shape[2:])
        b = b.reshape((batch * 6,) + b.shape[2:])
        counters.block_adds += 8 * batch * blocks
    c = ring.matmul(a, b)
    counters.base_mults += c.shape[0]
    size = p.b
    for _ in range(p.s):
        blocks = (size // p.b) ** 2
        batch = c.shape[0] // 6
        c = _combine(c.reshape((batch, 6) + c.shape[1:]), ring)
        counters.block_adds += 6 * batch * blocks
        size *= 2
    return c[0], counters


def pseudo_product(A, B, p: PseudoParams, ring: Ring = GF2):
    """Compute ``A (x) B`` by ``s`` broken steps over ``b x b`` blocks.

    Returns ``(C, CounterReport)`` with ``base_mults == 6**s`` and
    ``block_adds == 7 * (6**s - 4**s)``.
    """
    A = ring.coerce(_as_square(A, "A"))
    B = ring.coerce(_as_square(B, "B"))
    m = p.m
    if A.shape != (m, m) or B.shape != (m, m):
        raise ValueError(f"operands must be {m}x{m} for s={p.s}, b={p.b}; "
                         f"got {A.shape} and {B.shape}")
    return _run(A, B, p, ring)


def pseudo_product_bitplanes(A, planes, p: PseudoParams):
    """GF(2) pseudo-products of one left operand with a stack of right-hand bit-planes.

    ``planes`` has shape ``(L, m, m)``; plane ``l`` of the result is
    ``A (x) planes[l]``.  The recursion tree is shared, so the counters match a
    single pseudo-product (each base multiply handles all planes at once).
    """
    A = GF2.coerce(_as_square(A, "A"))
    planes = GF2.coerce(np.asarray(planes))
    m = p.m
    if A.shape != (m, m):
        raise ValueError(f"left operand must be {m}x{m}, got {A.shape}")
    if planes.ndim != 3 or planes.shape[1:] != (m, m):
        raise ValueError(f"planes must have shape (L, {m}, {m}), got {planes.shape}")
    return _run(A[None], planes, p, GF2)
