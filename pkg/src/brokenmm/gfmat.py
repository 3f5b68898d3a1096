"""Dense bit-packed Boolean / GF(2) matrices and exact multiplication kernels.

Rows are packed into little-endian ``uint64`` words, LSB first: bit ``j`` of a
row lives in word ``j // 64`` at bit position ``j % 64``.  Padding bits past
``cols`` in the last word of each row are always zero.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

WORD_BITS = 64

__all__ = [
    "WORD_BITS",
    "BitMatrix",
    "InstanceStats",
    "bool_mul_naive",
    "gf2_mul_naive",
    "gf2_mul_strassen",
    "bool_mul_strassen",
    "format_bmat",
    "parse_bmat",
    "bits_of",
]


def _stride(cols: int) -> int:
    return -(-cols // WORD_BITS)


def _pack(bits: np.ndarray) -> np.ndarray:
    rows, cols = bits.shape
    stride = _stride(cols)
    padded = np.zeros((rows, stride * WORD_BITS), dtype=np.uint8)
    padded[:, :cols] = bits
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64)


def _unpack(words: np.ndarray, cols: int) -> np.ndarray:
    as_bytes = np.ascontiguousarray(words.astype("<u8")).view(np.uint8)
    return np.unpackbits(as_bytes, axis=1, bitorder="little")[:, :cols]


class BitMatrix:
    """Immutable dense 0/1 matrix with word-packed rows."""

    __slots__ = ("rows", "cols", "words")

    def __init__(self, rows: int, cols: int, words: np.ndarray):
        if rows <= 0 or cols <= 0:
            raise ValueError(f"matrix dimensions must be positive, got {rows}x{cols}")
        words = np.array(words, dtype=np.uint64, copy=True)
        if words.shape != (rows, _stride(cols)):
            raise ValueError(f"word array shape {words.shape} does not fit {rows}x{cols}")
        tail = cols % WORD_BITS
        if tail:
            words[:, -1] &= np.uint64((1 << tail) - 1)
        words.flags.writeable = False
        self.rows = rows
        self.cols = cols
        self.words = words

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_array(cls, array) -> "BitMatrix":
        arr = np.asarray(array)
        if arr.ndim != 2:
            raise ValueError("expected a 2-d array")
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise ValueError("entries must be 0 or 1")
        bits = arr.astype(np.uint8)
        return cls(bits.shape[0], bits.shape[1], _pack(bits))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, np.zeros((rows, _stride(cols)), dtype=np.uint64))

    @classmethod
    def ones(cls, rows: int, cols: int) -> "BitMatrix":
        return cls.from_array(np.ones((rows, cols), dtype=np.uint8))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls.from_array(np.eye(n, dtype=np.uint8))

    @classmethod
    def random(cls, rows: int, cols: int, density: float = 0.5,
               rng: np.random.Generator | int | None = None) -> "BitMatrix":
        rng = np.random.default_rng(rng)
        return cls.from_array((rng.random((rows, cols)) < density).astype(np.uint8))

    @classmethod
    def from_rows(cls, rows: Sequence[str]) -> "BitMatrix":
        return cls.from_array(np.array([[int(ch) for ch in r] for r in rows], dtype=np.uint8))

    # -- access -----------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def stride(self) -> int:
        return self.words.shape[1]

    def to_array(self) -> np.ndarray:
        return _unpack(self.words, self.cols)

    def get(self, i: int, j: int) -> int:
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"({i}, {j}) out of range for {self.rows}x{self.cols}")
        return int((int(self.words[i, j // WORD_BITS]) >> (j % WORD_BITS)) & 1)

    def count(self) -> int:
        return int(np.unpackbits(self.words.view(np.uint8)).sum())

    def padding_is_zero(self) -> bool:
        tail = self.cols % WORD_BITS
        if not tail:
            return True
        return not np.any(self.words[:, -1] >> np.uint64(tail))

    def dominated_by(self, other: "BitMatrix") -> bool:
        """True when every 1 of ``self`` is also a 1 of ``other``."""
        _same_shape(self, other)
        return not np.any(self.words & ~other.words)

    def __and__(self, other: "BitMatrix") -> "BitMatrix":
        _same_shape(self, other)
        return BitMatrix(self.rows, self.cols, self.words & other.words)

    def __or__(self, other: "BitMatrix") -> "BitMatrix":
        _same_shape(self, other)
        return BitMatrix(self.rows, self.cols, self.words | other.words)

    def __xor__(self, other: "BitMatrix") -> "BitMatrix":
        _same_shape(self, other)
        return BitMatrix(self.rows, self.cols, self.words ^ other.words)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.words, other.words))

    def __hash__(self):
        return hash((self.rows, self.cols, self.words.tobytes()))

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols}, ones={self.count()})"


def _same_shape(a: BitMatrix, b: BitMatrix) -> None:
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")


def _check_inner(A: BitMatrix, B: BitMatrix) -> None:
    if A.cols != B.rows:
        raise ValueError(f"inner dimensions disagree: {A.rows}x{A.cols} times {B.rows}x{B.cols}")


@dataclass(frozen=True)
class InstanceStats:
    """Shape summary of a product of a d1 x d3 by a d3 x d2 matrix."""

    d1: int
    d2: int
    d3: int

    def __post_init__(self):
        for name in ("d1", "d2", "d3"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value <= 0:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
            object.__setattr__(self, name, int(value))

    @classmethod
    def of(cls, A: BitMatrix, B: BitMatrix) -> "InstanceStats":
        _check_inner(A, B)
        return cls(A.rows, B.cols, A.cols)

    @property
    def psi1(self) -> int:
        return self.d1 + self.d2 + self.d3

    @property
    def psi2(self) -> int:
        return self.d1 * self.d2 + self.d1 * self.d3 + self.d2 * self.d3

    @property
    def psi3(self) -> int:
        return self.d1 * self.d2 * self.d3


# -- exact kernels -------------------------------------------------------

def _row_select(A: BitMatrix, B: BitMatrix, op) -> BitMatrix:
    _check_inner(A, B)
    a_bits = A.to_array().astype(bool)
    out = np.zeros((A.rows, B.stride), dtype=np.uint64)
    for k in range(A.cols):
        hit = a_bits[:, k]
        if hit.any():
            out[hit] = op(out[hit], B.words[k])
    return BitMatrix(A.rows, B.cols, out)


def bool_mul_naive(A: BitMatrix, B: BitMatrix) -> BitMatrix:
    """Exact Boolean product: OR of the rows of ``B`` selected by each row of ``A``."""
    return _row_select(A, B, np.bitwise_or)


def gf2_mul_naive(A: BitMatrix, B: BitMatrix) -> BitMatrix:
    """Exact product over GF(2): XOR of the rows of ``B`` selected by each row of ``A``."""
    return _row_select(A, B, np.bitwise_xor)


def _strassen(a: np.ndarray, b: np.ndarray, base: int, base_mul, add, sub) -> np.ndarray:
    n = a.shape[0]
    if n <= base:
        return base_mul(a, b)
    h = n // 2
    a11, a12, a21, a22 = a[:h, :h], a[:h, h:], a[h:, :h], a[h:, h:]
    b11, b12, b21, b22 = b[:h, :h], b[:h, h:], b[h:, :h], b[h:, h:]
    rec = lambda x, y: _strassen(x, y, base, base_mul, add, sub)  # noqa: E731
    m1 = rec(add(a11, a22), add(b11, b22))
    m2 = rec(add(a21, a22), b11)
    m3 = rec(a11, sub(b12, b22))
    m4 = rec(a22, sub(b21, b11))
    m5 = rec(add(a11, a12), b22)
    m6 = rec(sub(a21, a11), add(b11, b12))
    m7 = rec(sub(a12, a22), add(b21, b22))
    out = np.empty((n, n), dtype=m1.dtype)
    out[:h, :h] = add(sub(add(m1, m4), m5), m7)
    out[:h, h:] = add(m3, m5)
    out[h:, :h] = add(m2, m4)
    out[h:, h:] = add(add(sub(m1, m2), m3), m6)
    return out


def _check_strassen_dims(A: BitMatrix, B: BitMatrix, base: int) -> None:
    if base <= 0:
        raise ValueError("base must be positive")
    n = A.rows
    if A.shape != (n, n) or B.shape != (n, n):
        raise ValueError("Strassen kernels need two square matrices of equal size")
    q, r = divmod(n, base)
    if r or q & (q - 1):
        raise ValueError(f"dimension {n} is not base * 2^t for base={base}")


def gf2_mul_strassen(A: BitMatrix, B: BitMatrix, base: int) -> BitMatrix:
    """Classical 7-product Strassen over GF(2), switching to :func:`gf2_mul_naive` at ``base``."""
    _check_strassen_dims(A, B, base)

    def base_mul(x, y):
        return gf2_mul_naive(BitMatrix.from_array(x), BitMatrix.from_array(y)).to_array()

    out = _strassen(A.to_array(), B.to_array(), base, base_mul,
                    np.bitwise_xor, np.bitwise_xor)
    return BitMatrix.from_array(out)


def bool_mul_strassen(A: BitMatrix, B: BitMatrix, base: int) -> BitMatrix:
    """Boolean product through integer Strassen: ``C[i][j] = 1`` iff the count is positive."""
    _check_strassen_dims(A, B, base)
    counts = _strassen(A.to_array().astype(np.int64), B.to_array().astype(np.int64), base,
                       np.matmul, np.add, np.subtract)
    return BitMatrix.from_array((counts > 0).astype(np.uint8))


# -- BMAT/1 text format ----------------------------------------------------

_DIMS = re.compile(r"([1-9][0-9]*) ([1-9][0-9]*)")
_BITS = re.compile(r"[01]*")


def format_bmat(M: BitMatrix) -> str:
    lines = ["BMAT 1", f"{M.rows} {M.cols}"]
    for row in M.to_array():
        lines.append("".join("1" if v else "0" for v in row))
    return "\n".join(lines) + "\n"


def _split_lines(text: str) -> list[str]:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return lines


def parse_bmat(text: str) -> BitMatrix:
    """Parse the strict ``BMAT 1`` text format; any deviation raises ``ValueError``."""
    lines = _split_lines(text)
    if len(lines) < 2 or lines[0] != "BMAT 1":
        raise ValueError("missing 'BMAT 1' header")
    dims = _DIMS.fullmatch(lines[1])
    if dims is None:
        raise ValueError(f"bad dimension line {lines[1]!r}")
    rows, cols = int(dims.group(1)), int(dims.group(2))
    body = lines[2:]
    if len(body) != rows:
        raise ValueError(f"expected {rows} rows, found {len(body)}")
    for i, line in enumerate(body):
        if len(line) != cols or not _BITS.fullmatch(line):
            raise ValueError(f"row {i} is not {cols} characters from {{0,1}}")
    bits = np.frombuffer("".join(body).encode("ascii"), dtype=np.uint8) - ord("0")
    return BitMatrix.from_array(bits.reshape(rows, cols))


def bits_of(rows: Iterable[Iterable[int]]) -> BitMatrix:
    """Shorthand used in tests and docs: ``bits_of([[1, 0], [0, 1]])``."""
    return BitMatrix.from_array(np.array([list(r) for r in rows], dtype=np.uint8))
