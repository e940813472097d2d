"""Dense GF(2) linear algebra on bit-packed rows.

`Gf2Matrix` stores rows as uint64 words (64 columns per word, column c
at bit ``c & 63`` of word ``c >> 6``).  Matrices are treated as
immutable values once built; operations that need scratch space work on
private copies, so instances can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels

UNIQUE = "unique"
UNDERDETERMINED = "underdetermined"
INCONSISTENT = "inconsistent"

# A solve on `cols + _SLACK_ROWS` rows is attempted before falling back to
# the full system; a unique candidate is then verified against the rows
# that were left out, so the classification never changes.
_SLACK_ROWS = 64


def pack_bits(bits) -> np.ndarray:
    """Pack a 0/1 vector (or row-matrix, axis=-1) into little-endian uint64 words."""
    arr = np.ascontiguousarray(bits, dtype=np.uint8)
    if arr.ndim == 1:
        n = arr.shape[0]
        W = max((n + 63) // 64, 1)
        by = np.packbits(arr, bitorder="little")
        out = np.zeros(W * 8, dtype=np.uint8)
        out[: by.shape[0]] = by
        return out.view("<u8")
    n = arr.shape[1]
    W = max((n + 63) // 64, 1)
    by = np.packbits(arr, axis=1, bitorder="little")
    out = np.zeros((arr.shape[0], W * 8), dtype=np.uint8)
    out[:, : by.shape[1]] = by
    return out.view("<u8")


def unpack_bits(words: np.ndarray, n: int) -> np.ndarray:
    """Inverse of :func:`pack_bits` (1-D or 2-D), yielding n columns."""
    by = np.ascontiguousarray(words, dtype="<u8").view(np.uint8)
    if words.ndim == 1:
        return np.unpackbits(by, bitorder="little")[:n].astype(np.uint8)
    return np.unpackbits(by, axis=1, bitorder="little")[:, :n].astype(np.uint8)


class SeededRng:
    """Deterministic bit source; equal (seed, key) gives equal streams.

    Per-trial generators are derived with :meth:`derive`, so trial t of a
    run seeded with s always sees the stream of ``SeededRng(s).derive(t)``
    no matter how trials are scheduled.
    """

    def __init__(self, seed: int, key: tuple = ()):
        self.seed = int(seed)
        self.key = tuple(int(k) for k in key)
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=self.key)
        self.generator = np.random.Generator(np.random.PCG64(ss))

    def derive(self, index: int) -> "SeededRng":
        return SeededRng(self.seed, self.key + (index,))

    def words(self, rows: int, nwords: int) -> np.ndarray:
        return self.generator.integers(
            0, np.iinfo(np.uint64).max, size=(rows, nwords),
            dtype=np.uint64, endpoint=True)

    def bits(self, n: int) -> np.ndarray:
        return self.generator.integers(0, 2, size=n, dtype=np.uint8)

    def bernoulli(self, p: float, n: int) -> np.ndarray:
        """n independent bits, each 1 with probability p."""
        if p <= 0.0:
            return np.zeros(n, dtype=np.uint8)
        if p >= 1.0:
            return np.ones(n, dtype=np.uint8)
        return (self.generator.random(n) < p).astype(np.uint8)

    def __repr__(self):
        return f"SeededRng(seed={self.seed}, key={self.key})"


@dataclass
class SolveResult:
    """Outcome of a linear solve: unique / underdetermined / inconsistent."""

    status: str
    x: np.ndarray | None = None

    @property
    def is_unique(self) -> bool:
        return self.status == UNIQUE


class Gf2Matrix:
    def __init__(self, rows: int, cols: int, words: np.ndarray | None = None):
        if rows < 0 or cols < 0:
            raise ValueError("negative dimensions")
        self.rows = rows
        self.cols = cols
        self.nwords = max((cols + 63) // 64, 1)
        if words is None:
            words = np.zeros((rows, self.nwords), dtype=np.uint64)
        else:
            words = np.ascontiguousarray(words, dtype=np.uint64)
            if words.shape != (rows, self.nwords):
                raise ValueError(
                    f"word storage {words.shape} does not match "
                    f"{rows}x{cols} -> ({rows}, {self.nwords})")
        self.words = words
        self._mask_tail()

    def _mask_tail(self):
        rem = self.cols % 64
        if rem and self.rows:
            self.words[:, -1] &= np.uint64((1 << rem) - 1)

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols)

    @classmethod
    def identity(cls, n):
        m = cls(n, n)
        idx = np.arange(n, dtype=np.int64)
        _kernels.set_bits(m.words, idx, idx)
        return m

    @classmethod
    def from_dense(cls, arr):
        arr = np.atleast_2d(np.asarray(arr, dtype=np.uint8))
        rows, cols = arr.shape
        return cls(rows, cols, pack_bits(arr & 1))

    def to_dense(self) -> np.ndarray:
        return unpack_bits(self.words, self.cols)

    def get(self, i: int, j: int) -> int:
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError((i, j))
        return int((self.words[i, j >> 6] >> np.uint64(j & 63)) & np.uint64(1))

    def take_rows(self, idx) -> "Gf2Matrix":
        idx = np.asarray(idx, dtype=np.int64)
        return Gf2Matrix(len(idx), self.cols, self.words[idx])

    def take_columns(self, idx) -> "Gf2Matrix":
        idx = np.asarray(idx, dtype=np.int64)
        if idx.size == 0:
            return Gf2Matrix(self.rows, 0)
        return Gf2Matrix(self.rows, len(idx),
                         _kernels.gather_columns(self.words, idx))

    def __eq__(self, other):
        return (isinstance(other, Gf2Matrix) and self.rows == other.rows
                and self.cols == other.cols
                and bool(np.array_equal(self.words, other.words)))

    def __repr__(self):
        return f"Gf2Matrix({self.rows}x{self.cols})"


def random_matrix(rows: int, cols: int, rng: SeededRng) -> Gf2Matrix:
    """Matrix of independent fair bits drawn from the rng stream."""
    if rows < 0 or cols < 0:
        raise ValueError("negative dimensions")
    m = Gf2Matrix(rows, cols, rng.words(rows, max((cols + 63) // 64, 1)))
    return m


def mat_vec(a: Gf2Matrix, x) -> np.ndarray:
    """XOR-accumulated product a*x; x is a 0/1 vector of length a.cols."""
    x = np.asarray(x, dtype=np.uint8)
    if x.shape != (a.cols,):
        raise ValueError(f"vector length {x.shape} != cols {a.cols}")
    if a.rows == 0:
        return np.zeros(0, dtype=np.uint8)
    return _kernels.matvec_bits(a.words, pack_bits(x))


def rank(a: Gf2Matrix) -> int:
    """Row rank over GF(2), by Gaussian elimination on a scratch copy."""
    if a.rows == 0 or a.cols == 0:
        return 0
    scratch = a.words.copy()
    dummy = np.zeros(a.rows, dtype=np.uint8)
    return int(_kernels.echelon(scratch, dummy, a.cols))


def _classify(scratch, b, ncols, nrows):
    rk = int(_kernels.echelon(scratch, b, ncols))
    # below the frontier every eliminated column is zero, so a set RHS bit
    # there witnesses rank(A|b) > rank(A)
    if rk < nrows and b[rk:].any():
        return SolveResult(INCONSISTENT), rk
    if rk < ncols:
        return SolveResult(UNDERDETERMINED), rk
    x = _kernels.back_substitute(scratch, b, ncols)
    return SolveResult(UNIQUE, unpack_bits(x, ncols)), rk


def solve(a: Gf2Matrix, b) -> SolveResult:
    """Solve a*x = b.

    Unique(x) iff rank(a) == a.cols and a*x = b; Inconsistent iff
    rank(a|b) > rank(a); Underdetermined otherwise.
    """
    b = np.asarray(b, dtype=np.uint8)
    if b.shape != (a.rows,):
        raise ValueError(f"rhs length {b.shape} != rows {a.rows}")
    if a.cols == 0:
        if b.any():
            return SolveResult(INCONSISTENT)
        return SolveResult(UNIQUE, np.zeros(0, dtype=np.uint8))
    if a.rows == 0:
        return SolveResult(UNDERDETERMINED)

    head = a.cols + _SLACK_ROWS
    if a.rows > head:
        res, _ = _classify(a.words[:head].copy(), b[:head].copy(), a.cols, head)
        if res.is_unique:
            tail = _kernels.matvec_bits(a.words[head:], pack_bits(res.x))
            if np.array_equal(tail, b[head:]):
                return res
            return SolveResult(INCONSISTENT)
        # the head slice was not conclusive; fall through to the full system

    res, _ = _classify(a.words.copy(), b.copy(), a.cols, a.rows)
    return res
