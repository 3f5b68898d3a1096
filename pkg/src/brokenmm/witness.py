"""Witness matrices for Boolean products.

A single estimate lifts the inputs exactly like the Boolean sketch, but the
right operand carries the 1-based inner index ``f3(z) + 1`` of each surviving
term, split into ``L = bit_length(d3)`` GF(2) bit-planes.  Where one term
survives alone the XOR of the planes decodes to that index; collisions decode
to garbage and are dropped by the explicit ``A[i][k] B[k][j]`` check, so every
reported witness is valid.

:func:`wbmm` sweeps the depth ``s`` from 0 to ``s_max`` with ``20 * 4^(s_max - s)``
estimates per depth and then fills the remaining entries by scanning the inner
index in a random order.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from . import analysis
from .gfmat import BitMatrix, InstanceStats, bool_mul_naive
from .pseudomul import CounterReport, PseudoParams, pseudo_product_bitplanes
from .sketch import SketchConfig, default_delta, draw_sample_maps, make_rng, run_sketch, bmm

__all__ = [
    "WitnessMatrix",
    "WBMMResult",
    "witness_estimate",
    "witness_trial",
    "wbmm",
    "wbmm_run",
    "fallback_scan",
    "fallback_scan_cost",
    "format_wmat",
    "parse_wmat",
]

SCAN_CHUNK = 4096


class WitnessMatrix:
    """``d1 x d2`` integer matrix; 0 means no witness, otherwise a 1-based inner index."""

    __slots__ = ("data",)

    def __init__(self, data):
        arr = np.array(data, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("witness matrix must be a non-empty 2-d array")
        if (arr < 0).any():
            raise ValueError("witness indices must be non-negative")
        self.data = arr

    @classmethod
    def empty(cls, d1: int, d2: int) -> "WitnessMatrix":
        return cls(np.zeros((d1, d2), dtype=np.int64))

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def support(self) -> np.ndarray:
        return self.data != 0

    def invalid_mask(self, A: BitMatrix, B: BitMatrix) -> np.ndarray:
        """Entries holding an index that is out of range or not a witness."""
        stats = InstanceStats.of(A, B)
        if self.shape != (stats.d1, stats.d2):
            raise ValueError(f"witness shape {self.shape} does not match {stats.d1}x{stats.d2}")
        k = self.data
        bad = k > stats.d3
        i, j = np.nonzero((k > 0) & ~bad)
        kk = k[i, j] - 1
        ok = A.to_array()[i, kk] & B.to_array()[kk, j]
        bad[i[ok == 0], j[ok == 0]] = True
        return bad

    def violations(self, A: BitMatrix, B: BitMatrix) -> int:
        return int(self.invalid_mask(A, B).sum())

    def is_valid(self, A: BitMatrix, B: BitMatrix) -> bool:
        return self.violations(A, B) == 0

    def is_complete(self, C: BitMatrix) -> bool:
        """Non-empty exactly where ``C`` has a 1."""
        return bool(np.array_equal(self.support(), C.to_array().astype(bool)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, WitnessMatrix):
            return NotImplemented
        return bool(np.array_equal(self.data, other.data))

    def __repr__(self) -> str:
        return f"WitnessMatrix({self.shape[0]}x{self.shape[1]}, set={int(self.support().sum())})"


# -- WMAT/1 text format ----------------------------------------------------

_DIMS = re.compile(r"([1-9][0-9]*) ([1-9][0-9]*)")
_ROW = re.compile(r"(0|[1-9][0-9]*)( (0|[1-9][0-9]*))*")


def format_wmat(W: WitnessMatrix) -> str:
    d1, d2 = W.shape
    lines = ["WMAT 1", f"{d1} {d2}"]
    lines += [" ".join(str(int(v)) for v in row) for row in W.data]
    return "\n".join(lines) + "\n"


def parse_wmat(text: str) -> WitnessMatrix:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) < 2 or lines[0] != "WMAT 1":
        raise ValueError("missing 'WMAT 1' header")
    dims = _DIMS.fullmatch(lines[1])
    if dims is None:
        raise ValueError(f"bad dimension line {lines[1]!r}")
    d1, d2 = int(dims.group(1)), int(dims.group(2))
    body = lines[2:]
    if len(body) != d1:
        raise ValueError(f"expected {d1} rows, found {len(body)}")
    rows = []
    for i, line in enumerate(body):
        if not _ROW.fullmatch(line):
            raise ValueError(f"row {i} is not a list of non-negative integers")
        vals = [int(v) for v in line.split(" ")]
        if len(vals) != d2:
            raise ValueError(f"row {i} has {len(vals)} entries, expected {d2}")
        rows.append(vals)
    return WitnessMatrix(rows)


# -- one estimate ----------------------------------------------------------

def witness_trial(A: BitMatrix, B: BitMatrix, p: PseudoParams, seed) -> tuple[WitnessMatrix, CounterReport]:
    stats = InstanceStats.of(A, B)
    maps = draw_sample_maps(stats, p, seed)
    a = A.to_array()
    bm = B.to_array()
    a_bar = a[np.ix_(maps.f1, maps.f3)]
    payload = ((maps.f3 + 1)[:, None] * (bm[np.ix_(maps.f3, maps.f2)] & maps.D.to_array())).astype(np.int64)
    nplanes = stats.d3.bit_length()
    shifts = np.arange(nplanes, dtype=np.int64)[:, None, None]
    planes = ((payload[None] >> shifts) & 1).astype(np.uint8)
    out, counters = pseudo_product_bitplanes(a_bar, planes, p)
    k = (out.astype(np.int64) << shifts).sum(axis=0)

    W = np.zeros((stats.d1, stats.d2), dtype=np.int64)
    xs, ys = np.nonzero((k >= 1) & (k <= stats.d3))
    ks = k[xs, ys]
    i, j = maps.f1[xs], maps.f2[ys]
    ok = (a[i, ks - 1] & bm[ks - 1, j]).astype(bool)
    # duplicate (i, j) targets: the last assignment wins, all of them are valid
    W[i[ok], j[ok]] = ks[ok]
    return WitnessMatrix(W), counters


def witness_estimate(A: BitMatrix, B: BitMatrix, p: PseudoParams, seed) -> WitnessMatrix:
    """One witness estimate at depth ``p.s``; every non-empty entry is a valid witness."""
    return witness_trial(A, B, p, seed)[0]


# -- fallback scan ---------------------------------------------------------

def fallback_scan(A: BitMatrix, B: BitMatrix, W: WitnessMatrix, c_tilde: BitMatrix,
                  perm: np.ndarray) -> tuple[WitnessMatrix, int]:
    """Fill entries with ``c_tilde == 1`` and no witness by scanning ``k`` in ``perm`` order.

    Returns the completed matrix and the number of ``(i, j, k)`` probes made.
    """
    data = W.data.copy()
    need_i, need_j = np.nonzero(c_tilde.to_array().astype(bool) & (data == 0))
    if need_i.size == 0:
        return WitnessMatrix(data), 0
    a_perm = A.to_array()[:, perm].astype(bool)
    b_perm = B.to_array()[perm, :].astype(bool)
    d3 = len(perm)
    probes = 0
    for start in range(0, need_i.size, SCAN_CHUNK):
        i = need_i[start:start + SCAN_CHUNK]
        j = need_j[start:start + SCAN_CHUNK]
        hits = a_perm[i] & b_perm[:, j].T
        found = hits.any(axis=1)
        first = hits.argmax(axis=1)
        probes += int(np.where(found, first + 1, d3).sum())
        data[i[found], j[found]] = perm[first[found]] + 1
    return WitnessMatrix(data), probes


def fallback_scan_cost(A: BitMatrix, B: BitMatrix, W_partial: WitnessMatrix, seed,
                       c_tilde: BitMatrix | None = None) -> int:
    """Probe count of the fallback scan with a permutation drawn from ``seed``.

    ``c_tilde`` defaults to the exact Boolean product.
    """
    if c_tilde is None:
        c_tilde = bool_mul_naive(A, B)
    perm = make_rng(seed).permutation(A.cols)
    return fallback_scan(A, B, W_partial, c_tilde, perm)[1]


# -- full algorithm --------------------------------------------------------

@dataclass
class WBMMResult:
    witness: WitnessMatrix
    c_tilde: BitMatrix
    s_max: int
    b: int
    trials: dict[int, int] = field(default_factory=dict)
    counters: CounterReport = field(default_factory=CounterReport)
    probes: int = 0
    partial: WitnessMatrix | None = None

    @property
    def estimated_entries(self) -> int:
        return int(self.partial.support().sum()) if self.partial is not None else 0


def _boolean_stage(A, B, algo, seed, b, delta):
    stats = InstanceStats.of(A, B)
    if algo == "naive":
        return bool_mul_naive(A, B)
    if algo == "sketch":
        s = analysis.select_s(stats, b, delta)
        return run_sketch(A, B, SketchConfig(PseudoParams(s, b), seed, delta)).product
    if algo == "auto":
        return bmm(A, B, seed, delta, b)
    raise ValueError(f"unknown Boolean stage {algo!r}")


def wbmm_run(A: BitMatrix, B: BitMatrix, seed: int = 0, b: int = 64, delta: float | None = None,
             algo: str = "auto") -> WBMMResult:
    """Witness matrix for ``A B`` plus bookkeeping (trial counts, counters, probes).

    ``algo`` selects how the Boolean product is obtained: ``"auto"`` (the
    :func:`bmm` policy), ``"sketch"`` (always the randomized path) or ``"naive"``.
    """
    stats = InstanceStats.of(A, B)
    if delta is None:
        delta = default_delta(stats)
    root = np.random.SeedSequence(int(seed))
    bool_seed, trial_root, perm_seed = root.spawn(3)
    bool_key = int(bool_seed.generate_state(2, np.uint64)[0])

    c_tilde = _boolean_stage(A, B, algo, bool_key, b, delta)
    top = analysis.s_max(stats, b)
    result = WBMMResult(WitnessMatrix.empty(stats.d1, stats.d2), c_tilde, top, b)
    data = result.witness.data
    for s, t in analysis.trial_schedule(top).items():
        p = PseudoParams(s, b)
        result.trials[s] = t
        for child in trial_root.spawn(t):
            W, counters = witness_trial(A, B, p, child)
            result.counters = result.counters + counters
            hit = W.data != 0
            data[hit] = W.data[hit]
    result.partial = WitnessMatrix(data)
    perm = make_rng(perm_seed).permutation(stats.d3)
    result.witness, result.probes = fallback_scan(A, B, result.partial, c_tilde, perm)
    return result


def wbmm(A: BitMatrix, B: BitMatrix, seed: int = 0, b: int = 64, delta: float | None = None,
         algo: str = "auto") -> WitnessMatrix:
    """Witness matrix for ``A B``; complete and valid whenever the Boolean stage is exact."""
    return wbmm_run(A, B, seed, b, delta, algo).witness
