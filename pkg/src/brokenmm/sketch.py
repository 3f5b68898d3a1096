"""Randomized Boolean matrix product through a single GF(2) pseudo-product.

Both inputs are lifted into ``m x m`` matrices through random index maps
``f1, f2, f3``, the right operand is masked by a uniform random matrix ``D``,
one pseudo-product is taken over GF(2), and the result is projected back by
OR-ing over preimages.  Errors are one-sided: an output 1 is always a true 1.

Randomness comes from numpy's counter-based Philox generator keyed by the
seed.  Stream order: ``f1``, ``f2``, ``f3`` (``m`` draws each from
``Generator.integers``), then the ``m*m`` bits of ``D`` in row-major order.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import analysis
from .gfmat import BitMatrix, InstanceStats, bool_mul_naive
from .pseudomul import GF2, CounterReport, PseudoParams, pseudo_product

__all__ = [
    "SampleMaps",
    "SketchConfig",
    "SketchResult",
    "NAIVE_DIM",
    "make_rng",
    "draw_sample_maps",
    "draw_index_maps",
    "lift",
    "project",
    "run_sketch",
    "bmm_estimate",
    "bmm",
    "prefers_naive",
]

log = logging.getLogger(__name__)

NAIVE_DIM = 64
SEED_LIMIT = 1 << 64


def make_rng(seed) -> np.random.Generator:
    """Philox generator for a 64-bit seed, or for a ``SeedSequence`` child."""
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.Philox(seed))
    seed = int(seed)
    if not 0 <= seed < SEED_LIMIT:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return np.random.Generator(np.random.Philox(key=seed))


@dataclass(frozen=True)
class SampleMaps:
    f1: np.ndarray
    f2: np.ndarray
    f3: np.ndarray
    D: BitMatrix
    seed: object = None

    @property
    def m(self) -> int:
        return len(self.f1)


@dataclass(frozen=True)
class SketchConfig:
    params: PseudoParams
    seed: int = 0
    delta: float | None = None

    def __post_init__(self):
        if self.delta is not None and not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")


@dataclass(frozen=True)
class SketchResult:
    product: BitMatrix
    counters: CounterReport
    params: PseudoParams
    maps: SampleMaps


def _index_maps(rng: np.random.Generator, stats: InstanceStats, m: int):
    f1 = rng.integers(0, stats.d1, size=m)
    f2 = rng.integers(0, stats.d2, size=m)
    f3 = rng.integers(0, stats.d3, size=m)
    return f1, f2, f3


def draw_index_maps(stats: InstanceStats, m: int, seed) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Only ``f1, f2, f3``: the same values :func:`draw_sample_maps` produces, without ``D``."""
    return _index_maps(make_rng(seed), stats, m)


def draw_sample_maps(stats: InstanceStats, p: PseudoParams, seed) -> SampleMaps:
    m = p.m
    rng = make_rng(seed)
    f1, f2, f3 = _index_maps(rng, stats, m)
    D = rng.integers(0, 2, size=(m, m), dtype=np.uint8)
    return SampleMaps(f1, f2, f3, BitMatrix.from_array(D), seed)


def _check_maps(A: BitMatrix, B: BitMatrix, maps: SampleMaps) -> InstanceStats:
    stats = InstanceStats.of(A, B)
    m = maps.m
    if maps.D.shape != (m, m) or len(maps.f2) != m or len(maps.f3) != m:
        raise ValueError("sample maps disagree on m")
    for f, d, name in ((maps.f1, stats.d1, "f1"), (maps.f2, stats.d2, "f2"), (maps.f3, stats.d3, "f3")):
        if f.min() < 0 or f.max() >= d:
            raise ValueError(f"{name} has values outside [0, {d})")
    return stats


def _lift_arrays(A: BitMatrix, B: BitMatrix, maps: SampleMaps):
    _check_maps(A, B, maps)
    a_bar = A.to_array()[np.ix_(maps.f1, maps.f3)]
    b_bar = B.to_array()[np.ix_(maps.f3, maps.f2)] & maps.D.to_array()
    return a_bar, b_bar


def lift(A: BitMatrix, B: BitMatrix, maps: SampleMaps) -> tuple[BitMatrix, BitMatrix]:
    """``A_bar[x][z] = A[f1 x][f3 z]`` and ``B_bar[z][y] = B[f3 z][f2 y] & D[z][y]``."""
    a_bar, b_bar = _lift_arrays(A, B, maps)
    return BitMatrix.from_array(a_bar), BitMatrix.from_array(b_bar)


def _or_by_bucket(rows: np.ndarray, f: np.ndarray, d: int) -> np.ndarray:
    """OR together the rows sharing a bucket ``f[x]``; empty buckets give zero rows."""
    out = np.zeros((d,) + rows.shape[1:], dtype=bool)
    order = np.argsort(f, kind="stable")
    fs = f[order]
    starts = np.flatnonzero(np.r_[True, fs[1:] != fs[:-1]])
    out[fs[starts]] = np.logical_or.reduceat(rows[order], starts, axis=0)
    return out


def _project_array(c_bar: np.ndarray, maps: SampleMaps, stats: InstanceStats) -> np.ndarray:
    rows = _or_by_bucket(c_bar.astype(bool), maps.f1, stats.d1)
    return _or_by_bucket(rows.T, maps.f2, stats.d2).T


def project(c_bar: BitMatrix, maps: SampleMaps, stats: InstanceStats) -> BitMatrix:
    """``C~[i][j]`` is the OR of ``C_bar[x][y]`` over ``f1(x) = i`` and ``f2(y) = j``."""
    if c_bar.shape != (maps.m, maps.m):
        raise ValueError("C_bar must be m x m")
    return BitMatrix.from_array(_project_array(c_bar.to_array(), maps, stats).astype(np.uint8))


def run_sketch(A: BitMatrix, B: BitMatrix, cfg: SketchConfig) -> SketchResult:
    stats = InstanceStats.of(A, B)
    maps = draw_sample_maps(stats, cfg.params, cfg.seed)
    a_bar, b_bar = _lift_arrays(A, B, maps)
    c_bar, counters = pseudo_product(a_bar, b_bar, cfg.params, GF2)
    out = _project_array(c_bar, maps, stats)
    return SketchResult(BitMatrix.from_array(out.astype(np.uint8)), counters, cfg.params, maps)


def bmm_estimate(A: BitMatrix, B: BitMatrix, cfg: SketchConfig) -> BitMatrix:
    """One-sided estimate of the Boolean product ``A B`` (never reports a false 1)."""
    return run_sketch(A, B, cfg).product


def default_delta(stats: InstanceStats) -> float:
    return 1 / stats.psi3 if stats.psi3 > 1 else 0.5


def prefers_naive(stats: InstanceStats, s: int, b: int, naive_dim: int = NAIVE_DIM) -> bool:
    """Whether the exact kernel is the cheaper (or mandated) choice for these parameters."""
    return b ** 3 * 6 ** s >= stats.psi3 or max(stats.d1, stats.d2, stats.d3) <= naive_dim


def bmm(A: BitMatrix, B: BitMatrix, seed: int = 0, delta: float | None = None,
        b: int = 64, naive_dim: int = NAIVE_DIM) -> BitMatrix:
    """Boolean product, randomized when that is cheaper than the naive kernel.

    Falls back to the exact kernel whenever ``b^3 6^s >= psi3`` or every
    dimension is at most ``naive_dim``.
    """
    stats = InstanceStats.of(A, B)
    if delta is None:
        delta = default_delta(stats)
    s = analysis.select_s(stats, b, delta)
    if prefers_naive(stats, s, b, naive_dim):
        log.debug("naive fallback: s=%d b=%d psi3=%d", s, b, stats.psi3)
        return bool_mul_naive(A, B)
    p = PseudoParams(s, b)
    skew = analysis.check_skew(p, stats)
    if skew.warn:
        log.warning("skew ratios %.3g, %.3g exceed %.2g", skew.ratio_psi1, skew.ratio_psi2,
                    analysis.SKEW_THRESHOLD)
    return bmm_estimate(A, B, SketchConfig(p, seed, delta))
