"""Parameter selection and the combinatorial quantities behind it.

Rational quantities (first moment, dependent-pair bound) are returned as
``fractions.Fraction``.  Quantities involving logarithms or irrational
constants use double precision floats.  ``log`` means the natural logarithm
throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .gfmat import InstanceStats
from .pseudomul import PseudoParams

__all__ = [
    "ALPHA1",
    "ALPHA2",
    "SKEW_THRESHOLD",
    "BoundConstants",
    "JansonStats",
    "mu",
    "delta_bound",
    "delta_bruteforce",
    "coordinate_case_counts",
    "janson_stats",
    "delta_bound_appendix",
    "good_tuple_failure_bound",
    "select_s",
    "s_max",
    "s_hat",
    "trial_schedule",
    "count_candidates",
    "count_candidates_multinomial",
    "SkewReport",
    "check_skew",
    "report",
]

ALPHA1 = 14 * 54 ** (1 / 7)
ALPHA2 = 7 * 2 ** (6 / 7)
SKEW_THRESHOLD = 0.1
CANDIDATE_MAX_S = 9


@dataclass(frozen=True)
class BoundConstants:
    alpha1: float = ALPHA1
    alpha2: float = ALPHA2


@dataclass(frozen=True)
class JansonStats:
    mu: Fraction
    delta_upper: Fraction
    s: int
    b: int
    stats: InstanceStats


def _require_psi3(stats: InstanceStats) -> int:
    if stats.psi3 <= 0:
        raise ValueError("psi3 must be positive")
    return stats.psi3


def mu(p: PseudoParams, stats: InstanceStats) -> Fraction:
    """Expected number of surviving triples hitting a fixed ``(i, j, k)``: ``b^3 7^s / psi3``."""
    return Fraction(p.b ** 3 * 7 ** p.s, _require_psi3(stats))


def delta_bound(p: PseudoParams, stats: InstanceStats) -> Fraction:
    """Upper bound ``(psi1 b^5 25^s + psi2 b^4 13^s) / psi3^2`` on the dependent-pair sum."""
    psi3 = _require_psi3(stats)
    num = stats.psi1 * p.b ** 5 * 25 ** p.s + stats.psi2 * p.b ** 4 * 13 ** p.s
    return Fraction(num, psi3 * psi3)


def _surviving_triples(p: PseudoParams) -> np.ndarray:
    hi = np.arange(p.m) // p.b
    full = (1 << p.s) - 1
    x, y, z = np.meshgrid(np.arange(p.m), np.arange(p.m), np.arange(p.m), indexing="ij")
    keep = (hi[x] | hi[y] | hi[z]) == full
    return np.stack([x[keep], y[keep], z[keep]], axis=1)


def delta_bruteforce(p: PseudoParams, stats: InstanceStats) -> Fraction:
    """Exact dependent-pair sum over ordered pairs of distinct surviving triples.

    Two triples are dependent when they share an ``x``, a ``y`` or a ``z``;
    the joint probability of both hitting ``(i*, j*, k*)`` is one over
    ``d1^(#distinct x) d2^(#distinct y) d3^(#distinct z)``.
    """
    t = _surviving_triples(p)
    eq = [(t[:, None, c] == t[None, :, c]) for c in range(3)]
    sx, sy, sz = eq
    same = sx & sy & sz
    dependent = (sx | sy | sz) & ~same
    d = (stats.d1, stats.d2, stats.d3)
    total = Fraction(0)
    for pattern in product((False, True), repeat=3):
        if not any(pattern) or all(pattern):
            continue
        sel = dependent.copy()
        for c, shared in enumerate(pattern):
            sel &= eq[c] if shared else ~eq[c]
        n = int(sel.sum())
        denom = 1
        for c, shared in enumerate(pattern):
            denom *= d[c] if shared else d[c] ** 2
        total += Fraction(n, denom)
    return total


def coordinate_case_counts() -> dict[str, int]:
    """Per-coordinate bit patterns behind the two dependent-pair cases.

    ``shared_x``: tuples ``(x, y, z, y', z')`` of bits with both
    ``x|y|z`` and ``x|y'|z'`` equal to 1.  ``shared_xy``: tuples
    ``(x, y, z, z')`` with ``x|y|z`` and ``x|y|z'`` equal to 1.
    """
    shared_x = sum(1 for x, y, z, y2, z2 in product((0, 1), repeat=5)
                   if (x | y | z) and (x | y2 | z2))
    shared_xy = sum(1 for x, y, z, z2 in product((0, 1), repeat=4)
                    if (x | y | z) and (x | y | z2))
    return {"shared_x": shared_x, "shared_xy": shared_xy}


def janson_stats(p: PseudoParams, stats: InstanceStats) -> JansonStats:
    return JansonStats(mu(p, stats), delta_bound(p, stats), p.s, p.b, stats)


def delta_bound_appendix(p: PseudoParams, stats: InstanceStats) -> float:
    """Comparative index ``(psi1 a1^s + psi2 a2^s) / (psi3^2 sqrt(s))``, hidden constant set to 1."""
    if p.s < 1:
        raise ValueError("the refined bound needs s >= 1")
    psi3 = float(_require_psi3(stats))
    num = stats.psi1 * ALPHA1 ** p.s + stats.psi2 * ALPHA2 ** p.s
    return num / (psi3 * psi3 * math.sqrt(p.s))


def good_tuple_failure_bound(r: int, kappa: float) -> float:
    """Bound ``e^(r - kappa) (kappa / r)^r`` on having fewer than ``r`` distinct-y good tuples."""
    if r <= 0:
        raise ValueError("r must be positive")
    if r > kappa:
        raise ValueError(f"r={r} exceeds kappa={kappa}")
    return math.exp(r - kappa + r * math.log(kappa / r))


def select_s(stats: InstanceStats, b: int, delta: float) -> int:
    """Smallest ``s >= 0`` with ``7^s b^3 >= 3 psi3 log(1/delta)``."""
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    target = 3 * stats.psi3 * math.log(1 / delta)
    s = 0
    while 7 ** s * b ** 3 < target:
        s += 1
    return s


def _log7(v: float) -> float:
    return math.log(v) / math.log(7)


def s_max(stats: InstanceStats, b: int) -> int:
    """Top of the witness trial schedule, ``ceil(log7(psi3 log psi3 / b^3))`` clamped at 0."""
    psi3 = stats.psi3
    if psi3 < 2:
        return 0
    return max(0, math.ceil(_log7(psi3 * math.log(psi3) / b ** 3)))


def s_hat(stats: InstanceStats, b: int, gamma: int) -> int:
    """``ceil(log7(psi3 log psi3 / b^3) - 2) - ceil((7/6) log2 gamma)``; may be negative."""
    if gamma < 1:
        raise ValueError("gamma must be at least 1")
    psi3 = stats.psi3
    if psi3 < 2:
        raise ValueError("psi3 log psi3 must be positive")
    first = math.ceil(_log7(psi3 * math.log(psi3) / b ** 3) - 2)
    return first - math.ceil(7 / 6 * math.log2(gamma))


def trial_schedule(top: int) -> dict[int, int]:
    """Trials per depth: ``20 * 4^(top - s)`` for ``s = 0..top``."""
    return {s: 20 * 4 ** (top - s) for s in range(top + 1)}


# -- candidate counting ----------------------------------------------------

# the seven nonzero (x_i, y_i, z_i) bit patterns
_PATTERNS = np.array([(v >> 2 & 1, v >> 1 & 1, v & 1) for v in range(1, 8)], dtype=np.int64)


def _candidate_ok(wx, wy, wz, wxy, wxz, wyz, s):
    # integer forms of |.| <= 4s/7 and |. v .| <= 6s/7
    cap1 = lambda w: 7 * w <= 4 * s  # noqa: E731
    cap2 = lambda w: 7 * w <= 6 * s  # noqa: E731
    return cap1(wx) & cap1(wy) & cap1(wz) & cap2(wxy) & cap2(wxz) & cap2(wyz)


def count_candidates(s: int) -> tuple[int, float]:
    """Exhaustively count surviving triples meeting the weight caps; returns ``(count, count / 7^s)``."""
    if s < 0:
        raise ValueError("s must be non-negative")
    if s > CANDIDATE_MAX_S:
        raise ValueError(f"exhaustive enumeration is limited to s <= {CANDIDATE_MAX_S}")
    if s == 0:
        return 1, 1.0
    x, y, z = _PATTERNS[:, 0], _PATTERNS[:, 1], _PATTERNS[:, 2]
    per = np.stack([x, y, z, x | y, x | z, y | z], axis=1)  # (7, 6)
    # enumerate all 7^s per-coordinate choices as base-7 digit strings, in chunks
    chunk_digits = min(s, 7)
    head = s - chunk_digits
    codes = np.arange(7 ** chunk_digits)
    digits = np.stack([(codes // 7 ** k) % 7 for k in range(chunk_digits)], axis=1)
    low = per[digits].sum(axis=1)  # weights from the low coordinates
    total = 0
    for hcode in range(7 ** head):
        w = low.copy()
        for k in range(head):
            w += per[(hcode // 7 ** k) % 7]
        total += int(_candidate_ok(*(w[:, i] for i in range(6)), s).sum())
    return total, total / 7 ** s


def count_candidates_multinomial(s: int) -> int:
    """Same count as :func:`count_candidates` by summing multinomials over pattern multiplicities."""
    per = [tuple(int(v) for v in (x, y, z, x | y, x | z, y | z)) for x, y, z in _PATTERNS]

    def compositions(n, parts):
        if parts == 1:
            yield (n,)
            return
        for first in range(n + 1):
            for rest in compositions(n - first, parts - 1):
                yield (first,) + rest

    total = 0
    for comp in compositions(s, 7):
        w = [sum(c * pv[i] for c, pv in zip(comp, per)) for i in range(6)]
        if _candidate_ok(*w, s):
            coef = math.factorial(s)
            for c in comp:
                coef //= math.factorial(c)
            total += coef
    return total


# -- skew checks -----------------------------------------------------------

@dataclass(frozen=True)
class SkewReport:
    ratio_psi1: float
    ratio_psi2: float
    ratios_ok: bool
    poly_psi1_ok: bool
    poly_psi2_ok: bool
    appendix_psi1_ok: bool
    appendix_psi2_ok: bool

    @property
    def warn(self) -> bool:
        return not self.ratios_ok


def check_skew(p: PseudoParams, stats: InstanceStats) -> SkewReport:
    """Ratios ``(25/7)^s b^2 psi1/psi3`` and ``(13/7)^s b psi2/psi3`` plus the polynomial shape tests.

    A ratio counts as "much less than one" below ``SKEW_THRESHOLD``.
    """
    psi1, psi2, psi3 = stats.psi1, stats.psi2, stats.psi3
    r1 = (25 / 7) ** p.s * p.b ** 2 * psi1 / psi3
    r2 = (13 / 7) ** p.s * p.b * psi2 / psi3
    return SkewReport(
        ratio_psi1=r1,
        ratio_psi2=r2,
        ratios_ok=r1 < SKEW_THRESHOLD and r2 < SKEW_THRESHOLD,
        poly_psi1_ok=psi3 ** 0.345 >= psi1,
        poly_psi2_ok=psi3 ** 0.681 >= psi2,
        appendix_psi1_ok=psi3 ** 0.350 >= psi1,
        appendix_psi2_ok=psi3 ** 0.694 >= psi2,
    )


def report(stats: InstanceStats, s: int | None, b: int, delta: float | None = None) -> dict[str, object]:
    """All quantities above for one configuration, in a stable key order."""
    if delta is None:
        delta = 1 / stats.psi3 if stats.psi3 > 1 else 0.5
    chosen = select_s(stats, b, delta)
    p = PseudoParams(chosen if s is None else s, b)
    out: dict[str, object] = {
        "d1": stats.d1, "d2": stats.d2, "d3": stats.d3,
        "psi1": stats.psi1, "psi2": stats.psi2, "psi3": stats.psi3,
        "b": p.b, "s": p.s, "m": p.m, "delta": delta,
        "select_s": chosen,
        "s_max": s_max(stats, b),
    }
    mu_v = mu(p, stats)
    db = delta_bound(p, stats)
    out["mu"] = f"{mu_v} ({float(mu_v):.6g})"
    out["delta_bound"] = f"{db} ({float(db):.6g})"
    if p.s >= 1:
        out["delta_bound_appendix"] = f"{delta_bound_appendix(p, stats):.6g}"
    out["alpha1"] = f"{ALPHA1:.6f}"
    out["alpha2"] = f"{ALPHA2:.6f}"
    try:
        out["s_hat_gamma1"] = s_hat(stats, b, 1)
    except ValueError:
        pass
    skew = check_skew(p, stats)
    out["skew_ratio_psi1"] = f"{skew.ratio_psi1:.6g}"
    out["skew_ratio_psi2"] = f"{skew.ratio_psi2:.6g}"
    out["skew_ratios"] = "pass" if skew.ratios_ok else "warn"
    out["poly_psi1"] = "pass" if skew.poly_psi1_ok else "warn"
    out["poly_psi2"] = "pass" if skew.poly_psi2_ok else "warn"
    out["appendix_psi1"] = "pass" if skew.appendix_psi1_ok else "warn"
    out["appendix_psi2"] = "pass" if skew.appendix_psi2_ok else "warn"
    out["base_mults"] = 6 ** p.s
    out["block_adds"] = 7 * (6 ** p.s - 4 ** p.s)
    return out
