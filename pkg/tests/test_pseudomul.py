import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brokenmm.pseudomul import (
    GF2,
    INT64,
    CounterReport,
    IntModRing,
    PseudoParams,
    broken_step_2x2,
    pseudo_product,
    pseudo_product_bitplanes,
    pseudo_product_oracle,
    survivor_mask,
    triple_survives,
)

RINGS = [GF2, IntModRing(16), INT64]


def scalar_pseudo(A, B, p):
    """Pure-Python sum over surviving triples; the oracle for the vectorised oracle."""
    m = p.m
    return [[sum(int(A[x][z]) * int(B[z][y]) for z in range(m) if triple_survives(x, y, z, p))
             for y in range(m)] for x in range(m)]


# -- broken step -------------------------------------------------------------

def test_broken_step_all_ones():
    C, counters = broken_step_2x2(np.ones((2, 2), int), np.ones((2, 2), int))
    assert C.tolist() == [[1, 2], [2, 2]]
    assert counters == CounterReport(6, 14)


def test_broken_step_identity_gf2():
    C, _ = broken_step_2x2(np.eye(2, dtype=int), np.eye(2, dtype=int), GF2)
    assert C.tolist() == [[0, 0], [0, 1]]


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 4), st.data())
def test_broken_step_drops_exactly_a11_b11(h, data):
    n = 2 * h
    A = np.array(data.draw(st.lists(st.integers(-50, 50), min_size=n * n, max_size=n * n))).reshape(n, n)
    B = np.array(data.draw(st.lists(st.integers(-50, 50), min_size=n * n, max_size=n * n))).reshape(n, n)
    C, _ = broken_step_2x2(A, B, INT64)
    expect = A @ B
    expect[:h, :h] -= A[:h, :h] @ B[:h, :h]
    np.testing.assert_array_equal(C, INT64.coerce(expect))


def test_broken_step_rejects_odd():
    with pytest.raises(ValueError):
        broken_step_2x2(np.ones((3, 3)), np.ones((3, 3)))


# -- surviving triples -------------------------------------------------------

def test_triple_examples():
    p = PseudoParams(2, 1)
    assert triple_survives(1, 2, 0, p)
    assert not triple_survives(0, 0, 0, p)
    assert triple_survives(0, 0, 0, PseudoParams(0, 3))
    with pytest.raises(IndexError):
        triple_survives(4, 0, 0, p)


@pytest.mark.parametrize("s,b", [(0, 1), (1, 1), (1, 3), (2, 2), (3, 1), (3, 2), (4, 1)])
def test_survivor_count(s, b):
    assert int(survivor_mask(PseudoParams(s, b)).sum()) == 7 ** s * b ** 3


def test_survivor_count_example():
    assert int(survivor_mask(PseudoParams(2, 2)).sum()) == 392


def test_survivor_mask_agrees_with_predicate():
    p = PseudoParams(2, 2)
    mask = survivor_mask(p)
    for x, y, z in itertools.product(range(p.m), repeat=3):
        assert mask[x, y, z] == triple_survives(x, y, z, p)


def test_params_validation():
    with pytest.raises(ValueError):
        PseudoParams(-1, 1)
    with pytest.raises(ValueError):
        PseudoParams(1, 0)
    assert PseudoParams(3, 5).m == 40


# -- oracle ------------------------------------------------------------------

def test_oracle_identity_example():
    p = PseudoParams(2, 1)
    C = pseudo_product_oracle(np.ones((4, 4), int), np.ones((4, 4), int), p)
    assert C[0][0] == 1 and C[0][3] == 4 and C[3][3] == 4


@pytest.mark.parametrize("s,b", [(1, 1), (1, 2), (2, 1), (2, 2)])
def test_oracle_matches_scalar(rng, s, b):
    p = PseudoParams(s, b)
    A = rng.integers(0, 5, (p.m, p.m))
    B = rng.integers(0, 5, (p.m, p.m))
    np.testing.assert_array_equal(pseudo_product_oracle(A, B, p), np.array(scalar_pseudo(A, B, p)))


# -- recursion vs oracle -----------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(st.integers(0, 3), st.integers(1, 3), st.sampled_from(RINGS), st.integers(0, 2 ** 32 - 1))
def test_recursion_matches_oracle(s, b, ring, seed):
    p = PseudoParams(s, b)
    r = np.random.default_rng(seed)
    hi = 2 if ring is GF2 else 2 ** 20
    A = r.integers(0, hi, (p.m, p.m))
    B = r.integers(0, hi, (p.m, p.m))
    C, _ = pseudo_product(A, B, p, ring)
    np.testing.assert_array_equal(C, pseudo_product_oracle(A, B, p, ring))


def test_int64_wraparound(rng):
    p = PseudoParams(2, 2)
    A = rng.integers(-2 ** 62, 2 ** 62, (p.m, p.m))
    B = rng.integers(-2 ** 62, 2 ** 62, (p.m, p.m))
    C, _ = pseudo_product(A, B, p, INT64)
    # exact Python-int reference, reduced mod 2^64
    ref = [[v % 2 ** 64 for v in row] for row in scalar_pseudo(A.tolist(), B.tolist(), p)]
    assert C.tolist() == ref


@pytest.mark.parametrize("s", range(7))
def test_counters(rng, s):
    p = PseudoParams(s, 1)
    A = rng.integers(0, 2, (p.m, p.m))
    _, counters = pseudo_product(A, A, p, GF2)
    assert counters.base_mults == 6 ** s
    assert counters.block_adds == 7 * (6 ** s - 4 ** s)


@pytest.mark.parametrize("ring", RINGS)
def test_counters_independent_of_ring_and_b(ring):
    for b in (1, 3):
        p = PseudoParams(3, b)
        _, counters = pseudo_product(np.zeros((p.m, p.m), int), np.zeros((p.m, p.m), int), p, ring)
        assert counters == CounterReport.expected(3)


def test_shape_checks():
    with pytest.raises(ValueError):
        pseudo_product(np.zeros((4, 4), int), np.zeros((4, 4), int), PseudoParams(1, 1))
    with pytest.raises(ValueError):
        pseudo_product(np.zeros((2, 3), int), np.zeros((2, 2), int), PseudoParams(1, 1))


def test_bitplanes_match_single_products(rng):
    p = PseudoParams(3, 2)
    A = rng.integers(0, 2, (p.m, p.m))
    planes = rng.integers(0, 2, (5, p.m, p.m))
    out, counters = pseudo_product_bitplanes(A, planes, p)
    assert counters == CounterReport.expected(3)
    for l in range(5):
        np.testing.assert_array_equal(out[l], pseudo_product(A, planes[l], p, GF2)[0])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 3), st.integers(1, 2), st.integers(0, 2 ** 32 - 1))
def test_boolean_subset_property(s, b, seed):
    """Pseudo counts never exceed full counts; a surviving 1 means a true 1."""
    p = PseudoParams(s, b)
    r = np.random.default_rng(seed)
    A = r.integers(0, 2, (p.m, p.m))
    B = r.integers(0, 2, (p.m, p.m))
    C, _ = pseudo_product(A, B, p, INT64)
    full = A @ B
    assert (C.astype(np.int64) <= full).all()
    assert ((C > 0) <= (full > 0)).all()


def test_broken_step_formulas_all_2x2_gf2():
    """All 256 GF(2) pairs against the four closed forms evaluated on scalars."""
    for bits in itertools.product((0, 1), repeat=8):
        a11, a12, a21, a22, b11, b12, b21, b22 = bits
        want = [[a12 * b21, a11 * b12 + a12 * b22],
                [a21 * b11 + a22 * b21, a21 * b12 + a22 * b22]]
        want = [[v % 2 for v in row] for row in want]
        C, _ = broken_step_2x2(np.array(bits[:4]).reshape(2, 2), np.array(bits[4:]).reshape(2, 2), GF2)
        assert C.tolist() == want


def test_depth_one_triples():
    p = PseudoParams(1, 1)
    assert not triple_survives(0, 0, 0, p)
    assert triple_survives(0, 0, 1, p)
    assert sum(triple_survives(*t, p) for t in itertools.product(range(2), repeat=3)) == 7


def test_depth_zero_is_plain_product(rng):
    A = rng.integers(0, 9, (5, 5))
    B = rng.integers(0, 9, (5, 5))
    p = PseudoParams(0, 5)
    np.testing.assert_array_equal(pseudo_product_oracle(A, B, p), A @ B)
    C, counters = pseudo_product(A, B, p, INT64)
    np.testing.assert_array_equal(C, A @ B)
    assert counters == CounterReport(1, 0)


@pytest.mark.parametrize("ring", RINGS)
def test_ring_contract(ring, rng):
    a = ring.coerce(rng.integers(0, 2 if ring is GF2 else 1000, (4, 4)))
    z = ring.zeros((4, 4))
    np.testing.assert_array_equal(ring.add(z, a), a)
    np.testing.assert_array_equal(ring.sub(a, a), z)
    np.testing.assert_array_equal(ring.matmul(z, a), z)
    np.testing.assert_array_equal(ring.matmul(a, z), z)


def test_bitplanes_degenerate_cases(rng):
    p = PseudoParams(2, 2)
    A = rng.integers(0, 2, (p.m, p.m))
    B = rng.integers(0, 2, (p.m, p.m))
    one, _ = pseudo_product_bitplanes(A, B[None], p)
    np.testing.assert_array_equal(one[0], pseudo_product(A, B, p, GF2)[0])
    zero, _ = pseudo_product_bitplanes(A, np.zeros((3, p.m, p.m), int), p)
    assert not zero.any()
    planes = rng.integers(0, 2, (3, p.m, p.m))
    out, _ = pseudo_product_bitplanes(A, planes, p)
    for l in range(3):
        np.testing.assert_array_equal(out[l], pseudo_product_oracle(A, planes[l], p, GF2))
