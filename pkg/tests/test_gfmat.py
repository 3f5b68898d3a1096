import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from brokenmm.gfmat import (
    BitMatrix,
    InstanceStats,
    bits_of,
    bool_mul_naive,
    bool_mul_strassen,
    format_bmat,
    gf2_mul_naive,
    gf2_mul_strassen,
    parse_bmat,
)

from conftest import random_pair, scalar_bool_product, scalar_gf2_product


def test_packing_is_lsb_first():
    M = BitMatrix.from_array(np.array([[1, 0, 1] + [0] * 62]))
    assert M.words.shape == (1, 2)
    assert int(M.words[0, 0]) == 0b101
    assert int(M.words[0, 1]) == 0


@pytest.mark.parametrize("cols", [1, 7, 63, 64, 65, 130])
def test_roundtrip_and_padding(rng, cols):
    arr = rng.integers(0, 2, (5, cols), dtype=np.uint8)
    M = BitMatrix.from_array(arr)
    assert M.padding_is_zero()
    np.testing.assert_array_equal(M.to_array(), arr)
    for i, j in [(0, 0), (4, cols - 1), (2, cols // 2)]:
        assert M.get(i, j) == arr[i, j]


def test_constructor_clears_dirty_padding():
    words = np.full((2, 1), np.uint64(2 ** 64 - 1))
    M = BitMatrix(2, 3, words)
    assert M.padding_is_zero()
    assert M.count() == 6


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        BitMatrix.from_array(np.array([[0, 2]]))
    with pytest.raises(ValueError):
        BitMatrix.zeros(0, 3)
    with pytest.raises(IndexError):
        BitMatrix.zeros(2, 2).get(2, 0)


def test_immutable():
    M = BitMatrix.identity(3)
    with pytest.raises(ValueError):
        M.words[0, 0] = 0


def test_bool_identity_and_annihilator():
    assert bool_mul_naive(BitMatrix.identity(3), BitMatrix.identity(3)) == BitMatrix.identity(3)
    assert bool_mul_naive(BitMatrix.ones(2, 2), BitMatrix.zeros(2, 2)) == BitMatrix.zeros(2, 2)


def test_gf2_examples(rng):
    B = BitMatrix.random(4, 4, 0.5, rng)
    assert gf2_mul_naive(BitMatrix.identity(4), B) == B
    assert gf2_mul_naive(bits_of([[1, 1]]), bits_of([[1], [1]])) == bits_of([[0]])


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        bool_mul_naive(BitMatrix.zeros(2, 3), BitMatrix.zeros(2, 3))
    with pytest.raises(ValueError):
        gf2_mul_naive(BitMatrix.zeros(2, 3), BitMatrix.zeros(2, 3))


def test_random_16_against_scalar(rng):
    A, B = random_pair(rng, 16, 16, 16)
    a, b = A.to_array().tolist(), B.to_array().tolist()
    assert bool_mul_naive(A, B).to_array().tolist() == scalar_bool_product(a, b)


def test_random_32_gf2_against_scalar(rng):
    A, B = random_pair(rng, 32, 32, 32)
    a, b = A.to_array().tolist(), B.to_array().tolist()
    assert gf2_mul_naive(A, B).to_array().tolist() == scalar_gf2_product(a, b)


def test_exhaustive_small_shapes_density_sweep(rng):
    for d1, d2, d3 in itertools.product(range(1, 9), repeat=3):
        for density in (0, 0.25, 0.5, 1):
            A, B = random_pair(rng, d1, d2, d3, density)
            a, b = A.to_array().tolist(), B.to_array().tolist()
            C = bool_mul_naive(A, B)
            assert C.padding_is_zero()
            assert C.to_array().tolist() == scalar_bool_product(a, b)


def test_hundred_random_32_instances(rng):
    for _ in range(100):
        A, B = random_pair(rng, 32, 32, 32, rng.uniform(0.02, 0.3))
        C = bool_mul_naive(A, B)
        G = gf2_mul_naive(A, B)
        expect = (A.to_array().astype(int) @ B.to_array().astype(int)) > 0
        np.testing.assert_array_equal(C.to_array(), expect)
        # parity of a zero count is zero
        assert G.dominated_by(C)


@pytest.mark.parametrize("base", [1, 2, 3, 4])
@pytest.mark.parametrize("t", [0, 1, 2, 3, 4, 5])
def test_strassen_matches_naive(rng, base, t):
    n = base << t
    A, B = random_pair(rng, n, n, n)
    assert gf2_mul_strassen(A, B, base) == gf2_mul_naive(A, B)


def test_strassen_examples(rng):
    assert gf2_mul_strassen(BitMatrix.identity(8), BitMatrix.identity(8), 2) == BitMatrix.identity(8)
    A, B = random_pair(rng, 64, 64, 64)
    for base in (2, 4, 8):
        assert gf2_mul_strassen(A, B, base) == gf2_mul_naive(A, B)
        assert bool_mul_strassen(A, B, base) == bool_mul_naive(A, B)


def test_strassen_rejects_bad_size():
    with pytest.raises(ValueError):
        gf2_mul_strassen(BitMatrix.zeros(6, 6), BitMatrix.zeros(6, 6), 4)
    with pytest.raises(ValueError):
        gf2_mul_strassen(BitMatrix.zeros(4, 4), BitMatrix.zeros(4, 2), 2)


def test_instance_stats_wide_integers():
    st_ = InstanceStats(10 ** 7, 3 * 10 ** 7, 7 * 10 ** 7)
    assert st_.psi1 == 11 * 10 ** 7
    assert st_.psi2 == (3 + 7 + 21) * 10 ** 14
    assert st_.psi3 == 21 * 10 ** 21
    with pytest.raises(ValueError):
        InstanceStats(0, 1, 1)


# -- BMAT/1 -------------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(arrays(np.uint8, st.tuples(st.integers(1, 9), st.integers(1, 70)), elements=st.integers(0, 1)))
def test_bmat_roundtrip(arr):
    M = BitMatrix.from_array(arr)
    text = format_bmat(M)
    assert parse_bmat(text) == M
    assert text.splitlines()[1] == f"{arr.shape[0]} {arr.shape[1]}"


@pytest.mark.parametrize("text", [
    "",
    "BMAT 2\n1 1\n0\n",
    "BMAT 1\n1 1\n",
    "BMAT 1\n1 2\n0\n",
    "BMAT 1\n1 2\n012\n",
    "BMAT 1\n1 2\n02\n",
    "BMAT 1\n1  2\n01\n",
    "BMAT 1\n0 2\n",
    "BMAT 1\n01 2\n01\n",
    "BMAT 1\n1 2\n01\n\n",
    "BMAT 1\n2 2\n01\n",
    "BMAT 1\r\n1 1\r\n1\r\n",
    " BMAT 1\n1 1\n1\n",
])
def test_bmat_parser_rejects(text):
    with pytest.raises(ValueError):
        parse_bmat(text)


def test_bmat_without_trailing_newline():
    assert parse_bmat("BMAT 1\n2 3\n101\n010") == bits_of([[1, 0, 1], [0, 1, 0]])
