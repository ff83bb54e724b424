from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lpaf.algebra import SsfdAlgebra
from lpaf.errors import NonSquare, ShapeMismatch, WrongSize
from lpaf.pnorm import (
    PExponent,
    combine_max,
    matrix_level_norm,
    operator_p_norm,
    oracle_p_norm_2x2,
    vector_p_norm,
)

from conftest import complex_permutations, random_complex

FLAT = np.array([[1, 1], [0, 0]], dtype=complex)
HALF = 0.5 * np.ones((2, 2), dtype=complex)


def test_exponent_validation():
    assert PExponent(3).conjugate == pytest.approx(1.5)
    assert PExponent(1).conjugate == np.inf
    assert not PExponent(2).classification_legal
    for bad in (0.5, np.inf, np.nan):
        with pytest.raises(ValueError):
            PExponent(bad)


@pytest.mark.parametrize("x, p, expected", [
    ((3, 4), 2, 5.0),
    ((1, 1), 1, 2.0),
    (((1 + 1j) / 2, (1 - 1j) / 2), 1.5, 2 ** (1 / 1.5 - 0.5)),
    (((1 + 1j) / 2, (1 - 1j) / 2), 3, 2 ** (1 / 3 - 0.5)),
])
def test_vector_norm_examples(x, p, expected):
    assert vector_p_norm(x, p) == pytest.approx(expected, abs=1e-12)


def test_vector_norm_handles_huge_entries():
    assert vector_p_norm([1e200, 1e200], 3) == pytest.approx(1e200 * 2 ** (1 / 3))


def test_vector_norm_rejects_empty():
    with pytest.raises(ValueError):
        vector_p_norm([], 2)


@pytest.mark.parametrize("p", [1, 1.5, 3, 4])
def test_flat_matrix(p):
    est = operator_p_norm(FLAT, p)
    assert est.value == pytest.approx(2 ** (1 - 1 / p), abs=1e-9)
    assert est.converged


@pytest.mark.parametrize("p", [1, 1.5, 2, 3, 7])
def test_identity_and_idempotent(p):
    assert operator_p_norm(np.eye(4), p).value == pytest.approx(1)
    assert operator_p_norm(HALF, p).value == pytest.approx(1, abs=1e-9)


def test_zero_matrix():
    est = operator_p_norm(np.zeros((3, 3)), 1.5)
    assert est.value == 0 and est.converged


def test_nonsquare():
    with pytest.raises(NonSquare):
        operator_p_norm(np.ones((2, 3)), 1.5)


def test_witness_realises_value(rng):
    a = random_complex(rng, 5, 5)
    est = operator_p_norm(a, 1.5)
    ratio = vector_p_norm(a @ est.witness, 1.5) / vector_p_norm(est.witness, 1.5)
    assert ratio == pytest.approx(est.value, rel=1e-12)


def test_p2_is_largest_singular_value(rng):
    a = random_complex(rng, 6, 6)
    assert operator_p_norm(a, 2).value == pytest.approx(np.linalg.svd(a, compute_uv=False)[0])


def test_nonnegative_matrix_against_oracle(rng):
    a = rng.uniform(0, 1, size=(2, 2))
    for p in (1.5, 3):
        assert operator_p_norm(a, p).value == pytest.approx(oracle_p_norm_2x2(a, p), abs=1e-6)


@pytest.mark.parametrize("a, p, expected", [
    (FLAT, 3, 2 ** (2 / 3)),
    ([[0, 1], [0, 0]], 1.5, 1.0),
    (np.diag([2, 3]), 1.5, 3.0),
])
def test_oracle_examples(a, p, expected):
    assert oracle_p_norm_2x2(a, p) == pytest.approx(expected, abs=1e-6)


def test_oracle_wrong_size():
    with pytest.raises(WrongSize):
        oracle_p_norm_2x2(np.eye(3), 1.5)


def test_random_complex_agree_with_oracle(rng):
    for _ in range(10):
        a = random_complex(rng, 2, 2)
        p = rng.choice([1.25, 1.5, 3.0, 4.0])
        est = operator_p_norm(a, p)
        oracle = oracle_p_norm_2x2(a, p)
        assert est.value <= oracle + 1e-4
        if est.converged:
            assert est.value == pytest.approx(oracle, abs=1e-4)


def test_matrix_level_examples():
    alg = SsfdAlgebra(1.5, [2])
    big = np.kron(np.eye(2), FLAT)
    assert matrix_level_norm([big], 2, alg).value == pytest.approx(2 ** (1 - 1 / 1.5), abs=1e-9)
    assert matrix_level_norm([np.zeros((6, 6))], 3, alg).value == 0
    scalars = SsfdAlgebra(1.5, [1, 1])
    assert matrix_level_norm([np.array([[2]]), np.array([[5]])], 1, scalars).value == 5
    with pytest.raises(ShapeMismatch):
        matrix_level_norm([np.eye(3)], 1, alg)


def test_combine_max():
    est = combine_max([operator_p_norm(np.eye(2), 3), operator_p_norm(2 * np.eye(2), 3)])
    assert est.value == pytest.approx(2)


int_mats = st.integers(1, 5).flatmap(
    lambda n: arrays(np.int64, (n, n), elements=st.integers(-9, 9)))


@given(int_mats)
def test_p1_is_max_column_sum(a):
    assert operator_p_norm(a, 1).value == np.abs(a).sum(axis=0).max()


@given(complex_permutations(max_size=4), st.sampled_from([1.5, 3.0]), st.integers(0, 2 ** 16))
def test_complex_permutation_invariance(s, p, seed):
    rng = np.random.default_rng(seed)
    a = random_complex(rng, s.size, s.size)
    base = operator_p_norm(a, p)
    left = operator_p_norm(s.matrix() @ a, p)
    right = operator_p_norm(a @ s.matrix(), p)
    if base.converged and left.converged and right.converged:
        assert abs(left.value - base.value) <= 1e-6
        assert abs(right.value - base.value) <= 1e-6


@given(st.integers(0, 2 ** 16), st.sampled_from([1.5, 3.0]))
def test_sandwich(seed, p):
    rng = np.random.default_rng(seed)
    alg = SsfdAlgebra(p, [1])
    a = random_complex(rng, 2, 2)
    whole = matrix_level_norm([a], 2, alg).value
    entries = np.abs(a)
    assert entries.max() - 1e-9 <= whole <= entries.sum() + 1e-9


@given(st.integers(0, 2 ** 16), st.sampled_from([1.5, 3.0, 4.0]))
def test_transpose_duality(seed, p):
    rng = np.random.default_rng(seed)
    a = random_complex(rng, 2, 2)
    q = p / (p - 1)
    assert oracle_p_norm_2x2(a, p) == pytest.approx(oracle_p_norm_2x2(a.T, q), abs=1e-4)


def test_oracle_finds_maximum_next_to_sphere_pole():
    # the maximiser sits at r ~ 0.9996, next to the r = 1 endpoint where t is degenerate
    rng = np.random.default_rng(422)
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    assert oracle_p_norm_2x2(a, 1.5) == pytest.approx(operator_p_norm(a, 1.5).value, abs=1e-6)
