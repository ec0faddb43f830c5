import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from skewddvv.compound_gram import basis_gram, gram_of_commutators, lhs_via_trace, lhs_via_trace_batch, second_compound
from skewddvv.skew_core import c_triple, coefficients_of, commutator_sum, pair_count, random_skew_tuple, standard_basis


def test_compound_examples():
    assert np.array_equal(second_compound(np.eye(3)), np.eye(3))
    assert second_compound([[2.0, 3.0], [5.0, 7.0]]) == pytest.approx(np.array([[2 * 7 - 3 * 5]]))
    with pytest.raises(ValueError):
        second_compound(np.ones((1, 4)))
    with pytest.raises(ValueError):
        second_compound(np.ones(4))


@settings(max_examples=50, deadline=None)
@given(m=st.integers(2, 6), n=st.integers(2, 6), seed=st.integers(0, 2**32 - 1))
def test_compound_matches_minor_enumeration(m, n, seed):
    a = np.random.default_rng(seed).standard_normal((m, n))
    assert np.allclose(second_compound(a), oracles.minors(a.tolist()), atol=1e-13)
    assert np.allclose(second_compound(a.T), second_compound(a).T, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(m=st.integers(2, 8), k=st.integers(2, 8), n=st.integers(2, 8), seed=st.integers(0, 2**32 - 1))
def test_compound_is_multiplicative(m, k, n, seed):
    rng = np.random.default_rng(seed)
    a, b = rng.standard_normal((m, k)), rng.standard_normal((k, n))
    lhs, rhs = second_compound(a @ b), second_compound(a) @ second_compound(b)
    assert np.linalg.norm(lhs - rhs) <= 1e-10 * max(1.0, np.linalg.norm(lhs))


def test_identity_compound_is_identity():
    for n in range(2, 9):
        assert np.array_equal(second_compound(np.eye(n)), np.eye(pair_count(n)))


def test_gram_examples():
    assert np.allclose(gram_of_commutators(standard_basis(3)), 0.5 * np.eye(3), atol=1e-15)
    assert gram_of_commutators(standard_basis(3)[:1]).shape == (0, 0)
    assert np.array_equal(gram_of_commutators(c_triple()), 2.0 * np.eye(3))
    with pytest.raises(ValueError):
        gram_of_commutators(np.zeros((2, 3, 4)))


def test_gram_is_symmetric_psd(rng):
    g = gram_of_commutators(random_skew_tuple(5, 5, rng))
    assert np.allclose(g, g.T)
    assert np.all(np.diag(g) >= 0)
    assert np.min(np.linalg.eigvalsh(g)) > -1e-10


@pytest.mark.parametrize("n", [3, 4, 5])
def test_gram_transformation_law(rng, n):
    t = random_skew_tuple(n, 4, rng)
    b = coefficients_of(t)
    want = second_compound(b.T) @ basis_gram(n) @ second_compound(b)
    got = gram_of_commutators(t)
    assert np.linalg.norm(got - want) <= 1e-8 * max(1.0, np.linalg.norm(got))


def test_trace_examples():
    assert lhs_via_trace(standard_basis(3)[:1]) == pytest.approx(0.0, abs=1e-15)
    assert lhs_via_trace(c_triple()) == pytest.approx(12.0, rel=1e-14)


@settings(max_examples=80, deadline=None)
@given(n=st.integers(3, 6), m=st.integers(1, 6), seed=st.integers(0, 2**32 - 1))
def test_trace_matches_loop_oracle(n, m, seed):
    t = random_skew_tuple(n, m, np.random.default_rng(seed))
    want = oracles.double_sum(t.tolist())
    assert lhs_via_trace(t) == pytest.approx(want, rel=1e-8, abs=1e-10)


def test_batch_trace_matches_dense(rng):
    for n in (3, 4, 6, 7):
        ts = random_skew_tuple(n, 3, rng, size=20)
        assert np.allclose(lhs_via_trace_batch(ts), [lhs_via_trace(t) for t in ts], rtol=1e-10)
        assert np.allclose(lhs_via_trace_batch(ts), commutator_sum(ts), rtol=1e-10)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_diagonalized_reduction(rng, n):
    t = random_skew_tuple(n, 4, rng)
    b = coefficients_of(t)
    x, q = np.linalg.eigh(b @ b.T)
    x = np.clip(x, 0, None)
    basis_q = np.einsum("ba,bij->aij", q, standard_basis(n))
    lhs = 2 * np.trace(second_compound(np.diag(x)) @ gram_of_commutators(basis_q))
    comm = np.einsum("aij,bjk->abik", basis_q, basis_q)
    comm = comm - comm.transpose(1, 0, 2, 3)
    rhs = np.einsum("a,b,abij,abij->", x, x, comm, comm)
    assert lhs == pytest.approx(rhs, rel=1e-8)
    assert rhs == pytest.approx(commutator_sum(t), rel=1e-8)
