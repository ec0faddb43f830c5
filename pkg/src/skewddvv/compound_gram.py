"""Second compound matrices and commutator Gram matrices.

Rows and columns of every compound or Gram matrix are indexed by pairs in
the rank order of :func:`skew_core.index_pairs`, so ``phi(A)`` for an
``m x n`` matrix is ``C(m,2) x C(n,2)``.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .skew_core import _frozen, _pair_index_arrays, coefficients_of, pair_count, standard_basis


def second_compound(a) -> np.ndarray:
    """All 2x2 minors ``a_ik a_jl - a_il a_jk``, rows ``(i,j)``, columns ``(k,l)``."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] < 2 or a.shape[1] < 2:
        raise ValueError(f"second compound needs an m x n matrix with m, n >= 2, got {a.shape}")
    i, j = _pair_index_arrays(a.shape[0])
    k, l = _pair_index_arrays(a.shape[1])
    return a[np.ix_(i, k)] * a[np.ix_(j, l)] - a[np.ix_(i, l)] * a[np.ix_(j, k)]


def _commutators(ms: np.ndarray) -> np.ndarray:
    r, s = _pair_index_arrays(ms.shape[0])
    return ms[r] @ ms[s] - ms[s] @ ms[r]


def gram_of_commutators(ms) -> np.ndarray:
    """Inner products ``<[B_r, B_s], [B_u, B_v]>`` over pairs ``r < s``, ``u < v``."""
    ms = np.asarray(ms, dtype=float)
    if ms.ndim != 3 or ms.shape[1] != ms.shape[2]:
        raise ValueError(f"expected a stack of square matrices, got shape {ms.shape}")
    if ms.shape[0] < 2:
        return np.zeros((0, 0))
    flat = _commutators(ms).reshape(pair_count(ms.shape[0]), -1)
    return flat @ flat.T


@lru_cache(maxsize=None)
def basis_gram(n: int) -> np.ndarray:
    """``C(E~)`` for the standard basis of o(n); cached and read-only."""
    return _frozen(gram_of_commutators(standard_basis(n)))


def lhs_via_trace(t) -> float:
    """``2 Tr(phi(B B^t) C(E~))`` with ``B`` the coefficient matrix of ``t``."""
    t = np.asarray(t, dtype=float)
    n = t.shape[1]
    if n < 3:
        return 0.0
    b = coefficients_of(t)
    return float(2.0 * np.sum(second_compound(b @ b.T) * basis_gram(n).T))


@lru_cache(maxsize=None)
def _sparse_basis_gram(n: int) -> tuple[np.ndarray, ...]:
    g = basis_gram(n)
    rows, cols = np.nonzero(g)
    i, j = _pair_index_arrays(pair_count(n))
    return tuple(_frozen(x) for x in (i[rows], j[rows], i[cols], j[cols], g[rows, cols]))


def lhs_via_trace_batch(ts) -> np.ndarray:
    """Vectorized :func:`lhs_via_trace` over a batch ``(k, m, n, n)``.

    Only the nonzero entries of ``C(E~)`` are visited, so each tuple costs
    ``O(n^4)`` rather than forming dense compound matrices.
    """
    ts = np.asarray(ts, dtype=float)
    n = ts.shape[-1]
    if n < 3:
        return np.zeros(ts.shape[0])
    rows, cols = _pair_index_arrays(n)
    coeffs = np.sqrt(2.0) * ts[..., rows, cols]  # (k, m, N)
    gram = np.einsum("kra,krb->kab", coeffs, coeffs)
    ia, ja, ka, la, w = _sparse_basis_gram(n)
    minors = gram[:, ia, ka] * gram[:, ja, la] - gram[:, ia, la] * gram[:, ja, ka]
    return 2.0 * minors @ w
