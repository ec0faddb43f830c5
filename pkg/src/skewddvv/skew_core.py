"""Small dense algebra on tuples of real skew-symmetric matrices.

A skew matrix is a read-only ``(n, n)`` float array and a tuple of them is a
read-only ``(m, n, n)`` array. Index pairs are 1-based ``(i, j)`` with
``i < j`` and are ranked lexicographically, which is the order used for the
standard basis of o(n), for coefficient matrices and for compound matrices.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

SKEW_TOL = 1e-12
ORTHO_TOL = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def skew(a, tol: float = SKEW_TOL) -> np.ndarray:
    """Validate ``a`` as a skew-symmetric matrix and return it symmetrized.

    The defect ``max |a + a^t|`` may be at most ``tol`` times
    ``max(1, max |a|)``; within that the matrix is replaced by
    ``(a - a^t) / 2``.
    """
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 2:
        raise ValueError("skew matrices need dimension n >= 2")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    defect = np.max(np.abs(a + a.T))
    if defect > tol * max(1.0, float(np.max(np.abs(a)))):
        raise ValueError(f"matrix is not skew-symmetric (defect {defect:.3e})")
    return _frozen(0.5 * (a - a.T))


def skew_tuple(members, tol: float = SKEW_TOL) -> np.ndarray:
    """Stack ``members`` into an ``(m, n, n)`` skew tuple."""
    mats = [skew(b, tol) for b in members]
    if not mats:
        raise ValueError("a skew tuple needs at least one member")
    n = mats[0].shape[0]
    if any(b.shape != (n, n) for b in mats):
        raise ValueError("tuple members must share one dimension")
    return _frozen(np.stack(mats))


def _same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")


def commutator(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    _same_shape(a, b)
    return a @ b - b @ a


def frobenius_inner(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    _same_shape(a, b)
    return float(np.sum(a * b))


def frobenius_norm_sq(a) -> float:
    a = np.asarray(a, dtype=float)
    return float(np.sum(a * a))


def pair_count(n: int) -> int:
    return n * (n - 1) // 2


@lru_cache(maxsize=None)
def index_pairs(n: int) -> tuple[tuple[int, int], ...]:
    """All 1-based pairs ``(i, j)``, ``1 <= i < j <= n``, in rank order."""
    if n < 2:
        raise ValueError("need n >= 2")
    return tuple((i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1))


@lru_cache(maxsize=None)
def _pair_index_arrays(n: int) -> tuple[np.ndarray, np.ndarray]:
    rows, cols = np.triu_indices(n, k=1)
    return _frozen(rows), _frozen(cols)


def pair_rank(n: int, pair: tuple[int, int]) -> int:
    """Rank (1-based) of the pair ``(i, j)`` among all pairs of ``1..n``."""
    i, j = pair
    if not (1 <= i < j <= n):
        raise ValueError(f"pair {pair} is not 1 <= i < j <= {n}")
    # pairs starting with 1..i-1 come first
    before = (i - 1) * n - (i - 1) * i // 2
    return before + (j - i)


def rank_pair(n: int, rank: int) -> tuple[int, int]:
    """Inverse of :func:`pair_rank`."""
    big_n = pair_count(n)
    if not (1 <= rank <= big_n):
        raise ValueError(f"rank {rank} is outside 1..{big_n}")
    return index_pairs(n)[rank - 1]


@lru_cache(maxsize=None)
def standard_basis(n: int) -> np.ndarray:
    """The orthonormal basis ``(E_ij - E_ji)/sqrt(2)`` of o(n), ``(N, n, n)``."""
    if n < 2:
        raise ValueError("standard basis needs n >= 2")
    rows, cols = _pair_index_arrays(n)
    basis = np.zeros((len(rows), n, n))
    idx = np.arange(len(rows))
    basis[idx, rows, cols] = 1.0 / np.sqrt(2.0)
    basis[idx, cols, rows] = -1.0 / np.sqrt(2.0)
    return _frozen(basis)


def is_orthogonal(p, tol: float = ORTHO_TOL) -> bool:
    p = np.asarray(p, dtype=float)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        return False
    return bool(np.max(np.abs(p @ p.T - np.eye(p.shape[0]))) <= tol)


def apply_k_action(p, r, t) -> np.ndarray:
    """Act by ``(P, R)`` in O(n) x O(m): member ``s`` becomes ``sum_r R[r, s] P B_r P^t``."""
    p = np.asarray(p, dtype=float)
    r = np.asarray(r, dtype=float)
    t = np.asarray(t, dtype=float)
    m, n = t.shape[0], t.shape[1]
    if p.shape != (n, n) or not is_orthogonal(p):
        raise ValueError("P must be an orthogonal n x n matrix")
    if r.shape != (m, m) or not is_orthogonal(r):
        raise ValueError("R must be an orthogonal m x m matrix")
    conj = p @ t @ p.T
    out = np.einsum("rs,rij->sij", r, conj)
    return _frozen(0.5 * (out - out.transpose(0, 2, 1)))


def coefficients_of(t) -> np.ndarray:
    """``N x m`` matrix whose column ``r`` expands member ``r`` in the standard basis."""
    t = np.asarray(t, dtype=float)
    rows, cols = _pair_index_arrays(t.shape[1])
    return np.sqrt(2.0) * t[:, rows, cols].T


def tuple_from_coefficients(n: int, coeffs) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.ndim != 2 or coeffs.shape[0] != pair_count(n):
        raise ValueError(f"expected {pair_count(n)} coefficient rows for n={n}")
    return _frozen(np.einsum("ar,aij->rij", coeffs, standard_basis(n)))


def commutator_sum(t) -> np.ndarray | float:
    """``sum_{r,s} ||[B_r, B_s]||^2`` over ordered pairs.

    Accepts a single ``(m, n, n)`` tuple or a batch ``(..., m, n, n)``.
    """
    t = np.asarray(t, dtype=float)
    m = t.shape[-3]
    total = np.zeros(t.shape[:-3])
    for r in range(m):
        for s in range(r + 1, m):
            a, b = t[..., r, :, :], t[..., s, :, :]
            c = a @ b - b @ a
            total = total + np.sum(c * c, axis=(-2, -1))
    total = 2.0 * total
    return float(total) if total.ndim == 0 else total


def norm_sum(t) -> np.ndarray | float:
    """``sum_r ||B_r||^2`` for one tuple or a batch."""
    t = np.asarray(t, dtype=float)
    total = np.sum(t * t, axis=(-3, -2, -1))
    return float(total) if np.ndim(total) == 0 else total


def random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix via QR of a Gaussian matrix."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def random_skew_tuple(n: int, m: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Tuples with i.i.d. standard normal upper-triangular entries.

    Returns ``(m, n, n)`` or, with ``size``, a batch ``(size, m, n, n)``.
    """
    shape = (m,) if size is None else (size, m)
    rows, cols = _pair_index_arrays(n)
    out = np.zeros(shape + (n, n))
    vals = rng.standard_normal(shape + (len(rows),))
    out[..., rows, cols] = vals
    out[..., cols, rows] = -vals
    return out


def embed(block, n: int) -> np.ndarray:
    """``diag(block, 0)`` padded to size ``n``."""
    block = np.asarray(block, dtype=float)
    k = block.shape[0]
    if n < k:
        raise ValueError(f"cannot embed a {k} x {k} block in dimension {n}")
    out = np.zeros((n, n))
    out[:k, :k] = block
    return out


def c_triple(lam: float = 1.0) -> np.ndarray:
    """The three 3 x 3 extremal matrices for n = 3."""
    c = np.zeros((3, 3, 3))
    for r, (i, j) in enumerate(((0, 1), (0, 2), (1, 2))):
        c[r, i, j] = lam
        c[r, j, i] = -lam
    return c


def d_triple(lam: float = 1.0, n: int = 4) -> np.ndarray:
    """The three extremal matrices ``diag(D_r, 0)`` for n >= 4."""
    d1 = [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]
    d2 = [[0, 0, 1, 0], [0, 0, 0, -1], [-1, 0, 0, 0], [0, 1, 0, 0]]
    d3 = [[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]]
    return np.stack([embed(lam * np.array(d, dtype=float), n) for d in (d1, d2, d3)])


def pad_members(t, m: int) -> np.ndarray:
    """Append zero members so the tuple has length ``m``."""
    t = np.asarray(t, dtype=float)
    if m < t.shape[0]:
        raise ValueError("cannot shrink a tuple")
    return np.concatenate([t, np.zeros((m - t.shape[0],) + t.shape[1:])])
