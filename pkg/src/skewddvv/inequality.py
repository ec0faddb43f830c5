"""The commutator bound for skew tuples, its equality normal forms, and the
quadratic form over the simplex that the bound reduces to.

For a tuple ``B_1, ..., B_m`` of ``n x n`` skew matrices

    sum_{r,s} ||[B_r, B_s]||^2 <= d(n) (sum_r ||B_r||^2)^2,

with ``d(3) = 1/3`` and ``d(n) = 2/3`` for ``n >= 4``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .canonical import canonical_form, orthogonal_factor
from .errors import BoundViolation, UnsupportedDimensionError
from .skew_core import (
    apply_k_action,
    c_triple,
    coefficients_of,
    commutator_sum,
    d_triple,
    is_orthogonal,
    norm_sum,
    pad_members,
    pair_count,
    pair_rank,
    skew_tuple,
    tuple_from_coefficients,
)

EQUALITY_RTOL = 1e-9
NORMAL_FORM_TOL = 1e-6


def bound_constant(n: int) -> float:
    if n < 3:
        raise UnsupportedDimensionError(f"no commutator bound is defined for n = {n}; the left side vanishes")
    return 1.0 / 3.0 if n == 3 else 2.0 / 3.0


@dataclass(frozen=True)
class Theorem1Report:
    lhs: float
    rhs: float
    ratio: float
    d: float
    equality: bool


def theorem1_report(t) -> Theorem1Report:
    t = np.asarray(t, dtype=float)
    d = bound_constant(t.shape[-1])
    lhs = float(commutator_sum(t))
    total = float(norm_sum(t))
    rhs = d * total * total
    ratio = lhs / (total * total) if total > 0.0 else 0.0
    slack = EQUALITY_RTOL * max(1.0, rhs)
    if lhs > rhs + slack:
        raise BoundViolation(f"commutator bound violated: lhs={lhs!r} rhs={rhs!r}")
    return Theorem1Report(lhs=lhs, rhs=rhs, ratio=ratio, d=d,
                          equality=total > 0.0 and rhs - lhs <= slack)


def ratio_batch(ts) -> tuple[np.ndarray, np.ndarray]:
    """``(lhs, ratio)`` arrays for a batch ``(k, m, n, n)``; no bound check."""
    ts = np.asarray(ts, dtype=float)
    lhs = commutator_sum(ts)
    total = norm_sum(ts)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(total > 0.0, lhs / (total * total), 0.0)
    return np.atleast_1d(lhs), np.atleast_1d(ratio)


def extremal_forms(n: int, lam: float = 1.0) -> tuple[str, np.ndarray]:
    """``("C", C-triple)`` for ``n = 3`` and ``("D", diag(D_k, 0))`` otherwise."""
    bound_constant(n)
    if n == 3:
        return "C", c_triple(lam)
    return "D", d_triple(lam, n)


@dataclass(frozen=True)
class EqualityForm:
    P: np.ndarray
    R: np.ndarray
    lam: float
    form_tag: str
    residual: float


def _form_scale(tag: str, total: float) -> float:
    # ||C_k||^2 = 2 lam^2 and ||D_k||^2 = 4 lam^2, three members each
    return float(np.sqrt(total / (6.0 if tag == "C" else 12.0)))


def equality_canonicalize(t) -> EqualityForm | None:
    """``(P, R)`` taking an extremal tuple to the three normal-form members.

    The top direction of ``B B^t`` gives a member of the extremal span; its
    canonical frame ``P`` puts the whole span into C or D form, and the
    remaining orthogonal mixing ``R`` is recovered from the coefficient
    matrices. Returns ``None`` when ``t`` is not an equality configuration.
    """
    t = skew_tuple(t)
    report = theorem1_report(t)
    if not report.equality:
        return None
    m, n = t.shape[0], t.shape[1]
    if m < 3:
        return None
    coeffs = coefficients_of(t)
    u, _, _ = np.linalg.svd(coeffs, full_matrices=False)
    top = tuple_from_coefficients(n, u[:, :1])[0]
    p = canonical_form(top).P

    tag, _ = extremal_forms(n)
    lam = _form_scale(tag, float(norm_sum(t)))
    _, forms = extremal_forms(n, lam)
    target = pad_members(forms, m)
    conj = np.einsum("ij,rjk,lk->ril", p, t, p)
    r = orthogonal_factor(coefficients_of(target), coefficients_of(conj), gram_tol=NORMAL_FORM_TOL, tol=NORMAL_FORM_TOL)
    if r is None:
        return None
    image = apply_k_action(p, r, t)
    residual = float(np.linalg.norm(image - target)) / max(1.0, lam)
    if residual > NORMAL_FORM_TOL:
        return None
    return EqualityForm(P=p, R=r, lam=lam, form_tag=tag, residual=residual)


def basis_from_orthogonal(n: int, q) -> np.ndarray:
    """Orthonormal basis ``Q~_a = sum_b q_ba E~_b`` of o(n), ``(N, n, n)``."""
    q = np.asarray(q, dtype=float)
    big_n = pair_count(n)
    if q.shape != (big_n, big_n):
        raise ValueError(f"Q must be {big_n} x {big_n} for n = {n}, got {q.shape}")
    if not is_orthogonal(q):
        raise ValueError("Q must be orthogonal")
    return tuple_from_coefficients(n, q)


@dataclass(frozen=True)
class SimplexQuadratic:
    n: int
    Q: np.ndarray
    M: np.ndarray
    d: float

    @property
    def size(self) -> int:
        return self.M.shape[0]


def commutator_norm_matrix(basis: np.ndarray) -> np.ndarray:
    """``M[a, b] = ||[X_a, X_b]||^2`` for a stack of matrices."""
    prod = np.einsum("aij,bjk->abik", basis, basis)
    comm = prod - prod.transpose(1, 0, 2, 3)
    return np.sum(comm * comm, axis=(2, 3))


def simplex_quadratic(n: int, q=None) -> SimplexQuadratic:
    d = bound_constant(n)
    q = np.eye(pair_count(n)) if q is None else np.asarray(q, dtype=float)
    basis = basis_from_orthogonal(n, q)
    m = commutator_norm_matrix(basis)
    m = 0.5 * (m + m.T)
    np.fill_diagonal(m, 0.0)
    rows = m.sum(axis=1)
    if np.max(np.abs(rows - (n - 2))) > 1e-9 * max(1, n):
        raise BoundViolation(f"row sums {rows} differ from n - 2 = {n - 2}")
    return SimplexQuadratic(n=n, Q=q, M=m, d=d)


def f_q(sq: SimplexQuadratic, x) -> float:
    """``x^t M x - d (sum x)^2`` for a nonnegative vector ``x``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (sq.size,):
        raise ValueError(f"expected a vector of length {sq.size}")
    if np.any(x < 0):
        raise ValueError("x must be componentwise nonnegative")
    s = float(np.sum(x))
    return float(x @ sq.M @ x - sq.d * s * s)


def _index(sq: SimplexQuadratic, alpha) -> int:
    """0-based row for a 1-based rank or a 1-based pair ``(i, j)``."""
    if isinstance(alpha, tuple):
        return pair_rank(sq.n, alpha) - 1
    alpha = int(alpha)
    if not 1 <= alpha <= sq.size:
        raise ValueError(f"index {alpha} is outside 1..{sq.size}")
    return alpha - 1


def lemma4_sum(sq: SimplexQuadratic, alpha) -> float:
    """Row sum ``sum_b ||[Q~_a, Q~_b]||^2``; always ``n - 2``."""
    return float(np.sum(sq.M[_index(sq, alpha)]))


def lemma3_sum(sq: SimplexQuadratic, alpha, subset: Iterable) -> float:
    """``sum_{b in J} (M_ab - 2/3)``; never exceeds 2/3."""
    a = _index(sq, alpha)
    cols = sorted({_index(sq, b) for b in subset})
    total = float(np.sum(sq.M[a, cols] - 2.0 / 3.0)) if cols else 0.0
    if total > 2.0 / 3.0 + 1e-9:
        raise BoundViolation(f"subset sum {total!r} exceeds 2/3")
    return total
