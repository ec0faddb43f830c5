"""Canonical block form of a skew matrix and the pairwise lemmas built on it.

Every real skew matrix ``A`` admits an orthogonal ``P`` with ``P A P^t``
block diagonal, blocks ``[[0, lam_k], [-lam_k, 0]]`` (and a trailing zero for
odd ``n``). This module computes that frame, the unitary diagonalization
``U (i P A P^t) U^*`` in closed form, the pairwise commutator bound with its
equality frames, the orthogonal factor relating two matrices with equal
Gram matrices, and the lambda-vector estimates.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .eigen import jacobi_eigh
from .errors import BoundViolation, UnsupportedDimensionError
from .skew_core import c_triple, commutator, d_triple, frobenius_norm_sq, skew

CLUSTER_GAP = 1e-8
EQUALITY_RTOL = 1e-9
FRAME_TOL = 1e-7


@dataclass(frozen=True)
class CanonicalForm:
    P: np.ndarray
    lambdas: np.ndarray

    @property
    def n(self) -> int:
        return self.P.shape[0]

    def block(self) -> np.ndarray:
        return block_diagonal(self.lambdas, self.n)

    def residual(self, a) -> float:
        """Frobenius distance between ``P A P^t`` and the block form."""
        a = np.asarray(a, dtype=float)
        return float(np.linalg.norm(self.P @ a @ self.P.T - self.block()))


def block_diagonal(lambdas, n: int) -> np.ndarray:
    out = np.zeros((n, n))
    for k, lam in enumerate(lambdas):
        out[2 * k, 2 * k + 1] = lam
        out[2 * k + 1, 2 * k] = -lam
    return out


def _pivot(v: np.ndarray) -> int:
    # first original direction carrying at least half the average weight
    weights = np.sum(v * v, axis=1)
    threshold = 0.5 * v.shape[1] / v.shape[0]
    return int(np.flatnonzero(weights >= threshold)[0])


def _orient(x: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(x) > 1e-12)
    if nz.size and x[nz[0]] < 0:
        return -x
    return x


def _pair_cluster(a: np.ndarray, v: np.ndarray) -> tuple[list[tuple[float, np.ndarray, np.ndarray]], np.ndarray]:
    """Split an invariant subspace (orthonormal columns ``v``) into 2-planes."""
    blocks = []
    while v.shape[1] >= 2:
        i = _pivot(v)
        x = v @ v[i]
        x /= np.linalg.norm(x)
        w = v @ (v.T @ (a @ x))
        w -= (w @ x) * x
        lam = float(np.linalg.norm(w))
        if lam == 0.0:
            break
        y = -w / lam
        blocks.append((float(x @ a @ y), x, y))
        rest = v - np.outer(x, x @ v) - np.outer(y, y @ v)
        u, _, _ = np.linalg.svd(rest, full_matrices=False)
        v = u[:, : v.shape[1] - 2]
    return blocks, v


def _decompose(a: np.ndarray) -> tuple[list[tuple[float, np.ndarray, np.ndarray]], list[np.ndarray]]:
    n = a.shape[0]
    norm2 = frobenius_norm_sq(a)
    if norm2 == 0.0:
        return [], [e for e in np.eye(n)]
    values, vectors = jacobi_eigh(a.T @ a, tol=1e-14 * norm2)
    top = values[0]

    zero = values <= CLUSTER_GAP * top
    blocks: list[tuple[float, np.ndarray, np.ndarray]] = []
    leftovers: list[np.ndarray] = []
    start = 0
    npos = int(np.count_nonzero(~zero))
    while start < npos:
        stop = start + 1
        while stop < npos and values[stop - 1] - values[stop] <= CLUSTER_GAP * top:
            stop += 1
        found, rest = _pair_cluster(a, vectors[:, start:stop])
        blocks.extend(found)
        leftovers.extend(rest.T)
        start = stop

    w = np.column_stack([vectors[:, npos:], *(x[:, None] for x in leftovers)])
    kernel: list[np.ndarray] = []
    if w.shape[1] >= 2:
        restricted = w.T @ a @ w
        restricted = 0.5 * (restricted - restricted.T)
        if frobenius_norm_sq(restricted) > 0.0:
            sub_blocks, sub_kernel = _decompose(restricted)
            blocks.extend((lam, w @ x, w @ y) for lam, x, y in sub_blocks)
            kernel.extend(w @ x for x in sub_kernel)
        else:
            kernel.extend(w.T)
    else:
        kernel.extend(w.T)
    return blocks, kernel


def canonical_form(a) -> CanonicalForm:
    """Orthogonal frame ``P`` and sorted block parameters of the skew matrix ``a``."""
    a = skew(a)
    n = a.shape[0]
    blocks, kernel = _decompose(a)
    order = sorted(range(len(blocks)), key=lambda k: -blocks[k][0])
    rows = []
    lambdas = []
    for k in order:
        lam, x, y = blocks[k]
        rows.extend([x, y])
        lambdas.append(max(lam, 0.0))
    kernel = [_orient(x) for x in kernel]
    while len(lambdas) < n // 2:
        rows.extend(kernel[:2])
        kernel = kernel[2:]
        lambdas.append(0.0)
    rows.extend(kernel)
    p = np.array(rows)
    return CanonicalForm(P=p, lambdas=np.array(lambdas))


def complex_diagonal(cf: CanonicalForm) -> np.ndarray:
    """Diagonal ``(lam_1, -lam_1, ..., 0)`` of ``U (i P A P^t) U^*``."""
    u = np.zeros(cf.n)
    u[0 : 2 * len(cf.lambdas) : 2] = cf.lambdas
    u[1 : 2 * len(cf.lambdas) : 2] = -cf.lambdas
    return u


def unitary_u(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Real and imaginary parts of the block unitary ``U``."""
    re = np.zeros((n, n))
    im = np.zeros((n, n))
    s = 1.0 / np.sqrt(2.0)
    for k in range(n // 2):
        re[2 * k, 2 * k] = re[2 * k + 1, 2 * k + 1] = s
        im[2 * k, 2 * k + 1] = im[2 * k + 1, 2 * k] = s
    if n % 2:
        re[-1, -1] = 1.0
    return re, im


def conjugated_complex_entries(cf: CanonicalForm, b) -> tuple[np.ndarray, np.ndarray]:
    """Real and imaginary parts of ``U (i P B P^t) U^*``.

    Each entry is a fixed linear combination of two or four entries of
    ``q = P B P^t``; no complex matrix products are formed.
    """
    b = np.asarray(b, dtype=float)
    n = cf.n
    if b.shape != (n, n):
        raise ValueError(f"dimension mismatch: {b.shape} vs {(n, n)}")
    q = cf.P @ b @ cf.P.T
    re = np.zeros((n, n))
    im = np.zeros((n, n))
    half = n // 2
    for k in range(half):
        o, e = 2 * k, 2 * k + 1
        re[o, o] = q[o, e]
        re[e, e] = -q[o, e]
        for l in range(k + 1, half):
            lo, le = 2 * l, 2 * l + 1
            # (2k-1, 2l-1) and (2k, 2l) = -conj of it
            re[o, lo] = 0.5 * (q[o, le] - q[e, lo])
            im[o, lo] = 0.5 * (q[o, lo] + q[e, le])
            re[e, le], im[e, le] = -re[o, lo], im[o, lo]
            # (2k-1, 2l) and (2k, 2l-1) = -conj of it
            re[o, le] = 0.5 * (q[o, lo] - q[e, le])
            im[o, le] = 0.5 * (q[e, lo] + q[o, le])
            re[e, lo], im[e, lo] = -re[o, le], im[o, le]
        if n % 2:
            last = n - 1
            re[o, last] = -q[e, last] / np.sqrt(2.0)
            im[o, last] = q[o, last] / np.sqrt(2.0)
            # (2k, n) = -i * conj((2k-1, n))
            re[e, last] = -im[o, last]
            im[e, last] = -re[o, last]
    # Hermitian completion of the strictly lower triangle
    lower = np.tril_indices(n, k=-1)
    re[lower] = re.T[lower]
    im[lower] = -im.T[lower]
    return re, im


@dataclass(frozen=True)
class Lemma5Report:
    lhs: float
    bound: float
    residual: float
    equality: bool


def pair_constant(n: int) -> float:
    if n < 3:
        raise UnsupportedDimensionError("commutators of 2 x 2 skew matrices vanish; the bound starts at n = 3")
    return 0.5 if n == 3 else 1.0


def lemma5_report(a, b) -> Lemma5Report:
    """Compare ``||[A, B]||^2`` with ``c(n) ||A||^2 ||B||^2``."""
    a = skew(a)
    b = skew(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    bound = pair_constant(a.shape[0]) * frobenius_norm_sq(a) * frobenius_norm_sq(b)
    lhs = frobenius_norm_sq(commutator(a, b))
    residual = bound - lhs
    if residual < -EQUALITY_RTOL * max(1.0, bound):
        raise BoundViolation(f"pairwise bound violated: lhs={lhs!r} bound={bound!r}")
    return Lemma5Report(lhs=lhs, bound=bound, residual=residual,
                        equality=bound > 0.0 and residual <= EQUALITY_RTOL * bound)


@dataclass(frozen=True)
class Lemma5Frame:
    P: np.ndarray
    a: float
    b: float
    lam: float


def lemma5_equality_frame(a, b) -> Lemma5Frame | None:
    """Frame putting an extremal pair into normal form.

    For ``n = 3``: ``P A P^t = C_1`` and ``P B P^t = a C_2 + b C_3``; for
    ``n >= 4`` the same with ``diag(D_k, 0)``. All normal-form matrices share
    the block parameter ``lam`` of ``A``. Returns ``None`` when the pair is not
    extremal.
    """
    a = skew(a)
    b = skew(b)
    if not lemma5_report(a, b).equality:
        return None
    n = a.shape[0]
    cf = canonical_form(a)
    p = cf.P
    if n == 3:
        lam = float(cf.lambdas[0])
        forms = c_triple(lam)
    else:
        lam = float(0.5 * (cf.lambdas[0] + cf.lambdas[1]))
        forms = d_triple(lam, n)
    unit = frobenius_norm_sq(forms[0])
    bt = p @ b @ p.T
    ca = float(np.sum(bt * forms[1]) / unit)
    cb = float(np.sum(bt * forms[2]) / unit)
    err_a = np.linalg.norm(p @ a @ p.T - forms[0]) / max(1.0, np.linalg.norm(a))
    err_b = np.linalg.norm(bt - (ca * forms[1] + cb * forms[2])) / max(1.0, np.linalg.norm(b))
    if max(err_a, err_b) > FRAME_TOL:
        return None
    return Lemma5Frame(P=p, a=ca, b=cb, lam=lam)


def orthogonal_factor(a, b, gram_tol: float = 1e-8, tol: float = 1e-7) -> np.ndarray | None:
    """Orthogonal ``R`` with ``A = B R`` when ``A A^t = B B^t``, else ``None``.

    Solved as an orthogonal Procrustes problem: with ``B^t A = W S Z^t``,
    ``R = W Z^t`` is exact whenever the Gram matrices agree, because any
    freedom left in ``R`` lies in the kernel of ``B``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 2:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    scale = max(1.0, float(np.sum(a * a)))
    if np.linalg.norm(a @ a.T - b @ b.T) >= gram_tol * scale:
        return None
    w, _, zt = np.linalg.svd(b.T @ a)
    r = w @ zt
    if np.linalg.norm(a - b @ r) >= tol * np.sqrt(scale):
        return None
    return r


def lambda_vector(values) -> np.ndarray:
    """Validate a normalized lambda vector (descending, >= 0, squares sum to 1/2)."""
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("expected a non-empty 1-D vector")
    if np.any(v < 0) or np.any(np.diff(v) > 0):
        raise ValueError("lambdas must be nonnegative and sorted descending")
    if abs(float(np.sum(v * v)) - 0.5) > 1e-10:
        raise ValueError("lambdas must satisfy sum(lambda^2) = 1/2")
    return v


def index_set_I(values) -> frozenset[tuple[int, int]]:
    """Pairs ``(i, j)`` (1-based) with ``(lam_i + lam_j)^2 > 2/3``.

    When non-empty the set is always ``{1} x {2, ..., n0 + 1}``; that shape is
    checked on every call.
    """
    v = lambda_vector(values)
    pairs = frozenset((i + 1, j + 1) for i, j in combinations(range(v.size), 2)
                      if (v[i] + v[j]) ** 2 > 2.0 / 3.0)
    if pairs:
        expected = {(1, j) for j in range(2, len(pairs) + 2)}
        if pairs != expected:
            raise BoundViolation(f"index set {sorted(pairs)} is not of the form {{1}} x {{2..n0+1}}")
    return pairs


def lemma2_value(values) -> float:
    """``sum over I of ((lam_i + lam_j)^2 - 2/3)``; never exceeds 1/3."""
    v = lambda_vector(values)
    total = sum((v[i - 1] + v[j - 1]) ** 2 - 2.0 / 3.0 for i, j in index_set_I(v))
    return float(total)
