"""Pointwise curvature of Riemannian submersions with totally geodesic fibres.

Horizontal indices ``i, j`` run over ``1..n`` and vertical indices ``r, s``
over ``1..m`` (shifted down from ``n+1..n+m``). Tables are numpy arrays with
0-based storage, so ``K_ir[i-1, r-1]`` is the mixed curvature of the plane
spanned by ``X_i`` and ``U_r``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericFailure, UnsupportedInputError
from .inequality import bound_constant, equality_canonicalize
from .skew_core import commutator_sum, d_triple, norm_sum, skew_tuple

SYM_TOL = 1e-12


def _sym(name: str, a, shape: tuple[int, int], zero_diagonal: bool = False) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.shape != shape:
        raise ValueError(f"{name} must have shape {shape}, got {a.shape}")
    if np.max(np.abs(a - a.T), initial=0.0) > SYM_TOL * max(1.0, float(np.max(np.abs(a), initial=0.0))):
        raise ValueError(f"{name} must be symmetric")
    if zero_diagonal and np.any(np.diag(a) != 0):
        raise ValueError(f"{name} must have zero diagonal")
    return a


@dataclass(frozen=True)
class SubmersionPointData:
    n: int
    m: int
    A: np.ndarray
    fiber_ricci: np.ndarray
    fiber_sectional: np.ndarray
    base_sectional: np.ndarray | None
    base_ricci: np.ndarray | None
    mu_hat: float
    kappa_check: float | None
    lambda_check: float | None
    T: np.ndarray | None = None
    T_derivative: np.ndarray | None = None  # T^i_{rri} as an n x m table

    def __post_init__(self):
        a = skew_tuple(self.A)
        if a.shape != (self.m, self.n, self.n):
            raise ValueError(f"A must have shape {(self.m, self.n, self.n)}, got {a.shape}")
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "fiber_ricci", _sym("fiber_ricci", self.fiber_ricci, (self.m, self.m)))
        object.__setattr__(self, "fiber_sectional",
                           _sym("fiber_sectional", self.fiber_sectional, (self.m, self.m), zero_diagonal=True))
        if self.base_sectional is not None:
            object.__setattr__(self, "base_sectional",
                               _sym("base_sectional", self.base_sectional, (self.n, self.n), zero_diagonal=True))
        if self.base_ricci is not None:
            object.__setattr__(self, "base_ricci", _sym("base_ricci", self.base_ricci, (self.n, self.n)))
        if self.T is not None:
            t = np.asarray(self.T, dtype=float)
            if t.shape != (self.m, self.m, self.n):
                raise ValueError(f"T must have shape {(self.m, self.m, self.n)}")
            if np.max(np.abs(t - t.transpose(1, 0, 2))) > SYM_TOL * max(1.0, float(np.max(np.abs(t)))):
                raise ValueError("T^i_rs must be symmetric in r, s")
            object.__setattr__(self, "T", t)
        if self.T_derivative is not None:
            td = np.asarray(self.T_derivative, dtype=float)
            if td.shape != (self.n, self.m):
                raise ValueError(f"T_derivative must have shape {(self.n, self.m)}")
            object.__setattr__(self, "T_derivative", td)

    @property
    def a_norm_sq(self) -> float:
        """``|A|^2 = sum_{r,i,j} (A^r_ij)^2``."""
        return float(norm_sum(self.A))

    @property
    def totally_geodesic(self) -> bool:
        return self.T is None or not np.any(self.T)


@dataclass(frozen=True)
class CurvatureTables:
    K_rs: np.ndarray | None = None
    K_ir: np.ndarray | None = None
    K_ij: np.ndarray | None = None
    R_rs: np.ndarray | None = None
    R_ij: np.ndarray | None = None
    R_ir: np.ndarray | None = None
    notes: tuple[str, ...] = field(default=())

    def items(self):
        for name in ("K_rs", "K_ir", "K_ij", "R_rs", "R_ij", "R_ir"):
            yield name, getattr(self, name)


def _off_diagonal(a: np.ndarray) -> np.ndarray:
    return a - np.diag(np.diag(a))


def sectional_curvatures(data: SubmersionPointData) -> CurvatureTables:
    """Sectional curvatures of the total space on coordinate 2-planes.

    Diagonal entries of ``K_rs`` and ``K_ij`` are set to zero. ``K_ir`` needs
    the derivative term ``T^i_rri`` when ``T != 0``; without it that table
    is ``None`` and the reason is recorded in ``notes``.
    """
    a = data.A
    notes = []
    k_rs = data.fiber_sectional.copy()
    if not data.totally_geodesic:
        t = data.T
        diag = np.einsum("rri->ri", t)
        k_rs = k_rs + np.einsum("rsi->rs", t * t) - np.einsum("ri,si->rs", diag, diag)
    k_rs = _off_diagonal(k_rs)

    a_rows = np.einsum("rij->ir", a * a)  # sum_j (A^r_ij)^2
    if data.totally_geodesic:
        k_ir = a_rows
    elif data.T_derivative is not None:
        k_ir = data.T_derivative - np.einsum("rsi->ir", data.T * data.T) + a_rows
    else:
        k_ir = None
        notes.append("K_ir unsupported: T != 0 and no T^i_rri table supplied")

    k_ij = None
    if data.base_sectional is not None:
        k_ij = _off_diagonal(data.base_sectional - 3.0 * np.einsum("rij->ij", a * a))
    else:
        notes.append("K_ij unavailable: no base sectional data")
    return CurvatureTables(K_rs=k_rs, K_ir=k_ir, K_ij=k_ij, notes=tuple(notes))


def ricci_curvatures(data: SubmersionPointData) -> CurvatureTables:
    """Ricci curvatures; requires totally geodesic fibres.

    ``R_ir`` is reported as zero, which is the Yang-Mills assumption rather
    than something computable from pointwise data.
    """
    if not data.totally_geodesic:
        raise UnsupportedInputError("Ricci formulas need totally geodesic fibres (T = 0)")
    a = data.A
    r_rs = data.fiber_ricci + np.einsum("rij,sij->rs", a, a)
    r_ij = None
    notes = ()
    if data.base_ricci is not None:
        r_ij = data.base_ricci - 2.0 * np.einsum("rik,rjk->ij", a, a)
    else:
        notes = ("R_ij unavailable: no base Ricci data",)
    return CurvatureTables(R_rs=r_rs, R_ij=r_ij, R_ir=np.zeros((data.n, data.m)), notes=notes)


def curvature_tables(data: SubmersionPointData) -> CurvatureTables:
    k = sectional_curvatures(data)
    r = ricci_curvatures(data)
    return CurvatureTables(K_rs=k.K_rs, K_ir=k.K_ir, K_ij=k.K_ij, R_rs=r.R_rs, R_ij=r.R_ij,
                           R_ir=r.R_ir, notes=k.notes + r.notes)


# -- integrands --------------------------------------------------------------

def raw_integrand(data: SubmersionPointData) -> float:
    """``sum ||[A^r, A^s]||^2 + (4 mu + 2 kappa - 2 lambda) |A|^2``."""
    norm = data.a_norm_sq
    spectral = 4.0 * data.mu_hat + 2.0 * _need(data.kappa_check) - 2.0 * _need(data.lambda_check)
    return float(commutator_sum(data.A)) + spectral * norm


def _need(value: float | None) -> float:
    if value is None:
        raise UnsupportedInputError("base spectral data is required for this integrand")
    return float(value)


def simons_integrand(case: str, data: SubmersionPointData) -> float:
    """Pointwise integrand of the integral inequality in cases i-iv.

    For cases iii and iv the raw integrand is at most twice the cased one
    (the commutator bound applied to ``A^1..A^m``); that is checked here.
    """
    norm = data.a_norm_sq
    if case == "i":
        if data.n != 2:
            raise ValueError("case i needs n = 2")
        return norm * data.mu_hat
    if case == "ii":
        if data.m != 1:
            raise ValueError("case ii needs m = 1")
        return norm * (_need(data.kappa_check) - _need(data.lambda_check))
    if case not in ("iii", "iv"):
        raise ValueError(f"unknown case {case!r}")
    if data.m < 2 or (case == "iii" and data.n != 3) or (case == "iv" and data.n < 4):
        raise ValueError(f"case {case} does not apply to n = {data.n}, m = {data.m}")
    d = bound_constant(data.n)
    value = norm * (0.5 * d * norm + 2.0 * data.mu_hat + _need(data.kappa_check) - _need(data.lambda_check))
    raw = raw_integrand(data)
    if raw > 2.0 * value + 1e-9 * max(1.0, abs(raw)):
        raise NumericFailure(f"raw integrand {raw!r} exceeds twice the cased integrand {value!r}")
    return value


@dataclass(frozen=True)
class SpectralCheck:
    mu_hat_ok: bool
    lambda_check_ok: bool | None
    kappa_lower_bound: float | None
    kappa_flag: bool


def spectral_consistency(data: SubmersionPointData, tol: float = 1e-9) -> SpectralCheck:
    """Compare the scalar bounds with the tables they summarize.

    ``kappa_check`` can only be bounded below by ``max K_ij`` from sectional
    data, so a discrepancy there raises a flag rather than failing.
    """
    mu_ok = abs(float(np.max(np.linalg.eigvalsh(data.fiber_ricci))) - data.mu_hat) <= tol * max(1.0, abs(data.mu_hat))
    lam_ok = None
    if data.base_ricci is not None and data.lambda_check is not None:
        lowest = float(np.min(np.linalg.eigvalsh(data.base_ricci)))
        lam_ok = abs(lowest - data.lambda_check) <= tol * max(1.0, abs(lowest))
    bound = None
    flag = False
    if data.base_sectional is not None and data.n >= 2:
        off = data.base_sectional[~np.eye(data.n, dtype=bool)]
        bound = float(np.max(off))
        flag = data.kappa_check is not None and data.kappa_check < bound - tol * max(1.0, abs(bound))
    return SpectralCheck(mu_hat_ok=mu_ok, lambda_check_ok=lam_ok, kappa_lower_bound=bound, kappa_flag=flag)


# -- models ------------------------------------------------------------------

def _check_a(a: float) -> float:
    a = float(a)
    if not a > 0:
        raise ValueError("a must be positive")
    return a


def _constant(size: int, value: float) -> np.ndarray:
    return value * (np.ones((size, size)) - np.eye(size))


def _space_form(dim: int, k: float) -> tuple[np.ndarray, np.ndarray]:
    """Sectional and Ricci tables of a space of constant curvature ``k``."""
    return _constant(dim, k), (dim - 1) * k * np.eye(dim)


def equality_model_case3(a: float) -> SubmersionPointData:
    """``n = m = 3`` equality data with ``|A|^2 = 24 a``."""
    a = _check_a(a)
    pattern = np.zeros((3, 3, 3))
    for r, (i, j) in enumerate(((0, 1), (0, 2), (1, 2))):
        pattern[r, i, j], pattern[r, j, i] = 1.0, -1.0
    fk, fr = _space_form(3, a)
    bk, br = _space_form(3, 8.0 * a)
    return SubmersionPointData(n=3, m=3, A=2.0 * np.sqrt(a) * pattern, fiber_ricci=fr, fiber_sectional=fk,
                               base_sectional=bk, base_ricci=br, mu_hat=2.0 * a,
                               kappa_check=8.0 * a, lambda_check=16.0 * a)


def equality_model_case4(a: float, n: int = 4) -> SubmersionPointData:
    """``m = 3`` equality data with ``|A|^2 = 12 a``.

    Base data is known for ``n = 4`` (curvature ``4a``) and ``n = 5``
    (curvature ``8a/3``); for larger ``n`` only ``A`` and the fibre are set.
    """
    a = _check_a(a)
    if n < 4:
        raise ValueError("case 4 models need n >= 4")
    fk, fr = _space_form(3, a)
    base = {4: 4.0 * a, 5: 8.0 * a / 3.0}.get(n)
    bk = br = kappa = lam = None
    if base is not None:
        bk, br = _space_form(n, base)
        kappa, lam = base, (n - 1) * base
    return SubmersionPointData(n=n, m=3, A=np.sqrt(a) * d_triple(1.0, n), fiber_ricci=fr, fiber_sectional=fk,
                               base_sectional=bk, base_ricci=br, mu_hat=2.0 * a,
                               kappa_check=kappa, lambda_check=lam)


def quaternion_left(a: float = 1.0) -> np.ndarray:
    """Left multiplication by ``i, j, k`` on ``H = R^4`` (basis ``1, i, j, k``)."""
    units = {"1": 0, "i": 1, "j": 2, "k": 3}
    table = {  # (left factor, basis element) -> (sign, product)
        ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
        ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
        ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1"),
    }
    out = np.zeros((3, 4, 4))
    for r, q in enumerate("ijk"):
        for e, col in units.items():
            sign, prod = table[(q, e)]
            out[r, units[prod], col] = sign
    return np.sqrt(a) * out


def hopf_point_model(a: float) -> SubmersionPointData:
    """Pointwise data of ``S^7(1/sqrt a) -> S^4(1/(2 sqrt a))``.

    The integrability tensor is built from quaternion left multiplication and
    must agree with the case-4 equality model up to the O(4) x O(3) action.
    """
    a = _check_a(a)
    ref = equality_model_case4(a, 4)
    tensor = quaternion_left(a)
    mine = equality_canonicalize(tensor)
    theirs = equality_canonicalize(ref.A)
    if mine is None or theirs is None or mine.form_tag != theirs.form_tag or abs(mine.lam - theirs.lam) > 1e-12 * max(1.0, theirs.lam):
        raise NumericFailure("quaternion tensor is not equivalent to the case-4 equality model")
    return SubmersionPointData(n=4, m=3, A=tensor, fiber_ricci=ref.fiber_ricci, fiber_sectional=ref.fiber_sectional,
                               base_sectional=ref.base_sectional, base_ricci=ref.base_ricci, mu_hat=ref.mu_hat,
                               kappa_check=ref.kappa_check, lambda_check=ref.lambda_check)


def hopf_s3_model(a: float) -> SubmersionPointData:
    """``S^3(1/sqrt a) -> S^2(1/(2 sqrt a))`` with a one-dimensional fibre."""
    a = _check_a(a)
    bk, br = _space_form(2, 4.0 * a)
    tensor = np.sqrt(a) * np.array([[[0.0, 1.0], [-1.0, 0.0]]])
    return SubmersionPointData(n=2, m=1, A=tensor, fiber_ricci=np.zeros((1, 1)), fiber_sectional=np.zeros((1, 1)),
                               base_sectional=bk, base_ricci=br, mu_hat=0.0,
                               kappa_check=4.0 * a, lambda_check=4.0 * a)


# -- closed forms --------------------------------------------------------------

def expected_tables(case: str, a: float, n: int | None = None) -> CurvatureTables:
    """Closed-form curvature tables of the equality models, written out
    entry by entry rather than derived from ``A``."""
    a = _check_a(a)
    if case == "case3":
        k_ir = np.full((3, 3), 4.0 * a)
        for i, r in ((1, 3), (2, 2), (3, 1)):
            k_ir[i - 1, r - 1] = 0.0
        return CurvatureTables(K_rs=_constant(3, a), K_ir=k_ir, K_ij=_constant(3, -4.0 * a),
                               R_rs=10.0 * a * np.eye(3), R_ij=np.zeros((3, 3)), R_ir=np.zeros((3, 3)))
    if case == "case4" and n == 5:
        k_ij = _constant(5, -a / 3.0)
        k_ij[:4, 4] = k_ij[4, :4] = 8.0 * a / 3.0
        k_ir = np.full((5, 3), a)
        k_ir[4] = 0.0
        r_ij = np.diag([14.0 * a / 3.0] * 4 + [32.0 * a / 3.0])
        return CurvatureTables(K_rs=_constant(3, a), K_ir=k_ir, K_ij=k_ij,
                               R_rs=6.0 * a * np.eye(3), R_ij=r_ij, R_ir=np.zeros((5, 3)))
    if case in ("hopf", "case4") and (n is None or n == 4):
        return CurvatureTables(K_rs=_constant(3, a), K_ir=np.full((4, 3), a), K_ij=_constant(4, a),
                               R_rs=6.0 * a * np.eye(3), R_ij=6.0 * a * np.eye(4), R_ir=np.zeros((4, 3)))
    if case == "hopf-s3":
        return CurvatureTables(K_rs=np.zeros((1, 1)), K_ir=np.full((2, 1), a), K_ij=_constant(2, a),
                               R_rs=2.0 * a * np.eye(1), R_ij=2.0 * a * np.eye(2), R_ir=np.zeros((2, 1)))
    raise ValueError(f"no closed form for case {case!r} with n = {n}")


def model_for(case: str, a: float, n: int | None = None) -> SubmersionPointData:
    if case == "case3":
        return equality_model_case3(a)
    if case == "case4":
        return equality_model_case4(a, 5 if n is None else n)
    if case == "hopf":
        return hopf_point_model(a)
    if case == "hopf-s3":
        return hopf_s3_model(a)
    raise ValueError(f"unknown case {case!r}")
