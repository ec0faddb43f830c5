"""Numerical search for extremal configurations.

Two problems are treated: maximizing the deficit ``f_Q`` over the standard
simplex, and maximizing the scale-free ratio
``sum ||[B_r, B_s]||^2 / (sum ||B_r||^2)^2`` over tuple space.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .canonical import canonical_form
from .errors import BoundViolation
from .inequality import (
    EqualityForm,
    SimplexQuadratic,
    bound_constant,
    equality_canonicalize,
    extremal_forms,
    f_q,
    ratio_batch,
)
from .skew_core import coefficients_of, norm_sum, tuple_from_coefficients

SUPPORT_TOL = 1e-10


@dataclass(frozen=True)
class OptimizerConfig:
    seed: int = 0
    restarts: int = 32
    max_iterations: int = 10_000
    step_tolerance: float = 1e-12
    value_tolerance: float = 1e-9

    def __post_init__(self):
        if self.restarts < 1 or self.max_iterations < 1:
            raise ValueError("restarts and max_iterations must be positive")
        if self.step_tolerance <= 0 or self.value_tolerance <= 0:
            raise ValueError("tolerances must be positive")

    def sub_seeds(self) -> list[np.random.SeedSequence]:
        return np.random.SeedSequence(self.seed).spawn(self.restarts)


# -- simplex -----------------------------------------------------------------

def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto ``{x >= 0, sum x = 1}`` (sort-based)."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, v.size + 1)
    rho = np.flatnonzero(u - css / k > 0)[-1]
    return np.maximum(v - css[rho] / (rho + 1), 0.0)


@dataclass(frozen=True)
class SimplexResult:
    x_star: np.ndarray
    value: float
    iterations: int
    converged: bool
    trace: tuple[float, ...] = field(repr=False, default=())


def _objective(m: np.ndarray, d: float, x: np.ndarray) -> float:
    return float(x @ m @ x - d)


def _replicator(shifted: np.ndarray, m: np.ndarray, d: float, x: np.ndarray,
                cfg: OptimizerConfig) -> tuple[np.ndarray, list[float], bool]:
    values = [_objective(m, d, x)]
    for _ in range(cfg.max_iterations):
        payoff = shifted @ x
        nxt = x * payoff / (x @ payoff)
        step = float(np.max(np.abs(nxt - x)))
        x = nxt
        values.append(_objective(m, d, x))
        if step < cfg.step_tolerance:
            return x, values, True
    return x, values, False


def _polish(m: np.ndarray, d: float, x: np.ndarray, values: list[float], iterations: int = 200) -> np.ndarray:
    """Projected gradient steps with backtracking; never decreases the value."""
    best = values[-1]
    for _ in range(iterations):
        grad = 2.0 * (m @ x)
        step = 1.0
        while step > 1e-12:
            cand = project_simplex(x + step * grad)
            val = _objective(m, d, cand)
            if val > best:
                break
            step *= 0.5
        else:
            break
        gain = val - best
        x, best = cand, val
        values.append(val)
        if gain < 1e-15:
            break
    # exact stationary point on the current support, when it is an improvement
    support = np.flatnonzero(x > SUPPORT_TOL)
    k = support.size
    kkt = np.zeros((k + 1, k + 1))
    kkt[:k, :k] = m[np.ix_(support, support)]
    kkt[:k, k] = -1.0
    kkt[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
    y = np.zeros_like(x)
    y[support] = sol[:k]
    if np.all(y >= 0) and abs(y.sum() - 1.0) < 1e-12:
        val = _objective(m, d, y)
        if val >= values[-1]:
            x = y
            values.append(val)
    return x


def simplex_maximize(sq: SimplexQuadratic, cfg: OptimizerConfig | None = None) -> SimplexResult:
    """Maximize ``f_Q`` over the standard simplex.

    Each restart runs replicator dynamics on ``M - d J + c J`` (``J`` the
    all-ones matrix, ``c = 1 + max |M - d J|``); on the simplex that form is
    ``f_Q + c`` so maximizers are unchanged and all payoffs are positive,
    which makes every multiplicative step monotone. A projected-gradient
    polish and a support-restricted stationarity solve finish each run.
    Restart 0 starts at the barycentre, the others at Dirichlet samples.
    """
    cfg = cfg or OptimizerConfig()
    m = sq.M
    size = m.shape[0]
    base = m - sq.d
    shifted = base + (1.0 + float(np.max(np.abs(base))))

    best: SimplexResult | None = None
    for idx, seq in enumerate(cfg.sub_seeds()):
        rng = np.random.default_rng(seq)
        x0 = np.full(size, 1.0 / size) if idx == 0 else rng.dirichlet(np.ones(size))
        x, values, converged = _replicator(shifted, m, sq.d, x0, cfg)
        x = _polish(m, sq.d, x, values)
        x = x / x.sum()
        value = f_q(sq, x)
        run = SimplexResult(x_star=x, value=value, iterations=len(values) - 1,
                            converged=converged, trace=tuple(values))
        if best is None or value > best.value + cfg.value_tolerance:
            best = run
    return best


@dataclass(frozen=True)
class KktCertificate:
    a: float
    b: np.ndarray
    support: np.ndarray
    max_violation: float


def kkt_certificate(sq: SimplexQuadratic, x) -> KktCertificate:
    """Stationarity data of ``f_Q`` restricted to the simplex at ``x``.

    With ``g = M x - d``, a maximizer has ``g`` constant (``= a``) on the
    support and ``g <= a`` off it; ``b`` holds the off-support values. At a
    stationary point ``a = f_Q(x)``.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (sq.size,) or np.any(x < 0):
        raise ValueError("x must be a nonnegative vector of the right length")
    support = np.flatnonzero(x > SUPPORT_TOL)
    if support.size == 0:
        raise ValueError("x has empty support")
    g = sq.M @ x - sq.d * float(np.sum(x))
    a = float(np.mean(g[support]))
    off = np.setdiff1d(np.arange(sq.size), support)
    b = g[off]
    on_dev = float(np.max(np.abs(g[support] - a)))
    off_dev = float(np.max(b - a, initial=0.0))
    return KktCertificate(a=a, b=b, support=support + 1, max_violation=max(on_dev, off_dev, 0.0))


# -- tuple space ---------------------------------------------------------------

def ratio_gradient(ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ratio and its tangent gradient for a batch of unit-norm tuples.

    The left side has gradient ``G_r = 4 sum_s [B_s, [B_r, B_s]]``; on the
    unit sphere the ratio ``L`` has gradient ``G - 4 L B``.
    """
    prod = np.einsum("krij,ksjl->krsil", ts, ts)
    comm = prod - prod.transpose(0, 2, 1, 3, 4)  # [B_r, B_s]
    lhs = np.sum(comm * comm, axis=(1, 2, 3, 4))
    # [B_s, C_rs] summed over s
    left = np.einsum("ksij,krsjl->kril", ts, comm)
    right = np.einsum("krsij,ksjl->kril", comm, ts)
    g = 4.0 * (left - right)
    return lhs, g - 4.0 * lhs[:, None, None, None] * ts


def _normalize(ts: np.ndarray) -> np.ndarray:
    ts = 0.5 * (ts - ts.swapaxes(-1, -2))
    return ts / np.sqrt(norm_sum(ts))[:, None, None, None]


@dataclass(frozen=True)
class SharpnessResult:
    tuple: np.ndarray
    ratio: float
    d: float
    ratios: np.ndarray
    history: np.ndarray
    sub_seed: int
    warning: str | None
    rounded: np.ndarray | None
    rounding_distance: float | None
    canonical: EqualityForm | None


def sharpness_search(n: int, m: int, cfg: OptimizerConfig | None = None) -> SharpnessResult:
    """Multi-restart projected ascent of the commutator ratio.

    All restarts advance together as one batch; restart ``k`` starts from a
    random tuple drawn from its own sub-seed, so results do not depend on the
    number of restarts run alongside it. Each iteration tries step 0.1 and
    halves it until the ratio increases; a restart stops once its relative
    gain drops below ``1e-10``.
    """
    cfg = cfg or OptimizerConfig()
    d = bound_constant(n)
    seeds = cfg.sub_seeds()
    ts = np.stack([_start(n, m, np.random.default_rng(s)) for s in seeds])
    ts = _normalize(ts)
    ratio, grad = ratio_gradient(ts)
    active = np.ones(len(seeds), dtype=bool)

    for _ in range(cfg.max_iterations):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        step = np.full(idx.size, 0.1)
        pending = np.ones(idx.size, dtype=bool)
        new_ts = ts[idx].copy()
        new_ratio = ratio[idx].copy()
        new_grad = grad[idx].copy()
        for _ in range(40):
            if not pending.any():
                break
            p = np.flatnonzero(pending)
            cand = _normalize(ts[idx[p]] + step[p, None, None, None] * grad[idx[p]])
            c_ratio, c_grad = ratio_gradient(cand)
            up = c_ratio > ratio[idx[p]]
            new_ts[p[up]] = cand[up]
            new_ratio[p[up]] = c_ratio[up]
            new_grad[p[up]] = c_grad[up]
            pending[p[up]] = False
            step[p[~up]] *= 0.5
        if np.any(new_ratio > d + 1e-9):
            raise BoundViolation(f"ratio {new_ratio.max()!r} exceeds d(n) = {d!r}")
        gain = (new_ratio - ratio[idx]) / np.maximum(ratio[idx], 1e-300)
        ts[idx], ratio[idx], grad[idx] = new_ts, new_ratio, new_grad
        active[idx[(gain < 1e-10) | pending]] = False

    # exact ratio on the final iterates, then max by value, lowest sub-seed on ties
    _, final = ratio_batch(ts)
    best = int(np.flatnonzero(final == final.max())[0])
    history = np.maximum.accumulate(final)
    warning = None if m >= 3 else "m < 3: extremal configurations need three nonzero members"
    rounded = distance = canonical = None
    if m >= 3:
        rounded, distance = round_to_extremal(ts[best])
        canonical = equality_canonicalize(rounded)
    return SharpnessResult(tuple=ts[best], ratio=float(final[best]), d=d, ratios=final, history=history,
                           sub_seed=best, warning=warning, rounded=rounded,
                           rounding_distance=distance, canonical=canonical)


def _start(n: int, m: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.standard_normal((m, n, n))
    return a - a.swapaxes(-1, -2)


def round_to_extremal(t) -> tuple[np.ndarray, float]:
    """Nearest-looking exact extremal tuple and its relative distance from ``t``.

    The leading coefficient direction fixes a frame ``P``; members are then
    projected onto the three normalized normal-form matrices and the
    resulting ``3 x m`` coefficient block is replaced by the closest scaled
    matrix with orthogonal rows.
    """
    t = np.asarray(t, dtype=float)
    m, n = t.shape[0], t.shape[1]
    scale = float(np.sqrt(norm_sum(t)))
    coeffs = coefficients_of(t)
    u, _, _ = np.linalg.svd(coeffs, full_matrices=False)
    top = tuple_from_coefficients(n, u[:, :1])[0]
    p = canonical_form(top).P
    conj = np.einsum("ij,rjk,lk->ril", p, t, p)
    _, forms = extremal_forms(n)
    forms = forms / np.sqrt(norm_sum(forms[:1]))
    y = np.einsum("kij,rij->kr", forms, conj)
    w, s, vt = np.linalg.svd(y, full_matrices=False)
    y = np.mean(s) * (w @ vt)
    rounded = np.einsum("kr,kij->rij", y, forms)
    rounded = np.einsum("ji,rjk,kl->ril", p, rounded, p)
    rounded = 0.5 * (rounded - rounded.swapaxes(-1, -2))
    return rounded, float(np.sqrt(norm_sum(rounded - t))) / max(scale, 1e-300)
