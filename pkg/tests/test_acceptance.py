"""Acceptance criteria 1-8, one test each, with a PASS/FAIL line per criterion."""
import numpy as np
import pytest

import oracles
from skewddvv.canonical import lemma2_value, lemma5_report, orthogonal_factor, pair_constant
from skewddvv.compound_gram import lhs_via_trace, second_compound
from skewddvv.inequality import (
    bound_constant,
    f_q,
    lemma3_sum,
    lemma4_sum,
    ratio_batch,
    simplex_quadratic,
    theorem1_report,
)
from skewddvv.optimize import OptimizerConfig, sharpness_search
from skewddvv.skew_core import c_triple, d_triple, pair_count, random_orthogonal, random_skew_tuple
from skewddvv.submersion import (
    curvature_tables,
    equality_model_case3,
    equality_model_case4,
    expected_tables,
    hopf_point_model,
    hopf_s3_model,
    model_for,
    simons_integrand,
)

pytestmark = pytest.mark.slow

SEED = 20240611


def rel_close(got, want, rtol):
    got, want = np.asarray(got, dtype=float), np.asarray(want, dtype=float)
    return got.shape == want.shape and bool(np.all(np.abs(got - want) <= rtol * np.maximum(1.0, np.abs(want))))


def off(a):
    return a[~np.eye(len(a), dtype=bool)]


def test_criterion_1_random_tuples_obey_bound(acceptance):
    rng = np.random.default_rng(SEED)
    trials, chunk = 100_000, 10_000
    violations, worst = 0, {}
    for n in range(3, 9):
        d = bound_constant(n)
        for m in range(1, 7):
            top = 0.0
            for _ in range(trials // chunk):
                _, ratio = ratio_batch(random_skew_tuple(n, m, rng, size=chunk))
                violations += int(np.count_nonzero(ratio > d + 1e-9))
                top = max(top, float(ratio.max()))
            worst[(n, m)] = top / d
    ok = violations == 0
    acceptance(1, ok, f"36 (n,m) combos x 1e5 tuples, violations={violations}, "
                      f"max ratio/d={max(worst.values()):.6f}")
    assert ok


def test_criterion_2_sharpness(acceptance):
    details, ok = [], True
    for n, m in [(3, 3), (4, 3), (5, 4), (6, 3)]:
        res = sharpness_search(n, m, OptimizerConfig(seed=0, restarts=32, max_iterations=10_000))
        canon = res.canonical
        good = res.ratio >= res.d - 1e-3 and canon is not None and canon.residual < 1e-6
        ok &= good
        residual = "none" if canon is None else f"{canon.residual:.1e}"
        details.append(f"({n},{m}) gap={res.d - res.ratio:.1e} residual={residual}")
    acceptance(2, ok, "; ".join(details))
    assert ok


def test_criterion_3_exact_equality_values(acceptance):
    c = theorem1_report(c_triple(1.0))
    dd = theorem1_report(d_triple(1.0, 4))
    ok = (c.lhs, c.rhs, c.equality) == (12.0, 12.0, True) and (dd.lhs, dd.rhs, dd.equality) == (96.0, 96.0, True)
    acceptance(3, ok, f"C-triple lhs={c.lhs:g} rhs={c.rhs:g}; D-triple lhs={dd.lhs:g} rhs={dd.rhs:g}")
    assert ok


def _random_lambdas(rng, size):
    v = np.sort(rng.random(size) ** rng.uniform(0.2, 4))[::-1]
    return v * np.sqrt(0.5 / np.sum(v * v))


def test_criterion_4_supporting_bounds(acceptance):
    rng = np.random.default_rng(SEED)
    checks = {}

    values = [lemma2_value(_random_lambdas(rng, int(rng.integers(2, 9)))) for _ in range(1000)]
    checks["lambda bound"] = max(values) <= 1 / 3 + 1e-12 and lemma2_value([0.5, 0.5]) == pytest.approx(1 / 3, abs=1e-15)

    worst3, worst4 = -np.inf, 0.0
    for n in range(3, 7):
        size = pair_count(n)
        for _ in range(1000):
            sq = simplex_quadratic(n, random_orthogonal(size, rng))
            alpha = int(rng.integers(1, size + 1))
            subset = [b + 1 for b in np.flatnonzero(rng.random(size) < rng.random())]
            worst3 = max(worst3, lemma3_sum(sq, alpha, subset))
            worst4 = max(worst4, abs(lemma4_sum(sq, alpha) - (n - 2)))
    checks["subset sums"] = worst3 <= 2 / 3 + 1e-9
    checks["row sums"] = worst4 <= 1e-9

    ratios = []
    for n in range(3, 9):
        pairs = random_skew_tuple(n, 2, rng, size=12_500)
        a, b = pairs[:, 0], pairs[:, 1]
        comm = a @ b - b @ a
        lhs = np.sum(comm * comm, axis=(1, 2))
        bound = pair_constant(n) * np.sum(a * a, axis=(1, 2)) * np.sum(b * b, axis=(1, 2))
        ratios.append(float(np.max(lhs / bound)))
    c, d = c_triple(), d_triple()
    exact = lemma5_report(c[0], c[1]).residual == 0.0 and lemma5_report(d[0], d[1]).residual == 0.0
    checks["pair bound"] = max(ratios) <= 1 + 1e-9 and exact and lemma5_report(c[0], c[1]).equality

    worst6 = 0.0
    for _ in range(100):
        x, y = rng.standard_normal((8, 8)), rng.standard_normal((8, 8))
        worst6 = max(worst6, float(np.linalg.norm(second_compound(x @ y) - second_compound(x) @ second_compound(y))))
    checks["compound product"] = worst6 < 1e-10

    worst7 = 0.0
    for _ in range(200):
        k, m = int(rng.integers(3, 16)), int(rng.integers(1, 7))
        b = rng.standard_normal((k, m)) @ np.diag(rng.random(m) < 0.8)  # some columns rank-deficient
        a = b @ random_orthogonal(m, rng)
        r = orthogonal_factor(a, b)
        worst7 = np.inf if r is None else max(worst7, float(np.linalg.norm(a - b @ r)))
    checks["factor recovery"] = worst7 < 1e-7

    ok = all(checks.values())
    acceptance(4, ok, ", ".join(f"{k} {'ok' if v else 'FAILED'}" for k, v in checks.items())
               + f" (pair ratio max {max(ratios):.6f}, phi defect {worst6:.1e}, recovery {worst7:.1e})")
    assert ok


def test_criterion_5_trace_identity(acceptance):
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for k in range(1000):
        n, m = 3 + k % 4, 1 + (k // 4) % 6
        t = random_skew_tuple(n, m, rng)
        direct = oracles.double_sum(t.tolist())
        worst = max(worst, abs(lhs_via_trace(t) - direct) / max(1e-300, abs(direct)) if direct else abs(lhs_via_trace(t)))
    ok = worst <= 1e-8
    acceptance(5, ok, f"1e3 tuples n<=6, max relative gap {worst:.1e}")
    assert ok


def test_criterion_6_submersion_tables(acceptance):
    checks = {}
    c3 = curvature_tables(equality_model_case3(1.0))
    k_ir = np.full((3, 3), 4.0)
    for i, r in ((1, 3), (2, 2), (3, 1)):
        k_ir[i - 1, r - 1] = 0.0
    checks["case3"] = (rel_close(off(c3.K_rs), np.ones(6), 1e-12) and rel_close(off(c3.K_ij), -4 * np.ones(6), 1e-12)
                       and rel_close(c3.K_ir, k_ir, 1e-12) and rel_close(c3.R_rs, 10 * np.eye(3), 1e-12)
                       and rel_close(c3.R_ij, np.zeros((3, 3)), 1e-12))

    c4 = curvature_tables(equality_model_case4(1.0, 5))
    k_ij = np.full((5, 5), -1 / 3)
    k_ij[:4, 4] = k_ij[4, :4] = 8 / 3
    k_ir = np.ones((5, 3))
    k_ir[4] = 0
    checks["case4 n=5"] = (rel_close(off(c4.K_ij), off(k_ij), 1e-12) and rel_close(c4.K_ir, k_ir, 1e-12)
                           and rel_close(c4.R_rs, 6 * np.eye(3), 1e-12)
                           and rel_close(c4.R_ij, np.diag([14 / 3] * 4 + [32 / 3]), 1e-12))

    hopf = hopf_point_model(1.0)
    h = curvature_tables(hopf)
    checks["hopf"] = (all(rel_close(x, np.ones_like(x), 1e-12) for x in (off(h.K_rs), h.K_ir.ravel(), off(h.K_ij)))
                      and rel_close(off(hopf.base_sectional), 4 * np.ones(12), 1e-12))

    for case, n in (("case3", None), ("case4", 4), ("case4", 5), ("hopf", None)):
        for a in (0.5, 2.0):
            got = curvature_tables(model_for(case, a, n))
            want = expected_tables(case, a, n)
            checks[f"{case} a={a}"] = all(
                rel_close(off(getattr(got, k)) if k in ("K_rs", "K_ij") else getattr(got, k),
                          off(v) if k in ("K_rs", "K_ij") else v, 1e-12)
                for k, v in want.items())
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    acceptance(6, ok, f"{len(checks)} table checks at 1e-12 relative" + (f", failed: {failed}" if failed else ""))
    assert ok


def test_criterion_7_integrands_vanish(acceptance):
    values = {}
    for a in (0.5, 1.0, 2.0):
        c3 = equality_model_case3(a)
        assert c3.mu_hat == pytest.approx(c3.a_norm_sq / 12) and c3.kappa_check - c3.lambda_check == pytest.approx(-c3.a_norm_sq / 3)
        values[f"iii a={a}"] = simons_integrand("iii", c3)
        for label, data in (("iv n=4", equality_model_case4(a, 4)), ("iv n=5", equality_model_case4(a, 5)),
                            ("iv hopf", hopf_point_model(a))):
            assert data.mu_hat == pytest.approx(data.a_norm_sq / 6)
            assert data.kappa_check - data.lambda_check == pytest.approx(-2 * data.a_norm_sq / 3)
            values[f"{label} a={a}"] = simons_integrand("iv", data)
        s3 = hopf_s3_model(a)
        values[f"i a={a}"] = simons_integrand("i", s3)
        values[f"ii a={a}"] = simons_integrand("ii", s3)
    worst = max(abs(v) for v in values.values())
    ok = worst < 1e-10
    acceptance(7, ok, f"{len(values)} integrand evaluations, max |value| {worst:.1e}")
    assert ok


def test_criterion_8_polytope_identity(acceptance):
    sq = simplex_quadratic(3)
    grid = list(oracles.simplex_grid(3, 44))
    worst = 0.0
    for x in grid:
        want = -sum((x[i] - x[j]) ** 2 for i in range(3) for j in range(i + 1, 3)) / 6
        worst = max(worst, abs(f_q(sq, x) - want))
    ok = len(grid) >= 1000 and worst <= 1e-12
    acceptance(8, ok, f"{len(grid)} grid points on the 2-simplex, max gap {worst:.1e}")
    assert ok
