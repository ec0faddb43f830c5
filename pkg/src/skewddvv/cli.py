"""Command-line interface: ``skewddvv {verify,canonical,sharpness,submersion}``.

CSV goes to ``--out`` (or stdout) and a short summary to stderr. Exit status
is 0 on success, 1 when violations were found and 2 for usage or input
errors. ``SKEWDDVV_THREADS`` sets the worker count for sampling.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .canonical import canonical_form
from .compound_gram import lhs_via_trace_batch
from .errors import BoundViolation, UnsupportedDimensionError
from .inequality import bound_constant, ratio_batch
from .optimize import OptimizerConfig, sharpness_search
from .skew_core import norm_sum, random_skew_tuple, skew
from .submersion import curvature_tables, expected_tables, model_for, simons_integrand

CHUNK = 10_000
COMPOUND_MAX_N = 16
TRACE_RTOL = 1e-8
TABLE_RTOL = 1e-12

COLUMNS = {
    "verify": ["trial", "lhs", "lhs_trace", "rhs", "ratio", "violation"],
    "canonical": ["field", "i", "j", "value"],
    "sharpness": ["restart", "sub_seed", "ratio", "best_so_far"],
    "submersion": ["table", "i", "j", "value", "expected", "deviation"],
}


class UsageError(Exception):
    pass


@dataclass
class RunReport:
    command: str
    seed: int | None
    parameters: dict
    results: list[dict] = field(default_factory=list)
    violations: int = 0
    elapsed: float = 0.0
    summary: list[str] = field(default_factory=list)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value) + 0.0:.17g}"
    return str(value)


def write_csv(report: RunReport, stream) -> None:
    cols = COLUMNS[report.command]
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(cols)
    for row in report.results:
        writer.writerow([_fmt(row.get(c)) for c in cols])


def _threads() -> int:
    raw = os.environ.get("SKEWDDVV_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"SKEWDDVV_THREADS must be an integer, got {raw!r}") from None


# -- verify ------------------------------------------------------------------

def _verify_chunk(n: int, m: int, d: float, tol: float, start: int, size: int, seq) -> tuple[list[dict], int, int]:
    rng = np.random.default_rng(seq)
    ts = random_skew_tuple(n, m, rng, size=size)
    lhs, ratio = ratio_batch(ts)
    total = np.atleast_1d(norm_sum(ts))
    rhs = d * total * total
    trace = lhs_via_trace_batch(ts) if n <= COMPOUND_MAX_N else np.full(size, np.nan)
    bad = ratio > d + tol
    mismatch = int(np.count_nonzero(np.abs(trace - lhs) > TRACE_RTOL * np.maximum(1.0, lhs))) if n <= COMPOUND_MAX_N else 0
    rows = [{"trial": start + k, "lhs": lhs[k], "lhs_trace": trace[k] if n <= COMPOUND_MAX_N else None,
             "rhs": rhs[k], "ratio": ratio[k], "violation": bad[k]} for k in range(size)]
    return rows, int(np.count_nonzero(bad)), mismatch


def cmd_verify(n: int, m: int, trials: int, seed: int, tolerance: float = 1e-9) -> RunReport:
    if m < 1 or trials < 1:
        raise UsageError("need m >= 1 and trials >= 1")
    try:
        d = bound_constant(n)
    except UnsupportedDimensionError as exc:
        raise UsageError(str(exc)) from None
    report = RunReport("verify", seed, {"n": n, "m": m, "trials": trials, "tolerance": tolerance})
    starts = list(range(0, trials, CHUNK))
    seqs = np.random.SeedSequence(seed).spawn(len(starts))
    jobs = [(n, m, d, tolerance, s, min(CHUNK, trials - s), q) for s, q in zip(starts, seqs)]
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        outcomes = list(pool.map(lambda job: _verify_chunk(*job), jobs))
    mismatches = 0
    for rows, bad, mismatch in outcomes:
        report.results.extend(rows)
        report.violations += bad + mismatch
        mismatches += mismatch
    max_ratio = max(float(r["ratio"]) for r in report.results)
    report.summary += [f"verify n={n} m={m} trials={trials}: d={d:.6g} max ratio={max_ratio:.12g}",
                       f"bound violations={report.violations - mismatches} trace mismatches={mismatches}"]
    return report


# -- canonical ---------------------------------------------------------------

def load_matrices(path: str) -> list[np.ndarray]:
    """A JSON document holding one 2-D array or a list of them."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"{path} is not a numeric array: {exc}") from None
    if arr.ndim == 2:
        return [arr]
    if arr.ndim == 3:
        return list(arr)
    raise UsageError(f"{path} must hold a matrix or a list of matrices, got {arr.ndim} dimensions")


def cmd_canonical(input_path: str) -> RunReport:
    mats = load_matrices(input_path)
    if len(mats) != 1:
        raise UsageError("canonical expects exactly one matrix")
    try:
        a = skew(mats[0])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    cf = canonical_form(a)
    residual = cf.residual(a)
    report = RunReport("canonical", None, {"input": input_path, "n": a.shape[0]})
    report.results += [{"field": "lambda", "i": k + 1, "value": lam} for k, lam in enumerate(cf.lambdas)]
    report.results += [{"field": "P", "i": i + 1, "j": j + 1, "value": cf.P[i, j]}
                       for i in range(cf.n) for j in range(cf.n)]
    report.results.append({"field": "residual", "value": residual})
    if residual > 1e-8 * max(1.0, float(np.linalg.norm(a))):
        report.violations += 1
    report.summary.append(f"lambdas={np.array2string(cf.lambdas, precision=12)} residual={residual:.3e}")
    return report


# -- sharpness ---------------------------------------------------------------

def cmd_sharpness(n: int, m: int, restarts: int, seed: int, iterations: int = 10_000) -> RunReport:
    if m < 1 or restarts < 1 or iterations < 1:
        raise UsageError("need m >= 1, restarts >= 1 and iterations >= 1")
    try:
        bound_constant(n)
    except UnsupportedDimensionError as exc:
        raise UsageError(str(exc)) from None
    cfg = OptimizerConfig(seed=seed, restarts=restarts, max_iterations=iterations)
    report = RunReport("sharpness", seed, {"n": n, "m": m, "restarts": restarts, "iterations": iterations})
    try:
        result = sharpness_search(n, m, cfg)
    except BoundViolation as exc:
        report.violations += 1
        report.summary.append(f"bound violation: {exc}")
        return report
    ids = [int(s.generate_state(1)[0]) for s in cfg.sub_seeds()]
    report.results = [{"restart": k, "sub_seed": ids[k], "ratio": r, "best_so_far": b}
                      for k, (r, b) in enumerate(zip(result.ratios, result.history))]
    gap = result.d - result.ratio
    report.summary.append(f"sharpness n={n} m={m}: best ratio={result.ratio:.12g} d={result.d:.12g} gap={gap:.3e}")
    if result.warning:
        report.summary.append(f"warning: {result.warning}")
    else:
        ok = result.canonical is not None
        report.summary.append(f"rounded optimum (distance {result.rounding_distance:.3e}) "
                              f"{'passes' if ok else 'fails'} equality canonicalization")
    return report


# -- submersion --------------------------------------------------------------

def cmd_submersion(case: str, a: float, n: int | None = None) -> RunReport:
    if case == "case4" and n not in (None, 4, 5):
        raise UsageError("case4 tables are known for n = 4 and n = 5 only")
    if case != "case4" and n is not None:
        raise UsageError(f"--n does not apply to {case}")
    if not a > 0:
        raise UsageError("--a must be positive")
    try:
        data = model_for(case, a, n)
        expected = expected_tables(case, a, data.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    got = curvature_tables(data)
    report = RunReport("submersion", None, {"case": case, "a": a, "n": data.n})
    worst = 0.0
    rows = []
    for (name, value), (_, want) in zip(got.items(), expected.items()):
        for idx in np.ndindex(value.shape):
            rows.append((name, idx[0] + 1, idx[1] + 1, value[idx], want[idx]))
    base_k = {"case3": 8.0, "case4": 4.0 if data.n == 4 else 8.0 / 3.0, "hopf": 4.0, "hopf-s3": 4.0}[case] * a
    for i in range(data.n):
        for j in range(data.n):
            if i != j:
                rows.append(("base_K_ij", i + 1, j + 1, data.base_sectional[i, j], base_k))
    cases = {"case3": ["iii"], "case4": ["iv"], "hopf": ["iv"], "hopf-s3": ["i", "ii"]}[case]
    for tag in cases:
        rows.append((f"integrand_{tag}", None, None, simons_integrand(tag, data), 0.0))
    for name, i, j, value, want in rows:
        dev = abs(float(value) - float(want))
        scale = max(1.0, abs(float(want))) if not name.startswith("integrand") else max(1.0, data.a_norm_sq ** 2)
        tol = TABLE_RTOL if not name.startswith("integrand") else 1e-10
        if dev > tol * scale:
            report.violations += 1
        worst = max(worst, dev / scale)
        report.results.append({"table": name, "i": i, "j": j, "value": value, "expected": want, "deviation": dev})
    report.summary.append(f"submersion {case} a={a:g} n={data.n}: max relative deviation={worst:.3e}")
    return report


# -- entry point ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skewddvv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="sample random tuples and check the commutator bound")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=1e-9)

    p = sub.add_parser("canonical", help="canonical block form of one skew matrix (JSON file)")
    p.add_argument("input")

    p = sub.add_parser("sharpness", help="search for tuples attaining the bound")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iterations", type=int, default=10_000)

    p = sub.add_parser("submersion", help="curvature tables of the equality models")
    p.add_argument("--case", required=True, choices=["case3", "case4", "hopf", "hopf-s3"])
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--n", type=int, default=None)

    for p in sub.choices.values():
        p.add_argument("--out", default=None, help="CSV destination (default: stdout)")
    return parser


def run(args: argparse.Namespace) -> RunReport:
    t0 = time.perf_counter()
    if args.command == "verify":
        report = cmd_verify(args.n, args.m, args.trials, args.seed, args.tolerance)
    elif args.command == "canonical":
        report = cmd_canonical(args.input)
    elif args.command == "sharpness":
        report = cmd_sharpness(args.n, args.m, args.restarts, args.seed, args.iterations)
    else:
        report = cmd_submersion(args.case, args.a, args.n)
    report.elapsed = time.perf_counter() - t0
    return report


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        report = run(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    buf = io.StringIO()
    write_csv(report, buf)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    for line in report.summary:
        print(line, file=sys.stderr)
    print(f"violations={report.violations} elapsed={report.elapsed:.2f}s", file=sys.stderr)
    return 1 if report.violations else 0


if __name__ == "__main__":
    sys.exit(main())
