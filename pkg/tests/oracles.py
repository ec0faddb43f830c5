"""Slow, loop-based reference implementations used only by the tests.

They share no code with the package beyond plain Python and numpy arrays.
"""
from __future__ import annotations

import itertools
import math


def matmul(a, b):
    n, k, p = len(a), len(b), len(b[0])
    return [[sum(a[i][t] * b[t][j] for t in range(k)) for j in range(p)] for i in range(n)]


def bracket(a, b):
    ab, ba = matmul(a, b), matmul(b, a)
    return [[ab[i][j] - ba[i][j] for j in range(len(a))] for i in range(len(a))]


def fro2(a):
    return sum(x * x for row in a for x in row)


def pairs(n):
    # order (i,j) < (k,l) iff i < k, or i == k and j < l, written out literally
    out = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i < j]
    out.sort(key=lambda p: (p[0], p[1]))
    return out


def e_tilde(n, i, j):
    a = [[0.0] * n for _ in range(n)]
    a[i - 1][j - 1] = 1 / math.sqrt(2)
    a[j - 1][i - 1] = -1 / math.sqrt(2)
    return a


def double_sum(tup):
    tup = [[list(map(float, row)) for row in b] for b in tup]
    return sum(fro2(bracket(x, y)) for x in tup for y in tup)


def minors(a):
    rows = list(itertools.combinations(range(len(a)), 2))
    cols = list(itertools.combinations(range(len(a[0])), 2))
    return [[a[i][k] * a[j][l] - a[i][l] * a[j][k] for (k, l) in cols] for (i, j) in rows]


def simplex_grid(dim, steps):
    """All points of the simplex in R^dim with coordinates in (1/steps) Z."""
    for cut in itertools.combinations(range(steps + dim - 1), dim - 1):
        parts, prev = [], -1
        for c in cut:
            parts.append(c - prev - 1)
            prev = c
        parts.append(steps + dim - 2 - prev)
        yield [p / steps for p in parts]
