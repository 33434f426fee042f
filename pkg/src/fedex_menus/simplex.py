"""Exact rational simplex for ``max c.x  s.t.  A x <= b, x >= 0`` with ``b >= 0``.

Dictionary form with sparse rows and Bland's rule, so it cannot cycle.
Arithmetic runs on ``gmpy2.mpq`` when available (same semantics as
Fraction, much faster) and every result is handed back as Fraction.
The optimum is certified afterwards against the original data via a dual
solution and exact complementary slackness.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

try:  # pragma: no cover - exercised implicitly
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction


class LPError(RuntimeError):
    pass


class Unbounded(LPError):
    pass


def _to_frac(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


@dataclass
class LPResult:
    value: Fraction
    x: list
    duals: list
    pivots: int


def solve_max(c: Sequence, rows: Sequence[dict], b: Sequence, max_pivots: int = 200_000) -> LPResult:
    """Solve the LP; ``rows[i]`` maps column index to coefficient of constraint i."""
    m, nvar = len(rows), len(c)
    if any(bi < 0 for bi in b):
        raise LPError("origin must be feasible (b >= 0)")
    # Global ids: structural 0..nvar-1, slack of row i is nvar+i.
    nonbasic = list(range(nvar))
    basic = [nvar + i for i in range(m)]
    A = [{j: _Q(v) for j, v in row.items() if v != 0} for row in rows]
    rhs = [_Q(v) for v in b]
    cost = {j: _Q(v) for j, v in enumerate(c) if v != 0}
    z = _Q(0)
    # column index -> rows with a nonzero there, kept in sync with A
    col_rows: dict[int, set] = {}
    for i, row in enumerate(A):
        for j in row:
            col_rows.setdefault(j, set()).add(i)

    pivots = 0
    while True:
        enter = None
        for j, cj in cost.items():
            if cj > 0 and (enter is None or nonbasic[j] < nonbasic[enter]):
                enter = j
        if enter is None:
            break
        leave, best = None, None
        for i in col_rows.get(enter, ()):
            a = A[i][enter]
            if a > 0:
                ratio = rhs[i] / a
                if best is None or ratio < best or (ratio == best and basic[i] < basic[leave]):
                    leave, best = i, ratio
        if leave is None:
            raise Unbounded("objective is unbounded")
        _pivot(A, rhs, col_rows, leave, enter)
        cj = cost.pop(enter)
        prow = A[leave]
        for k, a in prow.items():
            if k == enter:
                continue
            val = cost.get(k, 0) - cj * a
            if val:
                cost[k] = val
            else:
                cost.pop(k, None)
        ce = -cj * prow[enter]
        if ce:
            cost[enter] = ce
        z += cj * rhs[leave]
        basic[leave], nonbasic[enter] = nonbasic[enter], basic[leave]
        pivots += 1
        if pivots > max_pivots:
            raise LPError("pivot limit exceeded")

    x = [Fraction(0)] * nvar
    for i, var in enumerate(basic):
        if var < nvar:
            x[var] = _to_frac(rhs[i])
    duals = [Fraction(0)] * m
    for j, var in enumerate(nonbasic):
        if var >= nvar:
            duals[var - nvar] = -_to_frac(cost.get(j, 0))
    return LPResult(value=_to_frac(z), x=x, duals=duals, pivots=pivots)


def _pivot(A, rhs, col_rows, r, j):
    row = A[r]
    piv = row.pop(j)
    inv = 1 / piv
    for k in row:
        row[k] *= inv
    row[j] = inv
    rhs[r] *= inv
    for s in list(col_rows[j]):
        if s == r:
            continue
        srow = A[s]
        a = srow.pop(j)
        for k, v in row.items():
            val = srow.get(k, 0) - a * v
            if val:
                if k not in srow:
                    col_rows.setdefault(k, set()).add(s)
                srow[k] = val
            elif k in srow:
                del srow[k]
                col_rows[k].discard(s)
        rhs[s] -= a * rhs[r]
    # row r keeps column j; every other row lost it or got it refilled above
    col_rows[j] = {s for s in col_rows[j] if j in A[s]}
    for k in row:
        col_rows.setdefault(k, set()).add(r)


def certify(c: Sequence, rows: Sequence[dict], b: Sequence, res: LPResult) -> list[str]:
    """Check primal feasibility, dual feasibility and equal objectives exactly."""
    problems = []
    x, y = res.x, res.duals
    if any(v < 0 for v in x):
        problems.append("negative primal variable")
    if any(v < 0 for v in y):
        problems.append("negative dual variable")
    for i, row in enumerate(rows):
        lhs = sum((Fraction(a) * x[j] for j, a in row.items()), Fraction(0))
        if lhs > b[i]:
            problems.append(f"row {i} violated by {lhs - b[i]}")
    reduced = [Fraction(0)] * len(c)
    for i, row in enumerate(rows):
        if y[i]:
            for j, a in row.items():
                reduced[j] += y[i] * Fraction(a)
    for j, cj in enumerate(c):
        if reduced[j] < cj:
            problems.append(f"dual constraint {j} violated")
    primal = sum((Fraction(cj) * x[j] for j, cj in enumerate(c)), Fraction(0))
    dual = sum((y[i] * Fraction(b[i]) for i in range(len(b))), Fraction(0))
    if primal != dual or primal != res.value:
        problems.append(f"objective mismatch primal={primal} dual={dual} reported={res.value}")
    return problems
