"""Exact rational linear feasibility via phase-1 simplex.

All arithmetic is over Fraction, so feasibility answers are exact; the
returned solutions are rational vectors that can be checked independently.
Problems here are small (cone membership, pointedness functionals, multiplier
search), so a dense tableau with Bland's rule is plenty.
"""

from __future__ import annotations

from fractions import Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def solve_nonneg(A, b):
    """Find x >= 0 with A x = b; return the solution as a list of Fractions
    or None if the system is infeasible.  A is a list of rows."""
    m = len(A)
    n = len(A[0]) if m else 0
    rows = [[Fraction(v) for v in row] for row in A]
    rhs = [Fraction(v) for v in b]
    if any(len(row) != n for row in rows):
        raise ValueError("ragged constraint matrix")
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]
    # tableau columns: n originals, m artificials, rhs
    tab = [rows[i] + [ONE if j == i else ZERO for j in range(m)] + [rhs[i]] for i in range(m)]
    basis = [n + i for i in range(m)]
    # phase-1 objective: minimize the artificial sum; reduced cost row
    cost = [ZERO] * (n + m + 1)
    for i in range(m):
        for j in range(n + m + 1):
            cost[j] -= tab[i][j]
    for j in range(n, n + m):
        cost[j] += ONE

    total = n + m
    while True:
        # Bland: entering = lowest-index column with negative reduced cost
        enter = next((j for j in range(total) if cost[j] < 0), None)
        if enter is None:
            break
        leave = None
        best = None
        for i in range(m):
            a = tab[i][enter]
            if a > 0:
                ratio = tab[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave is None:
            # phase-1 objective is bounded below by 0, so this cannot happen
            raise ArithmeticError("unbounded phase-1 problem")
        _pivot(tab, cost, basis, leave, enter)

    if -cost[-1] != 0:
        return None
    # drive any artificials still basic at value 0 out of the basis
    for i in range(m):
        if basis[i] >= n:
            enter = next((j for j in range(n) if tab[i][j] != 0), None)
            if enter is not None:
                _pivot(tab, cost, basis, i, enter)
    x = [ZERO] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = tab[i][-1]
    return x


def _pivot(tab, cost, basis, leave, enter):
    piv = tab[leave][enter]
    tab[leave] = [v / piv for v in tab[leave]]
    for i in range(len(tab)):
        if i != leave and tab[i][enter] != 0:
            f = tab[i][enter]
            tab[i] = [v - f * w for v, w in zip(tab[i], tab[leave])]
    if cost[enter] != 0:
        f = cost[enter]
        for j in range(len(cost)):
            cost[j] -= f * tab[leave][j]
    basis[leave] = enter


def in_cone(generators, target) -> bool:
    """Exact test whether target is a nonnegative combination of the
    generator vectors."""
    if not generators:
        return all(v == 0 for v in target)
    dim = len(target)
    A = [[Fraction(g[i]) for g in generators] for i in range(dim)]
    return solve_nonneg(A, [Fraction(v) for v in target]) is not None


def positive_functional(vectors):
    """A rational c with c . v >= 1 for every vector, or None.  Existence is
    equivalent to the vectors spanning a pointed cone."""
    if not vectors:
        return []
    dim = len(vectors[0])
    # c = p - q with p, q >= 0 and slack s: (p - q) . v - s = 1
    A = []
    for v in vectors:
        row = [Fraction(x) for x in v]
        row += [-x for x in row]
        A.append(row)
    m = len(vectors)
    for i, row in enumerate(A):
        row.extend(-ONE if j == i else ZERO for j in range(m))
    sol = solve_nonneg(A, [ONE] * m)
    if sol is None:
        return None
    return [sol[i] - sol[dim + i] for i in range(dim)]
