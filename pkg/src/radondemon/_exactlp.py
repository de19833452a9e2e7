"""Exact feasibility of ``{x >= 0 : A x = b}`` over the rationals.

Phase-one simplex on a dense tableau of exact rationals, with Bland's rule so
it cannot cycle. Problems here are tiny (a few dozen rows and columns), so
nothing smarter is needed. Entries are ``gmpy2.mpq`` when gmpy2 is installed
(an order of magnitude faster) and :class:`fractions.Fraction` otherwise.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

try:
    from gmpy2 import mpq as Rational
except ImportError:  # pragma: no cover
    Rational = Fraction


def rationalize(x):
    """Exact rational value of the decimal representation of ``x``."""
    if isinstance(x, (int, str, Fraction)):
        return Rational(x)
    if isinstance(x, Rational):
        return x
    return Rational(repr(float(x)))


def feasible(a: Sequence[Sequence], b: Sequence) -> bool:
    rows = [[rationalize(v) for v in row] for row in a]
    rhs = [rationalize(v) for v in b]
    m = len(rows)
    if m == 0:
        return True
    n = len(rows[0])
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]

    zero = Rational(0)
    # Artificial columns are left out of the tableau: once an artificial leaves
    # the basis it never needs to re-enter, so only their basis slots matter.
    tab = [rows[i] + [rhs[i]] for i in range(m)]
    basis = [n + i for i in range(m)]
    # reduced costs of the phase-one objective (sum of artificials)
    cost = [-sum((tab[i][j] for i in range(m)), zero) for j in range(n)]
    cost.append(-sum(rhs, zero))

    while cost[n] != 0:
        enter = next((j for j in range(n) if cost[j] < 0), None)
        if enter is None:
            return False
        leave, best = None, None
        for i in range(m):
            coef = tab[i][enter]
            if coef > 0:
                ratio = tab[i][n] / coef
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:
            # phase one is bounded below by zero, so this cannot happen
            raise ArithmeticError("unbounded phase-one problem")
        _pivot(tab, cost, leave, enter)
        basis[leave] = enter
    return True


def _pivot(tab, cost, r, c):
    pivot_row = tab[r]
    p = pivot_row[c]
    if p != 1:
        pivot_row = [v / p for v in pivot_row]
        tab[r] = pivot_row
    nz = [j for j, v in enumerate(pivot_row) if v != 0]
    for i, row in enumerate(tab):
        if i == r:
            continue
        f = row[c]
        if f != 0:
            for j in nz:
                row[j] -= f * pivot_row[j]
    f = cost[c]
    if f != 0:
        for j in nz:
            cost[j] -= f * pivot_row[j]
