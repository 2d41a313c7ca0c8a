"""Exact Gaussian elimination over any field with Python operators.

Entries must support ``+ - * /`` and truthiness (falsy iff zero).  Used with
``fractions.Fraction`` and with :class:`skewval.basefield.FieldElem`.
"""

from __future__ import annotations


def rref(rows, ncols):
    """Reduced row echelon form.  Returns ``(rows, pivot_columns)``."""
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows, ncols) -> int:
    return len(rref(rows, ncols)[1])


def nullspace(rows, ncols, one, zero):
    """Basis of ``{v : rows . v = 0}``, each vector with a 1 at its free column."""
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis
