"""Brute-force rank oracle for the pair (1 - x)^-1, t (1 - x)^-1 in Q(t)((x; s)), s(t) = 2t.

Independent of the package: series are lists of sympy expressions in t, and
the product uses x^n b(t) = b(t / 2^n) x^n directly.  Prints the rank of the
seven degree <= 2 words expanded to the given number of terms.
"""

import itertools
import sys

import sympy

t = sympy.Symbol("t")


def mul(f, g, n):
    out = [sympy.Integer(0)] * n
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            if i + j < n:
                out[i + j] += a * b.subs(t, t / 2**i)
    return [sympy.expand(c) for c in out]


def word_rank(n_terms):
    u = [sympy.Integer(1)] * n_terms
    v = [t] * n_terms
    one = [sympy.Integer(1)] + [sympy.Integer(0)] * (n_terms - 1)
    letters = [u, v]
    words = [()] + [(a,) for a in range(2)] + list(itertools.product(range(2), repeat=2))
    values = []
    for w in words:
        val = one
        for a in w:
            val = mul(val, letters[a], n_terms)
        values.append(val)
    rows = {}
    for col, val in enumerate(values):
        for i, c in enumerate(val):
            for (k,), coeff in sympy.Poly(c, t).terms() if c != 0 else []:
                rows.setdefault((i, k), [0] * len(words))[col] = coeff
    M = sympy.Matrix(list(rows.values()))
    return M.rank(), len(words)


if __name__ == "__main__":
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 8
    r, k = word_rank(n)
    print(f"terms={n} rank={r} words={k} verdict={'FreeUpTo(2)' if r == k else 'relation'}")
