"""Bounded-degree certification of free subalgebras.

Given candidates ``u_1, ..., u_k`` in some exactly computable ring and a
central subfield ``C``, decide whether the words of length ``<= d`` in the
candidates are linearly independent over ``C``.  Every word is evaluated,
its coordinates (truncated where the ambient is a series) are flattened into
``C``-linear functionals and the resulting exact matrix is reduced.

Truncation and specialization both preserve relations, so full rank proves
``FreeUpTo(d)``.  A kernel vector only suggests a relation; it is re-tested at
higher precision and verified exactly when the ambient allows it.

Only free-subalgebra generation is tested.  The stronger free-field property
(invertibility of full matrices) is out of reach of this method.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .basefield import FieldElem, FieldTower
from .linalg import nullspace, rref
from .nilmn import GroupRingElem, MNSeries
from .ore import OrePoly, QTorusElem
from .skewseries import SkewSeries
from .valuation import INF

FREE = "FreeUpTo"
RELATION = "RelationFound"
INCONCLUSIVE = "Inconclusive"

LETTERS = "uvwabcdefghijklmnopqrst"


def enum_monomials(k: int, d: int) -> list[tuple[int, ...]]:
    """Words of length ``<= d`` over ``k`` letters, shortest first, then lexicographic."""
    if k < 1 or d < 0:
        raise ValueError("need k >= 1 and d >= 0")
    words: list[tuple[int, ...]] = []
    for n in range(d + 1):
        words.extend(itertools.product(range(k), repeat=n))
    return words


def word_str(word: Sequence[int], names: Sequence[str]) -> str:
    if not word:
        return "1"
    out = []
    for name, run in itertools.groupby(word):
        n = len(list(run))
        out.append(names[name] if n == 1 else f"{names[name]}^{n}")
    return "*".join(out)


class CandidateSet:
    """Candidates sharing one ambient ring, tested over the scalar field ``scalars``.

    ``elements`` are ring elements or callables ``prec -> element`` (for
    truncated series).  ``labels`` are the expression strings shown in
    certificates; ``names`` the letters used for words.
    """

    def __init__(self, elements: Sequence, scalars: FieldTower | None = None,
                 labels: Sequence[str] | None = None, names: Sequence[str] | None = None):
        self.elements = list(elements)
        k = len(self.elements)
        self.scalars = scalars if scalars is not None else FieldTower([])
        self.labels = list(labels) if labels is not None else [None] * k
        self.names = list(names) if names is not None else list(LETTERS[:k])
        if len(self.names) != k or len(self.labels) != k:
            raise ValueError("names and labels must match the candidates")

    def __len__(self) -> int:
        return len(self.elements)

    def evaluate(self, prec) -> list:
        return [e(prec) if callable(e) else e for e in self.elements]

    def is_truncated(self, prec) -> bool:
        return any(isinstance(v, SkewSeries) and v.prec != INF for v in self.evaluate(prec))

    def label(self, i: int, prec=None) -> str:
        if self.labels[i] is not None:
            return self.labels[i]
        v = self.elements[i]
        return str(v(prec) if callable(v) else v)


@dataclass
class Certificate:
    verdict: str
    degree: int
    precision: object
    strategy: str
    words: list[str]
    candidates: list[str]
    relation: list | None = None
    nullspace: list = field(default_factory=list)
    exact: bool = False
    rank: int | None = None
    reason: str = ""
    seed: int | None = None

    def relation_dict(self) -> dict[str, object]:
        if self.relation is None:
            return {}
        return {w: c for w, c in zip(self.words, self.relation) if c}

    def to_json(self) -> dict:
        def s(v):
            return [str(x) for x in v]

        return {
            "verdict": self.verdict,
            "degree": self.degree,
            "precision": None if self.precision in (None, INF) else self.precision,
            "strategy": self.strategy,
            "seed": self.seed,
            "candidates": self.candidates,
            "words": self.words,
            "rank": self.rank,
            "relation": None if self.relation is None else s(self.relation),
            "nullspace": [s(v) for v in self.nullspace],
            "exact": self.exact,
            "reason": self.reason,
        }

    def __str__(self) -> str:
        if self.verdict == FREE:
            return f"FreeUpTo({self.degree}) at precision {self.precision}"
        if self.verdict == RELATION:
            terms = " + ".join(f"({c})*{w}" for w, c in self.relation_dict().items())
            tag = "exact" if self.exact else "persistent"
            return f"RelationFound[{tag}]: {terms} = 0"
        return f"Inconclusive: {self.reason}"


# evaluation ---------------------------------------------------------------------------

def _eval_words(values: list, words: list[tuple[int, ...]], one):
    """Value of every word, sharing prefixes."""
    cache: dict[tuple, object] = {(): one}
    out = []
    for w in words:
        if w not in cache:
            cache[w] = cache[w[:-1]] * values[w[-1]]
        out.append(cache[w])
    return out


def _one_like(v):
    if isinstance(v, FieldElem):
        return v.tower.one
    if isinstance(v, OrePoly):
        return v.tower.one
    if isinstance(v, QTorusElem):
        return v.ring.one
    if isinstance(v, SkewSeries):
        return SkewSeries.one(v.ctx)
    if isinstance(v, GroupRingElem):
        return GroupRingElem.one(v.pres)
    raise TypeError(f"unsupported candidate type {type(v).__name__}")


def _coordinates(v, limit=INF) -> dict:
    """Map from coordinate keys to base-field coefficients."""
    if isinstance(v, FieldElem):
        return {(): v} if v else {}
    if isinstance(v, (OrePoly, QTorusElem, GroupRingElem, MNSeries)):
        return dict(v.terms)
    if isinstance(v, SkewSeries):
        out = {}
        for k, c in v.coeffs.items():
            if k >= limit:
                continue
            if isinstance(c, QTorusElem):
                for e, a in c.terms.items():
                    out[(k, e)] = a
            else:
                out[(k,)] = c
        return out
    raise TypeError(f"unsupported value type {type(v).__name__}")


def _flatten(col_coords: list[dict], scalars: FieldTower, strategy: str, rng: random.Random):
    """Rows of C-linear functionals (one per coordinate and upper monomial)."""
    keys = sorted({k for cc in col_coords for k in cc}, key=repr)
    ncols = len(col_coords)
    if not keys:
        return [], ncols
    sample = next(v for cc in col_coords for v in cc.values())
    K = sample.tower
    cnames = set(scalars.levels)
    if not cnames <= set(K.levels):
        raise ValueError("scalar field is not contained in the coefficient field")
    upper = [v for v in K.levels if v not in cnames]
    rows = []
    if strategy == "random" and upper:
        values = None
        for _ in range(50):
            values = {v: Fraction(rng.randint(-97, 97), rng.randint(1, 23)) for v in upper}
            try:
                for key in keys:
                    for cc in col_coords:
                        a = cc.get(key)
                        if a is not None:
                            a.specialize(values, scalars)
                break
            except ZeroDivisionError:
                values = None
        if values is None:
            raise ValueError("could not find a specialization point avoiding poles")
        for key in keys:
            row = [scalars.zero] * ncols
            for j, cc in enumerate(col_coords):
                a = cc.get(key)
                if a is not None:
                    row[j] = a.specialize(values, scalars)
            rows.append(row)
        return _to_fractions(rows, scalars), ncols
    ring = K.ring
    cidx = [K.gen_index(v) for v in scalars.levels]
    cring = scalars.ring
    # scalars.ring generators are reversed(scalars.levels)
    corder = list(reversed(cidx))
    uidx = [i for i in range(len(K.levels)) if i not in set(cidx)]
    for key in keys:
        entries = [cc.get(key) for cc in col_coords]
        D = ring.one
        for a in entries:
            if a is not None and not a.den.is_ground:
                D = D.lcm(a.den)
        split: dict[tuple, list] = {}
        for j, a in enumerate(entries):
            if a is None:
                continue
            p = a.num * D.exquo(a.den) if not a.den.is_ground else a.num * D.mul_ground(1 / a.den.LC)
            for mon, c in p.terms():
                up = tuple(mon[i] for i in uidx)
                cm = tuple(mon[i] for i in corder)
                split.setdefault(up, [dict() for _ in range(ncols)])[j][cm] = c
        for up in sorted(split):
            row = []
            for d in split[up]:
                if not d:
                    row.append(scalars.zero)
                else:
                    row.append(FieldElem._raw(scalars, cring.from_dict(d), cring.one))
            rows.append(row)
    return _to_fractions(rows, scalars), ncols


def _to_fractions(rows, scalars: FieldTower):
    if scalars.levels:
        return rows
    return [[x.to_fraction() for x in row] for row in rows]


def _normalize(vec):
    lead = next(x for x in vec if x)
    return [x / lead for x in vec]


def _relation_value(values: list, vec: list, scalars: FieldTower):
    total = None
    for v, c in zip(values, vec):
        if not c:
            continue
        cf = c if isinstance(c, FieldElem) else scalars(c)
        term = _scale(v, cf)
        total = term if total is None else total + term
    return total


def _scale(v, c: FieldElem):
    """``c * v`` for a central scalar ``c``."""
    if isinstance(v, FieldElem):
        return v.tower(c) * v
    if isinstance(v, OrePoly):
        return v * v.tower(v.tower.base(c))
    if isinstance(v, QTorusElem):
        return v * v.ring.scalars(c)
    return _scalar_like(v, c) * v


def _is_zero(v) -> bool:
    if v is None:
        return True
    if isinstance(v, SkewSeries):
        return not v.coeffs
    return not v


def _kernel(cands: CandidateSet, words, prec, strategy, rng):
    values = cands.evaluate(prec)
    vals = _eval_words(values, words, _one_like(values[0]))
    limit = INF
    for v in vals:
        if isinstance(v, SkewSeries):
            limit = min(limit, v.prec)
    coords = [_coordinates(v, limit) for v in vals]
    rows, ncols = _flatten(coords, cands.scalars, strategy, rng)
    sc = cands.scalars
    one = Fraction(1) if not sc.levels else sc.one
    zero = Fraction(0) if not sc.levels else sc.zero
    if not rows:
        basis = [[one if i == j else zero for i in range(ncols)] for j in range(ncols)]
        return basis, 0, vals
    red, piv = rref(rows, ncols)
    basis = nullspace(red, ncols, one, zero)
    return [_normalize(v) for v in basis], len(piv), vals


def commutant_check(cands: CandidateSet, prec=16) -> bool:
    """Do the scalar generators (and a rational) commute with every candidate?"""
    if not len(cands):
        return True
    values = cands.evaluate(prec)
    samples = [cands.scalars.gen(v) for v in cands.scalars.levels] + [cands.scalars(Fraction(3, 7))]
    for v in values:
        for s in samples:
            sv = _scalar_like(v, s)
            left, right = sv * v, v * sv
            if isinstance(v, SkewSeries):
                if not (left - right).truncate(min(left.prec, right.prec)).coeffs == {}:
                    return False
            elif left != right:
                return False
    return True


def _scalar_like(v, s: FieldElem):
    if isinstance(v, FieldElem):
        return v.tower(s)
    if isinstance(v, OrePoly):
        return v.tower(v.tower.base(s))
    if isinstance(v, QTorusElem):
        return v.ring(v.ring.scalars(s))
    if isinstance(v, SkewSeries):
        ring = v.ctx.ring
        scal = ring if isinstance(ring, FieldTower) else ring.scalars
        return SkewSeries(v.ctx, {0: ring(scal(s))})
    if isinstance(v, GroupRingElem):
        return GroupRingElem(v.pres, {v.pres.identity: v.pres.tower(s)})
    raise TypeError(type(v).__name__)


def certify(cands: CandidateSet, d: int, prec=16, strategy: str = "exact", seed: int = 0,
            max_prec=None) -> Certificate:
    """Bounded-degree freeness test; see the module docstring for the verdict semantics."""
    if strategy not in ("exact", "random"):
        raise ValueError("strategy must be 'exact' or 'random'")
    k = len(cands)
    words = enum_monomials(max(k, 1), d) if k else [()]
    wnames = [word_str(w, cands.names) for w in words]
    labels = [cands.label(i, prec) for i in range(k)]
    base = dict(degree=d, strategy=strategy, words=wnames, candidates=labels, seed=seed)
    if not commutant_check(cands, prec):
        return Certificate(INCONCLUSIVE, precision=prec, reason="scalar field is not central for these candidates",
                           **base)
    rng = random.Random(seed)
    cap = max_prec if max_prec is not None else (2 * prec if prec is not None else None)
    basis, rk, vals = _kernel(cands, words, prec, strategy, rng)
    if not basis:
        return Certificate(FREE, precision=prec, rank=rk, **base)
    truncated = any(isinstance(v, SkewSeries) and v.prec != INF for v in vals)
    if strategy == "exact" and not truncated:
        vec = basis[0]
        exact = all(_is_zero(_relation_value(vals, v, cands.scalars)) for v in basis)
        if exact:
            return Certificate(RELATION, precision=prec, rank=rk, relation=vec, nullspace=basis, exact=True, **base)
        return Certificate(INCONCLUSIVE, precision=prec, rank=rk, relation=vec, nullspace=basis,
                           reason="kernel vector does not vanish on the exact values", **base)
    cur = prec
    while cur < cap:
        cur = min(2 * cur, cap)
        new_basis, rk, vals = _kernel(cands, words, cur, strategy, rng)
        if not new_basis:
            return Certificate(FREE, precision=cur, rank=rk, **base)
        if [list(map(str, v)) for v in new_basis] != [list(map(str, v)) for v in basis]:
            return Certificate(INCONCLUSIVE, precision=cur, rank=rk, relation=new_basis[0], nullspace=new_basis,
                               reason="kernel changed when the precision was raised", **base)
        basis = new_basis
    if strategy == "random":
        return Certificate(INCONCLUSIVE, precision=cur, rank=rk, relation=basis[0], nullspace=basis,
                           reason="relation seen only at a random specialization", **base)
    return Certificate(RELATION, precision=cur, rank=rk, relation=basis[0], nullspace=basis, exact=False,
                       reason="relation persists up to the precision cap", **base)


def planted_relation_holds(cert: Certificate, values: list, words, scalars: FieldTower) -> bool:
    """Helper for exact ambients: does the certificate's relation evaluate to zero?"""
    vals = _eval_words(values, words, _one_like(values[0]))
    return _is_zero(_relation_value(vals, cert.relation, scalars))


__all__ = [
    "enum_monomials", "CandidateSet", "Certificate", "certify", "commutant_check",
    "FREE", "RELATION", "INCONCLUSIVE", "word_str",
]
