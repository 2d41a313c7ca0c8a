"""Torsion-free nilpotent groups, skew group rings and Malcev-Neumann series.

Group elements are exponent vectors ``(a_1, ..., a_r)`` standing for the
normal form ``f_1^{a_1} f_2^{a_2} ... f_r^{a_r}``.  A presentation records,
for ``j > i``, the correction word ``w`` with

    f_j f_i = f_i f_j w,      w in <f_{j+1}, ..., f_r>,

so ``f_i^{-1} f_j f_i = f_j w``.  Group ring elements ``sum a_g g`` keep their
coefficients on the LEFT and multiply by ``g a = s(g)(a) g``.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .basefield import EndoSpec, FieldElem, FieldTower, NotInvertibleError
from .valuation import INF, AtLeast

# refuse to enumerate prefix boxes larger than this
MAX_BOX_POINTS = 200_000


class PresentationError(ValueError):
    pass


class BoxTooLargeError(ValueError):
    pass


class PolycyclicPresentation:
    """Nilpotent group given by a central series with cyclic factors.

    ``relations`` maps 1-based pairs ``(j, i)``, ``j > i``, to the exponents
    ``(c_{j+1}, ..., c_r)`` of the correction word; missing pairs commute.
    ``action`` optionally maps generator indices (1-based) to automorphisms of
    a coefficient tower.
    """

    def __init__(self, rank: int, relations: Mapping[tuple[int, int], Sequence[int]] | None = None,
                 action: Mapping[int, EndoSpec] | None = None, tower: FieldTower | None = None,
                 names: Sequence[str] | None = None, check_samples: int = 200, seed: int = 0):
        if rank < 1:
            raise PresentationError("rank must be positive")
        self.rank = r = rank
        self.names = tuple(names) if names else tuple(f"f{k + 1}" for k in range(r))
        if len(self.names) != r:
            raise PresentationError("wrong number of generator names")
        self.identity = (0,) * r
        # conj[i][j] = f_i^{-1} f_j f_i as an exponent vector (0-based, j > i)
        self.conj: list[dict[int, tuple]] = [dict() for _ in range(r)]
        rel = dict(relations or {})
        for (j, i), cs in rel.items():
            if not (1 <= i < j <= r):
                raise PresentationError(f"relation index ({j}, {i}) must satisfy 1 <= i < j <= rank")
            cs = list(cs)
            if len(cs) > r - j:
                raise PresentationError(f"correction for ({j}, {i}) may only involve generators after f{j}")
            cs += [0] * (r - j - len(cs))
            self.conj[i - 1][j - 1] = (0,) * (j - 1) + (1,) + tuple(int(c) for c in cs)
        for i in range(r):
            for j in range(i + 1, r):
                self.conj[i].setdefault(j, tuple(1 if k == j else 0 for k in range(r)))
        self._inv_conj: list[dict[int, tuple]] = [dict() for _ in range(r)]
        for i in range(r - 1, -1, -1):
            for j in range(r - 1, i, -1):
                # phi_i(f_j) = f_j w  =>  psi_i(f_j) = f_j psi_i(w)^{-1}
                w = self.mul(self._gen_power(j, -1), self.conj[i][j])
                self._inv_conj[i][j] = self.mul(self._gen_power(j, 1), self.inv(self._psi(i, w)))
        self._mul_cached = lru_cache(maxsize=200_000)(self._mul)
        self.tower = tower if tower is not None else (
            next(iter(action.values())).tower if action else FieldTower([]))
        self.action: dict[int, EndoSpec] = {}
        for k, s in (action or {}).items():
            if not 1 <= k <= r:
                raise PresentationError(f"action on unknown generator {k}")
            if s.tower is not self.tower:
                raise PresentationError("all automorphisms must act on the same tower")
            if not s.invertible:
                raise PresentationError(f"action of f{k} needs an inverse")
            self.action[k - 1] = s
        self._check(check_samples, seed)

    # group law ------------------------------------------------------------------
    def _gen_power(self, i: int, e: int) -> tuple:
        return tuple(e if k == i else 0 for k in range(self.rank))

    def _phi(self, i: int, t: tuple) -> tuple:
        """Conjugation by f_i of an element supported after i."""
        out = self.identity
        for j in range(i + 1, self.rank):
            if t[j]:
                out = self.mul(out, self.power(self.conj[i][j], t[j]))
        return out

    def _psi(self, i: int, t: tuple) -> tuple:
        out = self.identity
        for j in range(i + 1, self.rank):
            if t[j]:
                out = self.mul(out, self.power(self._inv_conj[i][j], t[j]))
        return out

    def _times_gen(self, w: tuple, i: int, e: int) -> tuple:
        """``w * f_i^e`` in normal form."""
        tail = (0,) * (i + 1) + w[i + 1:]
        if any(tail):
            f = self._phi if e > 0 else self._psi
            for _ in range(abs(e)):
                tail = f(i, tail)
        return w[:i] + (w[i] + e,) + tail[i + 1:]

    def _mul(self, g: tuple, h: tuple) -> tuple:
        out = g
        for i, e in enumerate(h):
            if e:
                out = self._times_gen(out, i, e)
        return out

    def mul(self, g: tuple, h: tuple) -> tuple:
        if not any(h):
            return g
        if not any(g):
            return h
        cached = getattr(self, "_mul_cached", None)
        return cached(g, h) if cached is not None else self._mul(g, h)

    def inv(self, g: tuple) -> tuple:
        out = self.identity
        for i in range(self.rank - 1, -1, -1):
            if g[i]:
                out = self._times_gen(out, i, -g[i])
        return out

    def power(self, g: tuple, n: int) -> tuple:
        if n < 0:
            g, n = self.inv(g), -n
        out = self.identity
        while n:
            if n & 1:
                out = self.mul(out, g)
            g = self.mul(g, g)
            n >>= 1
        return out

    # action ---------------------------------------------------------------------
    def act(self, g: tuple, a: FieldElem) -> FieldElem:
        """``s(g)(a)`` for ``g = f_1^{a_1} ... f_r^{a_r}``."""
        if not self.action or not a or a.is_constant():
            return a
        for i in range(self.rank - 1, -1, -1):
            e = g[i]
            s = self.action.get(i)
            if e and s is not None:
                f = s if e > 0 else s.inverse()
                for _ in range(abs(e)):
                    a = f.apply(a)
        return a

    def _check(self, samples: int, seed: int) -> None:
        rng = random.Random(seed)
        r = self.rank
        for _ in range(samples):
            g, h, k = (tuple(rng.randint(-3, 3) for _ in range(r)) for _ in range(3))
            if self.mul(self.mul(g, h), k) != self.mul(g, self.mul(h, k)):
                raise PresentationError(f"presentation is inconsistent: associativity fails on {g}, {h}, {k}")
            if self.mul(g, self.inv(g)) != self.identity:
                raise PresentationError(f"inverse law fails on {g}")
        if self.action:
            gens = [self.tower.gen(v) for v in self.tower.levels]
            for i in range(r):
                for j in range(i + 1, r):
                    fj_fi = self.mul(self._gen_power(j, 1), self._gen_power(i, 1))
                    for t in gens:
                        lhs = self.act(self._gen_power(j, 1), self.act(self._gen_power(i, 1), t))
                        if lhs != self.act(fj_fi, t):
                            raise PresentationError(
                                f"action does not respect the relation between {self.names[j]} and {self.names[i]}")
            for _ in range(min(samples, 50)):
                g, h = (tuple(rng.randint(-2, 2) for _ in range(r)) for _ in range(2))
                for t in gens:
                    if self.act(g, self.act(h, t)) != self.act(self.mul(g, h), t):
                        raise PresentationError("action is not a homomorphism on sampled elements")

    def elem_str(self, g: tuple) -> str:
        return group_str(self, g)

    def __repr__(self) -> str:
        return f"PolycyclicPresentation(rank={self.rank})"


def heisenberg(action: Mapping[int, EndoSpec] | None = None, tower: FieldTower | None = None,
               **kw) -> PolycyclicPresentation:
    """``f_2 f_1 = f_1 f_2 f_3^{-1}`` with ``f_3`` central."""
    return PolycyclicPresentation(3, {(2, 1): [-1]}, action=action, tower=tower, **kw)


def collect(P: PolycyclicPresentation, g: Sequence[int], h: Sequence[int]) -> tuple:
    return P.mul(tuple(g), tuple(h))


def group_inv(P: PolycyclicPresentation, g: Sequence[int]) -> tuple:
    return P.inv(tuple(g))


def lex_cmp(g: Sequence[int], h: Sequence[int]) -> int:
    """-1, 0 or 1; the first differing exponent decides."""
    for a, b in zip(g, h):
        if a != b:
            return -1 if a < b else 1
    return 0


def level(g: Sequence[int]) -> int:
    """0-based index of the first nonzero exponent (``len(g)`` for the identity)."""
    for k, a in enumerate(g):
        if a:
            return k
    return len(g)


def group_str(P: PolycyclicPresentation, g: Sequence[int]) -> str:
    parts = []
    for name, e in zip(P.names, g):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")
    return "*".join(parts) if parts else "1"


# group ring ---------------------------------------------------------------------

class GroupRingElem:
    """Finite sum ``sum a_g g`` in the skew group ring ``K[G; s]``."""

    __slots__ = ("pres", "terms")

    def __init__(self, pres: PolycyclicPresentation, terms: Mapping | None = None):
        self.pres = pres
        tower = pres.tower
        out = {}
        for g, a in (terms or {}).items():
            g = tuple(g)
            if len(g) != pres.rank:
                raise ValueError("exponent vector has the wrong length")
            a = tower(a)
            if a:
                out[g] = out[g] + a if g in out else a
        self.terms = {g: a for g, a in out.items() if a}

    @classmethod
    def monomial(cls, pres, g, coeff=1):
        return cls(pres, {tuple(g): coeff})

    @classmethod
    def one(cls, pres):
        return cls(pres, {pres.identity: 1})

    def _coerce(self, other):
        if isinstance(other, GroupRingElem):
            if other.pres is not self.pres:
                raise ValueError("group ring elements over different presentations")
            return other
        if isinstance(other, (int, Fraction, FieldElem)):
            return GroupRingElem(self.pres, {self.pres.identity: other})
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for g, a in o.terms.items():
            out[g] = out[g] + a if g in out else a
        return GroupRingElem(self.pres, out)

    __radd__ = __add__

    def __neg__(self):
        return GroupRingElem(self.pres, {g: -a for g, a in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return gr_mul(self, o)

    def __rmul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return gr_mul(o, self)

    def __eq__(self, other):
        if not isinstance(other, GroupRingElem):
            o = self._coerce(other)
            if o is None:
                return NotImplemented
            other = o
        return self.pres is other.pres and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> list[tuple]:
        return sorted(self.terms)

    def __str__(self) -> str:
        return _terms_str(self.pres, self.terms)

    def __repr__(self) -> str:
        return f"GroupRingElem({self})"


def _terms_str(pres, terms) -> str:
    if not terms:
        return "0"
    parts = []
    for g in sorted(terms):
        a = terms[g]
        mono = group_str(pres, g)
        s = str(a)
        neg = s.startswith("-") and " " not in s
        if neg:
            s = s[1:]
        if mono == "1":
            body = s
        elif s == "1":
            body = mono
        else:
            body = f"({s})*{mono}" if any(ch in s for ch in " /*") else f"{s}*{mono}"
        parts.append(("-" if neg else "+", body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def _mul_terms(pres: PolycyclicPresentation, left: Mapping, right: Mapping) -> dict:
    out: dict = {}
    for g, a in left.items():
        for h, b in right.items():
            k = pres.mul(g, h)
            c = a * pres.act(g, b)
            if k in out:
                s = out[k] + c
                if s:
                    out[k] = s
                else:
                    del out[k]
            elif c:
                out[k] = c
    return out


def gr_mul(u: GroupRingElem, v: GroupRingElem) -> GroupRingElem:
    """``(a g)(b h) = a s(g)(b) gh``."""
    if u.pres is not v.pres:
        raise ValueError("group ring elements over different presentations")
    return GroupRingElem(u.pres, _mul_terms(u.pres, u.terms, v.terms))


def mn_o_val(u):
    """``min a_1`` over the support; ``INF`` for zero.

    A series with a known leading element uses it, even outside the box.
    For a truncated series whose known part is empty the result is
    ``AtLeast`` of the first unknown ``a_1``.
    """
    if isinstance(u, MNSeries):
        if u.lead is not None and u.lead[0] < u.alpha1_prec:
            return u.lead[0]
        known = [g[0] for g in u.terms if g[0] < u.alpha1_prec]
        if known:
            return min(known)
        return INF if u.alpha1_prec == INF else AtLeast(u.alpha1_prec)
    if not u.terms:
        return INF
    return min(g[0] for g in u.terms)


# Malcev-Neumann series -------------------------------------------------------------

class MNSeries:
    """Malcev-Neumann series known exactly on a region.

    ``box`` is the bound ``N`` of the exponent box ``[-N, N]^r`` (``None`` for
    no box restriction); when ``complete`` is true every term of the true
    series inside the box is present.  ``alpha1_prec`` marks the first
    ``a_1`` value beyond which nothing is known (used by Cauchy limits).
    ``lead`` is the lex-least element of the full support when it is known,
    which may lie outside the box.
    """

    __slots__ = ("pres", "terms", "box", "complete", "alpha1_prec", "lead")

    def __init__(self, pres, terms: Mapping, box: int | None = None, complete: bool = True, alpha1_prec=INF,
                 lead: tuple | None = None):
        self.pres = pres
        self.lead = lead
        self.box = box
        self.complete = complete
        self.alpha1_prec = alpha1_prec
        self.terms = {tuple(g): a for g, a in terms.items()
                      if a and (box is None or all(abs(x) <= box for x in g)) and g[0] < alpha1_prec}

    def coefficient(self, g):
        g = tuple(g)
        if self.box is not None and any(abs(x) > self.box for x in g):
            raise ValueError(f"{g} lies outside the box")
        return self.terms.get(g, self.pres.tower.zero)

    def restrict(self, region: Iterable[tuple]) -> dict:
        return {g: self.terms[g] for g in region if g in self.terms}

    @classmethod
    def from_elem(cls, u: GroupRingElem) -> "MNSeries":
        return cls(u.pres, u.terms, lead=min(u.terms) if u.terms else None)

    def _combine(self, other, sign: int) -> "MNSeries":
        if isinstance(other, GroupRingElem):
            other = MNSeries.from_elem(other)
        box = self.box if other.box is None else (other.box if self.box is None else min(self.box, other.box))
        out = dict(self.terms)
        for g, a in other.terms.items():
            a = a if sign > 0 else -a
            out[g] = out[g] + a if g in out else a
        # distinct leading elements cannot cancel
        lead = None
        if self.lead is not None and other.lead is not None and self.lead != other.lead:
            lead = min(self.lead, other.lead)
        return MNSeries(self.pres, out, box, self.complete and other.complete,
                        min(self.alpha1_prec, other.alpha1_prec), lead)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __rsub__(self, other):
        if isinstance(other, GroupRingElem):
            return MNSeries.from_elem(other) - self
        return NotImplemented

    def __add__(self, other):
        return self._combine(other, 1)

    __radd__ = __add__

    def __str__(self) -> str:
        s = _terms_str(self.pres, self.terms)
        if self.box is not None:
            s += f"  [box {self.box}]"
            if self.lead is not None and self.lead not in self.terms:
                s += f"  (leading term {group_str(self.pres, self.lead)} lies outside)"
        if self.alpha1_prec != INF:
            s += f" + O(a1 >= {self.alpha1_prec})"
        return s

    def __repr__(self) -> str:
        return f"MNSeries({self})"

    def to_json(self) -> dict:
        return {
            "box": self.box,
            "terms": [[list(g), str(self.terms[g])] for g in sorted(self.terms)],
            "complete": self.complete,
            "lead": list(self.lead) if self.lead is not None else None,
        }


def box_points(r: int, N: int):
    if (2 * N + 1) ** r > MAX_BOX_POINTS:
        raise BoxTooLargeError(f"box [-{N}, {N}]^{r} has more than {MAX_BOX_POINTS} points")
    return itertools.product(range(-N, N + 1), repeat=r)


def _prefix_bounds(pres, supp_m: list[tuple], A: list[int]):
    """Coordinate ranges containing every partial product that can still land in the target.

    Returns ``(ranges, max_factors)``.
    """
    r = pres.rank
    levels = [level(s) for s in supp_m]
    ranges: list[tuple[int, int]] = []
    counts: list[int] = []
    for i in range(r):
        n_lower = sum(counts)
        lower = [s for s, lv in zip(supp_m, levels) if lv < i]
        D = 0
        if lower and n_lower:
            size = 1
            for lo, hi in ranges:
                size *= max(0, hi - lo + 1)
            if size > MAX_BOX_POINTS:
                raise BoxTooLargeError(f"prefix box for coordinate {i + 1} has {size} points")
            for pre in itertools.product(*[range(lo, hi + 1) for lo, hi in ranges]):
                x = tuple(pre) + (0,) * (r - i)
                for s in lower:
                    D = min(D, pres.mul(x, s)[i])
        lo, hi = n_lower * D, A[i] - n_lower * D
        ranges.append((lo, hi))
        has_level = any(lv == i for lv in levels)
        counts.append(max(0, hi) if has_level else 0)
    return ranges, sum(counts)


def mn_inverse(u: GroupRingElem, N: int) -> MNSeries:
    """Terms of ``u^{-1}`` inside the box ``[-N, N]^r``, exactly.

    Write ``u = (a g0)(1 + m)`` with ``g0`` the lex-least support element, so
    every element of ``supp(m)`` is lex-positive, and expand
    ``u^{-1} = sum_k (-m)^k (a g0)^{-1}``.  A word in ``supp(m)`` can reach
    the target only while each coordinate of its partial products stays in a
    computable range; the first coordinate only grows, and coordinate ``i``
    is moved down solely by factors of smaller level, each by a bounded
    amount.  Those ranges bound both the relevant powers and the terms kept.
    """
    if not u.terms:
        raise ZeroDivisionError("cannot invert zero")
    pres = u.pres
    r = pres.rank
    g0 = min(u.terms)
    a0 = u.terms[g0]
    g0inv = pres.inv(g0)
    inv0 = {g0inv: pres.act(g0inv, a0.inverse())}
    rest = {g: a for g, a in u.terms.items() if g != g0}
    m = _mul_terms(pres, inv0, rest)
    for s in m:
        if lex_cmp(s, pres.identity) <= 0:
            raise ArithmeticError("internal error: normalized tail is not lex-positive")
    box = [tuple(p) for p in box_points(r, N)]
    target = {pres.mul(h, g0) for h in box}
    A = [max(t[i] for t in target) for i in range(r)]
    supp = list(m)
    ranges, L = _prefix_bounds(pres, supp, A)

    def inside(g):
        return all(lo <= x <= hi for x, (lo, hi) in zip(g, ranges))

    neg_m = {g: -a for g, a in m.items()}
    total: dict = {pres.identity: pres.tower.one} if inside(pres.identity) else {}
    power = dict(total)
    for _ in range(L):
        if not power:
            break
        power = {g: a for g, a in _mul_terms(pres, power, neg_m).items() if inside(g)}
        for g, a in power.items():
            s = total[g] + a if g in total else a
            if s:
                total[g] = s
            else:
                total.pop(g, None)
    hits = {g: a for g, a in total.items() if g in target}
    result = _mul_terms(pres, hits, inv0)
    return MNSeries(pres, result, N, True, lead=g0inv)


def safe_box(u: GroupRingElem, N: int) -> list[tuple]:
    """Box points ``h`` where ``(u v)_h`` only needs coefficients of ``v`` inside the box."""
    pres = u.pres
    supp_inv = [pres.inv(g) for g in u.terms]
    out = []
    for h in box_points(pres.rank, N):
        if all(all(abs(x) <= N for x in pres.mul(gi, h)) for gi in supp_inv):
            out.append(tuple(h))
    return out


def mn_product_on(u: GroupRingElem, v: MNSeries, region: Iterable[tuple]) -> dict:
    """Coefficients of ``u * v`` at the points of ``region``, by direct term pairing."""
    pres = u.pres
    out = {}
    for h in region:
        c = pres.tower.zero
        for g, a in u.terms.items():
            k = pres.mul(pres.inv(g), h)
            b = v.terms.get(k)
            if b is not None:
                c = c + a * pres.act(g, b)
        if c:
            out[h] = c
    return out


def mn_fraction_val(f: GroupRingElem, g: GroupRingElem):
    """Valuation of ``f g^{-1}``: ``o(f) - o(g)``."""
    if not g.terms:
        raise ZeroDivisionError("zero denominator")
    if not f.terms:
        return INF
    return mn_o_val(f) - mn_o_val(g)


def _val_at_least(v, bound) -> bool:
    if v == INF:
        return True
    if isinstance(v, AtLeast):
        return v.bound >= bound
    return v >= bound


class NotCauchyError(ValueError):
    pass


def mn_cauchy_limit(seq: Sequence[GroupRingElem | MNSeries]) -> MNSeries:
    """Diagonal limit of ``u_0, u_1, ...`` with ``o(u_l - u_k) >= k + 1`` for ``l > k``.

    Terms with ``a_1 < 0`` come from ``u_0``; terms with ``a_1 = i >= 0`` from
    ``u_i``.  The limit is known for ``a_1 < len(seq)``.
    """
    us = [MNSeries(x.pres, x.terms) if isinstance(x, GroupRingElem) else x for x in seq]
    if not us:
        raise ValueError("empty sequence")
    pres = us[0].pres
    m = len(us)
    for k in range(m):
        for l in range(k + 1, m):
            v = mn_o_val(us[l] - us[k])
            if not _val_at_least(v, k + 1):
                raise NotCauchyError(f"o(u_{l} - u_{k}) = {v} < {k + 1}")
    out = {g: a for g, a in us[0].terms.items() if g[0] < 0}
    for i in range(m):
        out.update({g: a for g, a in us[i].terms.items() if g[0] == i})
    box = None
    for x in us:
        if x.box is not None:
            box = x.box if box is None else min(box, x.box)
    u = MNSeries(pres, out, box, True, m)
    for k in range(m):
        if not _val_at_least(mn_o_val(us[k] - u), k + 1):
            raise NotCauchyError(f"diagonal limit check failed at index {k}")
    return u
