"""Truncated skew Laurent series.

Two flavours share one implementation:

* ``PlainSigma``: series in ``x`` over ``K`` with ``a x = x s(a)``, hence
  ``x^n a = s^{-n}(a) x^n``;
* ``InverseDelta``: series in ``y = x^{-1}`` for ``K[x; s, d]``.  Multiplying
  ``a x = x s(a) + d(a)`` by ``y`` on both sides gives

      y a = s(a) y + y d(a) y = sum_{i>=0} s(d^i(a)) y^{i+1}     (infinite)

  and substituting ``a -> s^{-1}(b)`` gives the exact finite rule

      y^{-1} b = s^{-1}(b) y^{-1} - d(s^{-1}(b)).

Coefficients sit on the LEFT of the powers.  Every series carries a
precision ``N`` (an int, or ``math.inf`` for exactly known finite series):
the coefficients of exponents ``>= N`` are unknown.
"""

from __future__ import annotations

from fractions import Fraction

import math
from typing import Iterable, Sequence

from .basefield import DerivSpec, EndoSpec, FieldElem, FieldTower, NotInvertibleError
from .ore import OrePoly, OreTower, QTorus, QTorusDeriv, QTorusElem, QTorusEndo
from .valuation import INF, AtLeast

PLAIN = "PlainSigma"
INVERSE = "InverseDelta"

# longest d-chain followed when an exact product needs y * a
MAX_CHAIN = 512


class PrecisionError(ValueError):
    """An exact result was requested but only a truncated one exists."""


class ContextMismatchError(ValueError):
    pass


class NotCauchyError(ValueError):
    pass


class SeriesContext:
    """Coefficient ring, twist and derivation for a family of series.

    ``ring`` is a :class:`FieldTower` or a :class:`QTorus`; ``sigma`` must be
    invertible.  ``ore`` optionally records the skew polynomial ring whose
    top variable the series variable is attached to, so that its elements can
    be embedded.
    """

    def __init__(self, kind: str, ring, sigma, delta=None, var: str = "y",
                 ore: OreTower | None = None, top: str | None = None, default_prec: int = 16):
        if kind not in (PLAIN, INVERSE):
            raise ValueError(f"unknown series kind {kind!r}")
        if not sigma.invertible:
            raise NotInvertibleError("series contexts need an invertible sigma")
        if kind == PLAIN and delta is not None and not _deriv_is_zero(delta):
            raise ValueError("PlainSigma contexts carry delta = 0")
        self.kind = kind
        self.ring = ring
        self.sigma = sigma
        self.sigma_inv = sigma.inverse()
        self.delta = None if delta is None or _deriv_is_zero(delta) else delta
        self.var = var
        self.ore = ore
        self.top = top
        self.default_prec = default_prec
        # precision used when an "exact" product turns out to be infinite
        self.auto_prec = None
        self._ychain: dict = {}
        self._yinv: dict = {}
        self._spow: dict = {}

    def __repr__(self) -> str:
        return f"SeriesContext({self.kind}, {self.var}, {self.ring!r})"

    @property
    def one(self):
        return self.ring.one

    @property
    def zero(self):
        return self.ring.zero

    def coeff(self, value):
        return self.ring(value)

    def _d(self, a):
        return self.delta.apply(a) if self.delta is not None else self.ring.zero

    def y_chain(self, a, length: int):
        """First ``length`` terms of ``[s(a), s(d(a)), s(d^2(a)), ...]``.

        Returns ``(terms, finished)`` where ``finished`` means every later
        term vanishes.
        """
        entry = self._ychain.get(a)
        if entry is None:
            entry = {"terms": [], "cur": a, "done": a.is_zero()}
            self._ychain[a] = entry
        terms = entry["terms"]
        while len(terms) < length and not entry["done"]:
            cur = entry["cur"]
            terms.append(self.sigma.apply(cur))
            nxt = self._d(cur)
            entry["cur"] = nxt
            entry["done"] = nxt.is_zero()
        return terms[:length], entry["done"] and len(terms) <= length

    def y_inverse_rule(self, b):
        """``y^{-1} b = u y^{-1} + v``; returns ``(u, v)``."""
        hit = self._yinv.get(b)
        if hit is None:
            u = self.sigma_inv.apply(b)
            hit = (u, -self._d(u))
            self._yinv[b] = hit
        return hit

    def sigma_power(self, n: int, a):
        """``s^n(a)`` for any integer ``n``."""
        if n == 0:
            return a
        key = (n, a)
        hit = self._spow.get(key)
        if hit is None:
            f = self.sigma if n > 0 else self.sigma_inv
            hit = a
            for _ in range(abs(n)):
                hit = f.apply(hit)
            if len(self._spow) > 50000:
                self._spow.clear()
            self._spow[key] = hit
        return hit

    # embedding ------------------------------------------------------------
    def ore_coeff(self, c: OrePoly):
        """Convert an Ore element below the top variable to a coefficient."""
        if isinstance(self.ring, QTorus):
            return self.ring.from_ore(c)
        if c.level() != 0:
            raise ValueError("coefficient involves skew variables")
        return c.constant_coefficient()


def _deriv_is_zero(d) -> bool:
    if isinstance(d, DerivSpec):
        return d.is_zero
    return bool(getattr(d, "is_zero", False))


def field_context(kind: str, sigma: EndoSpec, delta: DerivSpec | None = None, **kw) -> SeriesContext:
    return SeriesContext(kind, sigma.tower, sigma, delta, **kw)


def context_for(tower: OreTower, kind: str | None = None, var: str | None = None,
                default_prec: int = 16) -> SeriesContext:
    """Series context attached to the top skew variable of ``tower``.

    Towers with one skew variable use their base field as coefficients.
    Larger towers are handled when the lower skew variables q-commute and the
    top twist scales them (the M_q(2) situation), using a quantum torus.
    """
    i = tower.n - 1
    top = tower.names[i]
    if kind is None:
        kind = INVERSE if not _deriv_is_zero(tower.delta_base[i]) or any(
            not d.is_zero() for d in tower.delta_skew[i].values()) else PLAIN
    if var is None:
        # PlainSigma series are in x itself, InverseDelta ones in y = x^-1
        var = top if kind == PLAIN else "y"
    if tower.n == 1:
        sigma = tower.sigma_base[0]
        delta = tower.delta_base[0]
        return SeriesContext(kind, tower.base, sigma, None if delta.is_zero else delta,
                             var=var, ore=tower, top=top, default_prec=default_prec)
    ring = torus_of(tower)
    if not tower.sigma_base[i].is_identity or not tower.delta_base[i].is_zero:
        raise ValueError("torus coefficients need the top twist to fix the scalars")
    scales = {}
    for j in range(i):
        img = tower.sigma_skew[i][j]
        e = tuple(1 if k == j else 0 for k in range(tower.n))
        if set(img.terms) != {e}:
            raise ValueError(f"sigma of {top} does not scale {tower.names[j]}")
        scales[tower.names[j]] = img.terms[e]
    sig = QTorusEndo(ring, scales)
    dvals = {tower.names[j]: ring.from_ore(tower.delta_skew[i][j]) for j in range(i)}
    delta = QTorusDeriv(sig, dvals)
    return SeriesContext(kind, ring, sig, None if delta.is_zero else delta,
                         var=var, ore=tower, top=top, default_prec=default_prec)


def torus_of(tower: OreTower, q: FieldElem | None = None) -> QTorus:
    """Quantum torus on the lower skew variables of ``tower``.

    The lower variables must pairwise satisfy ``x_i x_j = q^k x_j x_i``;
    ``q`` defaults to the parameter generator ``q`` of the base tower, or to
    the first nontrivial commutation ratio when the parameter is a number.
    """
    base = tower.base
    if q is None and "q" in base.levels:
        q = base.gen("q")
    names = tower.names[:-1]
    n = len(names)
    ratios = {}
    for i in range(n):
        for j in range(i + 1, n):
            xi, xj = tower.gen(names[i]), tower.gen(names[j])
            lhs, rhs = xi * xj, xj * xi
            (e, c), = rhs.terms.items()
            if set(lhs.terms) != {e}:
                raise ValueError(f"{names[i]} and {names[j]} do not q-commute")
            ratios[i, j] = lhs.terms[e] / c
    if q is None:
        # a specialized parameter: take the first nontrivial ratio
        q = next((x for x in ratios.values() if x != 1), base.one)
    E = [[0] * n for _ in range(n)]
    for (i, j), ratio in ratios.items():
        for k in sorted(range(-8, 9), key=abs):
            if ratio == q**k:
                E[i][j], E[j][i] = k, -k
                break
        else:
            raise ValueError(f"{names[i]}{names[j]} = c*{names[j]}{names[i]} with c not a power of q")
    return QTorus(base, names, E, q)


class SkewSeries:
    """``sum_{i} a_i y^i + O(y^N)`` with coefficients on the left."""

    __slots__ = ("ctx", "coeffs", "prec")

    def __init__(self, ctx: SeriesContext, coeffs: dict, prec=INF):
        self.ctx = ctx
        self.prec = prec
        self.coeffs = {k: v for k, v in coeffs.items() if k < prec and not v.is_zero()}

    # constructors
    @classmethod
    def zero(cls, ctx, prec=INF):
        return cls(ctx, {}, prec)

    @classmethod
    def one(cls, ctx, prec=INF):
        return cls(ctx, {0: ctx.one}, prec)

    @classmethod
    def monomial(cls, ctx, coeff, exponent: int, prec=INF):
        return cls(ctx, {exponent: ctx.coeff(coeff)}, prec)

    @classmethod
    def from_list(cls, ctx, coeffs: Sequence, start: int = 0, prec=None):
        prec = start + len(coeffs) if prec is None else prec
        return cls(ctx, {start + k: ctx.coeff(c) for k, c in enumerate(coeffs)}, prec)

    # inspection
    def val(self):
        return series_val(self)

    def leading(self):
        if not self.coeffs:
            raise ValueError("series is zero to its precision")
        return self.coeffs[min(self.coeffs)]

    def coefficient(self, k: int):
        if k >= self.prec:
            raise PrecisionError(f"coefficient {k} is beyond the precision {self.prec}")
        return self.coeffs.get(k, self.ctx.zero)

    def is_exact(self) -> bool:
        return self.prec == INF

    def truncate(self, n) -> "SkewSeries":
        return SkewSeries(self.ctx, self.coeffs, min(self.prec, n))

    def agrees_with(self, other: "SkewSeries") -> bool:
        """Equality of the coefficients both series know."""
        p = min(self.prec, other.prec)
        return self.truncate(p).coeffs == other.truncate(p).coeffs

    def _check(self, other):
        if not isinstance(other, SkewSeries):
            if isinstance(other, (int, Fraction, FieldElem, QTorusElem)) or hasattr(other, "is_zero"):
                return SkewSeries(self.ctx, {0: self.ctx.coeff(other)})
            return None
        if other.ctx is not self.ctx:
            raise ContextMismatchError("series belong to different contexts")
        return other

    def __add__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        out = dict(self.coeffs)
        for k, v in o.coeffs.items():
            w = out.get(k)
            out[k] = v if w is None else w + v
        return SkewSeries(self.ctx, out, min(self.prec, o.prec))

    __radd__ = __add__

    def __neg__(self):
        return SkewSeries(self.ctx, {k: -v for k, v in self.coeffs.items()}, self.prec)

    def __sub__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return series_mul(self, o)

    def __rmul__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return series_mul(o, self)

    def inverse(self, prec=None) -> "SkewSeries":
        return series_inv(self, prec)

    def __eq__(self, other):
        if not isinstance(other, SkewSeries):
            return NotImplemented
        return self.ctx is other.ctx and self.prec == other.prec and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.prec, frozenset(self.coeffs.items())))

    def __str__(self) -> str:
        return series_str(self)

    def __repr__(self) -> str:
        return f"SkewSeries({self})"

    def to_json(self) -> dict:
        return {
            "variable": self.ctx.var,
            "kind": self.ctx.kind,
            "terms": [[k, str(self.coeffs[k])] for k in sorted(self.coeffs)],
            "precision": None if self.prec == INF else self.prec,
            "exact": self.prec == INF,
        }


def _coeff_str(c) -> str:
    s = str(c)
    if " " in s or "/" in s:
        return f"({s})"
    return s


def series_str(f: SkewSeries) -> str:
    y = f.ctx.var
    parts = []
    for k in sorted(f.coeffs):
        c = f.coeffs[k]
        power = "" if k == 0 else (y if k == 1 else f"{y}^{k}")
        s = str(c)
        neg = s.startswith("-") and " " not in s
        if neg:
            s = s[1:]
        if not power:
            body = s
        elif s == "1":
            body = power
        else:
            body = f"{_coeff_str(s)}·{power}"
        parts.append(("-" if neg else "+", body))
    if f.prec != INF:
        parts.append(("+", f"O({y}^{f.prec})"))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


# core arithmetic -------------------------------------------------------------

def _acc(out: dict, k: int, v) -> None:
    w = out.get(k)
    out[k] = v if w is None else w + v


def _y_times(ctx: SeriesContext, coeffs: dict, limit) -> dict:
    """``y * sum c_m y^m`` keeping exponents below ``limit``."""
    out: dict = {}
    if ctx.kind == PLAIN:
        for m, c in coeffs.items():
            if m + 1 < limit:
                _acc(out, m + 1, ctx.sigma_inv.apply(c))
        return out
    for m, c in coeffs.items():
        if m + 1 >= limit:
            continue
        need = limit - (m + 1) if limit != INF else MAX_CHAIN + 1
        terms, finished = ctx.y_chain(c, need)
        if limit == INF and not finished:
            raise PrecisionError("exact product needs an infinite expansion; give a precision")
        for i, t in enumerate(terms):
            _acc(out, m + 1 + i, t)
    return out


def _yinv_times(ctx: SeriesContext, coeffs: dict) -> dict:
    """``y^{-1} * sum c_m y^m`` (exact)."""
    out: dict = {}
    if ctx.kind == PLAIN:
        for m, c in coeffs.items():
            _acc(out, m - 1, ctx.sigma.apply(c))
        return out
    for m, c in coeffs.items():
        u, v = ctx.y_inverse_rule(c)
        _acc(out, m - 1, u)
        if not v.is_zero():
            _acc(out, m, v)
    return out


def _clean(d: dict, limit=INF) -> dict:
    return {k: v for k, v in d.items() if k < limit and not v.is_zero()}


def commute_power(ctx: SeriesContext, n: int, a, prec=None) -> SkewSeries:
    """Normal form of ``y^n * a`` with the coefficients on the left.

    Negative ``n`` (and the PlainSigma flavour) give exact finite results.
    Positive ``n`` in the InverseDelta flavour is exact only when the
    d-chain of ``a`` terminates; otherwise ``prec`` (or the context default)
    bounds the expansion.
    """
    a = ctx.coeff(a)
    if ctx.kind == PLAIN:
        return SkewSeries(ctx, {n: ctx.sigma_power(-n, a)}, INF if prec is None else prec)
    cur = {0: a}
    if n < 0:
        for _ in range(-n):
            cur = _clean(_yinv_times(ctx, cur))
        return SkewSeries(ctx, cur, INF if prec is None else prec)
    limit = INF if prec is None else prec
    try:
        for _ in range(n):
            cur = _clean(_y_times(ctx, cur, limit), limit)
    except PrecisionError:
        if prec is not None:
            raise
        limit = ctx.default_prec
        cur = {0: a}
        for _ in range(n):
            cur = _clean(_y_times(ctx, cur, limit), limit)
    return SkewSeries(ctx, cur, limit)


def _rval(f: SkewSeries):
    return min(f.coeffs) if f.coeffs else f.prec


def series_mul(f: SkewSeries, g: SkewSeries, prec=None) -> SkewSeries:
    """Product ``f * g`` to the best precision the inputs support.

    With ``r`` the valuation (or precision, for series zero to precision)
    the product is known below ``min(r_f + N_g, N_f + r_g)``.
    """
    if f.ctx is not g.ctx:
        raise ContextMismatchError("series belong to different contexts")
    try:
        return _series_mul(f, g, prec)
    except PrecisionError:
        if prec is not None or f.ctx.auto_prec is None:
            raise
        return _series_mul(f, g, f.ctx.auto_prec)


def _series_mul(f: SkewSeries, g: SkewSeries, prec) -> SkewSeries:
    ctx = f.ctx
    rf, rg = _rval(f), _rval(g)
    P = min(rf + g.prec, f.prec + rg)
    if prec is not None:
        P = min(P, prec)
    if not f.coeffs or not g.coeffs:
        return SkewSeries(ctx, {}, P)
    lo = min(f.coeffs)
    # y^i g for every exponent i of f, each kept below P
    top = max(k for k in f.coeffs if k < P - rg) if any(k < P - rg for k in f.coeffs) else None
    if top is None:
        return SkewSeries(ctx, {}, P)
    start_limit = P - lo if lo < 0 else P
    base = _clean(g.coeffs, start_limit if start_limit != INF else INF)
    out: dict = {}

    def add(i, G):
        a = f.coeffs.get(i)
        if a is None:
            return
        for k, c in G.items():
            if k < P:
                _acc(out, k, a * c)

    G = base
    add(0, G) if 0 >= lo else None
    for i in range(1, top + 1):
        G = _clean(_y_times(ctx, G, P), P)
        add(i, G)
    G = base
    for i in range(-1, lo - 1, -1):
        G = _clean(_yinv_times(ctx, G))
        add(i, G)
    return SkewSeries(ctx, _clean(out, P), P)


def series_inv(f: SkewSeries, prec=None) -> SkewSeries:
    """Two-sided inverse of ``f`` by back-substitution.

    Solves ``g f = 1`` term by term using ``g f = sum_j b_j (y^j f)``, whose
    ``j``-th summand starts at exponent ``j + r`` with leading coefficient
    the leading coefficient of ``y^j a_r``.  Over a domain a one-sided
    inverse is two-sided.  Output precision: ``N_f - 2r`` (capped by
    ``prec``); exact input requires ``prec``.
    """
    ctx = f.ctx
    if not f.coeffs:
        raise ZeroDivisionError("cannot invert a series that is zero to its precision")
    r = min(f.coeffs)
    Pg = f.prec - 2 * r
    if prec is not None:
        Pg = min(Pg, prec)
    if Pg == INF:
        if len(f.coeffs) == 1:
            # monomial: exact inverse
            a = f.coeffs[r]
            lead = commute_power(ctx, -r, a).coeffs
            if len(lead) == 1:
                (k, c), = lead.items()
                return SkewSeries(ctx, {-r: _unit_inverse(c)}, INF)
        Pg = ctx.default_prec
    if Pg <= -r:
        return SkewSeries(ctx, {}, Pg)
    Lm = Pg + r  # exponents of g*f that are pinned down
    # F = y^{-r} f, truncated below Lm
    F = _clean(f.coeffs, f.prec)
    if r > 0:
        for _ in range(r):
            F = _clean(_yinv_times(ctx, F))
    else:
        for _ in range(-r):
            F = _clean(_y_times(ctx, F, Lm), Lm)
    F = _clean(F, Lm)
    acc: dict = {}
    g: dict = {}
    j = -r
    while j < Pg:
        m = j + r
        lead = F.get(m)
        if lead is None:
            raise ArithmeticError("leading coefficient vanished during inversion")
        target = ctx.one if m == 0 else ctx.zero
        c = target - acc.get(m, ctx.zero)
        if not c.is_zero():
            b = c * _unit_inverse(lead)
            g[j] = b
            for k, v in F.items():
                if k < Lm:
                    _acc(acc, k, b * v)
        j += 1
        if j < Pg:
            F = _clean(_y_times(ctx, F, Lm), Lm)
    return SkewSeries(ctx, g, Pg)


def _unit_inverse(c):
    try:
        return c.inverse()
    except NotInvertibleError as e:
        raise NotInvertibleError(f"leading coefficient {c} is not a unit") from e


def series_val(f: SkewSeries):
    """Leading exponent; ``AtLeast(N)`` when zero to precision; ``INF`` for exact zero."""
    if f.coeffs:
        return min(f.coeffs)
    if f.prec == INF:
        return INF
    return AtLeast(f.prec)


# embedding ----------------------------------------------------------------------

def embed_poly(p: OrePoly, ctx: SeriesContext) -> SkewSeries:
    """Exact series of a polynomial in the top skew variable.

    ``p = sum x^i c_i`` (right coefficients).  InverseDelta: ``x^i c = y^{-i} c``
    rewritten with the finite rule.  PlainSigma: ``x^i c = s^{-i}(c) x^i``.
    """
    if ctx.ore is None or p.tower is not ctx.ore:
        raise ContextMismatchError("polynomial does not belong to the context's tower")
    out: dict = {}
    for i, c in p.coefficients(ctx.top).items():
        a = ctx.ore_coeff(c)
        if ctx.kind == PLAIN:
            _acc(out, i, ctx.sigma_power(-i, a))
        else:
            for k, v in commute_power(ctx, -i, a).coeffs.items():
                _acc(out, k, v)
    return SkewSeries(ctx, _clean(out), INF)


def embed_fraction(num: OrePoly, den: OrePoly, ctx: SeriesContext, prec: int | None = None) -> SkewSeries:
    """Series of ``num * den^{-1}`` known below ``prec``."""
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    prec = ctx.default_prec if prec is None else prec
    n = embed_poly(num, ctx)
    d = embed_poly(den, ctx)
    if not n.coeffs:
        return SkewSeries(ctx, {}, INF)
    if d.coeffs and len(d.coeffs) == 1 and len(commute_power(ctx, -min(d.coeffs), d.leading()).coeffs) == 1:
        dinv = series_inv(d)
    else:
        dinv = series_inv(d, prec - min(n.coeffs))
    return series_mul(n, dinv, prec)


# completion ---------------------------------------------------------------------

def _val_at_least(v, bound) -> bool:
    if v == INF:
        return True
    if isinstance(v, AtLeast):
        return v.bound >= bound
    return v >= bound


def cauchy_limit(prefixes: Sequence[SkewSeries], check: bool = True) -> SkewSeries:
    """Diagonal limit of ``u_0, u_1, ...`` with ``val(u_l - u_k) >= k + 1`` for ``l > k``.

    The limit takes its negative-exponent coefficients from ``u_0`` and the
    coefficient of ``y^i`` (``i >= 0``) from ``u_i``.  It is known below
    ``len(prefixes)``.
    """
    us = list(prefixes)
    if not us:
        raise ValueError("empty sequence")
    ctx = us[0].ctx
    for u in us:
        if u.ctx is not ctx:
            raise ContextMismatchError("series belong to different contexts")
    m = len(us)
    if check:
        for k in range(m):
            for l in range(k + 1, m):
                v = series_val(us[l] - us[k])
                if not _val_at_least(v, k + 1):
                    raise NotCauchyError(f"val(u_{l} - u_{k}) = {v} < {k + 1}")
    limit_prec = m
    out = {}
    for i, c in us[0].coeffs.items():
        if i < 0:
            out[i] = c
    for i in range(min(m, limit_prec)):
        if i >= us[i].prec:
            limit_prec = i
            break
        c = us[i].coeffs.get(i)
        if c is not None:
            out[i] = c
    u = SkewSeries(ctx, out, limit_prec)
    if check:
        for k in range(m):
            v = series_val(us[k] - u)
            if not _val_at_least(v, min(k + 1, limit_prec)):
                raise NotCauchyError(f"diagonal limit check failed at index {k}")
    return u


def random_series(ctx: SeriesContext, rng, start: int, length: int, make_coeff, prec=None) -> SkewSeries:
    """Helper for tests and demos: random coefficients with a nonzero leading one."""
    coeffs = {}
    for k in range(length):
        c = make_coeff(rng)
        if k == 0:
            while c.is_zero():
                c = make_coeff(rng)
        coeffs[start + k] = c
    return SkewSeries(ctx, coeffs, start + length if prec is None else prec)


__all__: Iterable[str] = [
    "PLAIN", "INVERSE", "SeriesContext", "SkewSeries", "commute_power", "series_mul",
    "series_inv", "series_val", "embed_poly", "embed_fraction", "cauchy_limit",
    "context_for", "field_context", "torus_of", "PrecisionError", "NotCauchyError",
    "ContextMismatchError",
]
