"""Exact commutative coefficient fields: Q and towers Q(t1)(t2)...(tn).

Elements are reduced fractions of sparse polynomials with rational
coefficients (sympy's ``PolyRing`` supplies multiplication and gcd).  The
canonical form has the denominator's leading coefficient equal to 1, with
the monomial order lexicographic and the *last* tower variable most
significant, so equal elements have identical encodings.

Field endomorphisms (:class:`EndoSpec`) and sigma-derivations
(:class:`DerivSpec`) are specified on the tower variables and extended to
the whole field.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from sympy import QQ
from sympy.polys.orderings import lex
from sympy.polys.rings import PolyRing

from . import linalg


class TowerMismatchError(ValueError):
    pass


class NotInvertibleError(ValueError):
    pass


def _to_qq(value):
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    return QQ(value)


class FieldTower:
    """Q(levels[0])(levels[1])...; an empty tower is Q itself."""

    _instances: dict[tuple[str, ...], "FieldTower"] = {}

    def __new__(cls, levels: Sequence[str] = ()):
        levels = tuple(levels)
        if len(set(levels)) != len(levels):
            raise ValueError(f"tower variables must be distinct: {levels}")
        inst = cls._instances.get(levels)
        if inst is None:
            inst = super().__new__(cls)
            inst.levels = levels
            inst.ring = PolyRing(tuple(reversed(levels)), QQ, lex)
            inst._one = None
            cls._instances[levels] = inst
        return inst

    def __reduce__(self):
        return (FieldTower, (self.levels,))

    def __repr__(self) -> str:
        if not self.levels:
            return "FieldTower(Q)"
        return "FieldTower(Q(" + ")(".join(self.levels) + "))"

    def gen_index(self, name: str) -> int:
        """Index of ``name`` among the ring generators (reversed levels)."""
        try:
            return len(self.levels) - 1 - self.levels.index(name)
        except ValueError:
            raise KeyError(f"{name!r} is not a variable of {self!r}") from None

    def gen(self, name: str) -> "FieldElem":
        g = self.ring.gens[self.gen_index(name)]
        return FieldElem._raw(self, g, self.ring.one)

    def gens(self) -> dict[str, "FieldElem"]:
        return {v: self.gen(v) for v in self.levels}

    @property
    def one(self) -> "FieldElem":
        if self._one is None:
            self._one = FieldElem._raw(self, self.ring.one, self.ring.one)
        return self._one

    @property
    def zero(self) -> "FieldElem":
        return FieldElem._raw(self, self.ring.zero, self.ring.one)

    def __call__(self, value) -> "FieldElem":
        if isinstance(value, FieldElem):
            if value.tower is self:
                return value
            return self.embed(value)
        if isinstance(value, str):
            return self.parse(value)
        return FieldElem._raw(self, self.ring.ground_new(_to_qq(value)), self.ring.one)

    def embed(self, elem: "FieldElem") -> "FieldElem":
        """Image of an element of a tower whose variables are all ours."""
        if not set(elem.tower.levels) <= set(self.levels):
            raise TowerMismatchError(f"cannot embed {elem.tower!r} into {self!r}")
        return FieldElem._make(self, elem.num.set_ring(self.ring), elem.den.set_ring(self.ring))

    def parse(self, text: str, extra: Mapping[str, object] | None = None) -> "FieldElem":
        from .expr import evaluate, parse_expr

        names = dict(self.gens())
        if extra:
            names.update(extra)
        value = evaluate(parse_expr(text), names, lambda x: 1 / x, self)
        return self(value)

    def subtower(self, names: Sequence[str]) -> "FieldTower":
        return FieldTower([v for v in self.levels if v in set(names)])


def _normalize(num, den):
    if not den:
        raise ZeroDivisionError("division by zero in field")
    if not num:
        return num.ring.zero, num.ring.one
    if not den.is_ground:
        num, den = num.cancel(den)
    lc = den.LC
    if lc != 1:
        inv = 1 / lc
        num = num.mul_ground(inv)
        den = den.mul_ground(inv)
    return num, den


def _mono_cancel(num, den):
    """Reduce ``num/den`` when ``den`` is a monic monomial."""
    ring = den.ring
    if not num:
        return ring.zero, ring.one
    dm = den.LM
    common = list(dm)
    for mon in num.itermonoms():
        common = [min(a, b) for a, b in zip(common, mon)]
        if not any(common):
            return num, den
    common = tuple(common)
    num = ring.from_dict({tuple(a - b for a, b in zip(mon, common)): c for mon, c in num.iterterms()})
    den = ring({tuple(a - b for a, b in zip(dm, common)): 1})
    return num, den


class FieldElem:
    """Reduced fraction ``num/den`` in a :class:`FieldTower`; immutable."""

    __slots__ = ("tower", "num", "den", "_hash")

    @classmethod
    def _raw(cls, tower, num, den):
        self = object.__new__(cls)
        self.tower = tower
        self.num = num
        self.den = den
        self._hash = None
        return self

    @classmethod
    def _make(cls, tower, num, den):
        num, den = _normalize(num, den)
        return cls._raw(tower, num, den)

    def _coerce(self, other):
        if isinstance(other, FieldElem):
            if other.tower is not self.tower:
                raise TowerMismatchError(f"{self.tower!r} vs {other.tower!r}")
            return other
        if isinstance(other, (int, Fraction)) or type(other).__name__ == "mpq":
            return self.tower(other)
        return None

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            if self.den.is_ground:
                return FieldElem._raw(self.tower, self.num + o.num, self.den)
            if len(self.den) == 1:
                return FieldElem._raw(self.tower, *_mono_cancel(self.num + o.num, self.den))
            return FieldElem._make(self.tower, self.num + o.num, self.den)
        if len(self.den) == 1 and len(o.den) == 1:
            # Laurent polynomials: common denominator is the monomial lcm
            m1, m2 = self.den.LM, o.den.LM
            lcm = tuple(max(a, b) for a, b in zip(m1, m2))
            ring = self.num.ring
            f1 = ring({tuple(a - b for a, b in zip(lcm, m1)): 1})
            f2 = ring({tuple(a - b for a, b in zip(lcm, m2)): 1})
            return FieldElem._raw(self.tower, *_mono_cancel(self.num * f1 + o.num * f2, ring({lcm: 1})))
        return FieldElem._make(self.tower, self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return FieldElem._raw(self.tower, -self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.den.is_ground and o.den.is_ground:
            return FieldElem._raw(self.tower, self.num * o.num, self.den)
        if not self.num or not o.num:
            return self.tower.zero
        if len(self.den) == 1 and len(o.den) == 1:
            return FieldElem._raw(self.tower, *_mono_cancel(self.num * o.num, self.den * o.den))
        return FieldElem._make(self.tower, self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "FieldElem":
        if not self.num:
            raise ZeroDivisionError("inverse of zero")
        return FieldElem._make(self.tower, self.den, self.num)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        if self.den.is_ground:
            return FieldElem._raw(self.tower, self.num**n, self.den)
        return FieldElem._raw(self.tower, self.num**n, self.den**n)

    # comparison ---------------------------------------------------------
    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except TowerMismatchError:
            return False
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.tower.levels, self.encoding()))
        return self._hash

    def __bool__(self):
        return bool(self.num)

    def is_zero(self) -> bool:
        return not self.num

    def is_constant(self) -> bool:
        return self.num.is_ground and self.den.is_ground

    def is_polynomial(self) -> bool:
        return self.den.is_ground

    def to_fraction(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not a rational constant")
        c = self.num.LC if self.num else 0
        return Fraction(int(c.numerator), int(c.denominator)) if c else Fraction(0)

    def encoding(self) -> tuple:
        """Canonical encoding; equal elements have equal encodings."""

        def enc(p):
            return tuple(sorted((m, (int(c.numerator), int(c.denominator))) for m, c in p.items()))

        return enc(self.num), enc(self.den)

    def degree(self, var: str) -> tuple[int, int]:
        """(numerator degree, denominator degree) in ``var``."""
        i = self.tower.gen_index(var)
        return self.num.degree(i), self.den.degree(i)

    def specialize(self, values: Mapping[str, Fraction], tower: FieldTower | None = None):
        """Substitute rationals for some variables.

        Raises ``ZeroDivisionError`` if the denominator vanishes.
        """
        ring = self.tower.ring
        pairs = [(ring.gens[self.tower.gen_index(v)], _to_qq(x)) for v, x in values.items()]
        num = self.num.subs(pairs) if pairs else self.num
        den = self.den.subs(pairs) if pairs else self.den
        if not den:
            raise ZeroDivisionError(f"denominator of {self} vanishes at {dict(values)}")
        if tower is None:
            tower = FieldTower([v for v in self.tower.levels if v not in values])
        return FieldElem._make(tower, num.set_ring(tower.ring), den.set_ring(tower.ring))

    # printing -----------------------------------------------------------
    def _poly_str(self, p) -> str:
        names = self.tower.ring.symbols
        if not p:
            return "0"
        parts = []
        for mon, c in p.terms():
            factors = []
            for name, e in zip(names, mon):
                if e == 1:
                    factors.append(str(name))
                elif e:
                    factors.append(f"{name}^{e}")
            neg = c < 0
            c = -c if neg else c
            cs = str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
            if factors:
                body = "*".join(factors) if c == 1 else cs + "*" + "*".join(factors)
            else:
                body = cs
            parts.append(("-" if neg else "+", body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self) -> str:
        n = self._poly_str(self.num)
        if self.den == self.tower.ring.one:
            return n
        d = self._poly_str(self.den)
        if len(self.num) > 1:
            n = f"({n})"
        if len(self.den) > 1 or "*" in d or "/" in d:
            d = f"({d})"
        return f"{n}/{d}"

    def __repr__(self) -> str:
        return f"FieldElem({self})"


def field_arith(a: FieldElem, b: FieldElem, op: str) -> FieldElem:
    if a.tower is not b.tower:
        raise TowerMismatchError(f"{a.tower!r} vs {b.tower!r}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def _partial(a: FieldElem, var: str) -> FieldElem:
    i = a.tower.gen_index(var)
    n, d = a.num, a.den
    return FieldElem._make(a.tower, n.diff(n.ring.gens[i]) * d - n * d.diff(d.ring.gens[i]), d * d)


def _det(matrix: list[list[FieldElem]], tower: FieldTower) -> FieldElem:
    n = len(matrix)
    red, piv = linalg.rref(matrix, n)
    return tower.one if len(piv) == n else tower.zero


class EndoSpec:
    """Field endomorphism fixing Q, given by the images of the tower variables.

    ``inverse_images`` is an optional invertibility witness; when supplied the
    map is an automorphism and :meth:`inverse` is available.
    """

    _CACHE_LIMIT = 20000

    def __init__(self, tower: FieldTower, images: Mapping[str, object] | None = None,
                 inverse_images: Mapping[str, object] | None = None, _check: bool = True):
        self.tower = tower
        images = dict(images or {})
        for v in images:
            tower.gen_index(v)
        self.images = {v: tower(images.get(v, tower.gen(v))) for v in tower.levels}
        self.is_identity = all(self.images[v] == tower.gen(v) for v in tower.levels)
        self._poly_pairs = None
        if all(img.is_polynomial() for img in self.images.values()):
            ring = tower.ring
            self._poly_pairs = [(ring.gens[tower.gen_index(v)], self.images[v].num)
                                for v in tower.levels if self.images[v] != tower.gen(v)]
        self._monos = self._monomial_images()
        # pure rational scaling preserves reduced fractions
        self._scaling = self._monos is not None and all(
            m == tuple(1 if k == i else 0 for k in range(len(m))) for i, (m, _) in enumerate(self._monos))
        self._cache: dict = {}
        self._inverse = None
        if _check and not self.is_identity:
            jac = [[_partial(self.images[v], w) for w in tower.levels] for v in tower.levels]
            if not _det(jac, tower):
                raise ValueError("endomorphism images are not algebraically independent")
        if inverse_images is None and _check:
            inverse_images = self._scaling_inverse()
        if self.is_identity and inverse_images is None:
            self._inverse = self
        elif inverse_images is not None:
            self._inverse = EndoSpec(tower, inverse_images, None, _check=False)
            self._inverse._inverse = self
            for v in tower.levels:
                g = tower.gen(v)
                if self._inverse.apply(self.images[v]) != g or self.apply(self._inverse.images[v]) != g:
                    raise ValueError(f"inverse witness fails on {v}")

    def _monomial_images(self):
        # every image is (rational) * Laurent monomial: act term by term
        tower = self.tower
        out = []
        for sym in tower.ring.symbols:
            img = self.images[str(sym)]
            if len(img.num) != 1 or len(img.den) != 1:
                return None
            (mon, c), = img.num.terms()
            (dmon, dc), = img.den.terms()
            out.append((tuple(x - y for x, y in zip(mon, dmon)), c / dc))
        return out

    def _map_terms(self, p) -> dict:
        out = {}
        for mon, c in p.iterterms():
            exps = [0] * len(mon)
            for (m, s), e in zip(self._monos, mon):
                if e:
                    c = c * s**e
                    for k, x in enumerate(m):
                        exps[k] += e * x
            out[tuple(exps)] = c
        return out

    def _apply_monomial(self, a: "FieldElem") -> "FieldElem":
        ring = self.tower.ring
        num, den = self._map_terms(a.num), self._map_terms(a.den)
        low = [min(m[k] for m in (*num, *den)) for k in range(ring.ngens)]
        if any(low):
            num = {tuple(x - y for x, y in zip(m, low)): c for m, c in num.items()}
            den = {tuple(x - y for x, y in zip(m, low)): c for m, c in den.items()}
        num, den = ring.from_dict(num), ring.from_dict(den)
        lc = den.LC
        if lc != 1:
            num, den = num.mul_ground(1 / lc), den.mul_ground(1 / lc)
        if self._scaling:
            return FieldElem._raw(self.tower, num, den)
        if len(den) == 1:
            return FieldElem._raw(self.tower, *_mono_cancel(num, den))
        return FieldElem._make(self.tower, num, den)

    def _scaling_inverse(self):
        # v -> c*v with rational c is inverted by v -> v/c
        inv = {}
        for v in self.tower.levels:
            g = self.tower.gen(v)
            ratio = self.images[v] / g
            if not ratio.is_constant():
                return None
            inv[v] = g / ratio
        return inv

    @classmethod
    def identity(cls, tower: FieldTower) -> "EndoSpec":
        return cls(tower, {}, {})

    @property
    def invertible(self) -> bool:
        return self._inverse is not None

    def inverse(self) -> "EndoSpec":
        if self._inverse is None:
            raise NotInvertibleError("endomorphism has no inverse witness")
        return self._inverse

    def apply(self, a: FieldElem) -> FieldElem:
        if a.tower is not self.tower:
            raise TowerMismatchError(f"{a.tower!r} vs {self.tower!r}")
        if self.is_identity or a.is_constant():
            return a
        hit = self._cache.get(a)
        if hit is not None:
            return hit
        if self._monos is not None:
            res = self._apply_monomial(a)
        elif self._poly_pairs is not None:
            num = a.num.compose(self._poly_pairs) if self._poly_pairs else a.num
            if a.den.is_ground:
                res = FieldElem._make(self.tower, num, a.den)
            else:
                den = a.den.compose(self._poly_pairs)
                if not den:
                    raise ZeroDivisionError(f"denominator of {a} maps to zero")
                res = FieldElem._make(self.tower, num, den)
        else:
            num = self._eval_poly(a.num)
            den = self._eval_poly(a.den)
            if not den:
                raise ZeroDivisionError(f"denominator of {a} maps to zero")
            res = num / den
        if len(self._cache) > self._CACHE_LIMIT:
            self._cache.clear()
        self._cache[a] = res
        return res

    __call__ = apply

    def _eval_poly(self, p) -> FieldElem:
        tower = self.tower
        imgs = [self.images[str(s)] for s in tower.ring.symbols]
        total = tower.zero
        for mon, c in p.terms():
            term = tower(c)
            for img, e in zip(imgs, mon):
                if e:
                    term = term * img**e
            total = total + term
        return total

    def compose(self, other: "EndoSpec") -> "EndoSpec":
        """``self o other`` (apply ``other`` first)."""
        images = {v: self.apply(other.images[v]) for v in self.tower.levels}
        inv = None
        if self.invertible and other.invertible:
            inv = {v: other.inverse().apply(self.inverse().images[v]) for v in self.tower.levels}
        return EndoSpec(self.tower, images, inv, _check=False)

    def power(self, n: int) -> "EndoSpec":
        base = self if n >= 0 else self.inverse()
        result = EndoSpec.identity(self.tower)
        for _ in range(abs(n)):
            result = base.compose(result)
        return result

    def __eq__(self, other):
        return isinstance(other, EndoSpec) and self.tower is other.tower and self.images == other.images

    def __hash__(self):
        return hash(tuple(self.images[v] for v in self.tower.levels))

    def __repr__(self) -> str:
        return "EndoSpec(" + ", ".join(f"{v}->{self.images[v]}" for v in self.tower.levels) + ")"


def endo_apply(s: EndoSpec, a: FieldElem) -> FieldElem:
    return s.apply(a)


class DerivSpec:
    """Right sigma-derivation: ``d(ab) = d(a) s(b) + a d(b)``, zero on Q."""

    def __init__(self, sigma: EndoSpec, values: Mapping[str, object] | None = None):
        tower = sigma.tower
        self.tower = tower
        self.sigma = sigma
        values = dict(values or {})
        for v in values:
            tower.gen_index(v)
        self.values = {v: tower(values.get(v, 0)) for v in tower.levels}
        self.is_zero = all(not x for x in self.values.values())
        gens = tower.gens()
        levels = tower.levels
        for i, u in enumerate(levels):
            for w in levels[i + 1:]:
                lhs = self.values[u] * (sigma.images[w] - gens[w])
                rhs = self.values[w] * (sigma.images[u] - gens[u])
                if lhs != rhs:
                    raise ValueError(f"sigma-derivation inconsistent on the pair ({u}, {w})")
        self._mono_cache: dict = {}
        self._cache: dict = {}

    @classmethod
    def zero(cls, sigma: EndoSpec) -> "DerivSpec":
        return cls(sigma, {})

    def apply(self, a: FieldElem) -> FieldElem:
        if a.tower is not self.tower:
            raise TowerMismatchError(f"{a.tower!r} vs {self.tower!r}")
        if self.is_zero or a.is_constant():
            return self.tower.zero
        hit = self._cache.get(a)
        if hit is not None:
            return hit
        tower = self.tower
        num = FieldElem._raw(tower, a.num, tower.ring.one)
        if a.den.is_ground:
            res = self._dpoly(a.num) / tower(a.den.LC)
        else:
            den = FieldElem._raw(tower, a.den, tower.ring.one)
            sden = self.sigma.apply(den)
            # d(N/D) = d(N)/s(D) - N d(D) / (D s(D))
            res = self._dpoly(a.num) / sden - num * self._dpoly(a.den) / (den * sden)
        if len(self._cache) > 20000:
            self._cache.clear()
        self._cache[a] = res
        return res

    __call__ = apply

    def _dpoly(self, p) -> FieldElem:
        tower = self.tower
        if self.sigma.is_identity:
            total = tower.zero
            for v in tower.levels:
                if self.values[v]:
                    g = p.ring.gens[tower.gen_index(v)]
                    dp = p.diff(g)
                    if dp:
                        total = total + self.values[v] * FieldElem._raw(tower, dp, tower.ring.one)
            return total
        total = tower.zero
        for mon, c in p.terms():
            if any(mon):
                total = total + tower(c) * self._dmono(mon)
        return total

    def _dmono(self, mon: tuple) -> FieldElem:
        hit = self._mono_cache.get(mon)
        if hit is not None:
            return hit
        tower = self.tower
        ring = tower.ring
        i = next(k for k, e in enumerate(mon) if e)
        e = mon[i]
        name = str(ring.symbols[i])
        g = tower.gen(name)
        sg = self.sigma.images[name]
        dg = self.values[name]
        # d(g^e) = d(g^(e-1)) s(g) + g^(e-1) d(g)
        dpow = tower.zero
        for k in range(1, e + 1):
            dpow = dpow * sg + g ** (k - 1) * dg
        rest = tuple(0 if k == i else x for k, x in enumerate(mon))
        if any(rest):
            rest_elem = FieldElem._raw(tower, ring({rest: QQ(1)}), ring.one)
            res = dpow * self.sigma.apply(rest_elem) + g**e * self._dmono(rest)
        else:
            res = dpow
        self._mono_cache[mon] = res
        return res

    def __repr__(self) -> str:
        return f"DerivSpec(sigma={self.sigma!r}, " + ", ".join(
            f"d({v})={self.values[v]}" for v in self.tower.levels) + ")"


def sderiv_apply(d: DerivSpec, a: FieldElem) -> FieldElem:
    return d.apply(a)


def fixed_point_test(s: EndoSpec, d: DerivSpec | None, a: FieldElem) -> bool:
    if s.apply(a) != a:
        return False
    return d is None or d.apply(a).is_zero()


def fixed_rational_functions(s: EndoSpec, var: str, max_degree: int):
    """Search for nonconstant ``f = P/Q`` in ``var`` with ``s(f) = f``.

    ``s`` must act as ``var -> a*var + b`` with ``a, b`` free of ``var`` and fix
    every other tower variable.  Reduce ``f`` with ``Q`` monic of degree ``j``;
    then ``s(P) = a^j P`` and ``s(Q) = a^j Q``, so a nonconstant fixed ``f``
    with degrees ``<= max_degree`` exists iff some eigenspace
    ``ker(M - a^j)`` of ``s`` on polynomials of degree ``<= max_degree`` has
    dimension at least 2.  Returns one witness ``(P, Q)`` or ``None``.
    """
    tower = s.tower
    t = tower.gen(var)
    for v in tower.levels:
        if v != var and s.images[v] != tower.gen(v):
            raise NotImplementedError("endomorphism must fix the parameters")
    img = s.images[var]
    if not img.is_polynomial() or img.degree(var)[0] != 1:
        raise NotImplementedError("only affine images var -> a*var + b are supported")
    a = _partial(img, var)
    d = max_degree
    # column j holds the coefficients of s(var^j) = img^j in the basis 1, var, ..., var^d
    cols = []
    for j in range(d + 1):
        cols.append(_coeffs_in(img**j, var, d))
    matrix = [[cols[j][i] for j in range(d + 1)] for i in range(d + 1)]
    for j in range(d + 1):
        c = a**j
        shifted = [[matrix[i][k] - (c if i == k else 0) for k in range(d + 1)] for i in range(d + 1)]
        kernel = linalg.nullspace(shifted, d + 1, tower.one, tower.zero)
        if len(kernel) >= 2:
            polys = [sum((vec[i] * t**i for i in range(d + 1)), tower.zero) for vec in kernel[:2]]
            return polys[0], polys[1]
    return None


def _coeffs_in(p: FieldElem, var: str, d: int) -> list[FieldElem]:
    """Coefficients of a polynomial in ``var`` (other variables as scalars)."""
    tower = p.tower
    i = tower.gen_index(var)
    out = [tower.zero] * (d + 1)
    denom = FieldElem._raw(tower, tower.ring.one, p.den)
    for mon, c in p.num.terms():
        e = mon[i]
        rest = tuple(0 if k == i else x for k, x in enumerate(mon))
        out[e] = out[e] + FieldElem._raw(tower, tower.ring({rest: c}), tower.ring.one)
    return [x * denom for x in out]
