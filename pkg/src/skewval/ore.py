"""Iterated skew polynomial rings and q-commuting quantum tori.

An Ore tower is ``A_0 = K`` (a :class:`~skewval.basefield.FieldTower`) and
``A_i = A_{i-1}[x_i; s_i, d_i]`` with the commutation rule

    a * x_i = x_i * s_i(a) + d_i(a)        for a in A_{i-1}.

Elements are stored in normal form with coefficients on the RIGHT::

    sum  x_n^{e_n} ... x_2^{e_2} x_1^{e_1} * a,   a in K

(later variables to the left, as in the recursive description of ``A_n`` as
the free right ``A_{n-1}``-module on powers of ``x_n``).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from .basefield import DerivSpec, EndoSpec, FieldElem, FieldTower, NotInvertibleError
from .valuation import INF


class OreConsistencyError(ValueError):
    pass


class OreTower:
    """Iterated Ore extension of a commutative base field.

    ``variables`` is a list of ``(name, spec)`` pairs.  ``spec`` may contain

    * ``"sigma"``: images of base variables and earlier skew variables,
    * ``"delta"``: values of the derivation on the same generators,

    each given as an element or an expression string.  Unspecified sigma
    images are identity, unspecified delta values zero.  ``relations`` are
    labelled expressions that must normalize to zero.
    """

    def __init__(self, base: FieldTower, variables: Sequence[tuple[str, Mapping]],
                 relations: Mapping[str, str] | None = None, name: str = "ore"):
        self.base = base
        self.name = name
        self.names = tuple(v for v, _ in variables)
        if len(set(self.names) | set(base.levels)) != len(self.names) + len(base.levels):
            raise ValueError("skew variable names must be distinct from each other and the base")
        self.n = len(self.names)
        self._zero_exp = (0,) * self.n
        self.sigma_base: list[EndoSpec] = []
        self.sigma_skew: list[dict[int, OrePoly]] = []
        self.delta_base: list[DerivSpec] = []
        self.delta_skew: list[dict[int, OrePoly]] = []
        self._sigma_cache: dict = {}
        self._delta_cache: dict = {}
        self._commute_cache: dict = {}
        for i, (vname, spec) in enumerate(variables):
            self._install(i, vname, dict(spec or {}))
        self.relations: dict[str, OrePoly] = {}
        for label, text in (relations or {}).items():
            self.relations[label] = self.parse(text)
        failing = [k for k, v in self.relations.items() if not v.is_zero()]
        if failing:
            raise OreConsistencyError(f"declared relation does not hold: {failing[0]}")

    # construction -------------------------------------------------------
    def _install(self, i: int, vname: str, spec: dict) -> None:
        base = self.base
        sig = dict(spec.get("sigma", {}))
        dlt = dict(spec.get("delta", {}))
        known = set(base.levels) | set(self.names[:i])
        for key in list(sig) + list(dlt):
            if key not in known:
                raise ValueError(f"{vname}: sigma/delta may only reference the base and earlier variables, got {key!r}")
        base_img = {}
        for v in base.levels:
            if v in sig:
                val = sig[v]
                base_img[v] = base.parse(val) if isinstance(val, str) else base(val)
        inv = spec.get("sigma_inverse")
        sb = EndoSpec(base, base_img, inv)
        db = DerivSpec(sb, {v: (base.parse(x) if isinstance(x, str) else base(x))
                            for v, x in dlt.items() if v in base.levels})
        self.sigma_base.append(sb)
        self.delta_base.append(db)
        sk, dk = {}, {}
        for j in range(i):
            name = self.names[j]
            img = sig.get(name)
            sk[j] = self._coerce_lower(img, i) if img is not None else self.gen(name)
            d = dlt.get(name)
            dk[j] = self._coerce_lower(d, i) if d is not None else self.zero
        self.sigma_skew.append(sk)
        self.delta_skew.append(dk)
        self._check_consistency(i)

    def _coerce_lower(self, value, i: int) -> "OrePoly":
        p = self.parse(value, upto=i) if isinstance(value, str) else self(value)
        if p.level() > i:
            raise ValueError(f"image for variable {self.names[i]} involves a later variable")
        return p

    def _check_consistency(self, i: int) -> None:
        """s_i and d_i must respect the defining relations of A_{i-1}."""
        gens = [("base", v) for v in self.base.levels]
        for j in range(i):
            xj = self.gen(self.names[j])
            for kind, g in gens:
                gp = self.gen(g) if kind == "skew" else self(self.base.gen(g))
                sg = self._sigma_elem(j, gp)
                dg = self._delta_elem(j, gp)
                lhs_s = self._sigma_elem(i, gp) * self._sigma_elem(i, xj)
                rhs_s = self._sigma_elem(i, xj) * self._sigma_elem(i, sg) + self._sigma_elem(i, dg)
                if lhs_s != rhs_s:
                    raise OreConsistencyError(
                        f"sigma of {self.names[i]} breaks the relation {g}*{self.names[j]} = "
                        f"{self.names[j]}*sigma({g}) + delta({g})")
                lhs_d = self._delta_elem(i, gp) * self._sigma_elem(i, xj) + gp * self._delta_elem(i, xj)
                rhs_d = (self._delta_elem(i, xj) * self._sigma_elem(i, sg)
                         + xj * self._delta_elem(i, sg) + self._delta_elem(i, dg))
                if lhs_d != rhs_d:
                    raise OreConsistencyError(
                        f"delta of {self.names[i]} breaks the relation {g}*{self.names[j]} = "
                        f"{self.names[j]}*sigma({g}) + delta({g})")
            gens.append(("skew", self.names[j]))

    # element constructors -----------------------------------------------
    def __call__(self, value) -> "OrePoly":
        if isinstance(value, OrePoly):
            if value.tower is not self:
                raise ValueError("OrePoly from a different tower")
            return value
        if isinstance(value, str):
            return self.parse(value)
        c = self.base(value)
        return OrePoly(self, {self._zero_exp: c} if c else {})

    @property
    def zero(self) -> "OrePoly":
        return OrePoly(self, {})

    @property
    def one(self) -> "OrePoly":
        return OrePoly(self, {self._zero_exp: self.base.one})

    def gen(self, name: str) -> "OrePoly":
        if name in self.base.levels:
            return self(self.base.gen(name))
        i = self.names.index(name)
        e = [0] * self.n
        e[i] = 1
        return OrePoly(self, {tuple(e): self.base.one})

    def namespace(self, upto: int | None = None) -> dict:
        names = {v: self(self.base.gen(v)) for v in self.base.levels}
        for v in self.names[: self.n if upto is None else upto]:
            names[v] = self.gen(v)
        return names

    def parse(self, text: str, upto: int | None = None) -> "OrePoly":
        from .expr import evaluate, parse_expr

        def inverse(p):
            if p.level() == 0 and not p.is_zero():
                return self(p.constant_coefficient().inverse())
            raise NotInvertibleError(f"{p} is not invertible in the skew polynomial ring")

        return self(evaluate(parse_expr(text), self.namespace(upto), inverse, self))

    def var_index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown skew variable {name!r}") from None

    # multiplication -------------------------------------------------------
    def _split(self, terms: dict, i: int) -> dict[int, dict]:
        out: dict[int, dict] = {}
        for e, a in terms.items():
            k = e[i]
            if k:
                e = e[:i] + (0,) + e[i + 1:]
            out.setdefault(k, {})[e] = a
        return out

    @staticmethod
    def _level(terms: dict) -> int:
        lvl = 0
        for e in terms:
            for k in range(len(e) - 1, lvl - 1, -1):
                if e[k]:
                    lvl = k + 1
                    break
        return lvl

    @staticmethod
    def _acc(out: dict, terms: dict, i: int | None = None, shift: int = 0) -> None:
        for e, a in terms.items():
            if shift:
                e = e[:i] + (e[i] + shift,) + e[i + 1:]
            b = out.get(e)
            if b is None:
                out[e] = a
            else:
                s = b + a
                if s:
                    out[e] = s
                else:
                    del out[e]

    def _mul(self, p: dict, r: dict, level: int | None = None) -> dict:
        if not p or not r:
            return {}
        if level is None:
            level = max(self._level(p), self._level(r))
        if level == 0:
            c = p[self._zero_exp] * r[self._zero_exp]
            return {self._zero_exp: c} if c else {}
        i = level - 1
        out: dict = {}
        rsplit = self._split(r, i)
        for e, pe in self._split(p, i).items():
            plevel = self._level(pe)
            for f, rf in rsplit.items():
                for k, ck in self._commute(pe, f, i, plevel).items():
                    self._acc(out, self._mul(ck, rf, i), i, e + k)
        return out

    def _commute(self, a: dict, f: int, i: int, alevel: int) -> dict[int, dict]:
        """Write ``a * x_i^f`` as ``sum_k x_i^k * c_k`` with ``c_k`` in A_{i-1}."""
        if f == 0:
            return {0: a}
        key = (i, frozenset(a.items()))
        chain = self._commute_cache.get(key)
        if chain is None:
            chain = [{0: a}]
            if len(self._commute_cache) > 5000:
                self._commute_cache.clear()
            self._commute_cache[key] = chain
        while len(chain) <= f:
            cur = chain[-1]
            nxt: dict[int, dict] = {}
            for k, c in cur.items():
                s = self._sigma_terms(i, c)
                if s:
                    self._acc(nxt.setdefault(k + 1, {}), s)
                d = self._delta_terms(i, c)
                if d:
                    self._acc(nxt.setdefault(k, {}), d)
            chain.append({k: v for k, v in nxt.items() if v})
        return chain[f]

    def _mono(self, e: tuple) -> dict:
        return {e: self.base.one}

    def _sigma_mono(self, i: int, e: tuple) -> dict:
        key = (i, e)
        hit = self._sigma_cache.get(key)
        if hit is not None:
            return hit
        res = {self._zero_exp: self.base.one}
        for j in range(i - 1, -1, -1):
            img = self.sigma_skew[i][j].terms
            for _ in range(e[j]):
                res = self._mul(res, img)
        self._sigma_cache[key] = res
        return res

    def _sigma_terms(self, i: int, terms: dict) -> dict:
        sb = self.sigma_base[i]
        out: dict = {}
        for e, a in terms.items():
            sa = sb.apply(a)
            m = self._sigma_mono(i, e)
            self._acc(out, {k: v * sa for k, v in m.items()})
        return out

    def _delta_mono(self, i: int, e: tuple) -> dict:
        """d_i of the monomial x_{i-1}^{e_{i-1}} ... x_0^{e_0}."""
        key = (i, e)
        hit = self._delta_cache.get(key)
        if hit is not None:
            return hit
        top = next((j for j in range(i - 1, -1, -1) if e[j]), None)
        if top is None:
            res = {}
        else:
            head = tuple(1 if k == top else 0 for k in range(self.n))
            rest = e[:top] + (e[top] - 1,) + e[top + 1:]
            # monomial = x_top * rest
            dx = self.delta_skew[i][top].terms
            res = self._mul(dx, self._sigma_mono(i, rest))
            self._acc(res, self._mul(self._mono(head), self._delta_mono(i, rest)))
        self._delta_cache[key] = res
        return res

    def _delta_terms(self, i: int, terms: dict) -> dict:
        sb = self.sigma_base[i]
        db = self.delta_base[i]
        out: dict = {}
        for e, a in terms.items():
            dm = self._delta_mono(i, e)
            if dm:
                sa = sb.apply(a)
                self._acc(out, {k: v * sa for k, v in dm.items()})
            da = db.apply(a)
            if da:
                self._acc(out, {e: da})
        return out

    def _sigma_elem(self, i: int, p: "OrePoly") -> "OrePoly":
        return OrePoly(self, self._sigma_terms(i, p.terms))

    def _delta_elem(self, i: int, p: "OrePoly") -> "OrePoly":
        return OrePoly(self, self._delta_terms(i, p.terms))

    def sigma(self, var: str, p: "OrePoly") -> "OrePoly":
        """Apply the endomorphism attached to ``var`` to an element below it."""
        i = self.var_index(var)
        if p.level() > i:
            raise ValueError("sigma only acts on elements of earlier variables")
        return self._sigma_elem(i, p)

    def delta(self, var: str, p: "OrePoly") -> "OrePoly":
        i = self.var_index(var)
        if p.level() > i:
            raise ValueError("delta only acts on elements of earlier variables")
        return self._delta_elem(i, p)

    def check_relations(self) -> dict[str, "OrePoly"]:
        return dict(self.relations)

    def __repr__(self) -> str:
        return f"OreTower({self.name}: {self.base!r}[{', '.join(self.names)}])"


class OrePoly:
    """Element of an :class:`OreTower`; ``terms`` maps exponents to right coefficients."""

    __slots__ = ("tower", "terms", "_hash")

    def __init__(self, tower: OreTower, terms: dict):
        self.tower = tower
        self.terms = terms
        self._hash = None

    def _coerce(self, other):
        if isinstance(other, OrePoly):
            if other.tower is not self.tower:
                raise ValueError("OrePoly tower mismatch")
            return other
        if isinstance(other, (int, Fraction, FieldElem)):
            return self.tower(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        OreTower._acc(out, o.terms)
        return OrePoly(self.tower, out)

    __radd__ = __add__

    def __neg__(self):
        return OrePoly(self.tower, {e: -a for e, a in self.terms.items()})

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
        return OrePoly(self.tower, self.tower._mul(self.terms, o.terms))

    def __rmul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self

    def __pow__(self, n: int):
        if n < 0:
            raise NotInvertibleError("negative powers need the series completion")
        result = self.tower.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, OrePoly) or other.tower is self.tower else None
        if o is None:
            return NotImplemented if not isinstance(other, OrePoly) else False
        return self.terms == o.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def level(self) -> int:
        """Number of the highest skew variable occurring (0 for constants)."""
        return OreTower._level(self.terms)

    def constant_coefficient(self) -> FieldElem:
        return self.terms.get(self.tower._zero_exp, self.tower.base.zero)

    def degree(self, var: str):
        i = self.tower.var_index(var)
        return max((e[i] for e in self.terms), default=-INF)

    def order(self, var: str):
        i = self.tower.var_index(var)
        return min((e[i] for e in self.terms), default=INF)

    def coefficients(self, var: str) -> dict[int, "OrePoly"]:
        """``p = sum_k var^k * c_k`` for the top variable ``var``."""
        i = self.tower.var_index(var)
        if self.level() > i + 1:
            raise ValueError(f"{var} is not the top variable of this element")
        return {k: OrePoly(self.tower, t) for k, t in self.tower._split(self.terms, i).items()}

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        names = self.tower.names
        parts = []
        for e in sorted(self.terms, key=lambda e: tuple(reversed(e)), reverse=True):
            a = self.terms[e]
            factors = []
            for j in range(len(e) - 1, -1, -1):
                if e[j] == 1:
                    factors.append(names[j])
                elif e[j]:
                    factors.append(f"{names[j]}^{e[j]}")
            mono = "*".join(factors)
            neg = False
            if a.is_constant():
                c = a.to_fraction()
                neg = c < 0
                c = abs(c)
                if not mono:
                    body = str(c)
                elif c == 1:
                    body = mono
                else:
                    body = f"{c}*{mono}"
            else:
                s = str(a)
                if not mono:
                    body = s
                else:
                    body = f"{mono}*({s})" if any(ch in s for ch in " /*-") else f"{mono}*{s}"
            parts.append(("-" if neg else "+", body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"OrePoly({self})"


def ore_mul(p: OrePoly, r: OrePoly) -> OrePoly:
    if p.tower is not r.tower:
        raise ValueError("OrePoly tower mismatch")
    return p * r


def ore_deg_val(p: OrePoly, var: str):
    """Valuation at infinity ``-deg`` in ``var``; ``INF`` for zero."""
    if p.is_zero():
        p.tower.var_index(var)
        return INF
    return -p.degree(var)


def ore_order(p: OrePoly, var: str):
    return p.order(var)


# presets ----------------------------------------------------------------------

ROOT_OF_UNITY_BOUND = 64


def check_not_root_of_unity(value: FieldElem, name: str = "q") -> None:
    if value.is_zero():
        raise ValueError(f"parameter {name} must be nonzero")
    power = value.tower.one
    for m in range(1, ROOT_OF_UNITY_BOUND + 1):
        power = power * value
        if power == 1:
            raise ValueError(f"parameter {name} is a root of unity ({name}^{m} = 1)")


def param_tower(name: str, value, extra: Sequence[str] = ()) -> tuple[FieldTower, FieldElem]:
    """Base tower holding a parameter: symbolic when ``value`` is None."""
    if value is None:
        tower = FieldTower([name, *extra])
        return tower, tower.gen(name)
    tower = FieldTower(list(extra))
    return tower, tower(Fraction(value))


def make_preset(name: str, **params) -> OreTower:
    if name == "weyl":
        base = FieldTower(["x1"])
        return OreTower(base, [("x2", {"delta": {"x1": 1}})],
                        {"x1*x2 - x2*x1 - 1": "x1*x2 - x2*x1 - 1"}, name="weyl")
    if name == "quantum_matrices":
        base, q = param_tower("q", params.get("q"))
        check_not_root_of_unity(q, "q")
        qs = f"({q})"
        spec = [
            ("a", {}),
            ("b", {"sigma": {"a": f"{qs}*a"}}),
            ("c", {"sigma": {"a": f"{qs}*a", "b": "b"}}),
            ("d", {"sigma": {"a": "a", "b": f"{qs}*b", "c": f"{qs}*c"},
                   "delta": {"a": f"({qs} - {qs}^-1)*c*b"}}),
        ]
        rel = {
            "ab - q*ba": f"a*b - {qs}*b*a",
            "ac - q*ca": f"a*c - {qs}*c*a",
            "bc - cb": "b*c - c*b",
            "bd - q*db": f"b*d - {qs}*d*b",
            "cd - q*dc": f"c*d - {qs}*d*c",
            "ad - da - (q - q^-1)*cb": f"a*d - d*a - ({qs} - {qs}^-1)*c*b",
        }
        return OreTower(base, spec, rel, name="quantum_matrices")
    if name == "quantum_torus":
        base, lam = param_tower("lam", params.get("lam"), ["x"])
        check_not_root_of_unity(lam, "lam")
        ls = f"({lam})"
        return OreTower(base, [("y", {"sigma": {"x": f"{ls}*x"}, "sigma_inverse": {"x": f"x/{ls}"}})],
                        {"xy - lam*yx": f"x*y - {ls}*y*x"}, name="quantum_torus")
    if name == "skew_poly":
        sigma: EndoSpec = params["sigma"]
        delta: DerivSpec | None = params.get("delta")
        var = params.get("var", "x")
        tower = sigma.tower
        spec = {"sigma": dict(sigma.images)}
        if sigma.invertible:
            spec["sigma_inverse"] = dict(sigma.inverse().images)
        if delta is not None:
            spec["delta"] = dict(delta.values)
        return OreTower(tower, [(var, spec)], name="skew_poly")
    raise ValueError(f"unknown preset {name!r}")


# quantum torus ------------------------------------------------------------------

class QTorus:
    """Laurent polynomials in ``names`` with ``x_i x_j = q^{E[i][j]} x_j x_i``.

    Monomials are stored in the canonical order ``x_1^{a_1} ... x_n^{a_n}``;
    scalars come from a commutative tower and are central.
    """

    def __init__(self, scalars: FieldTower, names: Sequence[str], exponents: Sequence[Sequence[int]],
                 q: FieldElem):
        self.scalars = scalars
        self.names = tuple(names)
        self.n = len(self.names)
        self.E = tuple(tuple(int(x) for x in row) for row in exponents)
        if len(self.E) != self.n or any(len(r) != self.n for r in self.E):
            raise ValueError("commutation matrix has the wrong shape")
        for i in range(self.n):
            for j in range(self.n):
                if self.E[i][j] != -self.E[j][i]:
                    raise ValueError("commutation matrix must be skew-symmetric")
        self.q = scalars(q)
        if self.q.is_zero():
            raise ValueError("q must be nonzero")
        self._qpow: dict[int, FieldElem] = {0: scalars.one}
        self._zero_exp = (0,) * self.n

    def qpow(self, k: int) -> FieldElem:
        hit = self._qpow.get(k)
        if hit is None:
            hit = self.q**k
            self._qpow[k] = hit
        return hit

    def twist(self, a: tuple, b: tuple) -> int:
        """Exponent of q produced when reordering ``x^a * x^b``."""
        E = self.E
        s = 0
        for i in range(self.n):
            if a[i]:
                for j in range(i):
                    if b[j]:
                        s += E[i][j] * a[i] * b[j]
        return s

    def __call__(self, value) -> "QTorusElem":
        if isinstance(value, QTorusElem):
            return value
        if isinstance(value, str):
            return self.parse(value)
        c = self.scalars(value)
        return QTorusElem(self, {self._zero_exp: c} if c else {})

    @property
    def one(self) -> "QTorusElem":
        return QTorusElem(self, {self._zero_exp: self.scalars.one})

    @property
    def zero(self) -> "QTorusElem":
        return QTorusElem(self, {})

    def monomial(self, exps: Sequence[int], coeff=1) -> "QTorusElem":
        return QTorusElem(self, {tuple(exps): self.scalars(coeff)})

    def gen(self, name: str) -> "QTorusElem":
        i = self.names.index(name)
        return self.monomial(tuple(1 if k == i else 0 for k in range(self.n)))

    def namespace(self) -> dict:
        names = {v: self(self.scalars.gen(v)) for v in self.scalars.levels}
        names.update({v: self.gen(v) for v in self.names})
        return names

    def parse(self, text: str) -> "QTorusElem":
        from .expr import evaluate, parse_expr

        return self(evaluate(parse_expr(text), self.namespace(), lambda u: u.inverse(), self))

    def from_ore(self, p: OrePoly) -> "QTorusElem":
        """Image of an Ore-tower element whose skew variables are torus generators."""
        if p.tower.base is not self.scalars:
            raise ValueError("Ore tower and torus have different scalar fields")
        out = self.zero
        for e, a in p.terms.items():
            term = self.one
            for j in range(len(e) - 1, -1, -1):
                if e[j]:
                    term = term * self.gen(p.tower.names[j]) ** e[j]
            out = out + term * a
        return out

    def __repr__(self) -> str:
        return f"QTorus({', '.join(self.names)}; q={self.q})"


class QTorusElem:
    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: QTorus, terms: dict):
        self.ring = ring
        self.terms = terms
        self._hash = None

    def _coerce(self, other):
        if isinstance(other, QTorusElem):
            if other.ring is not self.ring:
                raise ValueError("quantum torus mismatch")
            return other
        if isinstance(other, (int, Fraction, FieldElem)):
            return self.ring(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        OreTower._acc(out, o.terms)
        return QTorusElem(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return QTorusElem(self.ring, {e: -a for e, a in self.terms.items()})

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
        ring = self.ring
        out: dict = {}
        for a, ca in self.terms.items():
            for b, cb in o.terms.items():
                e = tuple(x + y for x, y in zip(a, b))
                c = ca * cb
                k = ring.twist(a, b)
                if k:
                    c = c * ring.qpow(k)
                OreTower._acc(out, {e: c})
        return QTorusElem(ring, out)

    def __rmul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self

    def __pow__(self, n: int):
        base = self if n >= 0 else self.inverse()
        result = self.ring.one
        for _ in range(abs(n)):
            result = result * base
        return result

    def is_unit(self) -> bool:
        return len(self.terms) == 1

    def inverse(self) -> "QTorusElem":
        if not self.is_unit():
            raise NotInvertibleError(f"{self} is not a monomial unit of the quantum torus")
        (e, c), = self.terms.items()
        ring = self.ring
        neg = tuple(-x for x in e)
        # x^e x^-e = q^{twist(e,-e)}
        return QTorusElem(ring, {neg: c.inverse() * ring.qpow(-ring.twist(e, neg))})

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __eq__(self, other):
        if isinstance(other, QTorusElem):
            return other.ring is self.ring and self.terms == other.terms
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            a = self.terms[e]
            factors = []
            for name, k in zip(self.ring.names, e):
                if k == 1:
                    factors.append(name)
                elif k:
                    factors.append(f"{name}^{k}")
            mono = "*".join(factors)
            neg = False
            if a.is_constant():
                c = a.to_fraction()
                neg = c < 0
                c = abs(c)
                body = mono if (c == 1 and mono) else (f"{c}*{mono}" if mono else str(c))
            else:
                s = str(a)
                s = f"({s})" if (" " in s or s.startswith("-") or "/" in s) else s
                body = f"{s}*{mono}" if mono else s
            parts.append(("-" if neg else "+", body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"QTorusElem({self})"


def qtorus_mul(u: QTorusElem, v: QTorusElem) -> QTorusElem:
    if u.ring is not v.ring:
        raise ValueError("quantum torus mismatch")
    return u * v


class QTorusEndo:
    """Diagonal automorphism ``x_i -> c_i x_i`` of a quantum torus (scalars fixed)."""

    def __init__(self, ring: QTorus, scales: Mapping[str, object]):
        self.ring = ring
        self.scales = tuple(ring.scalars(scales.get(v, 1)) for v in ring.names)
        if any(c.is_zero() for c in self.scales):
            raise ValueError("scaling factors must be nonzero")
        self.is_identity = all(c == 1 for c in self.scales)
        self._inverse = None
        self.invertible = True

    def inverse(self) -> "QTorusEndo":
        if self._inverse is None:
            inv = QTorusEndo(self.ring, {v: c.inverse() for v, c in zip(self.ring.names, self.scales)})
            inv._inverse = self
            self._inverse = inv
        return self._inverse

    def apply(self, u: QTorusElem) -> QTorusElem:
        if self.is_identity:
            return u
        out = {}
        for e, a in u.terms.items():
            c = a
            for s, k in zip(self.scales, e):
                if k:
                    c = c * s**k
            out[e] = c
        return QTorusElem(self.ring, out)

    __call__ = apply

    def power(self, n: int) -> "QTorusEndo":
        return QTorusEndo(self.ring, {v: c**n for v, c in zip(self.ring.names, self.scales)})


class QTorusDeriv:
    """sigma-derivation of a quantum torus given on the generators.

    Extended by ``d(uv) = d(u) s(v) + u d(v)``; scalars are constants.
    """

    def __init__(self, sigma: QTorusEndo, values: Mapping[str, object]):
        ring = sigma.ring
        self.ring = ring
        self.sigma = sigma
        self.values = {v: (ring.parse(x) if isinstance(x, str) else ring(x)) for v, x in values.items()}
        for v in self.values:
            if v not in ring.names:
                raise KeyError(f"unknown torus generator {v!r}")
        self.is_zero = all(x.is_zero() for x in self.values.values())
        self._cache: dict = {}
        n = ring.n
        for i in range(n):
            for j in range(i + 1, n):
                xi, xj = ring.gen(ring.names[i]), ring.gen(ring.names[j])
                rel_l = self._dgen(i) * sigma.apply(xj) + xi * self._dgen(j)
                k = ring.E[i][j]
                rel_r = (self._dgen(j) * sigma.apply(xi) + xj * self._dgen(i)) * ring.qpow(k)
                if rel_l != rel_r:
                    raise ValueError(f"derivation breaks the relation between {ring.names[i]} and {ring.names[j]}")

    def _dgen(self, i: int) -> QTorusElem:
        return self.values.get(self.ring.names[i], self.ring.zero)

    def _dmono(self, e: tuple) -> QTorusElem:
        hit = self._cache.get(e)
        if hit is not None:
            return hit
        ring = self.ring
        i = next((k for k, x in enumerate(e) if x), None)
        if i is None:
            return ring.zero
        g = ring.gen(ring.names[i])
        dg = self._dgen(i)
        sg = self.sigma.apply(g)
        if e[i] > 0:
            head_e = tuple(1 if k == i else 0 for k in range(ring.n))
            head, dhead = g, dg
        else:
            head_e = tuple(-1 if k == i else 0 for k in range(ring.n))
            head = g.inverse()
            dhead = -(head * dg * sg.inverse())
        rest = tuple(x - h for x, h in zip(e, head_e))
        rest_m = ring.monomial(rest)
        # x^e = head * rest * q^{-twist(head, rest)}
        scale = ring.qpow(-ring.twist(head_e, rest))
        res = (dhead * self.sigma.apply(rest_m) + head * self._dmono(rest)) * scale
        self._cache[e] = res
        return res

    def apply(self, u: QTorusElem) -> QTorusElem:
        if self.is_zero:
            return self.ring.zero
        out = self.ring.zero
        for e, a in u.terms.items():
            if any(e):
                out = out + self._dmono(e) * a
        return out

    __call__ = apply
