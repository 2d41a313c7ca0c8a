from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from _helpers import rand_field, seeded, unit_series
from skewval.basefield import DerivSpec, EndoSpec, FieldTower, NotInvertibleError
from skewval.ore import make_preset
from skewval.skewseries import (INVERSE, PLAIN, ContextMismatchError, NotCauchyError, PrecisionError,
                                SkewSeries, cauchy_limit, context_for, embed_fraction, embed_poly,
                                field_context, series_inv, series_mul, series_val)
from skewval.valuation import INF, AtLeast

T = FieldTower(["t"])
t = T.gen("t")
DT = field_context(INVERSE, EndoSpec.identity(T), DerivSpec(EndoSpec.identity(T), {"t": 1}))
TQ = FieldTower(["q", "t"])
QT = field_context(PLAIN, EndoSpec(TQ, {"t": "q*t"}, {"t": "t/q"}))


def S(ctx, coeffs, prec=INF):
    return SkewSeries(ctx, {k: ctx.coeff(v) for k, v in coeffs.items()}, prec)


def test_y_commutes_past_t():
    y = S(DT, {1: 1})
    assert y * S(DT, {0: t}) == S(DT, {1: t, 2: 1})


def test_plain_sigma_convention():
    q, tt = TQ.gen("q"), TQ.gen("t")
    x = S(QT, {1: 1})
    assert x * S(QT, {0: tt}) == S(QT, {1: tt / q})
    assert S(QT, {0: tt}) * x == S(QT, {1: tt})


def test_difference_of_squares():
    assert S(DT, {0: 1, 1: 1}) * S(DT, {0: 1, 1: -1}) == S(DT, {0: 1, 2: -1})


def test_geometric_inverse():
    g = series_inv(S(DT, {0: 1, 1: -1}), 10)
    assert g.prec == 10
    assert g.coeffs == {k: T.one for k in range(10)}


def test_monomial_inverse_is_exact():
    g = series_inv(S(DT, {1: 1}))
    assert g.is_exact()
    assert g == S(DT, {-1: 1})
    h = series_inv(S(QT, {2: TQ.gen("t")}))
    assert h * S(QT, {2: TQ.gen("t")}) == S(QT, {0: 1})


def test_t_plus_y_inverse():
    f = S(DT, {0: t, 1: 1})
    g = series_inv(f, 12)
    assert (g * f).agrees_with(S(DT, {0: 1}))
    assert (f * g).agrees_with(S(DT, {0: 1}))
    assert series_val(g) == 0


def test_valuations():
    assert series_val(S(DT, {-2: t, 3: 1})) == -2
    assert series_val(S(DT, {})) == INF
    assert series_val(S(DT, {}, 5)) == AtLeast(5)
    assert S(DT, {3: 1}, 2).coeffs == {}


def test_weyl_embedding():
    W = make_preset("weyl")
    ctx = context_for(W)
    assert ctx.kind == INVERSE
    assert series_val(embed_poly(W.gen("x2"), ctx)) == -1
    # x1 and y^{-1} satisfy the Weyl relation inside the series ring
    x1, x2 = embed_poly(W.gen("x1"), ctx), embed_poly(W.gen("x2"), ctx)
    assert x1 * x2 - x2 * x1 == S(ctx, {0: 1})


def test_plain_fraction_is_geometric():
    Tt = FieldTower(["t"])
    P = make_preset("skew_poly", sigma=EndoSpec(Tt, {"t": "2*t"}), var="x")
    ctx = context_for(P)
    assert ctx.kind == PLAIN
    f = embed_fraction(P.one, 1 - P.gen("x"), ctx, 8)
    assert f.coeffs == {k: Tt.one for k in range(8)}
    with pytest.raises(ZeroDivisionError):
        embed_fraction(P.one, P.zero, ctx)


def test_precision_rules():
    f = S(DT, {0: 1, 1: t}, 5)
    g = S(DT, {1: 1}, 4)
    # min(r_f + N_g, N_f + r_g)
    assert series_mul(f, g).prec == 4
    with pytest.raises(PrecisionError):
        f.coefficient(5)
    assert series_inv(S(DT, {1: 1, 2: t}, 6)).prec == 4


def test_context_mismatch():
    with pytest.raises(ContextMismatchError):
        S(DT, {0: 1}) + S(QT, {0: 1})


def test_zero_not_invertible():
    with pytest.raises(ZeroDivisionError):
        series_inv(S(DT, {}, 4))


def test_cauchy_limit():
    us = [S(DT, {i: 1 for i in range(k + 1)}, k + 1) for k in range(6)]
    u = cauchy_limit(us)
    assert u.prec == 6
    assert u.coeffs == {k: T.one for k in range(6)}
    with pytest.raises(NotCauchyError):
        cauchy_limit([S(DT, {}), S(DT, {0: 1})])


def test_nonconstant_rational_lead():
    f = S(DT, {0: (1 + t) / (2 - t), 1: t, 2: 1 / t})
    g = series_inv(f, 8)
    assert (g * f).agrees_with(S(DT, {0: 1}))
    assert (f * g).agrees_with(S(DT, {0: 1}))


def test_symbolic_quantum_torus_low_precision():
    B = make_preset("quantum_torus")
    ctx = context_for(B)
    rng = seeded(3)
    for _ in range(3):
        f = unit_series(ctx, rng, lambda r: rand_field(ctx.ring, r, 1, fractions=False), 0, 3)
        g = series_inv(f, 6)
        assert (g * f).agrees_with(S(ctx, {0: 1}))
        assert (f * g).agrees_with(S(ctx, {0: 1}))


def test_quantum_matrices_low_precision():
    M = make_preset("quantum_matrices", q=2)
    ctx = context_for(M)
    R = ctx.ring
    f = SkewSeries(ctx, {0: R.parse("a*b"), 1: R.parse("1 + c"), 2: R.one})
    g = series_inv(f, 6)
    assert (g * f).agrees_with(S(ctx, {0: 1}))
    assert (f * g).agrees_with(S(ctx, {0: 1}))
    with pytest.raises(NotInvertibleError):
        series_inv(SkewSeries(ctx, {0: R.parse("1 + a")}), 4)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_associativity_weyl(seed):
    rng = seeded(seed)

    def mk(r):
        return rand_field(T, r, 1, fractions=False)

    f, g, h = (unit_series(DT, rng, mk, rng.randint(-2, 2), 3) for _ in range(3))
    assert (f * g) * h == f * (g * h)
    assert series_val(f * g) == series_val(f) + series_val(g)


def test_fraction_coefficients():
    assert S(DT, {0: 1}) + Fraction(1, 2) == S(DT, {0: Fraction(3, 2)})
