"""Command-line interface: ``skewval [options] COMMAND [EXPR]``."""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from .basefield import NotInvertibleError, TowerMismatchError
from .config import PRESETS, Algebra, ConfigError, from_preset, load_config, parse_params
from .expr import BinOp, ExprSyntaxError, Name, Neg, Pow, UnknownNameError, evaluate, parse_expr, parse_list, to_string
from .freeness import INCONCLUSIVE, CandidateSet, certify
from .nilmn import (BoxTooLargeError, GroupRingElem, MNSeries, NotCauchyError as MNNotCauchy,
                    PresentationError, mn_cauchy_limit, mn_inverse, mn_o_val)
from .ore import OreConsistencyError, OrePoly, ore_deg_val, ore_order
from .skewseries import (NotCauchyError, PrecisionError, SkewSeries, cauchy_limit,
                         context_for, embed_poly, series_inv, series_val)
from .valuation import INF, val_to_json

DEFAULT_SEED = 0
# extra working precision for intermediate series products
SLACK = 8

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_ARITH = 4
EXIT_PRECISION = 5
EXIT_CAUCHY = 6
EXIT_INCONCLUSIVE = 10

COMMANDS = ("eval", "valuation", "invert", "expand", "cauchy-demo", "certify", "check-relations")


class CliError(Exception):
    def __init__(self, code: str, message: str, exit_code: int):
        super().__init__(message)
        self.code = code
        self.exit_code = exit_code


def _classify(exc: BaseException) -> CliError:
    if isinstance(exc, CliError):
        return exc
    table = [
        (ExprSyntaxError, "E_SYNTAX", EXIT_USAGE),
        (UnknownNameError, "E_UNKNOWN_NAME", EXIT_USAGE),
        (ConfigError, "E_CONFIG", EXIT_CONFIG),
        (OreConsistencyError, "E_INCONSISTENT", EXIT_CONFIG),
        (PresentationError, "E_PRESENTATION", EXIT_CONFIG),
        (NotCauchyError, "E_NOT_CAUCHY", EXIT_CAUCHY),
        (MNNotCauchy, "E_NOT_CAUCHY", EXIT_CAUCHY),
        (PrecisionError, "E_PRECISION", EXIT_PRECISION),
        (BoxTooLargeError, "E_BOX_TOO_LARGE", EXIT_PRECISION),
        (NotInvertibleError, "E_NOT_INVERTIBLE", EXIT_ARITH),
        (ZeroDivisionError, "E_ZERO_DIVISION", EXIT_ARITH),
        (TowerMismatchError, "E_TOWER_MISMATCH", EXIT_ARITH),
    ]
    for cls, code, exit_code in table:
        if isinstance(exc, cls):
            msg = str(exc) if not isinstance(exc, UnknownNameError) else f"unknown name {exc.args[0]!r}"
            return CliError(code, msg, exit_code)
    if isinstance(exc, (ValueError, KeyError, ArithmeticError)):
        return CliError("E_INVALID", str(exc), EXIT_CONFIG)
    raise exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="skewval", description="Exact arithmetic and valuations in skew fields.")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--config", metavar="PATH", help="JSON algebra description")
    src.add_argument("--preset", choices=PRESETS, help="built-in algebra")
    p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE",
                   help="rational value for a preset parameter (omit for symbolic)")
    p.add_argument("--prec", type=int, metavar="N", help="series precision (required for series commands)")
    p.add_argument("--box", type=int, metavar="N", help="exponent box bound (required for group series commands)")
    p.add_argument("--degree", type=int, metavar="D", default=None, help="degree bound for certify")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"random seed (default {DEFAULT_SEED})")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("expr", nargs="?", help="expression, or '{e1, e2, ...}' for certify")
    return p


def _algebra(args) -> Algebra:
    if args.config:
        if args.param:
            raise CliError("E_USAGE", "--param only applies to --preset", EXIT_USAGE)
        return load_config(args.config)
    if args.preset:
        return from_preset(args.preset, parse_params(args.param))
    raise CliError("E_USAGE", "give --preset or --config", EXIT_USAGE)


def _need(value, flag: str, what: str):
    if value is None:
        raise CliError("E_MISSING_FLAG", f"{what} needs {flag}", EXIT_USAGE)
    if value < 0:
        raise CliError("E_USAGE", f"{flag} must be nonnegative", EXIT_USAGE)
    return value


def _need_expr(args) -> str:
    if not args.expr:
        raise CliError("E_USAGE", f"{args.command} needs an expression", EXIT_USAGE)
    return args.expr


# evaluation in the three kinds of ambient ---------------------------------------------

def _has_inverse(node) -> bool:
    if isinstance(node, Pow):
        return node.exponent < 0 or _has_inverse(node.base)
    if isinstance(node, BinOp):
        return node.op == "/" or _has_inverse(node.left) or _has_inverse(node.right)
    if isinstance(node, Neg):
        return _has_inverse(node.operand)
    return False


def eval_ore(alg: Algebra, node) -> OrePoly:
    tower = alg.ore

    def inverse(p):
        if isinstance(p, OrePoly) and p.level() == 0 and not p.is_zero():
            return tower(p.constant_coefficient().inverse())
        raise NotInvertibleError(f"{p} is not invertible in the polynomial ring; use expand --prec")

    return tower(evaluate(node, tower.namespace(), inverse, tower))


def series_context(alg: Algebra, prec: int):
    ctx = context_for(alg.ore, alg.series_kind, default_prec=prec + SLACK)
    ctx.auto_prec = prec + SLACK
    return ctx


def eval_series(alg: Algebra, node, prec: int, ctx=None) -> SkewSeries:
    tower = alg.ore
    ctx = ctx or series_context(alg, prec)
    names = {}
    for v, p in tower.namespace().items():
        names[v] = embed_poly(p, ctx)

    def inverse(s):
        if not isinstance(s, SkewSeries):
            s = SkewSeries(ctx, {0: ctx.coeff(s)})
        return series_inv(s, None if s.prec != INF else prec + SLACK)

    def scalar(f: Fraction):
        return SkewSeries(ctx, {0: ctx.coeff(f)})

    out = evaluate(node, names, inverse, scalar)
    return out.truncate(prec)


def eval_group(alg: Algebra, node) -> GroupRingElem:
    pres = alg.pres
    names = {}
    for i, n in enumerate(pres.names):
        names[n] = GroupRingElem.monomial(pres, tuple(1 if k == i else 0 for k in range(pres.rank)))
    for v in pres.tower.levels:
        names[v] = GroupRingElem(pres, {pres.identity: pres.tower.gen(v)})

    def inverse(u):
        if len(u.terms) == 1:
            (g, a), = u.terms.items()
            gi = pres.inv(g)
            return GroupRingElem(pres, {gi: pres.act(gi, a.inverse())})
        raise NotInvertibleError(f"{u} has no inverse in the group ring; use invert --box")

    def scalar(f: Fraction):
        return GroupRingElem(pres, {pres.identity: f})

    return evaluate(node, names, inverse, scalar)


def _group_fraction_val(alg: Algebra, node):
    """Valuation of products and quotients of group ring elements (additive rule)."""
    if not _has_inverse(node):
        return mn_o_val(eval_group(alg, node))
    if isinstance(node, BinOp) and node.op in "*/":
        a = _group_fraction_val(alg, node.left)
        b = _group_fraction_val(alg, node.right)
        if a == INF or b == INF:
            if node.op == "/" and b == INF:
                raise ZeroDivisionError("division by zero")
            return INF
        return a + b if node.op == "*" else a - b
    if isinstance(node, Pow):
        a = _group_fraction_val(alg, node.base)
        if a == INF:
            if node.exponent < 0:
                raise ZeroDivisionError("division by zero")
            return INF
        return a * node.exponent
    if isinstance(node, Neg):
        return _group_fraction_val(alg, node.operand)
    raise CliError("E_UNSUPPORTED", "valuation of sums of group ring fractions needs invert/expand", EXIT_USAGE)


# commands ------------------------------------------------------------------------------

def cmd_eval(alg, args):
    node = parse_expr(_need_expr(args))
    if alg.kind == "group":
        u = eval_group(alg, node)
        return {"value": str(u), "terms": [[list(g), str(a)] for g, a in sorted(u.terms.items())]}
    if _has_inverse(node) and args.prec is not None:
        s = eval_series(alg, node, args.prec)
        return {"value": str(s), "series": s.to_json()}
    p = eval_ore(alg, node)
    return {"value": str(p)}


def cmd_valuation(alg, args):
    node = parse_expr(_need_expr(args))
    if alg.kind == "group":
        try:
            v = mn_o_val(eval_group(alg, node))
        except NotInvertibleError:
            v = _group_fraction_val(alg, node)
        return {"value": str(v) if v != INF else "inf", "valuation": val_to_json(v), "name": "o"}
    tower = alg.ore
    top = tower.names[-1]
    if not _has_inverse(node):
        p = eval_ore(alg, node)
        i = tower.n - 1
        delta_zero = tower.delta_base[i].is_zero and all(d.is_zero() for d in tower.delta_skew[i].values())
        out = {
            "value": str(p),
            "variable": top,
            "degree_valuation": val_to_json(ore_deg_val(p, top)),
            "order": val_to_json(ore_order(p, top)),
            "order_is_valuation": delta_zero,
        }
        if args.prec is not None:
            s = eval_series(alg, node, args.prec)
            out["series_valuation"] = val_to_json(series_val(s))
            out["series_kind"] = s.ctx.kind
        return out
    prec = _need(args.prec, "--prec", "valuation of a fraction")
    s = eval_series(alg, node, prec)
    v = series_val(s)
    return {"value": str(s), "variable": s.ctx.var, "series_kind": s.ctx.kind,
            "series_valuation": val_to_json(v), "precision": val_to_json(s.prec) if s.prec != INF else None}


def cmd_invert(alg, args):
    node = parse_expr(_need_expr(args))
    if alg.kind == "group":
        box = _need(args.box, "--box", "invert")
        u = eval_group(alg, node)
        inv = mn_inverse(u, box)
        return {"value": str(inv), "series": inv.to_json(), "valuation": val_to_json(mn_o_val(inv))}
    prec = _need(args.prec, "--prec", "invert")
    s = eval_series(alg, node, prec + SLACK)
    inv = series_inv(s, prec if s.prec == INF else None).truncate(prec)
    return {"value": str(inv), "series": inv.to_json(), "valuation": val_to_json(series_val(inv))}


def cmd_expand(alg, args):
    node = parse_expr(_need_expr(args))
    if alg.kind == "group":
        box = _need(args.box, "--box", "expand")
        if isinstance(node, Pow) and node.exponent == -1:
            inv = mn_inverse(eval_group(alg, node.base), box)
            return {"value": str(inv), "series": inv.to_json()}
        u = eval_group(alg, node)
        s = MNSeries(alg.pres, u.terms, box)
        return {"value": str(s), "series": s.to_json()}
    prec = _need(args.prec, "--prec", "expand")
    s = eval_series(alg, node, prec)
    return {"value": str(s), "series": s.to_json(), "valuation": val_to_json(series_val(s))}


def cmd_cauchy(alg, args):
    rng = random.Random(args.seed)
    if alg.kind == "group":
        n = _need(args.box, "--box", "cauchy-demo")
        pres = alg.pres
        r = pres.rank
        # u_k agrees with u_{k-1} on every term with a_1 <= k-1
        base_terms = {}
        for a1 in range(-1, n + 1):
            g = (a1,) + tuple(rng.randint(-1, 1) for _ in range(r - 1))
            base_terms[g] = Fraction(rng.randint(1, 9))
        seq = []
        for k in range(n + 1):
            terms = {g: c for g, c in base_terms.items() if g[0] <= k}
            noise = (k + 1,) + tuple(rng.randint(-1, 1) for _ in range(r - 1))
            terms[noise] = Fraction(rng.randint(1, 9)) + k
            seq.append(GroupRingElem(pres, terms))
        u = mn_cauchy_limit(seq)
        checks = []
        for k, uk in enumerate(seq):
            v = mn_o_val(MNSeries(pres, uk.terms) - u)
            checks.append({"k": k, "valuation": val_to_json(v), "bound": k + 1})
        return {"value": str(u), "checks": checks}
    n = _need(args.prec, "--prec", "cauchy-demo")
    ctx = series_context(alg, n)
    ring = ctx.ring
    scal = getattr(ring, "scalars", ring)

    def coeff():
        return ring(scal(Fraction(rng.randint(-9, 9), rng.randint(1, 5))))

    tail = {-1: coeff()}
    seq = []
    fixed = dict(tail)
    for k in range(n):
        fixed[k] = coeff()
        noise = {k + 1: coeff() + 1, k + 2: coeff()}
        terms = dict(fixed)
        terms.update(noise)
        seq.append(SkewSeries(ctx, terms, k + 3))
    u = cauchy_limit(seq)
    checks = [{"k": k, "valuation": val_to_json(series_val(uk - u)), "bound": k + 1} for k, uk in enumerate(seq)]
    return {"value": str(u), "series": u.to_json(), "checks": checks}


def cmd_certify(alg, args):
    text = _need_expr(args)
    d = _need(args.degree, "--degree", "certify")
    nodes = parse_list(text)
    labels = [to_string(n) for n in nodes]
    names = labels if all(isinstance(n, Name) for n in nodes) and len(set(labels)) == len(labels) else None
    if alg.kind == "group":
        cands = CandidateSet([eval_group(alg, n) for n in nodes], alg.scalars, labels, names)
        cert = certify(cands, d, None, seed=args.seed)
    elif not any(_has_inverse(n) for n in nodes):
        cands = CandidateSet([eval_ore(alg, n) for n in nodes], alg.scalars, labels, names)
        cert = certify(cands, d, None, seed=args.seed)
    else:
        prec = _need(args.prec, "--prec", "certify with fractions")
        cap = 2 * prec
        ctx = series_context(alg, cap)
        fns = [(lambda N, n=n: eval_series(alg, n, N, ctx)) for n in nodes]
        cands = CandidateSet(fns, alg.scalars, labels, names)
        cert = certify(cands, d, prec, seed=args.seed, max_prec=cap)
    out = cert.to_json()
    out["value"] = str(cert)
    return out


def cmd_check(alg, args):
    if alg.kind == "group":
        pres = alg.pres
        rels = []
        for i in range(pres.rank):
            for j in range(i + 1, pres.rank):
                lhs = pres.mul(tuple(1 if k == j else 0 for k in range(pres.rank)),
                               tuple(1 if k == i else 0 for k in range(pres.rank)))
                rels.append({"relation": f"{pres.names[j]}*{pres.names[i]}",
                             "normal_form": pres.elem_str(lhs)})
        return {"value": "presentation consistent on sampled triples", "relations": rels, "all_zero": True}
    rels = [{"relation": k, "residual": str(v), "zero": v.is_zero()} for k, v in alg.ore.relations.items()]
    ok = all(r["zero"] for r in rels)
    return {"value": "all relations hold" if ok else "relation failure", "relations": rels, "all_zero": ok}


HANDLERS = {
    "eval": cmd_eval,
    "valuation": cmd_valuation,
    "invert": cmd_invert,
    "expand": cmd_expand,
    "cauchy-demo": cmd_cauchy,
    "certify": cmd_certify,
    "check-relations": cmd_check,
}


def run(argv=None) -> tuple[int, dict]:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        alg = _algebra(args)
        result = HANDLERS[args.command](alg, args)
    except Exception as exc:  # noqa: BLE001 - every error is reported with a stable code
        err = _classify(exc)
        return err.exit_code, {"ok": False, "command": args.command,
                               "error": {"code": err.code, "message": str(err)}}
    code = EXIT_OK
    if args.command == "certify" and result.get("verdict") == INCONCLUSIVE:
        code = EXIT_INCONCLUSIVE
    if args.command == "check-relations" and not result.get("all_zero", True):
        code = EXIT_CONFIG
    return code, {"ok": code == EXIT_OK, "command": args.command, "result": result}


def main(argv=None) -> int:
    parser_args = build_parser().parse_args(argv)
    code, doc = run(argv)
    if parser_args.json:
        print(json.dumps(doc, sort_keys=True, indent=2))
    elif doc["ok"] or "result" in doc:
        res = doc["result"]
        print(res["value"])
        for key in sorted(res):
            val = res[key]
            if key != "value" and isinstance(val, (int, str, bool, dict)) and key not in ("series",):
                print(f"  {key}: {json.dumps(val, sort_keys=True) if isinstance(val, dict) else val}")
        for key in ("checks", "relations"):
            for item in res.get(key, []):
                print("  " + ", ".join(f"{k}={item[k]}" for k in item))
    else:
        e = doc["error"]
        print(f"error [{e['code']}]: {e['message']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
