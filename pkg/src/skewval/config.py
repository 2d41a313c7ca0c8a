"""Algebra configuration: presets and JSON documents.

A config document is a JSON object of one of these shapes (all numbers are
exact rationals written as strings such as ``"3/2"`` or as integers)::

    {"preset": "quantum_matrices", "params": {"q": "2"}}

    {"kind": "ore",
     "base": ["t"],
     "variables": [{"name": "x", "sigma": {"t": "2*t"}, "sigma_inverse": {"t": "t/2"},
                    "delta": {}}],
     "relations": {"xt": "t*x - x*2*t"},
     "series": "PlainSigma",
     "scalars": []}

    {"kind": "polycyclic", "rank": 3, "relations": {"2,1": [-1]},
     "base": ["q", "t"], "action": {"1": {"t": "q*t"}},
     "action_inverse": {"1": {"t": "t/q"}}, "scalars": ["q"]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .basefield import EndoSpec, FieldTower
from .nilmn import PolycyclicPresentation, heisenberg
from .ore import OreTower, make_preset

PRESETS = ("weyl", "quantum_matrices", "quantum_torus", "heisenberg")


class ConfigError(ValueError):
    pass


@dataclass
class Algebra:
    name: str
    ore: OreTower | None = None
    pres: PolycyclicPresentation | None = None
    scalars: FieldTower = field(default_factory=lambda: FieldTower([]))
    series_kind: str | None = None

    @property
    def kind(self) -> str:
        return "ore" if self.ore is not None else "group"


def parse_rational(text) -> Fraction:
    if isinstance(text, bool):
        raise ConfigError("booleans are not numbers")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, str):
        try:
            return Fraction(text.strip())
        except (ValueError, ZeroDivisionError):
            pass
    raise ConfigError(f"expected an exact rational, got {text!r}")


def parse_params(items) -> dict[str, Fraction]:
    """``["q=2", "lam=1/3"]`` -> ``{"q": Fraction(2), "lam": Fraction(1, 3)}``."""
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"parameter must look like name=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = parse_rational(v)
    return out


def from_preset(name: str, params: Mapping[str, Fraction] | None = None) -> Algebra:
    params = dict(params or {})
    if name == "heisenberg":
        if params:
            raise ConfigError("heisenberg takes no parameters")
        return Algebra("heisenberg", pres=heisenberg())
    allowed = {"weyl": set(), "quantum_matrices": {"q"}, "quantum_torus": {"lam"}}
    if name not in allowed:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    extra = set(params) - allowed[name]
    if extra:
        raise ConfigError(f"preset {name} does not take parameter(s) {sorted(extra)}")
    tower = make_preset(name, **params)
    # the parameter field is central; rational specializations leave Q
    scalars = FieldTower([v for v in ("q", "lam") if v in tower.base.levels])
    return Algebra(name, ore=tower, scalars=scalars)


def from_document(doc: Mapping) -> Algebra:
    if not isinstance(doc, Mapping):
        raise ConfigError("config must be a JSON object")
    if "preset" in doc:
        params = {k: parse_rational(v) for k, v in (doc.get("params") or {}).items()}
        alg = from_preset(doc["preset"], params)
        if "series" in doc:
            alg.series_kind = doc["series"]
        return alg
    kind = doc.get("kind")
    base = FieldTower([str(v) for v in doc.get("base", [])])
    scalars = FieldTower([str(v) for v in doc.get("scalars", [])])
    if not set(scalars.levels) <= set(base.levels):
        raise ConfigError("scalars must be base variables")
    if kind == "ore":
        variables = []
        for spec in doc.get("variables", []):
            if "name" not in spec:
                raise ConfigError("every skew variable needs a name")
            entry = {k: _exprs(spec.get(k, {})) for k in ("sigma", "delta", "sigma_inverse") if k in spec}
            variables.append((spec["name"], entry))
        if not variables:
            raise ConfigError("an ore config needs at least one skew variable")
        tower = OreTower(base, variables, doc.get("relations") or {}, name=str(doc.get("name", "ore")))
        series = doc.get("series")
        if series not in (None, "PlainSigma", "InverseDelta"):
            raise ConfigError(f"unknown series kind {series!r}")
        return Algebra(str(doc.get("name", "ore")), ore=tower, scalars=scalars, series_kind=series)
    if kind == "polycyclic":
        rank = doc.get("rank")
        if not isinstance(rank, int):
            raise ConfigError("polycyclic config needs an integer rank")
        rels = {}
        for key, cs in (doc.get("relations") or {}).items():
            try:
                j, i = (int(x) for x in str(key).split(","))
            except ValueError:
                raise ConfigError(f"relation keys look like \"j,i\", got {key!r}") from None
            rels[(j, i)] = [int(c) for c in cs]
        action = {}
        inverses = doc.get("action_inverse") or {}
        for k, images in (doc.get("action") or {}).items():
            inv = inverses.get(k)
            action[int(k)] = EndoSpec(base, _exprs(images), _exprs(inv) if inv is not None else None)
        pres = PolycyclicPresentation(rank, rels, action=action, tower=base, names=doc.get("names"))
        return Algebra(str(doc.get("name", "polycyclic")), pres=pres, scalars=scalars)
    raise ConfigError("config needs \"preset\" or \"kind\": \"ore\" | \"polycyclic\"")


def _exprs(mapping) -> dict[str, str]:
    out = {}
    for k, v in (mapping or {}).items():
        if isinstance(v, (int, str)) and not isinstance(v, bool):
            out[str(k)] = str(v)
        else:
            raise ConfigError(f"image of {k} must be an expression string")
    return out


def load_config(path: str) -> Algebra:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from None
    return from_document(doc)
