"""Values of discrete valuations: integers, infinity, and truncation bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass

INF = math.inf


@dataclass(frozen=True)
class AtLeast:
    """Valuation of an element that vanishes to the known precision.

    Distinct from ``INF``: the element is only known to have valuation
    ``>= bound``.
    """

    bound: int

    def __str__(self) -> str:
        return f">={self.bound}"


def val_to_json(v):
    if isinstance(v, AtLeast):
        return {"at_least": v.bound}
    if v == INF:
        return "inf"
    return int(v)
