"""
Distances between finite traces of implementation labels.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence, Tuple

from app.models.labels import TimedLabel
from app.models.lattice import Extended, GridConfig, LeadFunction
from app.services.labels import f_point

Trace = Tuple[TimedLabel, ...]


def h_trace(sigma: Sequence[TimedLabel], tau: Sequence[TimedLabel], grid: GridConfig) -> LeadFunction:
    """Lead function of two traces, built back to front."""
    if len(sigma) != len(tau):
        # The shorter trace runs out first and the remainder is top.
        return LeadFunction.top(grid)
    result = LeadFunction.bottom(grid)
    for m, n in zip(reversed(sigma), reversed(tau)):
        result = f_point(m, n, result)
    return result


def max_lead_direct(sigma: Sequence[TimedLabel], tau: Sequence[TimedLabel]) -> Extended:
    """Largest absolute difference of accumulated delays over all prefixes."""
    if len(sigma) != len(tau):
        return math.inf
    lead = Fraction(0)
    worst = Fraction(0)
    for m, n in zip(sigma, tau):
        if m.action != n.action:
            return math.inf
        lead += m.window.lo - n.window.lo
        worst = max(worst, abs(lead))
    return worst
