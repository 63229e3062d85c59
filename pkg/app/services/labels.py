"""
Label algebra for interval-timed specifications.

Covers refinement of labels, their implementation sets, the maximum-lead
label distance F, and the partial operators for composition, quotient and
conjunction.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import FrozenSet, Iterable, Optional, Set, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from app.exceptions import ConfigurationError
from app.models.labels import DELTA, Interval, TimedLabel
from app.models.lattice import GridConfig, LeadFunction


def window_units(label: TimedLabel, grid: GridConfig) -> Tuple[int, int]:
    """Grid-unit bounds of a label window; an infinite end is truncated at the value cap."""
    lo = grid.units(label.window.lo)
    if label.window.is_bounded:
        return lo, grid.units(label.window.hi)
    return lo, max(lo, grid.cap_units)


def _f_window_units(k: TimedLabel, ell: TimedLabel, grid: GridConfig) -> Tuple[int, int, int, int]:
    """
    Grid-unit windows for F with infinite ends cut where the cut is exact.

    An unbounded outer window against a bounded inner one is cut past the
    point where every lead leaves the value cap, so the outer sup saturates.
    Against an unbounded inner window the inner inf sees every grid lead once
    the outer delay passes a2 + 2D, so the outer cut stops there. An
    unbounded inner window is cut 2D past the outer end.
    """
    n = grid.half_width
    a1, a2 = grid.units(k.window.lo), grid.units(ell.window.lo)
    b2 = grid.units(ell.window.hi) if ell.window.is_bounded else None
    if k.window.is_bounded:
        b1 = grid.units(k.window.hi)
    elif b2 is not None:
        b1 = max(a1, grid.cap_units + n + b2 + 1)
    else:
        b1 = max(a1, a2 + 2 * n + 1)
    if b2 is None:
        b2 = max(a2, b1 + 2 * n + 1)
    return a1, b1, a2, b2


@lru_cache(maxsize=64)
def _abs_codes(grid: GridConfig) -> np.ndarray:
    leads = np.abs(np.arange(-grid.half_width, grid.half_width + 1, dtype=np.int64))
    codes = np.where(leads > grid.cap_units, grid.inf_code, leads)
    codes.setflags(write=False)
    return codes


def label_refines(k: TimedLabel, ell: TimedLabel) -> bool:
    return k.action == ell.action and k.window.within(ell.window)


def implementations_of(k: TimedLabel, grid: GridConfig) -> FrozenSet[TimedLabel]:
    lo, hi = window_units(k, grid)
    return frozenset(TimedLabel(k.action, Interval.point(t * grid.step)) for t in range(lo, hi + 1))


def f_codes(k: TimedLabel, ell: TimedLabel, row: np.ndarray, grid: GridConfig) -> np.ndarray:
    """
    sup over t in k, inf over t' in ell of max(|d + t - t'|, row(d + t - t')).

    The inner inf is a sliding minimum over a window of width |ell|, the outer
    sup a sliding maximum over a window of width |k|.
    """
    if k.action != ell.action:
        return np.full(grid.size, grid.top_code, dtype=np.int64)
    a1, b1, a2, b2 = _f_window_units(k, ell, grid)
    n = grid.half_width
    shifted = np.maximum(_abs_codes(grid), row)
    index = np.arange(-n + a1 - b2, n + b1 - a2 + 1) + n
    inside = (index >= 0) & (index < grid.size)
    extended = np.full(index.shape, grid.inf_code, dtype=np.int64)
    extended[inside] = shifted[index[inside]]
    inner = sliding_window_view(extended, b2 - a2 + 1).min(axis=1)
    return sliding_window_view(inner, b1 - a1 + 1).max(axis=1)


def f_label(k: TimedLabel, ell: TimedLabel, alpha: LeadFunction) -> LeadFunction:
    """Maximum-lead distance from label k to label ell, given the future distance alpha."""
    return LeadFunction(alpha.grid, f_codes(k, ell, alpha.codes, alpha.grid))


def f_point(m: TimedLabel, n: TimedLabel, alpha: LeadFunction) -> LeadFunction:
    if not (m.is_implementation and n.is_implementation):
        raise ConfigurationError(f"f_point needs implementation labels, got {m} and {n}")
    return f_label(m, n, alpha)


def label_distance(k: TimedLabel, ell: TimedLabel, grid: GridConfig) -> LeadFunction:
    """Trace distance between single labels, F(k, ell, bottom)."""
    return f_label(k, ell, LeadFunction.bottom(grid))


def compose_label(k: TimedLabel, k_prime: TimedLabel) -> Optional[TimedLabel]:
    """CSP-style synchronization: same action, intersected windows."""
    if k.action != k_prime.action:
        return None
    window = k.window.intersect(k_prime.window)
    return None if window is None else TimedLabel(k.action, window)


# Conjunction of labels coincides with composition.
conjoin_label = compose_label


def quotient_label(ell: TimedLabel, k: TimedLabel, *, narrow: bool = False) -> Optional[TimedLabel]:
    """
    The most permissive m with k composed with m refining ell.

    ``ell`` is the numerator window [l', r'], ``k`` the divisor window [l, r].
    With ``narrow`` a defined quotient by an implementation label is k itself.
    """
    if k.action != ell.action:
        return None
    window = quotient_window(ell.window, k.window)
    if window is None:
        return None
    if narrow and k.is_implementation:
        return k
    return TimedLabel(k.action, window)


def quotient_window(numerator: Interval, divisor: Interval) -> Optional[Interval]:
    """Widest window whose intersection with ``divisor`` stays inside ``numerator``."""
    l, r = divisor.lo, divisor.hi
    lp, rp = numerator.lo, numerator.hi
    if r < lp or rp < l:
        return None
    if l < lp:
        return Interval(lp, math.inf) if r <= rp else Interval(lp, rp)
    return Interval(0, math.inf) if r <= rp else Interval(0, rp)


def widen_label(k: TimedLabel, n: Fraction) -> TimedLabel:
    """Relax a delay window by n on both sides; discrete actions stay put."""
    if not k.is_delay:
        return k
    return TimedLabel(k.action, k.window.extend(Fraction(n)))


def complement_labels(enabled: Iterable[TimedLabel], alphabet: Iterable[str],
                      grid: GridConfig) -> Set[TimedLabel]:
    """Maximal labels that compose with none of ``enabled``."""
    enabled = list(enabled)
    result: Set[TimedLabel] = set()
    for action in set(alphabet) - {DELTA}:
        if not any(k.action == action and k.window.contains_value(0) for k in enabled):
            result.add(TimedLabel.act(action))

    covered = np.zeros(grid.cap_units + 1, dtype=bool)
    for k in enabled:
        if k.is_delay:
            lo, hi = window_units(k, grid)
            covered[lo:min(hi, grid.cap_units) + 1] = True
    start = None
    for unit in range(grid.cap_units + 2):
        free = unit <= grid.cap_units and not covered[unit]
        if free and start is None:
            start = unit
        elif not free and start is not None:
            end = unit - 1
            hi = math.inf if end == grid.cap_units else end * grid.step
            result.add(TimedLabel(DELTA, Interval(start * grid.step, hi)))
            start = None
    return result
