"""
Interval-timed labels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from app.exceptions import ConfigurationError
from app.models.lattice import Extended, format_extended, to_fraction

DELTA = "delta"


@dataclass(frozen=True, order=True)
class Interval:
    """
    Closed extended non-negative interval [lo, hi].

    Attributes:
        lo: finite lower endpoint.
        hi: upper endpoint, possibly ``math.inf``.
    """

    lo: Fraction = Fraction(0)
    hi: Extended = Fraction(0)

    def __post_init__(self) -> None:
        lo = to_fraction(self.lo)
        hi = math.inf if self.hi == math.inf else to_fraction(self.hi)
        if lo < 0:
            raise ConfigurationError(f"Interval lower endpoint {lo} is negative")
        if lo > hi:
            raise ConfigurationError(f"Empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, value) -> "Interval":
        return cls(value, value)

    @classmethod
    def universal(cls) -> "Interval":
        return cls(Fraction(0), math.inf)

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def is_bounded(self) -> bool:
        return self.hi != math.inf

    def contains_value(self, value: Extended) -> bool:
        return self.lo <= value <= self.hi

    def within(self, other: "Interval") -> bool:
        """Subset test."""
        return other.lo <= self.lo and self.hi <= other.hi

    def intersect(self, other: "Interval") -> Optional["Interval"]:
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            return None
        return Interval(lo, hi)

    def shift(self, amount: Fraction) -> "Interval":
        """Add [amount, amount]."""
        return Interval(self.lo + amount, self.hi + amount if self.is_bounded else math.inf)

    def plus(self, other: "Interval") -> "Interval":
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def extend(self, amount: Fraction) -> "Interval":
        """Add [-amount, amount], clamped at zero."""
        hi = self.hi + amount if self.is_bounded else math.inf
        return Interval(max(Fraction(0), self.lo - amount), hi)

    def __str__(self) -> str:
        return f"[{format_extended(self.lo)},{format_extended(self.hi)}]"


@dataclass(frozen=True, order=True)
class TimedLabel:
    """
    A label (action, window). Implementation labels have point windows.

    Discrete actions of an interval-timed system carry the window [0,0];
    the generic label algebra accepts any window on any action.
    """

    action: str
    window: Interval = field(default_factory=lambda: Interval(0, 0))

    @classmethod
    def delay(cls, lo, hi=None) -> "TimedLabel":
        return cls(DELTA, Interval(lo, lo if hi is None else hi))

    @classmethod
    def act(cls, action: str) -> "TimedLabel":
        return cls(action, Interval(0, 0))

    @property
    def is_delay(self) -> bool:
        return self.action == DELTA

    @property
    def is_implementation(self) -> bool:
        return self.window.is_point

    def __str__(self) -> str:
        if not self.is_delay and self.window == Interval(0, 0):
            return self.action
        if self.is_implementation:
            return f"({self.action},{format_extended(self.window.lo)})"
        return f"({self.action},{self.window})"
