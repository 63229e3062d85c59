"""
Finite representation of lead functions.

A lead function maps every lead d to an extended non-negative distance.
Leads are restricted to the grid {-D, -D+e, ..., D}; everything off that
grid is infinite. Values are stored in grid units as int64 codes:

    0 .. cap        finite value code * step
    cap + 1         saturated: infinite because a bound was hit
    cap + 2         exact top: infinite because no match exists

Both infinite codes read back as ``math.inf``. Keeping them apart lets a
distance report whether an infinite answer is a finitization artifact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Union

import numpy as np

from app.exceptions import ConfigurationError

Extended = Union[Fraction, float]  # a Fraction, or math.inf
Rational = Union[Fraction, int, str]


def to_fraction(value: Rational) -> Fraction:
    """Coerce ints, Fractions and 'p/q' text to a Fraction."""
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigurationError(f"Not an exact rational: {value!r}") from exc


def format_extended(value: Extended) -> str:
    """Render an extended rational as ``inf``, ``n`` or ``p/q``."""
    if value == math.inf:
        return "inf"
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_extended(text: str) -> Extended:
    """Inverse of :func:`format_extended`."""
    text = text.strip()
    if text in ("inf", "∞"):
        return math.inf
    return to_fraction(text)


@dataclass(frozen=True)
class GridConfig:
    """
    Granularity and bounds of the finite lead lattice.

    Attributes:
        step: grid step e, the unit of leads, delays and values.
        lead_bound: D, leads live on the grid in [-D, D].
        value_cap: finite values above the cap saturate to infinity.
    """

    step: Fraction = Fraction(1)
    lead_bound: Fraction = Fraction(16)
    value_cap: Fraction = Fraction(16)

    def __post_init__(self) -> None:
        for name in ("step", "lead_bound", "value_cap"):
            object.__setattr__(self, name, to_fraction(getattr(self, name)))
        if self.step <= 0:
            raise ConfigurationError(f"Grid step must be positive, got {self.step}")
        for name in ("lead_bound", "value_cap"):
            value = getattr(self, name)
            if value <= 0:
                raise ConfigurationError(f"{name} must be positive, got {value}")
            if (value / self.step).denominator != 1:
                raise ConfigurationError(f"{name}={value} is not a multiple of step {self.step}")

    @property
    def half_width(self) -> int:
        """Number of grid leads on each side of zero."""
        return int(self.lead_bound / self.step)

    @property
    def size(self) -> int:
        return 2 * self.half_width + 1

    @property
    def cap_units(self) -> int:
        return int(self.value_cap / self.step)

    @property
    def inf_code(self) -> int:
        return self.cap_units + 1

    @property
    def top_code(self) -> int:
        return self.cap_units + 2

    def is_aligned(self, value: Extended) -> bool:
        if value == math.inf:
            return True
        return (Fraction(value) / self.step).denominator == 1

    def units(self, value: Rational) -> int:
        """Convert a grid-aligned rational to grid units."""
        ratio = to_fraction(value) / self.step
        if ratio.denominator != 1:
            raise ConfigurationError(f"{value} is not on the grid with step {self.step}")
        return ratio.numerator

    def leads(self) -> Iterator[Fraction]:
        for index in range(self.size):
            yield (index - self.half_width) * self.step

    def decode(self, code: int) -> Extended:
        """Turn a stored code back into a value."""
        if code > self.cap_units:
            return math.inf
        return int(code) * self.step

    def encode(self, value: Extended) -> int:
        """Turn a grid-aligned value into a code, saturating above the cap."""
        if value == math.inf:
            return self.top_code
        value = to_fraction(value)
        if value < 0:
            raise ConfigurationError(f"Distances are non-negative, got {value}")
        units = self.units(value)
        return units if units <= self.cap_units else self.inf_code


@dataclass(frozen=True, eq=False)
class LeadFunction:
    """
    Immutable element of the lead lattice.

    ``codes[i]`` holds the value at lead ``(i - half_width) * step``.
    """

    grid: GridConfig
    codes: np.ndarray

    def __post_init__(self) -> None:
        codes = np.array(self.codes, dtype=np.int64, copy=True)
        if codes.shape != (self.grid.size,):
            raise ConfigurationError(
                f"Lead table has shape {codes.shape}, grid needs ({self.grid.size},)"
            )
        if codes.size and codes.min() < 0:
            raise ConfigurationError("Lead table contains negative values")
        # Finite overflow saturates; the top code is kept as is.
        codes = np.where((codes > self.grid.cap_units) & (codes != self.grid.top_code),
                         self.grid.inf_code, codes)
        codes.setflags(write=False)
        object.__setattr__(self, "codes", codes)

    @classmethod
    def bottom(cls, grid: GridConfig) -> "LeadFunction":
        return cls(grid, np.zeros(grid.size, dtype=np.int64))

    @classmethod
    def top(cls, grid: GridConfig) -> "LeadFunction":
        return cls(grid, np.full(grid.size, grid.top_code, dtype=np.int64))

    @classmethod
    def constant(cls, grid: GridConfig, value: Extended) -> "LeadFunction":
        return cls(grid, np.full(grid.size, grid.encode(value), dtype=np.int64))

    @classmethod
    def from_callable(cls, grid: GridConfig, fn: Callable[[Fraction], Extended]) -> "LeadFunction":
        """Tabulate ``fn`` over the grid leads."""
        return cls(grid, np.array([grid.encode(fn(d)) for d in grid.leads()], dtype=np.int64))

    def __call__(self, lead: Rational) -> Extended:
        lead = to_fraction(lead)
        if not self.grid.is_aligned(lead):
            raise ConfigurationError(f"Lead {lead} is not on the grid")
        index = self.grid.units(lead) + self.grid.half_width
        if index < 0 or index >= self.grid.size:
            return math.inf
        return self.grid.decode(int(self.codes[index]))

    def normalized(self) -> np.ndarray:
        """Codes with both infinities identified."""
        return np.minimum(self.codes, self.grid.inf_code)

    @property
    def is_top(self) -> bool:
        return bool(np.all(self.codes >= self.grid.inf_code))

    @property
    def is_bottom(self) -> bool:
        return not self.codes.any()

    @property
    def is_exact_top(self) -> bool:
        return bool(np.all(self.codes == self.grid.top_code))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LeadFunction):
            return NotImplemented
        return self.grid == other.grid and np.array_equal(self.normalized(), other.normalized())

    def __hash__(self) -> int:
        return hash((self.grid, self.normalized().tobytes()))

    def __repr__(self) -> str:
        zero = format_extended(self(0))
        return f"LeadFunction(step={self.grid.step}, bound={self.grid.lead_bound}, at_zero={zero})"
