"""
Modal event-clock specifications.

Each action a doubles as a clock recording the time since a last occurred.
Guards map clocks to integer intervals; clocks a guard does not mention are
unconstrained.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, FrozenSet, Hashable, Iterable, List, Mapping, NamedTuple, Optional, Tuple

from app.exceptions import SemanticError
from app.models.labels import Interval
from app.models.lattice import format_extended

Location = Hashable

UNCONSTRAINED = Interval(0, math.inf)


@dataclass(frozen=True)
class ClockConstraint:
    """
    Conjunction of per-clock bounds, stored as sorted (clock, interval) pairs.

    Attributes:
        bounds: one integer interval per constrained clock.
    """

    bounds: Tuple[Tuple[str, Interval], ...] = ()

    def __post_init__(self) -> None:
        merged: Dict[str, Interval] = {}
        for clock, interval in self.bounds:
            if not _is_integral(interval):
                raise SemanticError(f"Guard on {clock} has non-integer bound {interval}")
            if clock in merged:
                both = merged[clock].intersect(interval)
                if both is None:
                    raise SemanticError(f"Contradictory bounds on clock {clock}")
                interval = both
            merged[clock] = interval
        normal = tuple(sorted((c, i) for c, i in merged.items() if i != UNCONSTRAINED))
        object.__setattr__(self, "bounds", normal)

    @classmethod
    def of(cls, mapping: Optional[Mapping[str, Interval]] = None, **clocks: Interval) -> "ClockConstraint":
        items = dict(mapping or {})
        items.update(clocks)
        return cls(tuple(items.items()))

    @classmethod
    def true(cls) -> "ClockConstraint":
        return cls(())

    @property
    def is_true(self) -> bool:
        return not self.bounds

    @property
    def clocks(self) -> FrozenSet[str]:
        return frozenset(c for c, _ in self.bounds)

    def get(self, clock: str) -> Interval:
        for c, interval in self.bounds:
            if c == clock:
                return interval
        return UNCONSTRAINED

    def as_dict(self) -> Dict[str, Interval]:
        return dict(self.bounds)

    def conjoin(self, other: "ClockConstraint") -> Optional["ClockConstraint"]:
        """Per-clock intersection, None when some clock becomes empty."""
        result = {}
        for clock in self.clocks | other.clocks:
            interval = self.get(clock).intersect(other.get(clock))
            if interval is None:
                return None
            result[clock] = interval
        return ClockConstraint.of(result)

    def within(self, other: "ClockConstraint") -> bool:
        return all(self.get(c).within(other.get(c)) for c in self.clocks | other.clocks)

    def extend(self, n: int) -> "ClockConstraint":
        """The n-extended constraint, lower ends clamped at zero."""
        return ClockConstraint(tuple((c, i.extend(Fraction(n))) for c, i in self.bounds))

    def constants(self) -> List[Fraction]:
        values = []
        for _, interval in self.bounds:
            values.append(interval.lo)
            if interval.is_bounded:
                values.append(interval.hi)
        return values

    def __str__(self) -> str:
        if self.is_true:
            return "true"
        atoms = []
        for clock, interval in self.bounds:
            if interval.lo == interval.hi:
                atoms.append(f"{clock}=={format_extended(interval.lo)}")
                continue
            if interval.lo > 0:
                atoms.append(f"{clock}>={format_extended(interval.lo)}")
            if interval.is_bounded:
                atoms.append(f"{clock}<={format_extended(interval.hi)}")
        return " & ".join(atoms)


def _is_integral(interval: Interval) -> bool:
    return Fraction(interval.lo).denominator == 1 and (
        not interval.is_bounded or Fraction(interval.hi).denominator == 1
    )


@dataclass(frozen=True)
class IntervalValuation:
    """
    Possible clock values, one interval per tracked clock.

    Attributes:
        clocks: tracked clock names, sorted.
        values: interval per clock, aligned with ``clocks``.
    """

    clocks: Tuple[str, ...] = ()
    values: Tuple[Interval, ...] = ()

    @classmethod
    def zero(cls, clocks: Iterable[str]) -> "IntervalValuation":
        clocks = tuple(sorted(clocks))
        return cls(clocks, tuple(Interval(0, 0) for _ in clocks))

    @classmethod
    def of(cls, **values: Interval) -> "IntervalValuation":
        clocks = tuple(sorted(values))
        return cls(clocks, tuple(values[c] for c in clocks))

    def get(self, clock: str) -> Interval:
        """Value of a clock; untracked clocks may hold anything."""
        try:
            return self.values[self.clocks.index(clock)]
        except ValueError:
            return UNCONSTRAINED

    def reset(self, clock: str) -> "IntervalValuation":
        if clock not in self.clocks:
            return self
        return IntervalValuation(self.clocks, tuple(
            Interval(0, 0) if c == clock else v for c, v in zip(self.clocks, self.values)
        ))

    def delay(self, amount: Interval, cap: int) -> "IntervalValuation":
        """Add ``amount`` to every clock; values at or above the cap collapse."""
        return IntervalValuation(self.clocks, tuple(_capped(v.plus(amount), cap) for v in self.values))

    def __str__(self) -> str:
        parts = []
        for clock, value in zip(self.clocks, self.values):
            if value.is_point:
                parts.append(f"{clock}={format_extended(value.lo)}")
            elif not value.is_bounded and value.lo > 0 and _is_integral(value):
                parts.append(f"{clock}>={format_extended(value.lo)}")
            else:
                parts.append(f"{clock}in{value}")
        return ",".join(parts)


def _capped(value: Interval, cap: int) -> Interval:
    if value.lo >= cap:
        return Interval(cap, math.inf)
    if value.is_bounded and value.hi >= cap:
        return Interval(value.lo, math.inf)
    return value


class Edge(NamedTuple):
    source: Location
    action: str
    guard: ClockConstraint
    target: Location


def edge_key(edge: Edge):
    return repr(edge.source), edge.action, str(edge.guard), repr(edge.target)


@dataclass(frozen=True)
class Mecs:
    """
    A modal event-clock specification.

    Attributes:
        alphabet: actions, which double as clocks.
        locations: finite set of locations.
        initial: initial location.
        may: allowed edges (location, action, guard, location).
        must: required edges.
        bad: locations whose states are pruned by the semantics.
        universal: locations that allow everything and forget the clocks.
    """

    alphabet: FrozenSet[str]
    locations: FrozenSet[Location]
    initial: Location
    may: FrozenSet[Edge]
    must: FrozenSet[Edge]
    bad: FrozenSet[Location] = field(default_factory=frozenset)
    universal: FrozenSet[Location] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        may = frozenset(Edge(*e) for e in self.may)
        must = frozenset(Edge(*e) for e in self.must)
        locations = set(self.locations) | {self.initial} | set(self.bad) | set(self.universal)
        for e in may | must:
            locations.update((e.source, e.target))
        alphabet = set(self.alphabet) | {e.action for e in may | must}
        unknown = set().union(*(e.guard.clocks for e in may | must)) - alphabet
        if unknown:
            raise SemanticError(f"Guards mention unknown clocks: {', '.join(sorted(unknown))}")
        for e in may | must:
            if e.source in self.universal and e.target not in self.universal:
                raise SemanticError(f"Universal location {e.source!r} must only lead to universal locations")
        object.__setattr__(self, "may", may)
        object.__setattr__(self, "must", must)
        object.__setattr__(self, "locations", frozenset(locations))
        object.__setattr__(self, "alphabet", frozenset(alphabet))
        object.__setattr__(self, "bad", frozenset(self.bad))
        object.__setattr__(self, "universal", frozenset(self.universal))

    @classmethod
    def build(cls, initial: Location, may: Iterable[Tuple] = (), must: Iterable[Tuple] = (),
              alphabet: Iterable[str] = (), locations: Iterable[Location] = (),
              bad: Iterable[Location] = (), universal: Iterable[Location] = (),
              implied_may: bool = True) -> "Mecs":
        """Convenience constructor; by default every must edge is also a may edge."""
        must = frozenset(Edge(*e) for e in must)
        may = frozenset(Edge(*e) for e in may)
        if implied_may:
            may = may | must
        return cls(frozenset(alphabet), frozenset(locations), initial, may, must,
                   frozenset(bad), frozenset(universal))

    @cached_property
    def may_from(self) -> Mapping[Location, Tuple[Edge, ...]]:
        return _index(self.may)

    @cached_property
    def must_from(self) -> Mapping[Location, Tuple[Edge, ...]]:
        return _index(self.must)

    def clocks(self) -> FrozenSet[str]:
        """Clocks that some guard reads."""
        return frozenset().union(*(e.guard.clocks for e in self.may | self.must))

    def max_constant(self) -> int:
        values = [v for e in self.may | self.must for v in e.guard.constants()]
        return int(max(values, default=0))

    def check_consistency(self) -> List[Edge]:
        """Must edges with no may edge of a weaker guard."""
        violations = []
        for e in sorted(self.must, key=edge_key):
            if not any(m.action == e.action and m.target == e.target and e.guard.within(m.guard)
                       for m in self.may_from.get(e.source, ())):
                violations.append(e)
        return violations


def _index(edges: Iterable[Edge]) -> Dict[Location, Tuple[Edge, ...]]:
    grouped: Dict[Location, List[Edge]] = defaultdict(list)
    for e in sorted(edges, key=edge_key):
        grouped[e.source].append(e)
    return {location: tuple(es) for location, es in grouped.items()}
