"""
Structured modal transition systems over timed labels, and the results of
analysing them.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Hashable, Iterable, List, Mapping, NamedTuple, Optional, Tuple

from app.models.labels import DELTA, TimedLabel
from app.models.lattice import Extended, GridConfig, LeadFunction

State = Hashable


class _UniversalState:
    """The state of a quotient that allows everything."""

    _instance: Optional["_UniversalState"] = None

    def __new__(cls) -> "_UniversalState":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNIVERSAL"

    def __reduce__(self):
        return (_UniversalState, ())


UNIVERSAL = _UniversalState()


class Transition(NamedTuple):
    source: State
    label: TimedLabel
    target: State


def state_key(state: State) -> str:
    """Stable sort key for heterogeneous states."""
    return repr(state)


def transition_key(transition: Transition) -> Tuple[str, TimedLabel, str]:
    return state_key(transition.source), transition.label, state_key(transition.target)


@dataclass(frozen=True)
class Smts:
    """
    A finite structured modal transition system.

    Attributes:
        states: finite set of hashable state identifiers.
        initial: the initial state.
        may: allowed transitions.
        must: required transitions.
        alphabet: discrete actions; defaults to those occurring on labels.
    """

    states: FrozenSet[State]
    initial: State
    may: FrozenSet[Transition]
    must: FrozenSet[Transition]
    alphabet: FrozenSet[str] = field(default=None)

    def __post_init__(self) -> None:
        object.__setattr__(self, "may", frozenset(Transition(*t) for t in self.may))
        object.__setattr__(self, "must", frozenset(Transition(*t) for t in self.must))
        states = set(self.states) | {self.initial}
        for t in self.may | self.must:
            states.update((t.source, t.target))
        object.__setattr__(self, "states", frozenset(states))
        used = {t.label.action for t in self.may | self.must} - {DELTA}
        alphabet = used if self.alphabet is None else set(self.alphabet) | used
        object.__setattr__(self, "alphabet", frozenset(alphabet - {DELTA}))

    @classmethod
    def build(cls, initial: State, may: Iterable[Tuple[State, TimedLabel, State]] = (),
              must: Iterable[Tuple[State, TimedLabel, State]] = (),
              states: Iterable[State] = (), alphabet: Optional[Iterable[str]] = None,
              implied_may: bool = False) -> "Smts":
        """Convenience constructor; with ``implied_may`` every must is also a may."""
        must = frozenset(Transition(*t) for t in must)
        may = frozenset(Transition(*t) for t in may)
        if implied_may:
            may = may | must
        return cls(frozenset(states), initial, may, must,
                   None if alphabet is None else frozenset(alphabet))

    @classmethod
    def implementation(cls, initial: State, transitions: Iterable[Tuple[State, TimedLabel, State]],
                       states: Iterable[State] = ()) -> "Smts":
        transitions = frozenset(Transition(*t) for t in transitions)
        return cls(frozenset(states), initial, transitions, transitions)

    @cached_property
    def may_from(self) -> Mapping[State, Tuple[Transition, ...]]:
        return _index(self.may)

    @cached_property
    def must_from(self) -> Mapping[State, Tuple[Transition, ...]]:
        return _index(self.must)

    def labels(self) -> FrozenSet[TimedLabel]:
        return frozenset(t.label for t in self.may | self.must)

    @property
    def is_implementation(self) -> bool:
        return self.may == self.must and all(t.label.is_implementation for t in self.may)

    def reachable(self) -> "Smts":
        """Restrict to states reachable from the initial state."""
        seen = {self.initial}
        frontier = [self.initial]
        while frontier:
            state = frontier.pop()
            for t in self.may_from.get(state, ()) + self.must_from.get(state, ()):
                if t.target not in seen:
                    seen.add(t.target)
                    frontier.append(t.target)
        return Smts(frozenset(seen), self.initial,
                    frozenset(t for t in self.may if t.source in seen),
                    frozenset(t for t in self.must if t.source in seen),
                    self.alphabet)


def _index(transitions: Iterable[Transition]) -> Dict[State, Tuple[Transition, ...]]:
    grouped: Dict[State, List[Transition]] = defaultdict(list)
    for t in sorted(transitions, key=transition_key):
        grouped[t.source].append(t)
    return {state: tuple(ts) for state, ts in grouped.items()}


Pair = Tuple[State, State]


@dataclass(frozen=True)
class DistanceResult:
    """
    Outcome of the refinement-distance fixed point.

    Attributes:
        value: distance at the initial pair with lead zero.
        table: converged lead function per reachable state pair.
        iterations: number of pair updates evaluated.
        saturated: the value is infinite only because a bound was hit.
        grid: the lattice the table lives in.
    """

    value: Extended
    table: Mapping[Pair, LeadFunction]
    iterations: int
    saturated: bool
    grid: GridConfig


@dataclass(frozen=True)
class CounterexampleStep:
    """
    One link of a refinement counterexample: at ``pair`` the transition
    ``label`` to ``target`` (on the left for may, on the right for must) has
    no answer, or every answer leads to a pair that fails earlier.
    """

    pair: Pair
    modality: str
    label: TimedLabel
    target: State
    answers: Tuple[Tuple[TimedLabel, State], ...]


@dataclass(frozen=True)
class RefinementWitness:
    refines: bool
    relation: Optional[FrozenSet[Pair]] = None
    counterexample: Tuple[CounterexampleStep, ...] = ()

    def __bool__(self) -> bool:
        return self.refines
