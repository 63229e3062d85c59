"""
Structural operators on SMTS: pruning, composition, quotient, conjunction
and widening.

Quotient and conjunction return None when the construction does not exist.
"""
from __future__ import annotations

import logging
from collections import deque
from fractions import Fraction
from typing import Callable, Iterable, List, Optional, Set, Tuple

import networkx as nx

from app.models.labels import Interval
from app.models.lattice import GridConfig
from app.models.smts import UNIVERSAL, Smts, State, Transition
from app.services.labels import (
    complement_labels,
    compose_label,
    conjoin_label,
    quotient_label,
    widen_label,
)
from app.services.refinement import default_grid, is_deterministic

logger = logging.getLogger(__name__)

Expander = Callable[[State], Tuple[Iterable[Transition], Iterable[Transition]]]


def must_predecessors(system: Smts, bad: Iterable[State]) -> Set[State]:
    """Reflexive-transitive closure of the must-predecessor operator."""
    graph = nx.DiGraph()
    graph.add_nodes_from(system.states)
    graph.add_edges_from((t.source, t.target) for t in system.must)
    closure: Set[State] = set()
    for state in bad:
        if state in graph and state not in closure:
            closure.add(state)
            closure |= nx.ancestors(graph, state)
    return closure


def prune(system: Smts, bad: Iterable[State]) -> Optional[Smts]:
    """Remove every state that must reach a bad state; None if the initial one does."""
    doomed = must_predecessors(system, bad)
    if system.initial in doomed:
        logger.debug(f"Pruning removes the initial state ({len(doomed)} states doomed)")
        return None
    keep = system.states - doomed
    return Smts(
        keep,
        system.initial,
        frozenset(t for t in system.may if t.source in keep and t.target in keep),
        frozenset(t for t in system.must if t.source in keep and t.target in keep),
        system.alphabet,
    )


def _explore(initial: State, expand: Expander) -> Tuple[Set[State], Set[Transition], Set[Transition]]:
    states = {initial}
    may: Set[Transition] = set()
    must: Set[Transition] = set()
    frontier = deque([initial])
    while frontier:
        state = frontier.popleft()
        new_may, new_must = expand(state)
        for t in list(new_may) + list(new_must):
            if t.target not in states:
                states.add(t.target)
                frontier.append(t.target)
        may.update(new_may)
        must.update(new_must)
    return states, may, must


def _synchronize(pair, left: Iterable[Transition], right: Iterable[Transition], op) -> List[Transition]:
    result = []
    for k in left:
        for l in right:
            label = op(k.label, l.label)
            if label is not None:
                result.append(Transition(pair, label, (k.target, l.target)))
    return result


def compose(left: Smts, right: Smts) -> Smts:
    """Synchronized product; labels compose by window intersection."""
    def expand(pair):
        s, t = pair
        return (
            _synchronize(pair, left.may_from.get(s, ()), right.may_from.get(t, ()), compose_label),
            _synchronize(pair, left.must_from.get(s, ()), right.must_from.get(t, ()), compose_label),
        )

    states, may, must = _explore((left.initial, right.initial), expand)
    return Smts(frozenset(states), (left.initial, right.initial), frozenset(may), frozenset(must),
                left.alphabet | right.alphabet)


def quotient(whole: Smts, part: Smts, grid: Optional[GridConfig] = None, *,
             narrow: bool = False) -> Optional[Smts]:
    """
    The most permissive X with ``part`` composed with X refining ``whole``.

    States are pairs (t, s) plus the universal state. ``grid`` bounds the
    complement labels leading to the universal state.
    """
    if grid is None:
        grid = default_grid(whole, part)
    if not is_deterministic(part):
        logger.warning("Quotient by a nondeterministic system: the adjunction is not guaranteed")
    alphabet = whole.alphabet | part.alphabet
    everything = frozenset(complement_labels((), alphabet, grid))
    bad: Set[State] = set()

    def divide(ell, k):
        # discrete actions stay pinned to [0,0]
        pinned = not k.is_delay and k.window == ell.window == Interval(0, 0)
        return quotient_label(ell, k, narrow=narrow or pinned)

    def expand(pair):
        if pair is UNIVERSAL:
            return [Transition(UNIVERSAL, m, UNIVERSAL) for m in everything], []
        t, s = pair
        part_may = part.may_from.get(s, ())
        part_must = part.must_from.get(s, ())
        may = _synchronize(pair, whole.may_from.get(t, ()), part_may, divide)
        must = _synchronize(pair, whole.must_from.get(t, ()), part_must, divide)
        for ell in whole.must_from.get(t, ()):
            if all(divide(ell.label, k.label) is None for k in part_must):
                bad.add(pair)
        enabled = [k.label for k in part_may]
        may.extend(Transition(pair, m, UNIVERSAL) for m in complement_labels(enabled, alphabet, grid))
        return may, must

    initial = (whole.initial, part.initial)
    states, may, must = _explore(initial, expand)
    raw = Smts(frozenset(states), initial, frozenset(may), frozenset(must), alphabet)
    result = prune(raw, bad)
    if result is None:
        logger.info(f"Quotient does not exist ({len(bad)} bad pairs)")
    return result


def conjoin(left: Smts, right: Smts) -> Optional[Smts]:
    """Greatest lower bound of two specifications, if it exists."""
    bad: Set[State] = set()

    def expand(pair):
        s, t = pair
        left_may, left_must = left.may_from.get(s, ()), left.must_from.get(s, ())
        right_may, right_must = right.may_from.get(t, ()), right.must_from.get(t, ())
        may = _synchronize(pair, left_may, right_may, conjoin_label)
        must = (_synchronize(pair, left_must, right_may, conjoin_label)
                + _synchronize(pair, left_may, right_must, conjoin_label))
        for k in left_must:
            if all(conjoin_label(k.label, l.label) is None for l in right_may):
                bad.add(pair)
        for l in right_must:
            if all(conjoin_label(k.label, l.label) is None for k in left_may):
                bad.add(pair)
        return may, must

    initial = (left.initial, right.initial)
    states, may, must = _explore(initial, expand)
    raw = Smts(frozenset(states), initial, frozenset(may), frozenset(must),
               left.alphabet | right.alphabet)
    result = prune(raw, bad)
    if result is None:
        logger.info(f"Conjunction does not exist ({len(bad)} bad pairs)")
    return result


def widen(system: Smts, amount: Fraction) -> Smts:
    """Relax every delay window by ``amount``."""
    def relax(transitions):
        return frozenset(Transition(t.source, widen_label(t.label, amount), t.target) for t in transitions)

    return Smts(system.states, system.initial, relax(system.may), relax(system.must), system.alphabet)
