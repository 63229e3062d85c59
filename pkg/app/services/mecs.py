"""
Semantics and syntactic operators for modal event-clock specifications.

The semantics of a MECS is a finite interval-timed SMTS: states pair a
location with an interval clock valuation, clock values at or above the
clock cap collapse, and delays come from a finite menu (points, or all grid
intervals). Two timing disciplines are offered:

    standard delays are both allowed and required from every state
    urgent   a state alternates between a delay and a discrete step; delays
             are only allowed, and never past the point where a required
             edge that can still become enabled would be disabled

Quotient and conjunction are built syntactically, with the marker
locations BAD and UNIV standing for the pruned and the universal state,
and their existence is settled on the semantics.
"""
from __future__ import annotations

import logging
import math
from collections import deque
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from app.config import settings
from app.exceptions import BudgetExceededError, ConfigurationError, ConstructionError, SemanticError
from app.models.labels import Interval, TimedLabel
from app.models.lattice import Extended, GridConfig
from app.models.mecs import ClockConstraint, Edge, IntervalValuation, Location, Mecs
from app.models.smts import DistanceResult, Smts, Transition
from app.services.labels import quotient_window
from app.services.operators import prune
from app.services.refinement import boolean_refines, h_mod

logger = logging.getLogger(__name__)

BAD = "BAD"
UNIV = "UNIV"

DELAY_PHASE = "delay"
ACT_PHASE = "act"


def constraint_sat(valuation: IntervalValuation, guard: ClockConstraint) -> bool:
    """Some concrete valuation inside the intervals satisfies the guard."""
    return all(valuation.get(clock).intersect(bound) is not None for clock, bound in guard.bounds)


def default_clock_cap(*systems: Mecs) -> int:
    if settings.default_clock_cap is not None:
        return settings.default_clock_cap
    return max((system.max_constant() for system in systems), default=0) + 1


def mecs_grid(left: Mecs, right: Mecs, clock_cap: int, step: Optional[Fraction] = None) -> GridConfig:
    """(clock cap + 1) * (location pairs + 1), rounded up to the grid."""
    step = Fraction(step if step is not None else settings.step)
    bound = Fraction(clock_cap + 1) * (len(left.locations) * len(right.locations) + 1)
    bound = math.ceil(bound / step) * step
    return GridConfig(step=step, lead_bound=bound, value_cap=bound)


def _delay_labels(grid: GridConfig, clock_cap: int, delay_mode: str) -> List[TimedLabel]:
    top = grid.units(clock_cap)
    if delay_mode == "point":
        return [TimedLabel.delay(u * grid.step) for u in range(top + 1)]
    if delay_mode == "interval":
        return [TimedLabel.delay(lo * grid.step, hi * grid.step)
                for lo in range(top + 1) for hi in range(lo, top + 1)]
    raise ConfigurationError(f"Unknown delay mode {delay_mode!r}")


def _deadline(valuation: IntervalValuation, edges: Iterable[Edge]) -> Extended:
    """Longest delay that keeps every still-reachable guard of ``edges`` reachable."""
    deadline: Extended = math.inf
    for edge in edges:
        earliest: Extended = Fraction(0)
        latest: Extended = math.inf
        for clock, bound in edge.guard.bounds:
            value = valuation.get(clock)
            earliest = max(earliest, bound.lo - value.hi)
            latest = min(latest, bound.hi - value.lo)
        if earliest <= latest:
            deadline = min(deadline, latest)
    return deadline


def semantics(mecs: Mecs, grid: Optional[GridConfig] = None, clock_cap: Optional[int] = None, *,
              delay_mode: Optional[str] = None, timing: Optional[str] = None,
              budget: Optional[int] = None) -> Smts:
    """
    Finitized interval-timed SMTS of ``mecs``.

    Only clocks read by some guard are tracked. Raises ConstructionError when
    the initial state must reach a BAD-marked location.
    """
    delay_mode = delay_mode or settings.delay_mode
    timing = timing or settings.timing
    budget = budget or settings.state_budget
    cap = clock_cap if clock_cap is not None else default_clock_cap(mecs)
    if grid is None:
        grid = GridConfig(step=settings.step, lead_bound=max(cap, 1), value_cap=max(cap, 1))
    if (1 / grid.step).denominator != 1:
        raise ConfigurationError(f"Grid step {grid.step} must divide 1 for clock semantics")
    if timing not in ("standard", "urgent"):
        raise ConfigurationError(f"Unknown timing {timing!r}")
    urgent = timing == "urgent"
    if urgent and delay_mode != "point":
        raise ConfigurationError("Urgent timing needs point delays")

    delays = _delay_labels(grid, cap, delay_mode)
    clocks = sorted(mecs.clocks())
    forgotten = IntervalValuation()

    def make(location: Location, valuation: IntervalValuation, phase: str):
        if location in mecs.universal:
            valuation = forgotten
            phase = DELAY_PHASE
        return (location, valuation, phase) if urgent else (location, valuation)

    def expand(state) -> Tuple[List[Transition], List[Transition]]:
        location, valuation = state[0], state[1]
        may: List[Transition] = []
        must: List[Transition] = []
        if location in mecs.universal:
            may.append(Transition(state, TimedLabel.delay(0, math.inf), state))
            for e in mecs.may_from.get(location, ()):
                may.append(Transition(state, TimedLabel.act(e.action), make(e.target, forgotten, DELAY_PHASE)))
            return may, must

        phase = state[2] if urgent else None
        if not urgent or phase == DELAY_PHASE:
            if urgent:
                limit = min(_deadline(valuation, mecs.must_from.get(location, ())), cap)
                allowed = [d for d in delays if d.window.lo <= limit]
            else:
                allowed = delays
            for d in allowed:
                target = make(location, valuation.delay(d.window, cap), ACT_PHASE)
                may.append(Transition(state, d, target))
                if not urgent:
                    must.append(Transition(state, d, target))
        if not urgent or phase == ACT_PHASE:
            for edges, out in ((mecs.may_from, may), (mecs.must_from, must)):
                for e in edges.get(location, ()):
                    if constraint_sat(valuation, e.guard):
                        target = make(e.target, valuation.reset(e.action), DELAY_PHASE)
                        out.append(Transition(state, TimedLabel.act(e.action), target))
        return may, must

    initial = make(mecs.initial, IntervalValuation.zero(clocks), DELAY_PHASE)
    states = {initial}
    may: Set[Transition] = set()
    must: Set[Transition] = set()
    frontier = deque([initial])
    while frontier:
        state = frontier.popleft()
        new_may, new_must = expand(state)
        may.update(new_may)
        must.update(new_must)
        for t in new_may + new_must:
            if t.target not in states:
                if len(states) >= budget:
                    logger.error(f"Semantic state budget of {budget} exhausted")
                    raise BudgetExceededError("semantic states", budget)
                states.add(t.target)
                frontier.append(t.target)

    system = Smts(frozenset(states), initial, frozenset(may), frozenset(must), mecs.alphabet)
    logger.info(f"Semantics: {len(states)} states, {len(may)} may / {len(must)} must transitions "
                f"(cap={cap}, step={grid.step}, {delay_mode} delays, {timing} timing)")
    doomed = {s for s in states if s[0] in mecs.bad}
    if doomed:
        pruned = prune(system, doomed)
        if pruned is None:
            raise ConstructionError("The initial state of the semantics must reach a bad location")
        system = pruned
    return system


def mecs_distance(left: Mecs, right: Mecs, grid: Optional[GridConfig] = None,
                  clock_cap: Optional[int] = None, *, delay_mode: Optional[str] = None,
                  timing: Optional[str] = None) -> DistanceResult:
    """Refinement distance between the semantics of two MECS."""
    cap = clock_cap if clock_cap is not None else default_clock_cap(left, right)
    if grid is None:
        grid = mecs_grid(left, right, cap)
    sem_left = semantics(left, grid, cap, delay_mode=delay_mode, timing=timing)
    sem_right = semantics(right, grid, cap, delay_mode=delay_mode, timing=timing)
    return h_mod(sem_left, sem_right, grid)


def mecs_refines(left: Mecs, right: Mecs, grid: Optional[GridConfig] = None,
                 clock_cap: Optional[int] = None, *, delay_mode: Optional[str] = None,
                 timing: Optional[str] = None):
    cap = clock_cap if clock_cap is not None else default_clock_cap(left, right)
    sem_left = semantics(left, grid, cap, delay_mode=delay_mode, timing=timing)
    sem_right = semantics(right, grid, cap, delay_mode=delay_mode, timing=timing)
    return boolean_refines(sem_left, sem_right)


def strongly_deterministic(mecs: Mecs) -> bool:
    for edges in mecs.may_from.values():
        seen: Dict[str, Tuple] = {}
        for e in edges:
            if seen.setdefault(e.action, (e.guard, e.target)) != (e.guard, e.target):
                return False
    return True


# Guard regions

def _subtract_box(box: ClockConstraint, hole: ClockConstraint) -> List[ClockConstraint]:
    """Integer points of ``box`` outside ``hole``, as disjoint boxes."""
    if box.conjoin(hole) is None:
        return [box]
    pieces = []
    current = box.as_dict()
    for clock in sorted(box.clocks | hole.clocks):
        mine = box.get(clock) if clock not in current else current[clock]
        cut = hole.get(clock)
        if mine.lo <= cut.lo - 1:
            pieces.append(ClockConstraint.of({**current, clock: Interval(mine.lo, cut.lo - 1)}))
        if cut.is_bounded and cut.hi + 1 <= mine.hi:
            pieces.append(ClockConstraint.of({**current, clock: Interval(cut.hi + 1, mine.hi)}))
        current[clock] = mine.intersect(cut)
    return pieces


def guard_difference(box: ClockConstraint, holes: Iterable[ClockConstraint]) -> List[ClockConstraint]:
    """Integer-closed boxes covering the integer points of ``box`` outside every hole."""
    remaining = [box]
    for hole in holes:
        remaining = [piece for part in remaining for piece in _subtract_box(part, hole)]
    return sorted(set(remaining), key=str)


# Syntactic operators

def mecs_compose(left: Mecs, right: Mecs) -> Mecs:
    """Synchronized product with per-clock guard intersection."""
    may: Set[Edge] = set()
    must: Set[Edge] = set()
    initial = (left.initial, right.initial)
    seen = {initial}
    frontier = deque([initial])
    while frontier:
        pair = frontier.popleft()
        p, q = pair
        if (p in left.universal) != (q in right.universal):
            raise SemanticError(f"Cannot compose universal with ordinary location in {pair!r}")
        for edges_l, edges_r, out in ((left.may_from, right.may_from, may),
                                      (left.must_from, right.must_from, must)):
            for e in edges_l.get(p, ()):
                for f in edges_r.get(q, ()):
                    if e.action != f.action:
                        continue
                    guard = e.guard.conjoin(f.guard)
                    if guard is None:
                        continue
                    target = (e.target, f.target)
                    out.add(Edge(pair, e.action, guard, target))
                    if target not in seen:
                        seen.add(target)
                        frontier.append(target)
    return Mecs(
        left.alphabet | right.alphabet, frozenset(seen), initial, frozenset(may), frozenset(must),
        frozenset(pl for pl in seen if pl[0] in left.bad or pl[1] in right.bad),
        frozenset(pl for pl in seen if pl[0] in left.universal and pl[1] in right.universal),
    )


def _prune_locations(initial, locations: Set, may: Set[Edge], must: Set[Edge]):
    """
    Remove locations that must certainly reach BAD: those with a must edge
    under a trivially true guard into BAD or into a removed location.
    """
    removed: Set = set()
    changed = True
    while changed:
        changed = False
        for e in must:
            if (e.source not in removed and e.source != BAD and e.guard.is_true
                    and (e.target == BAD or e.target in removed)):
                removed.add(e.source)
                changed = True
    if initial in removed:
        return None
    kept_must = set()
    for e in must:
        if e.source in removed:
            continue
        kept_must.add(e._replace(target=BAD) if e.target in removed else e)
    kept_may = {e for e in may if e.source not in removed and e.target not in removed}
    kept_may |= {e for e in kept_must if e.target == BAD}
    return locations - removed, kept_may, kept_must


def _exists(mecs: Mecs) -> bool:
    try:
        cap = default_clock_cap(mecs)
        semantics(mecs, GridConfig(step=1, lead_bound=cap, value_cap=cap), cap,
                  delay_mode="point", timing="standard")
    except ConstructionError:
        return False
    return True


def _finish(alphabet, locations, initial, may, must, universal=frozenset()) -> Optional[Mecs]:
    pruned = _prune_locations(initial, set(locations), set(may), set(must))
    if pruned is None:
        logger.info("Construction pruned its initial location")
        return None
    locations, may, must = pruned
    bad = frozenset({BAD}) if any(e.target == BAD for e in must) else frozenset()
    if bad:
        locations = set(locations) | bad
    result = Mecs(frozenset(alphabet), frozenset(locations), initial, frozenset(may), frozenset(must),
                  bad, frozenset(universal) & frozenset(locations))
    if bad and not _exists(result):
        logger.info("Construction pruned its initial state")
        return None
    return result


def mecs_conjoin(left: Mecs, right: Mecs) -> Optional[Mecs]:
    """Greatest lower bound of two MECS, or None when it does not exist."""
    alphabet = left.alphabet | right.alphabet
    may: Set[Edge] = set()
    must: Set[Edge] = set()
    initial = (left.initial, right.initial)
    seen = {initial}
    frontier = deque([initial])

    def emit(out: Set[Edge], pair, e: Edge, f: Edge) -> None:
        guard = e.guard.conjoin(f.guard)
        if guard is None:
            return
        target = (e.target, f.target)
        out.add(Edge(pair, e.action, guard, target))
        if target not in seen:
            seen.add(target)
            frontier.append(target)

    def doom(pair, required: Sequence[Edge], allowed: Sequence[Edge]) -> None:
        for e in required:
            holes = [f.guard for f in allowed if f.action == e.action]
            for box in guard_difference(e.guard, holes):
                must.add(Edge(pair, e.action, box, BAD))
                may.add(Edge(pair, e.action, box, BAD))

    while frontier:
        pair = frontier.popleft()
        p, q = pair
        l_may, l_must = left.may_from.get(p, ()), left.must_from.get(p, ())
        r_may, r_must = right.may_from.get(q, ()), right.must_from.get(q, ())
        for e in l_may:
            for f in r_may:
                if e.action == f.action:
                    emit(may, pair, e, f)
        for e in l_must:
            for f in r_may:
                if e.action == f.action:
                    emit(must, pair, e, f)
        for e in l_may:
            for f in r_must:
                if e.action == f.action:
                    emit(must, pair, e, f)
        doom(pair, l_must, r_may)
        doom(pair, r_must, l_may)

    return _finish(alphabet, seen, initial, may, must)


def divide_guard(numerator: ClockConstraint, divisor: ClockConstraint) -> Optional[ClockConstraint]:
    """
    Per-clock quotient of guards, None when some clock has none.

    A valuation inside ``divisor`` satisfies the result exactly when it
    satisfies ``numerator``; outside ``divisor`` the result is as wide as
    the interval table allows.
    """
    result = {}
    for clock in numerator.clocks | divisor.clocks:
        window = quotient_window(numerator.get(clock), divisor.get(clock))
        if window is None:
            return None
        result[clock] = window
    return ClockConstraint.of(result)


def mecs_quotient(whole: Mecs, part: Mecs) -> Optional[Mecs]:
    """The most permissive X with ``part`` composed with X refining ``whole``."""
    if not strongly_deterministic(part):
        logger.warning("Quotient by a MECS that is not strongly deterministic")
    alphabet = whole.alphabet | part.alphabet
    may: Set[Edge] = {Edge(UNIV, action, ClockConstraint.true(), UNIV) for action in alphabet}
    must: Set[Edge] = set()
    initial = (whole.initial, part.initial)
    seen = {initial}
    frontier = deque([initial])
    while frontier:
        pair = frontier.popleft()
        t, s = pair
        for edges_w, edges_p, out, combine in (
                (whole.may_from, part.may_from, may, divide_guard),
                (whole.must_from, part.must_from, must, ClockConstraint.conjoin),
        ):
            for e in edges_w.get(t, ()):
                for f in edges_p.get(s, ()):
                    if e.action != f.action:
                        continue
                    guard = combine(e.guard, f.guard)
                    if guard is None:
                        continue
                    target = (e.target, f.target)
                    out.add(Edge(pair, e.action, guard, target))
                    if target not in seen:
                        seen.add(target)
                        frontier.append(target)
        part_must = part.must_from.get(s, ())
        for e in whole.must_from.get(t, ()):
            holes = [f.guard for f in part_must if f.action == e.action]
            for box in guard_difference(e.guard, holes):
                must.add(Edge(pair, e.action, box, BAD))
                may.add(Edge(pair, e.action, box, BAD))
        part_may = part.may_from.get(s, ())
        for action in sorted(alphabet):
            holes = [f.guard for f in part_may if f.action == action]
            for box in guard_difference(ClockConstraint.true(), holes):
                may.add(Edge(pair, action, box, UNIV))

    return _finish(alphabet, seen | {UNIV}, initial, may, must, universal={UNIV})


def mecs_widen(mecs: Mecs, n: int) -> Mecs:
    """Replace every guard by its n-extended constraint."""
    def relax(edges):
        return frozenset(e._replace(guard=e.guard.extend(n)) for e in edges)

    return Mecs(mecs.alphabet, mecs.locations, mecs.initial, relax(mecs.may), relax(mecs.must),
                mecs.bad, mecs.universal)


def mecs_is_widening(original: Mecs, relaxed: Mecs, n: int) -> bool:
    """
    Whether ``relaxed`` matches ``original`` edge for edge in both
    directions, each guard lying between the original and its n-extension.
    """
    def close(e: Edge, f: Edge) -> bool:
        return e.action == f.action and e.guard.within(f.guard) and f.guard.within(e.guard.extend(n))

    def matched(es, fs, relation) -> bool:
        return (all(any(close(e, f) and (e.target, f.target) in relation for f in fs) for e in es)
                and all(any(close(e, f) and (e.target, f.target) in relation for e in es) for f in fs))

    relation = {(p, q) for p in original.locations for q in relaxed.locations}
    changed = True
    while changed:
        changed = False
        for p, q in list(relation):
            if not (matched(original.may_from.get(p, ()), relaxed.may_from.get(q, ()), relation)
                    and matched(original.must_from.get(p, ()), relaxed.must_from.get(q, ()), relation)):
                relation.discard((p, q))
                changed = True
    return (original.initial, relaxed.initial) in relation


def minimal_widening(left: Mecs, right: Mecs, limit: Optional[int] = None) -> Optional[int]:
    """Smallest k for which the k-widenings of both operands have a conjunction."""
    if limit is None:
        limit = max(left.max_constant(), right.max_constant()) + 1
    for k in range(limit + 1):
        if mecs_conjoin(mecs_widen(left, k), mecs_widen(right, k)) is not None:
            logger.debug(f"Conjunction exists after widening by {k}")
            return k
    return None
