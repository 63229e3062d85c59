"""
Modal refinement and the maximum-lead refinement distance.
"""
from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np

from app.models.labels import TimedLabel
from app.models.lattice import Extended, GridConfig, LeadFunction, to_fraction
from app.models.smts import (
    CounterexampleStep,
    DistanceResult,
    Pair,
    RefinementWitness,
    Smts,
    Transition,
    state_key,
)
from app.services.labels import _abs_codes, f_codes, label_refines, window_units
from app.services.lattice import add_codes

logger = logging.getLogger(__name__)


def check_consistency(system: Smts) -> List[Transition]:
    """Must transitions that no may transition covers."""
    violations = []
    for t in sorted(system.must, key=lambda t: (state_key(t.source), t.label, state_key(t.target))):
        covered = any(
            m.target == t.target and label_refines(t.label, m.label)
            for m in system.may_from.get(t.source, ())
        )
        if not covered:
            violations.append(t)
    return violations


def is_deterministic(system: Smts) -> bool:
    """At most one window and one target per action for the may transitions of each state."""
    for transitions in system.may_from.values():
        seen: Dict[str, Tuple] = {}
        for t in transitions:
            key = (t.label.window, t.target)
            if seen.setdefault(t.label.action, key) != key:
                return False
    return True


def largest_constant(*systems: Smts) -> Fraction:
    constant = Fraction(0)
    for system in systems:
        for label in system.labels():
            constant = max(constant, label.window.lo)
            if label.window.is_bounded:
                constant = max(constant, label.window.hi)
    return constant


def default_grid(left: Smts, right: Smts, step: Fraction = Fraction(1),
                 constant: Optional[Fraction] = None, pairs: Optional[int] = None) -> GridConfig:
    """
    Lead bound and value cap of (largest constant + 1) * (state pairs + 1),
    rounded up to the grid.
    """
    step = to_fraction(step)
    if constant is None:
        constant = largest_constant(left, right)
    if pairs is None:
        pairs = len(left.states) * len(right.states)
    bound = (to_fraction(constant) + 1) * (pairs + 1)
    bound = math.ceil(bound / step) * step
    return GridConfig(step=step, lead_bound=bound, value_cap=bound)


# Modal refinement

def _refinement_pairs(left: Smts, right: Smts) -> List[Pair]:
    start = (left.initial, right.initial)
    seen = {start}
    order = [start]
    frontier = deque([start])
    while frontier:
        s, t = frontier.popleft()
        successors = [
            (k.target, l.target)
            for k in left.may_from.get(s, ())
            for l in right.may_from.get(t, ())
            if label_refines(k.label, l.label)
        ] + [
            (k.target, l.target)
            for l in right.must_from.get(t, ())
            for k in left.must_from.get(s, ())
            if label_refines(k.label, l.label)
        ]
        for pair in successors:
            if pair not in seen:
                seen.add(pair)
                order.append(pair)
                frontier.append(pair)
    return order


def _failure(left: Smts, right: Smts, pair: Pair, relation: Set[Pair]) -> Optional[CounterexampleStep]:
    s, t = pair
    for k in left.may_from.get(s, ()):
        answers = tuple((l.label, l.target) for l in right.may_from.get(t, ())
                        if label_refines(k.label, l.label))
        if not any((k.target, target) in relation for _, target in answers):
            return CounterexampleStep(pair, "may", k.label, k.target, answers)
    for l in right.must_from.get(t, ()):
        answers = tuple((k.label, k.target) for k in left.must_from.get(s, ())
                        if label_refines(k.label, l.label))
        if not any((source, l.target) in relation for _, source in answers):
            return CounterexampleStep(pair, "must", l.label, l.target, answers)
    return None


def _answer_pair(step: CounterexampleStep, answer_target) -> Pair:
    if step.modality == "may":
        return step.target, answer_target
    return answer_target, step.target


def boolean_refines(left: Smts, right: Smts) -> RefinementWitness:
    """
    Greatest modal refinement relation between ``left`` and ``right``.

    Pairs are removed round by round; on failure the counterexample follows,
    from the initial pair, the answer that survived longest.
    """
    relation = set(_refinement_pairs(left, right))
    removed: Dict[Pair, Tuple[int, CounterexampleStep]] = {}
    rounds = 0
    while True:
        rounds += 1
        failing = {}
        for pair in relation:
            step = _failure(left, right, pair, relation)
            if step is not None:
                failing[pair] = step
        if not failing:
            break
        for pair, step in failing.items():
            relation.discard(pair)
            removed[pair] = (rounds, step)

    initial = (left.initial, right.initial)
    if initial in relation:
        logger.debug(f"Refinement holds after {rounds} rounds with {len(relation)} pairs")
        return RefinementWitness(True, frozenset(relation))

    path = []
    pair = initial
    while pair in removed:
        _, step = removed[pair]
        path.append(step)
        candidates = [_answer_pair(step, target) for _, target in step.answers]
        candidates = [p for p in candidates if p in removed]
        if not candidates:
            break
        pair = max(candidates, key=lambda p: (removed[p][0], state_key(p)))
    return RefinementWitness(False, None, tuple(path))


# Refinement distance

@dataclass
class _Block:
    """One sup-inf term of the distance equations at a state pair."""

    point: bool
    # point blocks
    shift: Optional[np.ndarray] = None      # (outer, inner) lead offsets t - t'
    match: Optional[np.ndarray] = None      # (outer, inner) action agreement
    rows: Optional[np.ndarray] = None       # (outer, inner) successor row, -1 for none
    # generic blocks: per outer transition, the (left label, right label, row) answers
    terms: Optional[List[List[Tuple[TimedLabel, TimedLabel, int]]]] = None


class _DistanceSolver:
    """Kleene iteration of the distance equations over reachable state pairs."""

    def __init__(self, left: Smts, right: Smts, grid: GridConfig) -> None:
        self.left = left
        self.right = right
        self.grid = grid
        self.pairs: List[Pair] = []
        self.index: Dict[Pair, int] = {}
        self._explore()
        self.blocks = [self._blocks(pair) for pair in self.pairs]

    def _explore(self) -> None:
        start = (self.left.initial, self.right.initial)
        self._add(start)
        frontier = deque([start])
        while frontier:
            s, t = frontier.popleft()
            for pair in self._successors(s, t):
                if pair not in self.index:
                    self._add(pair)
                    frontier.append(pair)

    def _add(self, pair: Pair) -> None:
        self.index[pair] = len(self.pairs)
        self.pairs.append(pair)

    def _successors(self, s, t):
        for k in self.left.may_from.get(s, ()):
            for l in self.right.may_from.get(t, ()):
                if k.label.action == l.label.action:
                    yield k.target, l.target
        for l in self.right.must_from.get(t, ()):
            for k in self.left.must_from.get(s, ()):
                if k.label.action == l.label.action:
                    yield k.target, l.target

    def _blocks(self, pair: Pair) -> Tuple[_Block, _Block]:
        s, t = pair
        may = self._block(self.left.may_from.get(s, ()), self.right.may_from.get(t, ()), left_outer=True)
        must = self._block(self.right.must_from.get(t, ()), self.left.must_from.get(s, ()), left_outer=False)
        return may, must

    def _block(self, outer: Sequence[Transition], inner: Sequence[Transition], left_outer: bool) -> _Block:
        def orient(o: Transition, i: Transition):
            # (left transition, right transition)
            return (o, i) if left_outer else (i, o)

        def row(o: Transition, i: Transition) -> int:
            k, l = orient(o, i)
            if k.label.action != l.label.action:
                return -1
            return self.index[(k.target, l.target)]

        if all(t.label.is_implementation for t in list(outer) + list(inner)):
            shape = (len(outer), len(inner))
            shift = np.zeros(shape, dtype=np.int64)
            match = np.zeros(shape, dtype=bool)
            rows = np.full(shape, -1, dtype=np.int64)
            for a, o in enumerate(outer):
                for b, i in enumerate(inner):
                    k, l = orient(o, i)
                    shift[a, b] = self.grid.units(k.label.window.lo) - self.grid.units(l.label.window.lo)
                    match[a, b] = k.label.action == l.label.action
                    rows[a, b] = row(o, i)
            return _Block(True, shift=shift, match=match, rows=rows)

        for t in list(outer) + list(inner):
            window_units(t.label, self.grid)  # alignment check
        terms = []
        for o in outer:
            answers = []
            for i in inner:
                k, l = orient(o, i)
                if k.label.action == l.label.action:
                    answers.append((k.label, l.label, row(o, i)))
            terms.append(answers)
        return _Block(False, terms=terms)

    def dependents(self) -> List[Set[int]]:
        depends: List[Set[int]] = [set() for _ in self.pairs]
        for p, blocks in enumerate(self.blocks):
            for block in blocks:
                if block.point:
                    used = block.rows[block.match]
                else:
                    used = [row for answers in block.terms for _, _, row in answers]
                for q in used:
                    depends[int(q)].add(p)
        return depends

    def evaluate(self, block: _Block, table: np.ndarray) -> np.ndarray:
        grid = self.grid
        if block.point:
            return self._evaluate_points(block, table)
        result = np.zeros(grid.size, dtype=np.int64)
        for answers in block.terms:
            best = np.full(grid.size, grid.top_code, dtype=np.int64)
            for k, l, row in answers:
                best = np.minimum(best, f_codes(k, l, table[row], grid))
            result = np.maximum(result, best)
        return result

    def _evaluate_points(self, block: _Block, table: np.ndarray) -> np.ndarray:
        grid = self.grid
        outer, inner = block.shift.shape
        if outer == 0:
            return np.zeros(grid.size, dtype=np.int64)
        if inner == 0:
            return np.full(grid.size, grid.top_code, dtype=np.int64)
        # table carries a trailing zero row, so row -1 is harmless before masking
        lifted = np.maximum(_abs_codes(grid), table[block.rows])
        width = min(int(np.abs(block.shift).max()), grid.size)
        padded = np.pad(lifted, ((0, 0), (0, 0), (width, width)), constant_values=grid.inf_code)
        positions = np.arange(grid.size)[None, None, :] + block.shift[:, :, None] + width
        positions = np.clip(positions, 0, padded.shape[2] - 1)
        values = np.take_along_axis(padded, positions, axis=2)
        values[~block.match] = grid.top_code
        return values.min(axis=1).max(axis=0)

    def solve(self) -> Tuple[np.ndarray, int]:
        grid = self.grid
        table = np.zeros((len(self.pairs) + 1, grid.size), dtype=np.int64)
        depends = self.dependents()
        queue = deque(range(len(self.pairs) - 1, -1, -1))
        queued = set(queue)
        iterations = 0
        while queue:
            p = queue.popleft()
            queued.discard(p)
            iterations += 1
            may, must = self.blocks[p]
            updated = np.maximum(self.evaluate(may, table), self.evaluate(must, table))
            if not np.array_equal(updated, table[p]):
                table[p] = updated
                for q in depends[p]:
                    if q not in queued:
                        queued.add(q)
                        queue.append(q)
        return table[:-1], iterations


def h_mod(left: Smts, right: Smts, grid: Optional[GridConfig] = None) -> DistanceResult:
    """
    Least fixed point of the refinement-distance equations.

    Only state pairs reachable through action-matching transitions are
    tabulated; every other pair is irrelevant to the initial pair.
    """
    if grid is None:
        grid = default_grid(left, right)
    solver = _DistanceSolver(left, right, grid)
    table, iterations = solver.solve()
    initial = table[0]
    code = int(initial[grid.half_width])
    value = grid.decode(code)
    # A finite answer within the cap is exact unless leads could leave the grid below the cap.
    saturated = code == grid.inf_code or (
        grid.lead_bound < grid.value_cap and bool(np.any(table == grid.inf_code)))
    logger.info(
        f"Distance fixed point over {len(solver.pairs)} pairs after {iterations} updates: "
        f"value={value}{' (saturated)' if saturated else ''}"
    )
    lookup = {pair: LeadFunction(grid, table[i]) for i, pair in enumerate(solver.pairs)}
    return DistanceResult(value, lookup, iterations, saturated, grid)


def d_mod(left: Smts, right: Smts, grid: Optional[GridConfig] = None) -> Extended:
    return h_mod(left, right, grid).value


def is_widening(left: Smts, right: Smts, bound: LeadFunction) -> bool:
    """
    Whether ``right`` relaxes ``left`` transition for transition, with every
    relaxed label within ``bound`` of its original (up to the lead itself).

    At every related pair the may transitions, and separately the must
    transitions, are paired off one to one.
    """
    grid = bound.grid
    allowance = add_codes(_abs_codes(grid), bound.codes, grid)

    def close(k: TimedLabel, l: TimedLabel) -> bool:
        if not label_refines(k, l):
            return False
        distance = f_codes(l, k, np.zeros(grid.size, dtype=np.int64), grid)
        return bool(np.all(np.minimum(distance, grid.inf_code) <= np.minimum(allowance, grid.inf_code)))

    def matched(ks: Sequence[Transition], ls: Sequence[Transition], relation) -> bool:
        if len(ks) != len(ls):
            return False
        if not ks:
            return True
        graph = nx.Graph()
        originals = [("k", i) for i in range(len(ks))]
        graph.add_nodes_from(originals)
        graph.add_nodes_from(("l", j) for j in range(len(ls)))
        for i, k in enumerate(ks):
            for j, l in enumerate(ls):
                if (k.target, l.target) in relation and close(k.label, l.label):
                    graph.add_edge(("k", i), ("l", j))
        matching = nx.bipartite.maximum_matching(graph, top_nodes=originals)
        return len(matching) == 2 * len(ks)

    relation = {(s, t) for s in left.states for t in right.states}
    changed = True
    while changed:
        changed = False
        for s, t in list(relation):
            ok = (matched(left.may_from.get(s, ()), right.may_from.get(t, ()), relation)
                  and matched(left.must_from.get(s, ()), right.must_from.get(t, ()), relation))
            if not ok:
                relation.discard((s, t))
                changed = True
    return (left.initial, right.initial) in relation
