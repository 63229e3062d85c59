"""
Depth-bounded implementation enumeration and the thorough-distance oracle.

Only meant for small systems in tests: both grow exponentially.
"""
from __future__ import annotations

import itertools
import logging
from typing import Dict, FrozenSet, List, Optional, Tuple

from app.config import settings
from app.exceptions import BudgetExceededError
from app.models.labels import TimedLabel
from app.models.lattice import Extended, GridConfig
from app.models.smts import Smts, State, Transition
from app.services.labels import implementations_of
from app.services.refinement import h_mod

logger = logging.getLogger(__name__)

# A tree implementation: the set of (label, subtree) branches at its root.
Tree = FrozenSet[Tuple[TimedLabel, "Tree"]]


class _Enumerator:
    def __init__(self, system: Smts, grid: GridConfig, budget: int) -> None:
        self.system = system
        self.grid = grid
        self.budget = budget
        self.produced = 0
        self.memo: Dict[Tuple[State, int], List[Tree]] = {}

    def trees(self, state: State, depth: int) -> List[Tree]:
        key = (state, depth)
        if key in self.memo:
            return self.memo[key]
        if depth == 0:
            result = [frozenset()]
        else:
            musts = self.system.must_from.get(state, ())
            optional = [t for t in self.system.may_from.get(state, ()) if t not in set(musts)]
            options = [self._branches(t, depth) for t in musts]
            options += [[None] + self._branches(t, depth) for t in optional]
            result = []
            for choice in itertools.product(*options):
                result.append(frozenset(b for b in choice if b is not None))
                self.produced += 1
                if self.produced > self.budget:
                    logger.error(f"Implementation enumeration exceeded {self.budget} trees")
                    raise BudgetExceededError("implementation enumeration", self.budget)
        self.memo[key] = result
        return result

    def _branches(self, transition: Transition, depth: int) -> List[Tuple[TimedLabel, Tree]]:
        children = self.trees(transition.target, depth - 1)
        return [(label, child)
                for label in sorted(implementations_of(transition.label, self.grid))
                for child in children]


def tree_to_smts(tree: Tree) -> Smts:
    transitions = []
    counter = itertools.count()

    def walk(node: Tree) -> int:
        me = next(counter)
        for label, child in sorted(node, key=lambda branch: (branch[0], repr(branch[1]))):
            transitions.append((me, label, walk(child)))
        return me

    root = walk(tree)
    return Smts.implementation(root, transitions, states={root})


def enumerate_implementations(system: Smts, depth: int, grid: GridConfig,
                              budget: Optional[int] = None) -> FrozenSet[Smts]:
    """
    Tree implementations of ``system`` unfolded to ``depth`` steps: every
    must transition is taken, every other may transition is taken or not,
    each with one grid implementation of its label.
    """
    enumerator = _Enumerator(system, grid, budget or settings.enumeration_budget)
    trees = enumerator.trees(system.initial, depth)
    return frozenset(tree_to_smts(tree) for tree in trees)


def thorough_distance_oracle(left: Smts, right: Smts, depth: int, grid: GridConfig,
                             budget: Optional[int] = None) -> Extended:
    """sup over implementations of ``left`` of inf over those of ``right`` of their distance."""
    lefts = enumerate_implementations(left, depth, grid, budget)
    rights = enumerate_implementations(right, depth, grid, budget)
    logger.info(f"Thorough oracle over {len(lefts)} x {len(rights)} implementations")
    return max(min(h_mod(i, j, grid).value for j in rights) for i in lefts)
