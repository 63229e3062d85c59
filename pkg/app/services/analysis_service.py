"""
Analysis service shared by the command line and the HTTP API.

Numeric options resolve in order: explicit argument, the file's settings
block, then application settings.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from app.config import settings
from app.exceptions import ConstructionError, SemanticError
from app.models.lattice import GridConfig
from app.models.mecs import Mecs
from app.models.smts import DistanceResult, RefinementWitness, Smts
from app.models.specfile import FileSettings, SpecFile
from app.services import mecs as mecs_ops
from app.services import operators
from app.services.dsl import format_mecs, format_smts, parse_spec
from app.services.export import to_dot
from app.services.refinement import (
    boolean_refines,
    check_consistency,
    default_grid,
    h_mod,
    is_deterministic,
)

logger = logging.getLogger(__name__)

System = Union[Smts, Mecs]


@dataclass(frozen=True)
class AnalysisOptions:
    """Per-request overrides; None falls back to the file, then to settings."""

    step: Optional[Fraction] = None
    lead_bound: Optional[Fraction] = None
    value_cap: Optional[Fraction] = None
    clock_cap: Optional[int] = None
    delay_mode: Optional[str] = None
    timing: Optional[str] = None

    def merged(self, defaults: FileSettings) -> "AnalysisOptions":
        updates = {f.name: getattr(defaults, f.name) for f in fields(self)
                   if getattr(self, f.name) is None}
        return replace(self, **updates)

    @property
    def grid_step(self) -> Fraction:
        return Fraction(self.step) if self.step is not None else settings.step


@dataclass(frozen=True)
class SystemReport:
    name: str
    kind: str
    states: int
    consistent: bool
    deterministic: bool


class AnalysisService:
    """Runs the operations of a specification file."""

    def load(self, text: str) -> SpecFile:
        spec = parse_spec(text)
        logger.info(f"Loaded {len(spec.mecs)} MECS and {len(spec.smts)} SMTS")
        return spec

    def check(self, spec: SpecFile) -> List[SystemReport]:
        reports = []
        for name, mecs in spec.mecs.items():
            reports.append(SystemReport(name, "mecs", len(mecs.locations), not mecs.check_consistency(),
                                        mecs_ops.strongly_deterministic(mecs)))
        for name, smts in spec.smts.items():
            reports.append(SystemReport(name, "smts", len(smts.states), not check_consistency(smts),
                                        is_deterministic(smts)))
        return reports

    def _pair(self, spec: SpecFile, left: str, right: str) -> Tuple[System, System]:
        a, b = spec.get(left), spec.get(right)
        if isinstance(a, Mecs) != isinstance(b, Mecs):
            raise SemanticError(f"{left} and {right} must both be MECS or both be SMTS")
        return a, b

    def _grid(self, options: AnalysisOptions, fallback: GridConfig) -> GridConfig:
        if options.lead_bound is None and options.value_cap is None:
            return fallback
        lead_bound = options.lead_bound if options.lead_bound is not None else fallback.lead_bound
        value_cap = options.value_cap if options.value_cap is not None else lead_bound
        return GridConfig(step=options.grid_step, lead_bound=lead_bound, value_cap=value_cap)

    def _clock_cap(self, options: AnalysisOptions, *systems: Mecs) -> int:
        if options.clock_cap is not None:
            return options.clock_cap
        return mecs_ops.default_clock_cap(*systems)

    def distance(self, spec: SpecFile, left: str, right: str,
                 options: AnalysisOptions = AnalysisOptions()) -> DistanceResult:
        options = options.merged(spec.settings)
        a, b = self._pair(spec, left, right)
        if isinstance(a, Mecs):
            cap = self._clock_cap(options, a, b)
            grid = self._grid(options, mecs_ops.mecs_grid(a, b, cap, options.grid_step))
            result = mecs_ops.mecs_distance(a, b, grid, cap, delay_mode=options.delay_mode,
                                            timing=options.timing)
        else:
            grid = self._grid(options, default_grid(a, b, options.grid_step))
            result = h_mod(a, b, grid)
        logger.info(f"d({left}, {right}) = {result.value}")
        return result

    def refine(self, spec: SpecFile, left: str, right: str,
               options: AnalysisOptions = AnalysisOptions()) -> RefinementWitness:
        options = options.merged(spec.settings)
        a, b = self._pair(spec, left, right)
        if isinstance(a, Mecs):
            return boolean_refines(self._semantics(a, options, b), self._semantics(b, options, a))
        return boolean_refines(a, b)

    def _semantics(self, mecs: Mecs, options: AnalysisOptions, *others: Mecs) -> Smts:
        cap = self._clock_cap(options, mecs, *others)
        grid = GridConfig(step=options.grid_step, lead_bound=max(cap, 1), value_cap=max(cap, 1))
        return mecs_ops.semantics(mecs, grid, cap, delay_mode=options.delay_mode, timing=options.timing)

    def semantics(self, spec: SpecFile, name: str,
                  options: AnalysisOptions = AnalysisOptions()) -> Smts:
        system = spec.get(name)
        if not isinstance(system, Mecs):
            raise SemanticError(f"{name} is already an SMTS")
        return self._semantics(system, options.merged(spec.settings))

    def compose(self, spec: SpecFile, left: str, right: str) -> System:
        a, b = self._pair(spec, left, right)
        if isinstance(a, Mecs):
            return mecs_ops.mecs_compose(a, b)
        return operators.compose(a, b)

    def quotient(self, spec: SpecFile, whole: str, part: str,
                 options: AnalysisOptions = AnalysisOptions()) -> System:
        options = options.merged(spec.settings)
        a, b = self._pair(spec, whole, part)
        if isinstance(a, Mecs):
            result = mecs_ops.mecs_quotient(a, b)
        else:
            result = operators.quotient(a, b, self._grid(options, default_grid(a, b, options.grid_step)))
        if result is None:
            raise ConstructionError(f"The quotient of {whole} by {part} does not exist")
        return result

    def conjoin(self, spec: SpecFile, left: str, right: str) -> System:
        a, b = self._pair(spec, left, right)
        result = mecs_ops.mecs_conjoin(a, b) if isinstance(a, Mecs) else operators.conjoin(a, b)
        if result is None:
            raise ConstructionError(f"The conjunction of {left} and {right} does not exist")
        return result

    def widen(self, spec: SpecFile, name: str, amount: Fraction) -> System:
        system = spec.get(name)
        if isinstance(system, Mecs):
            if Fraction(amount).denominator != 1:
                raise SemanticError("MECS guards widen by whole numbers only")
            return mecs_ops.mecs_widen(system, int(amount))
        return operators.widen(system, Fraction(amount))

    def dot(self, spec: SpecFile, name: str) -> str:
        return to_dot(spec.get(name), name)

    @staticmethod
    def format_system(name: str, system: System) -> str:
        return format_mecs(name, system) if isinstance(system, Mecs) else format_smts(name, system)


analysis_service = AnalysisService()
