"""
A parsed specification file: named systems plus per-file settings.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Union

from app.exceptions import SemanticError
from app.models.mecs import Mecs
from app.models.smts import Smts

System = Union[Mecs, Smts]


@dataclass
class FileSettings:
    """Overrides from a ``settings { ... }`` block; None means use the defaults."""

    step: Optional[Fraction] = None
    clock_cap: Optional[int] = None
    lead_bound: Optional[Fraction] = None
    value_cap: Optional[Fraction] = None
    timing: Optional[str] = None
    delay_mode: Optional[str] = None

    def is_empty(self) -> bool:
        return all(value is None for value in vars(self).values())


@dataclass
class SpecFile:
    settings: FileSettings = field(default_factory=FileSettings)
    mecs: Dict[str, Mecs] = field(default_factory=dict)
    smts: Dict[str, Smts] = field(default_factory=dict)

    @property
    def names(self):
        return list(self.mecs) + list(self.smts)

    def get(self, name: str) -> System:
        if name in self.mecs:
            return self.mecs[name]
        if name in self.smts:
            return self.smts[name]
        raise SemanticError(f"No system named {name!r}")

    def add(self, name: str, system: System) -> None:
        if name in self.mecs or name in self.smts:
            raise SemanticError(f"Duplicate system name {name!r}")
        if isinstance(system, Mecs):
            self.mecs[name] = system
        else:
            self.smts[name] = system
