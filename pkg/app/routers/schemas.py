"""
Request and response models shared by the analysis and construction routers.
"""
from fractions import Fraction
from typing import Literal, Optional

from pydantic import BaseModel, Field

from app.exceptions import ConfigurationError
from app.services.analysis_service import AnalysisOptions


def _rational(name: str, text: Optional[str]) -> Optional[Fraction]:
    if text is None:
        return None
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigurationError(f"{name} is not a rational number: {text!r}") from exc


class GridOptions(BaseModel):
    """Optional overrides of the file's settings block. Rationals are strings like "1/2"."""

    step: Optional[str] = None
    lead_bound: Optional[str] = None
    value_cap: Optional[str] = None
    clock_cap: Optional[int] = Field(default=None, ge=0)
    delay_mode: Optional[Literal["point", "interval"]] = None
    timing: Optional[Literal["standard", "urgent"]] = None

    def to_options(self) -> AnalysisOptions:
        return AnalysisOptions(
            step=_rational("step", self.step),
            lead_bound=_rational("lead_bound", self.lead_bound),
            value_cap=_rational("value_cap", self.value_cap),
            clock_cap=self.clock_cap,
            delay_mode=self.delay_mode,
            timing=self.timing,
        )


class SpecRequest(BaseModel):
    """A specification file sent inline."""
    spec: str


class SingleRequest(SpecRequest):
    name: str
    options: GridOptions = GridOptions()


class PairRequest(SpecRequest):
    left: str
    right: str
    options: GridOptions = GridOptions()


class WidenRequest(SingleRequest):
    amount: str = "1"


class SystemResponse(BaseModel):
    """A constructed system in the text format."""
    name: str
    kind: str
    text: str
