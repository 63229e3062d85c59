"""
Analysis API endpoints: checks, distances, refinement and exports.
"""
import logging
from typing import List, Optional

from fastapi import APIRouter
from pydantic import BaseModel

from app.routers.schemas import PairRequest, SingleRequest, SpecRequest
from app.services.analysis_service import analysis_service
from app.services.dsl import format_label
from app.services.export import DistanceExport, SmtsExport, distance_to_export, smts_to_export

logger = logging.getLogger(__name__)

router = APIRouter()


class SystemReportModel(BaseModel):
    name: str
    kind: str
    states: int
    consistent: bool
    deterministic: bool


class CheckResponse(BaseModel):
    systems: List[SystemReportModel]


class CounterexampleStepModel(BaseModel):
    pair: str
    modality: str
    label: str
    target: str
    answers: List[str]


class RefineResponse(BaseModel):
    refines: bool
    relation_size: Optional[int] = None
    counterexample: List[CounterexampleStepModel] = []


class DotResponse(BaseModel):
    dot: str


@router.post("/check", response_model=CheckResponse)
def check(request: SpecRequest):
    """Consistency and determinism of every system in the file."""
    spec = analysis_service.load(request.spec)
    return CheckResponse(systems=[SystemReportModel(**vars(r)) for r in analysis_service.check(spec)])


@router.post("/distance", response_model=DistanceExport)
def distance(request: PairRequest):
    spec = analysis_service.load(request.spec)
    result = analysis_service.distance(spec, request.left, request.right, request.options.to_options())
    return distance_to_export(result)


@router.post("/refine", response_model=RefineResponse)
def refine(request: PairRequest):
    spec = analysis_service.load(request.spec)
    witness = analysis_service.refine(spec, request.left, request.right, request.options.to_options())
    steps = [
        CounterexampleStepModel(
            pair=str(step.pair),
            modality=step.modality,
            label=format_label(step.label),
            target=str(step.target),
            answers=[f"{format_label(label)} -> {target}" for label, target in step.answers],
        )
        for step in witness.counterexample
    ]
    relation_size = len(witness.relation) if witness.relation is not None else None
    logger.info(f"Refinement {request.left} <= {request.right}: {witness.refines}")
    return RefineResponse(refines=witness.refines, relation_size=relation_size, counterexample=steps)


@router.post("/semantics", response_model=SmtsExport)
def semantics(request: SingleRequest):
    spec = analysis_service.load(request.spec)
    return smts_to_export(analysis_service.semantics(spec, request.name, request.options.to_options()))


@router.post("/dot", response_model=DotResponse)
def dot(request: SingleRequest):
    spec = analysis_service.load(request.spec)
    return DotResponse(dot=analysis_service.dot(spec, request.name))
