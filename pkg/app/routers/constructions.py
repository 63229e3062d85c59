"""
Construction API endpoints. Results come back in the text format so they
can be pasted into a specification file.
"""
from fractions import Fraction

from fastapi import APIRouter

from app.exceptions import ConfigurationError
from app.models.mecs import Mecs
from app.routers.schemas import PairRequest, SystemResponse, WidenRequest
from app.services.analysis_service import analysis_service

router = APIRouter()


def _response(name: str, system) -> SystemResponse:
    kind = "mecs" if isinstance(system, Mecs) else "smts"
    return SystemResponse(name=name, kind=kind, text=analysis_service.format_system(name, system))


@router.post("/compose", response_model=SystemResponse)
def compose(request: PairRequest):
    spec = analysis_service.load(request.spec)
    return _response(f"{request.left}_compose_{request.right}",
                     analysis_service.compose(spec, request.left, request.right))


@router.post("/quotient", response_model=SystemResponse)
def quotient(request: PairRequest):
    """409 when the quotient does not exist."""
    spec = analysis_service.load(request.spec)
    result = analysis_service.quotient(spec, request.left, request.right, request.options.to_options())
    return _response(f"{request.left}_quotient_{request.right}", result)


@router.post("/conjoin", response_model=SystemResponse)
def conjoin(request: PairRequest):
    spec = analysis_service.load(request.spec)
    return _response(f"{request.left}_conjoin_{request.right}",
                     analysis_service.conjoin(spec, request.left, request.right))


@router.post("/widen", response_model=SystemResponse)
def widen(request: WidenRequest):
    try:
        amount = Fraction(request.amount)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigurationError(f"amount is not a rational number: {request.amount!r}") from exc
    spec = analysis_service.load(request.spec)
    return _response(f"{request.name}_widen", analysis_service.widen(spec, request.name, amount))
