"""FastAPI application exposing the verification toolkit."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import ConditioningError, PreconditionError
from . import handlers, schemas


def _error_response(code: str, message: str, status: int) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"error": {"code": code, "message": message}},
    )


def create_app() -> FastAPI:
    app = FastAPI(
        title="siegel verification service",
        version=__version__,
        description=(
            "Exact and numerical verification endpoints for genus-2 paramodular "
            "group arithmetic, theta constants, modular-surface intersection "
            "numbers and Voronoi cone smoothness."
        ),
    )

    @app.exception_handler(PreconditionError)
    async def _precondition(request: Request, exc: PreconditionError):
        return _error_response("precondition", str(exc), 422)

    @app.exception_handler(ConditioningError)
    async def _conditioning(request: Request, exc: ConditioningError):
        return _error_response("conditioning", str(exc), 422)

    @app.get("/")
    def root():
        return {"service": "siegel-verify", "version": __version__}

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/groups/member", response_model=schemas.MemberResponse)
    def groups_member(req: schemas.MemberRequest):
        return handlers.groups_member(req)

    @app.post("/groups/cosets", response_model=schemas.CosetsResponse)
    def groups_cosets(req: schemas.CosetsRequest):
        return handlers.groups_cosets(req)

    @app.post("/cusps/stab", response_model=schemas.StabResponse)
    def cusps_stab(req: schemas.StabRequest):
        return handlers.cusps_stab(req)

    @app.post("/cusps/counts", response_model=schemas.CountsResponse)
    def cusps_counts(req: schemas.CountsRequest):
        return handlers.cusps_counts(req)

    @app.post("/theta/eval", response_model=schemas.EvalResponse)
    def theta_eval(req: schemas.ThetaEvalRequest):
        return handlers.theta_eval(req)

    @app.post("/theta/delta10", response_model=schemas.EvalResponse)
    def theta_delta10(req: schemas.TauFields):
        return handlers.theta_delta10(req)

    @app.post("/theta/f0", response_model=schemas.F0Response)
    def theta_f0(req: schemas.F0Request):
        return handlers.theta_f0(req)

    @app.post("/theta/order", response_model=schemas.OrderResponse)
    def theta_order(req: schemas.OrderRequest):
        return handlers.theta_order(req)

    @app.post("/invariants/table", response_model=schemas.TableResponse)
    def invariants_table(req: schemas.TableRequest):
        return handlers.invariants_table(req)

    @app.post("/invariants/prop22")
    def invariants_prop22(req: schemas.Prop22Request):
        return handlers.invariants_prop22(req)

    @app.post("/invariants/ample", response_model=schemas.AmpleResponse)
    def invariants_ample(req: schemas.AmpleRequest):
        return handlers.invariants_ample(req)

    @app.post("/invariants/claims", response_model=schemas.ClaimsResponse)
    def invariants_claims(req: schemas.ClaimsRequest):
        return handlers.invariants_claims(req)

    @app.post("/voronoi/basic", response_model=schemas.BasicResponse)
    def voronoi_basic(req: schemas.BasicRequest):
        return handlers.voronoi_basic(req)

    @app.post("/voronoi/smooth")
    def voronoi_smooth(req: schemas.SmoothRequest):
        return handlers.voronoi_smooth(req)

    @app.post("/verify")
    def verify(req: schemas.VerifyRequest):
        return handlers.run_verify(req)

    return app


app = create_app()
