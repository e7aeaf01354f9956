"""Pydantic request/response models for the verification service.

Matrices travel as arrays of arrays of exact "p/q" strings; Siegel points as
three [re, im] pairs (tau1, tau2, tau3).
"""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field

Matrix = list[list[str]]
ComplexPair = list[float]


class GroupSpecFields(BaseModel):
    d: int = Field(ge=1)
    n: int = Field(default=1, ge=1)
    flavor: str = "plain"
    coords: str = "rational"


class MemberRequest(GroupSpecFields):
    matrix: Matrix


class MemberResponse(BaseModel):
    member: bool
    pattern: bool
    dual_action: Optional[list[list[int]]] = None


class CosetsRequest(BaseModel):
    d: int = Field(ge=1)


class CosetsResponse(BaseModel):
    d: int
    mu: int
    reps: list[Matrix]


class StabRequest(GroupSpecFields):
    line: Optional[list[int]] = None
    plane: Optional[list[list[int]]] = None


class StabResponse(BaseModel):
    rank: int
    basis: list
    elementary_divisors_vs_reference: list[str]
    direction: str
    frame_b_block_zero: bool


class CountsRequest(BaseModel):
    p: int


class CountsResponse(BaseModel):
    central_lines: int
    peripheral_lines: int
    planes: int


class TauFields(BaseModel):
    tau: list[ComplexPair]
    tol: float = Field(default=1e-12, gt=0)
    precision_digits: int = Field(default=30, ge=10, le=200)


class ThetaEvalRequest(TauFields):
    char: list[int] = Field(min_length=4, max_length=4)


class EvalResponse(BaseModel):
    value: ComplexPair
    tail_bound: float
    terms_used: int


class F0Request(TauFields):
    d: int = Field(default=1, ge=1)


class F0Response(EvalResponse):
    weight: int


class OrderRequest(BaseModel):
    tau: list[ComplexPair]
    ladder: list[float] = Field(default=[1e-1, 1e-2, 1e-3, 1e-4])
    precision_digits: int = Field(default=40, ge=10, le=200)


class OrderResponse(BaseModel):
    slope: float


class TableRequest(BaseModel):
    k_min: int = Field(default=3, ge=3)
    k_max: int = Field(default=60, ge=3)


class TableRow(BaseModel):
    k: int
    t: int
    genus: int
    deg_l: str


class TableResponse(BaseModel):
    rows: list[TableRow]


class Prop22Request(BaseModel):
    n: int
    p: int


class AmpleRequest(BaseModel):
    n: int = Field(ge=3)


class AmpleResponse(BaseModel):
    kc: str
    ample_boundary: bool


class ClaimsRequest(BaseModel):
    n: int = Field(ge=1)
    d: int = Field(ge=1)


class ClaimsResponse(BaseModel):
    k_decomposition: dict
    l_coefficient_positive: bool
    discrepancy_ok: bool


class BasicRequest(BaseModel):
    lattice: list[list[str]] = Field(min_length=3, max_length=3)
    cone: Optional[list[list[str]]] = None


class BasicResponse(BaseModel):
    basic: bool
    det: str


class SmoothRequest(BaseModel):
    p: int
    n: int


class VerifyRequest(BaseModel):
    seed: int = 0
    precision_digits: int = Field(default=30, ge=10, le=200)
    members_per_spec: int = Field(default=200, ge=1)
    geometries: int = Field(default=20, ge=1)
    modularity_samples: int = Field(default=20, ge=1)
    invariance_samples: int = Field(default=10, ge=1)


class ErrorBody(BaseModel):
    code: str
    message: str


class ErrorResponse(BaseModel):
    error: ErrorBody
