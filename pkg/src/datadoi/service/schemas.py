"""Pydantic request/response models for the HTTP surfaces."""

from __future__ import annotations

from pydantic import BaseModel, Field


class ErrorResponse(BaseModel):
    error: str
    detail: str


class ObservationModel(BaseModel):
    obs_id: str
    mission: str
    target_name: str
    instrument: str
    wavelength_band: str
    data_url: str


class QueryResponse(BaseModel):
    obs_ids: list[str]
    observations: list[ObservationModel]


class FixedProductModel(BaseModel):
    product_id: str
    kind: str
    title: str
    description: str
    landing_info_url: str
    assigned_doi: str


class ProductListResponse(BaseModel):
    products: list[FixedProductModel]


class MintRequest(BaseModel):
    creator_name: str
    creator_affiliation: str | None = None
    title: str
    description: str = ""
    obs_ids: list[str] = Field(min_length=1)


class RecordResponse(BaseModel):
    doi: str
    record: dict


class TargetUpdateRequest(BaseModel):
    url: str


class EditRequestModel(BaseModel):
    approval: str
    add_obs_ids: list[str] = Field(default_factory=list)
    remove_obs_ids: list[str] = Field(default_factory=list)
    title: str | None = None
    description: str | None = None


class SupersedeRequest(BaseModel):
    obs_ids: list[str] | None = None
    product_id: str | None = None
    title: str | None = None
    description: str | None = None


class RedirectRequest(BaseModel):
    replacement: str
    approval: str


class AssignFixedRequest(BaseModel):
    product_id: str


class ResolutionResponse(BaseModel):
    doi: str
    outcome: str
    redirect_to: str | None = None
    landing: dict | None = None


class LandingResponse(BaseModel):
    landing: dict
    kernel: dict


class PortalViewResponse(BaseModel):
    doi: str
    observation_count: int
    observations: list[ObservationModel]


class StartSessionRequest(BaseModel):
    author_email: str


class SessionResponse(BaseModel):
    session: dict


class AnswerRequest(BaseModel):
    answer: str
    message: str | None = None


class PathRequest(BaseModel):
    path: str


class PathResponse(BaseModel):
    session: dict
    menu: list[FixedProductModel]


class AttachRequest(BaseModel):
    doi: str


class CompleteResponse(BaseModel):
    record: dict


class EligibleRequest(BaseModel):
    eligible: bool = True


class ReasonRequest(BaseModel):
    reason: str
