"""HTTP surface: the archive service (catalog + registry + resolver) and the
submission-workflow service, sharing one application context."""

from __future__ import annotations

from dataclasses import dataclass

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import HTMLResponse, JSONResponse, RedirectResponse

from .. import catalog as catalog_mod
from .. import registry as registry_mod
from .. import workflow as workflow_mod
from ..catalog import ObservationCatalog, QueryCriteria
from ..config import ServiceConfig
from ..identifiers import MalformedDoi, format_doi, parse_doi
from ..metadata import Creator, kernel_to_document
from ..registry import CustomDataSet, DoiRegistry, EditRequest, FixedDataSet
from ..resolver import (
    NotACustomDoi,
    ResolutionOutcome,
    landing_html,
    portal_dataset_view,
    portal_view_html,
    render_landing,
    resolve,
)
from ..workflow import (
    DataAnswer,
    NonComplianceReason,
    PathOption,
    SubmissionWorkflow,
)
from . import schemas

__all__ = ["AppContext", "build_context", "build_archive_app", "build_workflow_app"]


@dataclass
class AppContext:
    config: ServiceConfig
    catalog: ObservationCatalog
    registry: DoiRegistry
    workflow: SubmissionWorkflow
    ra_client: object | None = None


def build_context(
    config: ServiceConfig,
    catalog: ObservationCatalog,
    *,
    ra_client=None,
    journal_path=None,
    session_log_path=None,
    rng=None,
) -> AppContext:
    registry = DoiRegistry(
        catalog,
        prefix=config.prefix,
        portal_base_url=config.resolver_base_url,
        publisher=config.publisher,
        journal_path=journal_path,
        ra_client=ra_client,
        rng=rng,
    )
    workflow = SubmissionWorkflow(
        registry,
        catalog,
        allowed_domains=config.allowed_domains,
        question_wording=config.question_wording,
        log_path=session_log_path,
    )
    return AppContext(
        config=config,
        catalog=catalog,
        registry=registry,
        workflow=workflow,
        ra_client=ra_client,
    )


_ERROR_STATUS: list[tuple[type[Exception], int, str]] = [
    (MalformedDoi, 400, "malformed-doi"),
    (workflow_mod.MalformedEmail, 400, "malformed-email"),
    (catalog_mod.EmptyCriteria, 400, "empty-criteria"),
    (registry_mod.MalformedUrl, 400, "malformed-url"),
    (registry_mod.MissingApproval, 403, "missing-approval"),
    (registry_mod.UnknownDoi, 404, "unknown-doi"),
    (catalog_mod.ObservationNotFound, 404, "unknown-observation"),
    (catalog_mod.UnknownProduct, 404, "unknown-product"),
    (workflow_mod.UnknownSession, 404, "unknown-session"),
    (workflow_mod.WrongState, 409, "wrong-state"),
    (workflow_mod.DuplicateAttachment, 409, "duplicate-attachment"),
    (registry_mod.Locked, 409, "locked"),
    (registry_mod.NotLocked, 409, "not-locked"),
    (registry_mod.SelfRedirect, 409, "self-redirect"),
    (registry_mod.RedirectTargetRedirected, 409, "redirect-target-redirected"),
    (NotACustomDoi, 409, "not-a-custom-doi"),
    (registry_mod.EmptyObservationSet, 422, "empty-observation-set"),
    (registry_mod.UnknownObservation, 422, "unknown-observation"),
    (registry_mod.InvalidResultingKernel, 422, "invalid-kernel"),
    (registry_mod.SuffixCollisionExhausted, 503, "suffix-collision"),
]


def _install_error_handlers(app: FastAPI) -> None:
    for exc_type, status, code in _ERROR_STATUS:

        def handler(request: Request, exc: Exception, status=status, code=code):
            return JSONResponse(
                status_code=status, content={"error": code, "detail": str(exc)}
            )

        app.add_exception_handler(exc_type, handler)


def _wants_json(request: Request) -> bool:
    return "application/json" in request.headers.get("accept", "")


def _observation_model(obs) -> schemas.ObservationModel:
    return schemas.ObservationModel(
        obs_id=obs.obs_id,
        mission=obs.mission,
        target_name=obs.target_name,
        instrument=obs.instrument,
        wavelength_band=obs.wavelength_band,
        data_url=obs.data_url,
    )


def _product_model(product) -> schemas.FixedProductModel:
    return schemas.FixedProductModel(
        product_id=product.product_id,
        kind=product.kind.value,
        title=product.title,
        description=product.description,
        landing_info_url=product.landing_info_url,
        assigned_doi=format_doi(product.assigned_doi),
    )


def build_archive_app(ctx: AppContext) -> FastAPI:
    """Catalog queries, registry administration, and DOI resolution."""
    app = FastAPI(title="archive-doi-service", docs_url=None, redoc_url=None)
    app.state.ctx = ctx
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    _install_error_handlers(app)

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "records": len(ctx.registry)}

    # -- catalog --------------------------------------------------------

    @app.get("/catalog/query", response_model=schemas.QueryResponse)
    def catalog_query(
        mission: str | None = None,
        target_name: str | None = None,
        instrument: str | None = None,
        wavelength_band: str | None = None,
        all_rows: bool = False,
        max_results: int | None = None,
    ):
        criteria = QueryCriteria(
            mission=mission,
            target_name=target_name,
            instrument=instrument,
            wavelength_band=wavelength_band,
            all_rows=all_rows,
            max_results=max_results,
        )
        obs_ids = ctx.catalog.query(criteria)
        return schemas.QueryResponse(
            obs_ids=obs_ids,
            observations=[
                _observation_model(ctx.catalog.get_observation(i)) for i in obs_ids
            ],
        )

    @app.get("/catalog/observations/{obs_id}", response_model=schemas.ObservationModel)
    def catalog_observation(obs_id: str):
        return _observation_model(ctx.catalog.get_observation(obs_id))

    @app.get("/catalog/products", response_model=schemas.ProductListResponse)
    def catalog_products(kind: str | None = None):
        products = ctx.catalog.get_fixed_products()
        if kind:
            products = [p for p in products if p.kind.value == kind]
        return schemas.ProductListResponse(products=[_product_model(p) for p in products])

    # -- registry -------------------------------------------------------

    @app.post("/registry/mint", response_model=schemas.RecordResponse, status_code=201)
    def registry_mint(body: schemas.MintRequest):
        record = ctx.registry.mint_custom(
            Creator(name=body.creator_name, affiliation=body.creator_affiliation),
            body.title,
            body.description,
            body.obs_ids,
        )
        return schemas.RecordResponse(
            doi=format_doi(record.name), record=registry_mod.record_to_document(record)
        )

    @app.post("/registry/assign-fixed", response_model=schemas.RecordResponse)
    def registry_assign_fixed(body: schemas.AssignFixedRequest):
        record = ctx.registry.assign_fixed(body.product_id)
        return schemas.RecordResponse(
            doi=format_doi(record.name), record=registry_mod.record_to_document(record)
        )

    @app.get("/registry/{prefix}/{suffix:path}", response_model=schemas.RecordResponse)
    def registry_get(prefix: str, suffix: str):
        record = ctx.registry.get(parse_doi(f"{prefix}/{suffix}"))
        return schemas.RecordResponse(
            doi=format_doi(record.name), record=registry_mod.record_to_document(record)
        )

    @app.post(
        "/registry/{prefix}/{suffix}/target", response_model=schemas.RecordResponse
    )
    def registry_update_target(prefix: str, suffix: str, body: schemas.TargetUpdateRequest):
        record = ctx.registry.update_target(parse_doi(f"{prefix}/{suffix}"), body.url)
        return schemas.RecordResponse(
            doi=format_doi(record.name), record=registry_mod.record_to_document(record)
        )

    @app.post("/registry/{prefix}/{suffix}/lock", response_model=schemas.RecordResponse)
    def registry_lock(prefix: str, suffix: str):
        record = ctx.registry.lock(parse_doi(f"{prefix}/{suffix}"))
        return schemas.RecordResponse(
            doi=format_doi(record.name), record=registry_mod.record_to_document(record)
        )

    @app.post("/registry/{prefix}/{suffix}/edit", response_model=schemas.RecordResponse)
    def registry_edit(prefix: str, suffix: str, body: schemas.EditRequestModel):
        record = ctx.registry.edit_mediated(
            parse_doi(f"{prefix}/{suffix}"),
            EditRequest(
                add_obs_ids=body.add_obs_ids,
                remove_obs_ids=body.remove_obs_ids,
                title=body.title,
                description=body.description,
            ),
            approval=body.approval,
        )
        return schemas.RecordResponse(
            doi=format_doi(record.name), record=registry_mod.record_to_document(record)
        )

    @app.post(
        "/registry/{prefix}/{suffix}/supersede",
        response_model=schemas.RecordResponse,
        status_code=201,
    )
    def registry_supersede(prefix: str, suffix: str, body: schemas.SupersedeRequest):
        if body.obs_ids is not None:
            dataset = CustomDataSet(obs_ids=tuple(body.obs_ids))
        elif body.product_id is not None:
            dataset = FixedDataSet(product_id=body.product_id)
        else:
            old = ctx.registry.get(parse_doi(f"{prefix}/{suffix}"))
            dataset = old.dataset
        record = ctx.registry.supersede(
            parse_doi(f"{prefix}/{suffix}"),
            dataset,
            title=body.title,
            description=body.description,
        )
        return schemas.RecordResponse(
            doi=format_doi(record.name), record=registry_mod.record_to_document(record)
        )

    @app.post(
        "/registry/{prefix}/{suffix}/redirect", response_model=schemas.RecordResponse
    )
    def registry_redirect(prefix: str, suffix: str, body: schemas.RedirectRequest):
        record = ctx.registry.redirect_spurious(
            parse_doi(f"{prefix}/{suffix}"), parse_doi(body.replacement), body.approval
        )
        return schemas.RecordResponse(
            doi=format_doi(record.name), record=registry_mod.record_to_document(record)
        )

    # -- resolution -------------------------------------------------------

    @app.get("/resolve/{prefix}/{suffix:path}")
    def resolve_doi(prefix: str, suffix: str, request: Request):
        result = resolve(ctx.registry, f"{prefix}/{suffix}")
        if result.outcome is ResolutionOutcome.NOT_FOUND:
            return JSONResponse(
                status_code=404,
                content={"error": "not-found", "detail": f"{prefix}/{suffix} was never minted"},
            )
        if _wants_json(request):
            return schemas.ResolutionResponse(
                doi=format_doi(result.doi),
                outcome=result.outcome.value,
                redirect_to=format_doi(result.redirect_to) if result.redirect_to else None,
                landing=result.landing.to_document() if result.landing else None,
            )
        if result.outcome is ResolutionOutcome.REDIRECTED_RECORD:
            target = result.redirect_to
            return RedirectResponse(
                url=f"/resolve/{target.prefix}/{target.suffix}", status_code=303
            )
        name = result.doi
        return RedirectResponse(
            url=f"/landing/{name.prefix}/{name.suffix}", status_code=303
        )

    @app.get("/landing/{prefix}/{suffix:path}")
    def landing(prefix: str, suffix: str, request: Request):
        name = parse_doi(f"{prefix}/{suffix}")
        doc = render_landing(ctx.registry, name)
        if _wants_json(request):
            kernel = kernel_to_document(ctx.registry.get(name).metadata)
            return schemas.LandingResponse(landing=doc.to_document(), kernel=kernel)
        return HTMLResponse(content=landing_html(doc))

    @app.get("/portal/{prefix}/{suffix:path}")
    def portal_view(prefix: str, suffix: str, request: Request):
        name = parse_doi(f"{prefix}/{suffix}")
        observations = portal_dataset_view(ctx.registry, ctx.catalog, name)
        if _wants_json(request):
            return schemas.PortalViewResponse(
                doi=format_doi(name),
                observation_count=len(observations),
                observations=[_observation_model(o) for o in observations],
            )
        return HTMLResponse(content=portal_view_html(format_doi(name), observations))

    return app


def build_workflow_app(ctx: AppContext) -> FastAPI:
    """The journal-side submission endpoints under /submission."""
    app = FastAPI(title="submission-workflow-service", docs_url=None, redoc_url=None)
    app.state.ctx = ctx
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    _install_error_handlers(app)
    flow = ctx.workflow

    @app.post("/submission/start", response_model=schemas.SessionResponse, status_code=201)
    def start(body: schemas.StartSessionRequest):
        session = flow.start_session(body.author_email)
        return schemas.SessionResponse(session=session.to_document())

    @app.get("/submission/{session_id}", response_model=schemas.SessionResponse)
    def get_session(session_id: str):
        return schemas.SessionResponse(session=flow.get_session(session_id).to_document())

    @app.post("/submission/{session_id}/answer", response_model=schemas.SessionResponse)
    def answer(session_id: str, body: schemas.AnswerRequest):
        session = flow.answer_data_question(
            session_id, DataAnswer(body.answer), message=body.message
        )
        return schemas.SessionResponse(session=session.to_document())

    @app.post("/submission/{session_id}/path", response_model=schemas.PathResponse)
    def choose_path(session_id: str, body: schemas.PathRequest):
        path = PathOption(body.path)
        session = flow.choose_path(session_id, path)
        return schemas.PathResponse(
            session=session.to_document(),
            menu=[_product_model(p) for p in flow.fixed_menu(path)],
        )

    @app.post("/submission/{session_id}/attach", response_model=schemas.SessionResponse)
    def attach(session_id: str, body: schemas.AttachRequest):
        session = flow.attach_doi(session_id, body.doi)
        return schemas.SessionResponse(session=session.to_document())

    @app.post("/submission/{session_id}/complete", response_model=schemas.CompleteResponse)
    def complete(session_id: str):
        record = flow.complete(session_id)
        return schemas.CompleteResponse(record=record.to_document())

    @app.post("/submission/{session_id}/eligible", response_model=schemas.SessionResponse)
    def eligible(session_id: str, body: schemas.EligibleRequest):
        session = flow.mark_eligible(session_id, body.eligible)
        return schemas.SessionResponse(session=session.to_document())

    @app.post("/submission/{session_id}/reason", response_model=schemas.SessionResponse)
    def reason(session_id: str, body: schemas.ReasonRequest):
        session = flow.record_noncompliance_reason(
            session_id, NonComplianceReason(body.reason)
        )
        return schemas.SessionResponse(session=session.to_document())

    return app
