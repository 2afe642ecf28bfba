"""In-process registration agency implementing the mint/update wire contract.

Four endpoints only: store metadata, store target, fetch registration,
and a protocol-level refusal of DELETE everywhere — the agency has no
delete verb.
"""

from __future__ import annotations

from datetime import datetime, timezone
from urllib.parse import urlparse

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..identifiers import MalformedDoi, format_doi, parse_doi
from ..metadata import kernel_from_document, kernel_to_document, validate_kernel

__all__ = ["RaStore", "build_ra_app"]


class RaStore:
    """Reference key/value state: kernel documents and target URLs by DOI."""

    def __init__(self) -> None:
        self.metadata: dict[str, dict] = {}
        self.targets: dict[str, str] = {}

    def snapshot(self) -> dict[str, tuple[dict, str | None]]:
        return {
            doi: (doc, self.targets.get(doi)) for doi, doc in self.metadata.items()
        }


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _error(status: int, code: str, detail: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": code, "detail": detail})


def build_ra_app(store: RaStore | None = None) -> FastAPI:
    store = store if store is not None else RaStore()
    app = FastAPI(title="registration-agency-stub", docs_url=None, redoc_url=None)
    app.state.store = store

    @app.put("/metadata/{prefix}/{suffix:path}", status_code=201)
    async def put_metadata(prefix: str, suffix: str, request: Request):
        try:
            doi = format_doi(parse_doi(f"{prefix}/{suffix}"))
        except MalformedDoi as exc:
            return _error(400, "malformed-doi", str(exc))
        try:
            document = await request.json()
            kernel = kernel_from_document(document)
        except Exception as exc:
            return _error(400, "invalid-kernel", f"unparseable kernel document: {exc}")
        report = validate_kernel(kernel)
        if not report.valid:
            return _error(
                400,
                "invalid-kernel",
                "; ".join(v.message for v in report.violations),
            )
        if format_doi(kernel.identifier) != doi:
            return _error(400, "invalid-kernel", "document identifier does not match path")
        # Store the canonical serialization, not the raw body.
        store.metadata[doi] = kernel_to_document(kernel)
        return JSONResponse(
            status_code=201,
            content={"doi": doi, "operation": "MetadataStored", "accepted_at": _now()},
        )

    @app.put("/target/{prefix}/{suffix:path}")
    async def put_target(prefix: str, suffix: str, request: Request):
        try:
            doi = format_doi(parse_doi(f"{prefix}/{suffix}"))
        except MalformedDoi as exc:
            return _error(400, "malformed-doi", str(exc))
        if doi not in store.metadata:
            return _error(404, "unknown-doi", f"no metadata registered for {doi}")
        url = (await request.body()).decode("utf-8").strip()
        parts = urlparse(url)
        if parts.scheme not in ("http", "https") or not parts.netloc:
            return _error(400, "malformed-url", f"{url!r} is not an absolute http(s) URL")
        store.targets[doi] = url
        return JSONResponse(
            content={"doi": doi, "operation": "TargetStored", "accepted_at": _now()}
        )

    @app.get("/metadata/{prefix}/{suffix:path}")
    async def get_metadata(prefix: str, suffix: str):
        try:
            doi = format_doi(parse_doi(f"{prefix}/{suffix}"))
        except MalformedDoi as exc:
            return _error(400, "malformed-doi", str(exc))
        if doi not in store.metadata:
            return _error(404, "unknown-doi", f"no metadata registered for {doi}")
        return JSONResponse(
            content={
                "doi": doi,
                "metadata": store.metadata[doi],
                "target_url": store.targets.get(doi),
            }
        )

    # The protocol has no delete verb: refuse DELETE on every path.
    @app.delete("/{path:path}")
    async def delete_anything(path: str):
        return _error(405, "method-not-allowed", "identifiers are never deleted")

    return app
