"""HTTP client for the registration agency's mint/update protocol.

Retry-safe: every operation is an idempotent PUT/GET, retried with
exponential backoff before giving up with ``RaUnreachable``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from enum import Enum

import httpx

from ..identifiers import DoiName, format_doi, parse_doi
from ..metadata import kernel_to_document

__all__ = [
    "RaOperation",
    "RaReceipt",
    "RaError",
    "RaRejectedInvalidKernel",
    "RaUnknownDoi",
    "RaUnreachable",
    "RaProtocolError",
    "RaMalformedUrl",
    "RaClient",
]


class RaOperation(str, Enum):
    METADATA_STORED = "MetadataStored"
    TARGET_STORED = "TargetStored"


@dataclass(frozen=True)
class RaReceipt:
    doi: DoiName
    accepted_at: str
    operation: RaOperation


class RaError(Exception):
    pass


class RaRejectedInvalidKernel(RaError):
    pass


class RaUnknownDoi(RaError):
    pass


class RaMalformedUrl(RaError):
    pass


class RaUnreachable(RaError):
    pass


class RaProtocolError(RaError):
    pass


class RaClient:
    """Client for the four-endpoint registration protocol.

    ``http_client`` may carry an ASGI transport for in-process use; when
    omitted, a real HTTP client is built against ``base_url``.
    """

    def __init__(
        self,
        base_url: str = "",
        *,
        http_client: httpx.Client | None = None,
        timeout: float = 5.0,
        max_attempts: int = 3,
        backoff: float = 0.05,
    ) -> None:
        if http_client is None:
            http_client = httpx.Client(base_url=base_url, timeout=timeout)
        self._http = http_client
        self._max_attempts = max_attempts
        self._backoff = backoff

    def close(self) -> None:
        self._http.close()

    def _request(self, method: str, path: str, **kwargs) -> httpx.Response:
        last_error: Exception | None = None
        for attempt in range(self._max_attempts):
            try:
                return self._http.request(method, path, **kwargs)
            except httpx.TransportError as exc:
                last_error = exc
                if attempt + 1 < self._max_attempts:
                    time.sleep(self._backoff * (2**attempt))
        raise RaUnreachable(
            f"registration agency unreachable after {self._max_attempts} attempts"
        ) from last_error

    def _receipt(self, response: httpx.Response) -> RaReceipt:
        body = response.json()
        return RaReceipt(
            doi=parse_doi(body["doi"]),
            accepted_at=body["accepted_at"],
            operation=RaOperation(body["operation"]),
        )

    def register_metadata(self, record) -> RaReceipt:
        """Store the record's kernel document with the agency."""
        name = record.name
        response = self._request(
            "PUT",
            f"/metadata/{name.prefix}/{name.suffix}",
            json=kernel_to_document(record.metadata),
        )
        if response.status_code == 400:
            raise RaRejectedInvalidKernel(response.json().get("detail", ""))
        if response.status_code != 201:
            raise RaProtocolError(f"unexpected status {response.status_code}")
        return self._receipt(response)

    def register_target(self, doi: DoiName, url: str) -> RaReceipt:
        """Store or overwrite the target URL for an already-registered DOI."""
        response = self._request(
            "PUT",
            f"/target/{doi.prefix}/{doi.suffix}",
            content=url.encode("utf-8"),
            headers={"content-type": "text/plain"},
        )
        if response.status_code == 404:
            raise RaUnknownDoi(format_doi(doi))
        if response.status_code == 400:
            raise RaMalformedUrl(response.json().get("detail", ""))
        if response.status_code != 200:
            raise RaProtocolError(f"unexpected status {response.status_code}")
        return self._receipt(response)

    def fetch_registration(self, doi: DoiName) -> tuple[dict, str | None]:
        """Return exactly the kernel document and target URL last stored."""
        response = self._request("GET", f"/metadata/{doi.prefix}/{doi.suffix}")
        if response.status_code == 404:
            raise RaUnknownDoi(format_doi(doi))
        if response.status_code != 200:
            raise RaProtocolError(f"unexpected status {response.status_code}")
        body = response.json()
        return body["metadata"], body.get("target_url")
