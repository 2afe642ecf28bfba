"""Resolution: turn a DOI into a redirect plus a landing page.

Landing documents are rendered from live registry state on every call;
a record redirected as spurious resolves to its replacement in a single
hop.
"""

from __future__ import annotations

import html
from dataclasses import dataclass
from enum import Enum

from .catalog import Observation, ObservationCatalog
from .identifiers import DoiName, format_doi, parse_doi
from .metadata import kernel_to_document
from .registry import CustomDataSet, DoiRecord, DoiRegistry, DoiState, UnknownDoi

__all__ = [
    "ResolutionOutcome",
    "ResolutionResult",
    "LandingDocument",
    "NotACustomDoi",
    "resolve",
    "render_landing",
    "landing_html",
    "portal_dataset_view",
    "portal_view_html",
]


class NotACustomDoi(Exception):
    pass


class ResolutionOutcome(str, Enum):
    REDIRECT_TO_LANDING = "RedirectToLanding"
    REDIRECTED_RECORD = "RedirectedRecord"
    NOT_FOUND = "NotFound"


@dataclass(frozen=True)
class LandingDocument:
    """Basic metadata shown to a reader who followed a DOI."""

    doi: str
    title: str
    creators: list[dict]
    publisher: str
    publication_year: int
    description: str
    dataset: dict
    related_identifiers: list[dict]
    state: str

    def to_document(self) -> dict:
        return {
            "doi": self.doi,
            "title": self.title,
            "creators": self.creators,
            "publisher": self.publisher,
            "publication_year": self.publication_year,
            "description": self.description,
            "dataset": self.dataset,
            "related_identifiers": self.related_identifiers,
            "state": self.state,
        }


@dataclass(frozen=True)
class ResolutionResult:
    outcome: ResolutionOutcome
    doi: DoiName | None = None
    landing: LandingDocument | None = None
    redirect_to: DoiName | None = None


def _dataset_summary(record: DoiRecord) -> dict:
    if isinstance(record.dataset, CustomDataSet):
        return {
            "kind": "custom",
            "observation_count": len(record.dataset.obs_ids),
            "link": record.target_url,
        }
    return {
        "kind": "fixed",
        "product_id": record.dataset.product_id,
        "link": record.target_url,
    }


def render_landing(registry: DoiRegistry, doi: DoiName | str) -> LandingDocument:
    """Build the landing document for a record, straight from registry truth."""
    record = registry.get(doi)
    kernel_doc = kernel_to_document(record.metadata)
    return LandingDocument(
        doi=format_doi(record.name),
        title=record.metadata.title,
        creators=kernel_doc["creators"],
        publisher=record.metadata.publisher,
        publication_year=record.metadata.publication_year,
        description=record.metadata.description,
        dataset=_dataset_summary(record),
        related_identifiers=kernel_doc["related_identifiers"],
        state=record.state.value,
    )


def resolve(registry: DoiRegistry, doi_text: str) -> ResolutionResult:
    """Resolve a DOI string against the registry.

    Any record that was ever minted resolves: live records to their
    landing document, spurious ones to their replacement (one hop).
    Unknown names yield NotFound; non-DOI strings raise MalformedDoi.
    """
    name = parse_doi(doi_text)
    try:
        record = registry.get(name)
    except UnknownDoi:
        return ResolutionResult(outcome=ResolutionOutcome.NOT_FOUND, doi=name)
    if record.state is DoiState.REDIRECTED:
        return ResolutionResult(
            outcome=ResolutionOutcome.REDIRECTED_RECORD,
            doi=name,
            redirect_to=record.redirect_to,
        )
    return ResolutionResult(
        outcome=ResolutionOutcome.REDIRECT_TO_LANDING,
        doi=name,
        landing=render_landing(registry, name),
    )


def portal_dataset_view(
    registry: DoiRegistry, catalog: ObservationCatalog, doi: DoiName | str
) -> list[Observation]:
    """The exact observations behind a custom DOI, in mint order."""
    record = registry.get(doi)
    if not isinstance(record.dataset, CustomDataSet):
        raise NotACustomDoi(f"{format_doi(record.name)} is a fixed-product DOI")
    return [catalog.get_observation(obs_id) for obs_id in record.dataset.obs_ids]


def portal_view_html(doi: str, observations: list[Observation]) -> str:
    """Hypertext table of a custom data set, for readers following the
    landing page's dataset link in a browser."""
    esc = html.escape
    rows = "".join(
        "<tr>"
        f"<td>{esc(obs.obs_id)}</td><td>{esc(obs.mission)}</td>"
        f"<td>{esc(obs.target_name)}</td><td>{esc(obs.instrument)}</td>"
        f"<td>{esc(obs.wavelength_band)}</td>"
        f'<td><a href="{esc(obs.data_url)}">data</a></td>'
        "</tr>"
        for obs in observations
    )
    return f"""<!DOCTYPE html>
<html lang="en">
<head><meta charset="utf-8"><title>{esc(doi)} data set</title></head>
<body>
<h1 id="doi">{esc(doi)}</h1>
<p id="observation-count">{len(observations)} observations</p>
<table id="observations">
<thead><tr><th>obs_id</th><th>mission</th><th>target</th><th>instrument</th><th>band</th><th></th></tr></thead>
<tbody>{rows}</tbody>
</table>
</body>
</html>
"""


def landing_html(doc: LandingDocument) -> str:
    """Minimal hypertext rendering with stable element identifiers."""
    esc = html.escape
    creators = ", ".join(
        c["name"] + (f" ({c['affiliation']})" if c.get("affiliation") else "")
        for c in doc.creators
    )
    if doc.dataset["kind"] == "custom":
        dataset_line = (
            f'{doc.dataset["observation_count"]} observations &mdash; '
            f'<a id="dataset-link" href="{esc(doc.dataset["link"])}">view in portal</a>'
        )
    else:
        dataset_line = (
            f'product {esc(doc.dataset["product_id"])} &mdash; '
            f'<a id="dataset-link" href="{esc(doc.dataset["link"])}">product information</a>'
        )
    related = "".join(
        f'<li class="related">{esc(rel["relation_type"])}: {esc(rel["target"])}</li>'
        for rel in doc.related_identifiers
    )
    return f"""<!DOCTYPE html>
<html lang="en">
<head><meta charset="utf-8"><title>{esc(doc.doi)}</title></head>
<body>
<h1 id="doi">{esc(doc.doi)}</h1>
<h2 id="title">{esc(doc.title)}</h2>
<p id="creators">{esc(creators)}</p>
<p id="publisher">{esc(doc.publisher)}</p>
<p id="publication-year">{doc.publication_year}</p>
<p id="description">{esc(doc.description)}</p>
<p id="dataset">{dataset_line}</p>
<ul id="related-identifiers">{related}</ul>
<p id="state">{esc(doc.state)}</p>
</body>
</html>
"""
