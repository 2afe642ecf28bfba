"""Metadata kernel: the mandatory-plus-optional document attached to every DOI.

The kernel's minimum standard requires identifier, creators, title,
publisher, publication year, and resource type. Optional properties
(description, related identifiers, version, contributors, funder,
project number) travel with the record but are never required.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from datetime import datetime
from enum import Enum

from .identifiers import DoiName, MalformedDoi, format_doi, parse_doi

__all__ = [
    "RelationType",
    "inverse_relation",
    "RelatedIdentifier",
    "Creator",
    "ResourceType",
    "MetadataKernel",
    "Violation",
    "ValidationReport",
    "validate_kernel",
    "kernel_to_document",
    "kernel_from_document",
]


class RelationType(str, Enum):
    """Typed links between DOIs (versioning, containment, supersession)."""

    IS_NEW_VERSION_OF = "IsNewVersionOf"
    IS_PREVIOUS_VERSION_OF = "IsPreviousVersionOf"
    IS_PART_OF = "IsPartOf"
    HAS_PART = "HasPart"
    IS_SUPPLEMENT_TO = "IsSupplementTo"
    IS_SUPPLEMENTED_BY = "IsSupplementedBy"
    IS_OBSOLETED_BY = "IsObsoletedBy"
    OBSOLETES = "Obsoletes"


_INVERSE = {
    RelationType.IS_NEW_VERSION_OF: RelationType.IS_PREVIOUS_VERSION_OF,
    RelationType.IS_PREVIOUS_VERSION_OF: RelationType.IS_NEW_VERSION_OF,
    RelationType.IS_PART_OF: RelationType.HAS_PART,
    RelationType.HAS_PART: RelationType.IS_PART_OF,
    RelationType.IS_SUPPLEMENT_TO: RelationType.IS_SUPPLEMENTED_BY,
    RelationType.IS_SUPPLEMENTED_BY: RelationType.IS_SUPPLEMENT_TO,
    RelationType.IS_OBSOLETED_BY: RelationType.OBSOLETES,
    RelationType.OBSOLETES: RelationType.IS_OBSOLETED_BY,
}


def inverse_relation(rel: RelationType) -> RelationType:
    """Total involutive inverse: ``inverse(inverse(r)) == r`` for every member."""
    return _INVERSE[rel]


@dataclass(frozen=True)
class RelatedIdentifier:
    """A typed link from the owning record to ``target``."""

    target: DoiName
    relation_type: RelationType


@dataclass(frozen=True)
class Creator:
    name: str
    affiliation: str | None = None


class ResourceType(str, Enum):
    DATASET = "Dataset"


@dataclass
class MetadataKernel:
    """Metadata document for one DOI.

    ``date_created`` is assigned exactly once, at mint time, and never
    mutated afterwards.
    """

    identifier: DoiName
    creators: list[Creator]
    title: str
    publisher: str
    publication_year: int
    resource_type: ResourceType = ResourceType.DATASET
    description: str = ""
    related_identifiers: list[RelatedIdentifier] = field(default_factory=list)
    version: str | None = None
    contributors: list[Creator] | None = None
    funder: str | None = None
    project_number: str | None = None
    date_created: datetime | None = None

    def copy(self) -> "MetadataKernel":
        return replace(
            self,
            creators=list(self.creators),
            related_identifiers=list(self.related_identifiers),
            contributors=list(self.contributors) if self.contributors else self.contributors,
        )


@dataclass(frozen=True)
class Violation:
    field: str
    rule: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    violations: tuple[Violation, ...]

    def __bool__(self) -> bool:
        return self.valid


def _canonical_doi(name: object) -> DoiName | None:
    """Re-derive the canonical name; None when the fields are not legal."""
    if not isinstance(name, DoiName):
        return None
    try:
        return parse_doi(f"{name.prefix}/{name.suffix}")
    except MalformedDoi:
        return None


def validate_kernel(doc: MetadataKernel) -> ValidationReport:
    """Check the kernel's minimum standard.

    Valid iff all mandatory fields are present and nonempty and every
    related identifier parses. Pure: the same document always yields the
    same report.
    """
    violations: list[Violation] = []

    canonical = _canonical_doi(doc.identifier)
    if canonical is None:
        violations.append(
            Violation("identifier", "format", "identifier is not a legal DOI name")
        )
    elif canonical != doc.identifier:
        violations.append(
            Violation("identifier", "canonical", "identifier is not in canonical form")
        )

    if not doc.creators:
        violations.append(Violation("creators", "required", "at least one creator"))
    else:
        for i, creator in enumerate(doc.creators):
            if not creator.name or not creator.name.strip():
                violations.append(
                    Violation("creators", "required", f"creator {i} has an empty name")
                )

    if not doc.title or not doc.title.strip():
        violations.append(Violation("title", "required", "title must be nonempty"))
    if not doc.publisher or not doc.publisher.strip():
        violations.append(Violation("publisher", "required", "publisher must be nonempty"))

    year = doc.publication_year
    if not isinstance(year, int) or not 1000 <= year <= 9999:
        violations.append(
            Violation("publication_year", "format", "publication year must be a 4-digit year")
        )

    if not isinstance(doc.resource_type, ResourceType):
        violations.append(
            Violation("resource_type", "required", "resource type must be Dataset")
        )

    for i, rel in enumerate(doc.related_identifiers):
        if _canonical_doi(rel.target) is None:
            violations.append(
                Violation(
                    "related_identifiers",
                    "format",
                    f"related identifier {i} target does not parse",
                )
            )
        if not isinstance(rel.relation_type, RelationType):
            violations.append(
                Violation(
                    "related_identifiers",
                    "format",
                    f"related identifier {i} has an unknown relation type",
                )
            )

    return ValidationReport(valid=not violations, violations=tuple(violations))


def _creator_to_doc(creator: Creator) -> dict:
    return {"name": creator.name, "affiliation": creator.affiliation}


def _creator_from_doc(doc: dict) -> Creator:
    return Creator(name=doc["name"], affiliation=doc.get("affiliation"))


def kernel_to_document(kernel: MetadataKernel) -> dict:
    """Serialize to the flat key/value document used on the wire.

    Field names match the kernel exactly; related identifiers become a
    list of ``{target, relation_type}`` entries. This document is the
    payload of registration-agency and resolver JSON responses.
    """
    return {
        "identifier": format_doi(kernel.identifier),
        "creators": [_creator_to_doc(c) for c in kernel.creators],
        "title": kernel.title,
        "publisher": kernel.publisher,
        "publication_year": kernel.publication_year,
        "resource_type": kernel.resource_type.value,
        "description": kernel.description,
        "related_identifiers": [
            {"target": format_doi(rel.target), "relation_type": rel.relation_type.value}
            for rel in kernel.related_identifiers
        ],
        "version": kernel.version,
        "contributors": (
            [_creator_to_doc(c) for c in kernel.contributors]
            if kernel.contributors is not None
            else None
        ),
        "funder": kernel.funder,
        "project_number": kernel.project_number,
        "date_created": (
            kernel.date_created.isoformat() if kernel.date_created is not None else None
        ),
    }


def kernel_from_document(doc: dict) -> MetadataKernel:
    """Inverse of :func:`kernel_to_document`.

    Raises ``MalformedDoi``/``KeyError``/``ValueError`` when the document
    does not carry a well-formed kernel.
    """
    return MetadataKernel(
        identifier=parse_doi(doc["identifier"]),
        creators=[_creator_from_doc(c) for c in doc["creators"]],
        title=doc["title"],
        publisher=doc["publisher"],
        publication_year=int(doc["publication_year"]),
        resource_type=ResourceType(doc["resource_type"]),
        description=doc.get("description", ""),
        related_identifiers=[
            RelatedIdentifier(
                target=parse_doi(rel["target"]),
                relation_type=RelationType(rel["relation_type"]),
            )
            for rel in doc.get("related_identifiers", [])
        ],
        version=doc.get("version"),
        contributors=(
            [_creator_from_doc(c) for c in doc["contributors"]]
            if doc.get("contributors") is not None
            else None
        ),
        funder=doc.get("funder"),
        project_number=doc.get("project_number"),
        date_created=(
            datetime.fromisoformat(doc["date_created"])
            if doc.get("date_created")
            else None
        ),
    )
