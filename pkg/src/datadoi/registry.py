"""The authoritative DOI record store.

Mints custom DOIs over observation sets, serves fixed DOIs from the
product manifest, applies mediated edits, supersedes published records
with versioned successors, redirects spurious identifiers, and persists
everything through an append-only event journal. Nothing is ever
deleted: the set of names only grows.
"""

from __future__ import annotations

import hashlib
import json
import random
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable
from urllib.parse import urlparse

from .catalog import ObservationCatalog, UnknownProduct
from .identifiers import DoiName, format_doi, parse_doi
from .metadata import (
    Creator,
    MetadataKernel,
    RelatedIdentifier,
    RelationType,
    inverse_relation,
    kernel_from_document,
    kernel_to_document,
    validate_kernel,
)

__all__ = [
    "CustomDataSet",
    "FixedDataSet",
    "DataSetSpec",
    "DoiState",
    "DoiRecord",
    "EventKind",
    "RegistryEvent",
    "RegistryError",
    "EmptyObservationSet",
    "UnknownObservation",
    "SuffixCollisionExhausted",
    "UnknownProduct",
    "UnknownDoi",
    "Locked",
    "NotLocked",
    "MissingApproval",
    "InvalidResultingKernel",
    "SelfRedirect",
    "RedirectTargetRedirected",
    "MalformedUrl",
    "CorruptJournal",
    "DoiRegistry",
    "record_to_document",
    "record_from_document",
]

SUFFIX_PREFIX = "t9"
SUFFIX_TAIL_ALPHABET = "abcdefghijklmnopqrstuvwxyz0123456789"
SUFFIX_TAIL_LENGTH = 4
MAX_SUFFIX_ATTEMPTS = 100


class RegistryError(Exception):
    pass


class EmptyObservationSet(RegistryError):
    pass


class UnknownObservation(RegistryError):
    def __init__(self, obs_id: str):
        super().__init__(f"obs_id {obs_id!r} is not in the catalog")
        self.obs_id = obs_id


class SuffixCollisionExhausted(RegistryError):
    pass


class UnknownDoi(RegistryError):
    def __init__(self, doi: str):
        super().__init__(f"no record for {doi}")
        self.doi = doi


class Locked(RegistryError):
    pass


class NotLocked(RegistryError):
    pass


class MissingApproval(RegistryError):
    pass


class InvalidResultingKernel(RegistryError):
    pass


class SelfRedirect(RegistryError):
    pass


class RedirectTargetRedirected(RegistryError):
    pass


class MalformedUrl(RegistryError):
    pass


class CorruptJournal(RegistryError):
    def __init__(self, sequence_number: int, detail: str = ""):
        super().__init__(f"journal corrupt at sequence {sequence_number}: {detail}")
        self.sequence_number = sequence_number


@dataclass(frozen=True)
class CustomDataSet:
    """Author-chosen aggregation: a nonempty ordered set of obs_ids."""

    obs_ids: tuple[str, ...]


@dataclass(frozen=True)
class FixedDataSet:
    """A curated product carrying a pre-assigned DOI."""

    product_id: str


DataSetSpec = CustomDataSet | FixedDataSet


class DoiState(str, Enum):
    DRAFT = "Draft"
    REGISTERED = "Registered"
    FINDABLE = "Findable"
    REDIRECTED = "Redirected"


@dataclass
class DoiRecord:
    name: DoiName
    metadata: MetadataKernel
    dataset: DataSetSpec
    target_url: str
    state: DoiState
    redirect_to: DoiName | None = None
    locked: bool = False


class EventKind(str, Enum):
    MINTED = "Minted"
    FIXED_ASSIGNED = "FixedAssigned"
    EDITED = "Edited"
    TARGET_UPDATED = "TargetUpdated"
    SUPERSEDED = "Superseded"
    REDIRECTED_SPURIOUS = "RedirectedSpurious"
    LOCKED = "Locked"


@dataclass(frozen=True)
class RegistryEvent:
    sequence_number: int
    timestamp: str
    kind: EventKind
    payload: dict


@dataclass
class EditRequest:
    """A mediated dataset or metadata delta; unset fields are untouched."""

    add_obs_ids: list[str] = field(default_factory=list)
    remove_obs_ids: list[str] = field(default_factory=list)
    title: str | None = None
    description: str | None = None
    creators: list[Creator] | None = None


def _dataset_to_document(dataset: DataSetSpec) -> dict:
    if isinstance(dataset, CustomDataSet):
        return {"variant": "custom", "obs_ids": list(dataset.obs_ids)}
    return {"variant": "fixed", "product_id": dataset.product_id}


def _dataset_from_document(doc: dict) -> DataSetSpec:
    if doc["variant"] == "custom":
        return CustomDataSet(obs_ids=tuple(doc["obs_ids"]))
    return FixedDataSet(product_id=doc["product_id"])


def record_to_document(record: DoiRecord) -> dict:
    return {
        "name": format_doi(record.name),
        "metadata": kernel_to_document(record.metadata),
        "dataset": _dataset_to_document(record.dataset),
        "target_url": record.target_url,
        "state": record.state.value,
        "redirect_to": format_doi(record.redirect_to) if record.redirect_to else None,
        "locked": record.locked,
    }


def record_from_document(doc: dict) -> DoiRecord:
    return DoiRecord(
        name=parse_doi(doc["name"]),
        metadata=kernel_from_document(doc["metadata"]),
        dataset=_dataset_from_document(doc["dataset"]),
        target_url=doc["target_url"],
        state=DoiState(doc["state"]),
        redirect_to=parse_doi(doc["redirect_to"]) if doc.get("redirect_to") else None,
        locked=doc["locked"],
    )


def _canonical_json(doc: object) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def _record_digest(record: DoiRecord) -> str:
    return hashlib.sha256(_canonical_json(record_to_document(record)).encode()).hexdigest()


def _check_url(url: str) -> str:
    parts = urlparse(url)
    if parts.scheme not in ("http", "https") or not parts.netloc:
        raise MalformedUrl(f"{url!r} is not an absolute http(s) URL")
    return url


def encode_event(event: RegistryEvent) -> str:
    return "|".join(
        (
            str(event.sequence_number),
            event.timestamp,
            event.kind.value,
            _canonical_json(event.payload),
        )
    )


def decode_event(line: str, expect_sequence: int) -> RegistryEvent:
    parts = line.split("|", 3)
    if len(parts) != 4:
        raise CorruptJournal(expect_sequence, "malformed line")
    seq_text, timestamp, kind_text, payload_text = parts
    try:
        sequence = int(seq_text)
        kind = EventKind(kind_text)
        payload = json.loads(payload_text)
    except (ValueError, json.JSONDecodeError) as exc:
        raise CorruptJournal(expect_sequence, str(exc)) from None
    if sequence != expect_sequence:
        raise CorruptJournal(expect_sequence, f"found sequence {sequence}")
    return RegistryEvent(sequence, timestamp, kind, payload)


def _utc_now() -> datetime:
    return datetime.now(timezone.utc)


class DoiRegistry:
    """Single-writer DOI record store with an append-only event journal.

    All mutating operations serialize through one lock and append one
    journal event carrying the full post-operation record documents, so
    replaying the journal reproduces the live state byte for byte.
    """

    def __init__(
        self,
        catalog: ObservationCatalog,
        *,
        prefix: str = "10.17909",
        portal_base_url: str = "http://localhost:8301",
        publisher: str = "MAST",
        journal_path: str | Path | None = None,
        ra_client=None,
        rng: random.Random | None = None,
        clock: Callable[[], datetime] = _utc_now,
    ) -> None:
        self._catalog = catalog
        self._prefix = prefix
        self._portal_base_url = portal_base_url.rstrip("/")
        self._publisher = publisher
        self._ra_client = ra_client
        self._rng = rng if rng is not None else random.Random()
        self._clock = clock
        self._records: dict[str, DoiRecord] = {}
        self._events: list[RegistryEvent] = []
        self._write_lock = threading.Lock()
        self._journal_file = None
        if journal_path is not None:
            path = Path(journal_path)
            if path.exists():
                self._apply_journal(path.read_text(encoding="utf-8").splitlines())
            path.parent.mkdir(parents=True, exist_ok=True)
            self._journal_file = path.open("a", encoding="utf-8")

    # -- journal ---------------------------------------------------------

    def _apply_journal(self, lines: Iterable[str]) -> None:
        for i, line in enumerate(
            (line for line in lines if line.strip()), start=1
        ):
            event = decode_event(line, expect_sequence=i)
            self._events.append(event)
            for doc in event.payload.get("records", []):
                record = record_from_document(doc)
                self._records[format_doi(record.name)] = record

    @classmethod
    def replay(
        cls,
        journal: str | Path | Iterable[str],
        catalog: ObservationCatalog,
        **kwargs,
    ) -> "DoiRegistry":
        """Rebuild a registry from a journal; CorruptJournal on gaps or damage."""
        if isinstance(journal, (str, Path)):
            lines = Path(journal).read_text(encoding="utf-8").splitlines()
        else:
            lines = list(journal)
        registry = cls(catalog, **kwargs)
        registry._apply_journal(lines)
        return registry

    def _append_event(self, kind: EventKind, payload: dict) -> RegistryEvent:
        event = RegistryEvent(
            sequence_number=len(self._events) + 1,
            timestamp=self._clock().isoformat(),
            kind=kind,
            payload=payload,
        )
        self._events.append(event)
        if self._journal_file is not None:
            self._journal_file.write(encode_event(event) + "\n")
            self._journal_file.flush()
        return event

    def journal_lines(self) -> list[str]:
        return [encode_event(e) for e in self._events]

    @property
    def events(self) -> list[RegistryEvent]:
        return list(self._events)

    def close(self) -> None:
        if self._journal_file is not None:
            self._journal_file.close()
            self._journal_file = None

    # -- reads -----------------------------------------------------------

    def get(self, doi: DoiName | str) -> DoiRecord:
        key = format_doi(doi) if isinstance(doi, DoiName) else format_doi(parse_doi(doi))
        try:
            return self._records[key]
        except KeyError:
            raise UnknownDoi(key) from None

    def has(self, doi: DoiName | str) -> bool:
        try:
            self.get(doi)
            return True
        except UnknownDoi:
            return False

    def all_names(self) -> list[str]:
        return sorted(self._records)

    def __len__(self) -> int:
        return len(self._records)

    def snapshot_document(self) -> list[dict]:
        """Canonical serialization of every record, sorted by DOI name."""
        return [record_to_document(self._records[name]) for name in sorted(self._records)]

    def state_digest(self) -> str:
        return hashlib.sha256(_canonical_json(self.snapshot_document()).encode()).hexdigest()

    def write_snapshot(self, path: str | Path) -> None:
        Path(path).write_text(
            _canonical_json(self.snapshot_document()) + "\n", encoding="utf-8"
        )

    # -- helpers ---------------------------------------------------------

    def _portal_url(self, name: DoiName) -> str:
        return f"{self._portal_base_url}/portal/{name.prefix}/{name.suffix}"

    def _generate_name(self) -> DoiName:
        reserved = set(self._records) | self._catalog.reserved_dois()
        for _ in range(MAX_SUFFIX_ATTEMPTS):
            tail = "".join(
                self._rng.choice(SUFFIX_TAIL_ALPHABET) for _ in range(SUFFIX_TAIL_LENGTH)
            )
            name = DoiName(prefix=self._prefix, suffix=SUFFIX_PREFIX + tail)
            if format_doi(name) not in reserved:
                return name
        raise SuffixCollisionExhausted(
            f"no free suffix after {MAX_SUFFIX_ATTEMPTS} attempts"
        )

    def _resolve_custom_ids(self, obs_ids: Iterable[str]) -> tuple[str, ...]:
        deduped = list(dict.fromkeys(obs_ids))
        if not deduped:
            raise EmptyObservationSet("a custom DOI needs at least one observation")
        for obs_id in deduped:
            if not self._catalog.has_observation(obs_id):
                raise UnknownObservation(obs_id)
        return tuple(deduped)

    def _register_with_ra(self, record: DoiRecord) -> None:
        """Advance Draft -> Registered -> Findable via the registration agency.

        Unreachable RA leaves the record in its current state; the mint
        itself never fails on registration trouble.
        """
        if self._ra_client is None:
            return
        from .ra.client import RaError

        try:
            self._ra_client.register_metadata(record)
            record.state = DoiState.REGISTERED
            self._ra_client.register_target(record.name, record.target_url)
            record.state = DoiState.FINDABLE
        except RaError:
            pass

    def _push_target_to_ra(self, record: DoiRecord) -> None:
        # Best effort: agency-side maintenance never blocks local truth.
        if self._ra_client is None or record.state is DoiState.DRAFT:
            return
        from .ra.client import RaError

        try:
            self._ra_client.register_target(record.name, record.target_url)
        except RaError:
            pass

    @staticmethod
    def _validated(kernel: MetadataKernel) -> MetadataKernel:
        report = validate_kernel(kernel)
        if not report.valid:
            raise InvalidResultingKernel(
                "; ".join(v.message for v in report.violations)
            )
        return kernel

    @staticmethod
    def _add_relation(record: DoiRecord, target: DoiName, relation: RelationType) -> None:
        entry = RelatedIdentifier(target=target, relation_type=relation)
        if entry not in record.metadata.related_identifiers:
            record.metadata.related_identifiers.append(entry)

    def _link_inverse_pair(
        self, a: DoiRecord, b: DoiRecord, a_to_b: RelationType
    ) -> None:
        """Record ``a --a_to_b--> b`` together with the inverse on ``b``."""
        self._add_relation(a, b.name, a_to_b)
        self._add_relation(b, a.name, inverse_relation(a_to_b))

    # -- mutating operations ---------------------------------------------

    def mint_custom(
        self,
        creator: Creator,
        title: str,
        description: str,
        obs_ids: Iterable[str],
    ) -> DoiRecord:
        """Mint a new DOI over an author-chosen observation set.

        Suffix and date_created are auto-assigned; the target URL points
        at the resolver's portal view for the set. Identical inputs mint
        distinct DOIs: authors may group the same observations many ways.
        """
        with self._write_lock:
            ids = self._resolve_custom_ids(obs_ids)
            name = self._generate_name()
            now = self._clock()
            kernel = self._validated(
                MetadataKernel(
                    identifier=name,
                    creators=[creator],
                    title=title,
                    publisher=self._publisher,
                    publication_year=now.year,
                    description=description,
                    date_created=now,
                )
            )
            record = DoiRecord(
                name=name,
                metadata=kernel,
                dataset=CustomDataSet(obs_ids=ids),
                target_url=self._portal_url(name),
                state=DoiState.DRAFT,
            )
            self._register_with_ra(record)
            self._records[format_doi(name)] = record
            self._append_event(
                EventKind.MINTED, {"records": [record_to_document(record)]}
            )
            return record

    def assign_fixed(self, product_id: str) -> DoiRecord:
        """Return the registry record for a fixed product, creating it on first call."""
        with self._write_lock:
            product = self._catalog.get_fixed_product(product_id)
            key = format_doi(product.assigned_doi)
            if key in self._records:
                return self._records[key]
            now = self._clock()
            kernel = self._validated(
                MetadataKernel(
                    identifier=product.assigned_doi,
                    creators=[Creator(name=self._publisher)],
                    title=product.title,
                    publisher=self._publisher,
                    publication_year=now.year,
                    description=product.description,
                    date_created=now,
                )
            )
            record = DoiRecord(
                name=product.assigned_doi,
                metadata=kernel,
                dataset=FixedDataSet(product_id=product_id),
                target_url=product.landing_info_url,
                state=DoiState.FINDABLE,
            )
            if self._ra_client is not None:
                from .ra.client import RaError

                try:
                    self._ra_client.register_metadata(record)
                    self._ra_client.register_target(record.name, record.target_url)
                except RaError:
                    pass
            self._records[key] = record
            self._append_event(
                EventKind.FIXED_ASSIGNED, {"records": [record_to_document(record)]}
            )
            return record

    def edit_mediated(
        self, doi: DoiName | str, change: EditRequest, approval: str | None
    ) -> DoiRecord:
        """Apply a mediated dataset/metadata delta to an unlocked record.

        Mediation is mandatory: no approval token, no edit. The DOI name
        never changes; the event journal keeps before/after digests.
        """
        with self._write_lock:
            record = self.get(doi)
            if record.locked:
                raise Locked(f"{format_doi(record.name)} is locked after publication")
            if not approval:
                raise MissingApproval("mediated edits require an approval token")
            before_digest = _record_digest(record)

            # Stage the full delta, validate, and only then apply: a
            # rejected edit must leave the record untouched.
            new_dataset = record.dataset
            if change.add_obs_ids or change.remove_obs_ids:
                if not isinstance(record.dataset, CustomDataSet):
                    raise InvalidResultingKernel(
                        "fixed products have no observation membership to edit"
                    )
                current = list(record.dataset.obs_ids)
                for obs_id in change.add_obs_ids:
                    if not self._catalog.has_observation(obs_id):
                        raise UnknownObservation(obs_id)
                    if obs_id not in current:
                        current.append(obs_id)
                removals = set(change.remove_obs_ids)
                current = [o for o in current if o not in removals]
                if not current:
                    raise InvalidResultingKernel(
                        "edit would leave the data set empty"
                    )
                new_dataset = CustomDataSet(obs_ids=tuple(current))

            kernel = record.metadata.copy()
            if change.title is not None:
                kernel.title = change.title
            if change.description is not None:
                kernel.description = change.description
            if change.creators is not None:
                kernel.creators = list(change.creators)
            record.metadata = self._validated(kernel)
            record.dataset = new_dataset

            self._append_event(
                EventKind.EDITED,
                {
                    "doi": format_doi(record.name),
                    "before_digest": before_digest,
                    "after_digest": _record_digest(record),
                    "records": [record_to_document(record)],
                },
            )
            return record

    def supersede(
        self,
        old_doi: DoiName | str,
        new_dataset: DataSetSpec,
        *,
        title: str | None = None,
        description: str | None = None,
        creators: list[Creator] | None = None,
    ) -> DoiRecord:
        """Mint a successor for a published (locked) record.

        Old and new cross-reference through the IsNewVersionOf /
        IsPreviousVersionOf inverse pair; both stay resolvable forever.
        Unlocked records are edited, not superseded.
        """
        with self._write_lock:
            old = self.get(old_doi)
            if not old.locked:
                raise NotLocked(
                    f"{format_doi(old.name)} is not locked; use a mediated edit"
                )
            if isinstance(new_dataset, CustomDataSet):
                new_dataset = CustomDataSet(
                    obs_ids=self._resolve_custom_ids(new_dataset.obs_ids)
                )
                target_url_for = self._portal_url
            else:
                product = self._catalog.get_fixed_product(new_dataset.product_id)
                target_url_for = lambda _name: product.landing_info_url

            name = self._generate_name()
            now = self._clock()
            kernel = self._validated(
                MetadataKernel(
                    identifier=name,
                    creators=list(creators) if creators else list(old.metadata.creators),
                    title=title if title is not None else old.metadata.title,
                    publisher=self._publisher,
                    publication_year=now.year,
                    description=(
                        description if description is not None else old.metadata.description
                    ),
                    date_created=now,
                )
            )
            new = DoiRecord(
                name=name,
                metadata=kernel,
                dataset=new_dataset,
                target_url=target_url_for(name),
                state=DoiState.DRAFT,
            )
            self._link_inverse_pair(new, old, RelationType.IS_NEW_VERSION_OF)
            self._register_with_ra(new)
            self._records[format_doi(name)] = new
            self._append_event(
                EventKind.SUPERSEDED,
                {
                    "old": format_doi(old.name),
                    "new": format_doi(new.name),
                    "records": [record_to_document(new), record_to_document(old)],
                },
            )
            return new

    def redirect_spurious(
        self,
        doi: DoiName | str,
        replacement_doi: DoiName | str,
        approval: str | None,
    ) -> DoiRecord:
        """Point an erroneous record at its replacement; the record itself stays.

        Replacement targets must not themselves be redirected, which keeps
        every resolution a single hop and makes cycles impossible.
        """
        with self._write_lock:
            record = self.get(doi)
            replacement = self.get(replacement_doi)
            if not approval:
                raise MissingApproval("spurious redirection requires an approval token")
            if record.name == replacement.name:
                raise SelfRedirect(f"{format_doi(record.name)} cannot replace itself")
            if replacement.state is DoiState.REDIRECTED:
                raise RedirectTargetRedirected(
                    f"{format_doi(replacement.name)} is itself redirected"
                )
            record.state = DoiState.REDIRECTED
            record.redirect_to = replacement.name
            self._link_inverse_pair(record, replacement, RelationType.IS_OBSOLETED_BY)
            self._append_event(
                EventKind.REDIRECTED_SPURIOUS,
                {
                    "doi": format_doi(record.name),
                    "replacement": format_doi(replacement.name),
                    "records": [
                        record_to_document(record),
                        record_to_document(replacement),
                    ],
                },
            )
            return record

    def update_target(self, doi: DoiName | str, new_url: str) -> DoiRecord:
        """Replace the record's target URL; name and metadata stay untouched."""
        with self._write_lock:
            record = self.get(doi)
            record.target_url = _check_url(new_url)
            self._push_target_to_ra(record)
            self._append_event(
                EventKind.TARGET_UPDATED,
                {
                    "doi": format_doi(record.name),
                    "target_url": new_url,
                    "records": [record_to_document(record)],
                },
            )
            return record

    def lock(self, doi: DoiName | str) -> DoiRecord:
        """Freeze a record once its manuscript is published.

        Locked records accept only related-identifier additions and
        target-URL maintenance.
        """
        with self._write_lock:
            record = self.get(doi)
            record.locked = True
            self._append_event(
                EventKind.LOCKED,
                {
                    "doi": format_doi(record.name),
                    "records": [record_to_document(record)],
                },
            )
            return record
