"""Mock observation archive: individual observations plus fixed curated products.

The catalog ingests a pipe-delimited observation table once, loads a
fixed-product manifest once, and is immutable afterwards. Observation
rows are never copied into DOI metadata; records reference obs_ids only.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable
from urllib.parse import urlparse

from .identifiers import DoiName, format_doi, parse_doi

__all__ = [
    "Observation",
    "ProductKind",
    "FixedProduct",
    "QueryCriteria",
    "CatalogError",
    "DuplicateObsId",
    "MissingField",
    "EmptyCriteria",
    "ObservationNotFound",
    "UnknownProduct",
    "ObservationCatalog",
    "OBSERVATION_HEADER",
    "PRODUCT_HEADER",
]

OBSERVATION_HEADER = "obs_id|mission|target_name|instrument|wavelength_band|data_url"
PRODUCT_HEADER = "product_id|kind|title|description|landing_info_url|doi_suffix"


class CatalogError(Exception):
    pass


class DuplicateObsId(CatalogError):
    def __init__(self, row: int, obs_id: str):
        super().__init__(f"row {row}: duplicate obs_id {obs_id!r}")
        self.row = row
        self.obs_id = obs_id


class MissingField(CatalogError):
    def __init__(self, row: int, detail: str):
        super().__init__(f"row {row}: {detail}")
        self.row = row


class EmptyCriteria(CatalogError):
    pass


class ObservationNotFound(CatalogError):
    def __init__(self, obs_id: str):
        super().__init__(f"no observation {obs_id!r}")
        self.obs_id = obs_id


class UnknownProduct(CatalogError):
    def __init__(self, product_id: str):
        super().__init__(f"no fixed product {product_id!r}")
        self.product_id = product_id


@dataclass(frozen=True)
class Observation:
    obs_id: str
    mission: str
    target_name: str
    instrument: str
    wavelength_band: str
    data_url: str


class ProductKind(str, Enum):
    """The three fixed-DOI menu options: curated product, catalog, mission subset."""

    HLSP = "hlsp"
    CATALOG = "catalog"
    MISSION_SUBSET = "mission_subset"


@dataclass(frozen=True)
class FixedProduct:
    product_id: str
    kind: ProductKind
    title: str
    description: str
    landing_info_url: str
    assigned_doi: DoiName


@dataclass(frozen=True)
class QueryCriteria:
    """Conjunctive filters; requires at least one filter or the all-rows flag."""

    mission: str | None = None
    target_name: str | None = None
    instrument: str | None = None
    wavelength_band: str | None = None
    all_rows: bool = False
    max_results: int | None = None

    def filters(self) -> dict[str, str]:
        named = {
            "mission": self.mission,
            "target_name": self.target_name,
            "instrument": self.instrument,
            "wavelength_band": self.wavelength_band,
        }
        return {k: v for k, v in named.items() if v}


def _is_url(text: str) -> bool:
    parts = urlparse(text)
    return parts.scheme in ("http", "https") and bool(parts.netloc)


def _read_lines(source: str | Path | Iterable[str]) -> list[str]:
    if isinstance(source, (str, Path)):
        return Path(source).read_text(encoding="utf-8").splitlines()
    return [line.rstrip("\n") for line in source]


class ObservationCatalog:
    """Source of truth for observations and pre-assigned fixed-product DOIs."""

    def __init__(self) -> None:
        self._observations: dict[str, Observation] = {}
        self._products: dict[str, FixedProduct] = {}
        self._obs_loaded = False
        self._products_loaded = False

    def ingest_observations(self, source: str | Path | Iterable[str]) -> int:
        """Load the observation table; one-shot, duplicates rejected by row."""
        if self._obs_loaded:
            raise CatalogError("observation catalog already ingested")
        lines = _read_lines(source)
        if lines and lines[0] != OBSERVATION_HEADER:
            raise MissingField(1, f"header must be {OBSERVATION_HEADER!r}")
        staged: dict[str, Observation] = {}
        for row, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            fields = line.split("|")
            if len(fields) != 6:
                raise MissingField(row, f"expected 6 fields, got {len(fields)}")
            obs = Observation(*fields)
            if not all(
                (obs.obs_id, obs.mission, obs.target_name, obs.instrument, obs.wavelength_band)
            ):
                raise MissingField(row, "empty field")
            if not _is_url(obs.data_url):
                raise MissingField(row, f"data_url {obs.data_url!r} is not a URL")
            if obs.obs_id in staged:
                raise DuplicateObsId(row, obs.obs_id)
            staged[obs.obs_id] = obs
        self._observations = staged
        self._obs_loaded = True
        return len(staged)

    def load_fixed_products(
        self, source: str | Path | Iterable[str], prefix: str
    ) -> int:
        """Load the fixed-product manifest; DOI assignment must be injective."""
        if self._products_loaded:
            raise CatalogError("fixed products already loaded")
        lines = _read_lines(source)
        if lines and lines[0] != PRODUCT_HEADER:
            raise MissingField(1, f"header must be {PRODUCT_HEADER!r}")
        staged: dict[str, FixedProduct] = {}
        seen_dois: set[str] = set()
        for row, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            fields = line.split("|")
            if len(fields) != 6:
                raise MissingField(row, f"expected 6 fields, got {len(fields)}")
            product_id, kind, title, description, info_url, suffix = fields
            if not all((product_id, kind, title, info_url, suffix)):
                raise MissingField(row, "empty field")
            if not _is_url(info_url):
                raise MissingField(row, f"landing_info_url {info_url!r} is not a URL")
            if product_id in staged:
                raise MissingField(row, f"duplicate product_id {product_id!r}")
            doi = parse_doi(f"{prefix}/{suffix}")
            if format_doi(doi) in seen_dois:
                raise MissingField(row, f"duplicate assigned DOI suffix {suffix!r}")
            seen_dois.add(format_doi(doi))
            staged[product_id] = FixedProduct(
                product_id=product_id,
                kind=ProductKind(kind),
                title=title,
                description=description,
                landing_info_url=info_url,
                assigned_doi=doi,
            )
        self._products = staged
        self._products_loaded = True
        return len(staged)

    def query(self, criteria: QueryCriteria) -> list[str]:
        """Conjunctive filter over the catalog; obs_id ascending order."""
        filters = criteria.filters()
        if not filters and not criteria.all_rows:
            raise EmptyCriteria("give at least one filter or set all_rows")
        matched = []
        for obs_id in sorted(self._observations):
            obs = self._observations[obs_id]
            if "mission" in filters and obs.mission != filters["mission"]:
                continue
            if "target_name" in filters and filters["target_name"] not in obs.target_name:
                continue
            if "instrument" in filters and obs.instrument != filters["instrument"]:
                continue
            if (
                "wavelength_band" in filters
                and obs.wavelength_band != filters["wavelength_band"]
            ):
                continue
            matched.append(obs_id)
            if criteria.max_results is not None and len(matched) >= criteria.max_results:
                break
        return matched

    def get_observation(self, obs_id: str) -> Observation:
        try:
            return self._observations[obs_id]
        except KeyError:
            raise ObservationNotFound(obs_id) from None

    def has_observation(self, obs_id: str) -> bool:
        return obs_id in self._observations

    def get_fixed_products(self) -> list[FixedProduct]:
        return [self._products[pid] for pid in sorted(self._products)]

    def get_fixed_product(self, product_id: str) -> FixedProduct:
        try:
            return self._products[product_id]
        except KeyError:
            raise UnknownProduct(product_id) from None

    def reserved_dois(self) -> set[str]:
        """Canonical strings of every pre-assigned fixed-product DOI."""
        return {format_doi(p.assigned_doi) for p in self._products.values()}

    def __len__(self) -> int:
        return len(self._observations)
