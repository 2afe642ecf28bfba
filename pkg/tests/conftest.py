from __future__ import annotations

from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest

from datadoi.catalog import OBSERVATION_HEADER, PRODUCT_HEADER, ObservationCatalog
from datadoi.identifiers import DoiName
from datadoi.metadata import Creator, MetadataKernel
from datadoi.registry import DoiRegistry

FIXTURES_DIR = Path(__file__).resolve().parent.parent / "fixtures"

SMALL_OBSERVATIONS = [
    OBSERVATION_HEADER,
    "hst-001|HST|NGC-1068|WFC3|optical|https://archive.example.edu/data/hst-001",
    "hst-002|HST|NGC-1068|ACS|uv|https://archive.example.edu/data/hst-002",
    "hst-003|HST|M-51|STIS|optical|https://archive.example.edu/data/hst-003",
    "kep-001|Kepler|KIC-8462852|PHOTOMETER|optical|https://archive.example.edu/data/kep-001",
    "kep-002|Kepler|KIC-11442793|PHOTOMETER|optical|https://archive.example.edu/data/kep-002",
    "gal-001|GALEX|GAL-2331|FUV-DETECTOR|fuv|https://archive.example.edu/data/gal-001",
    "gal-002|GALEX|GAL-118|NUV-DETECTOR|nuv|https://archive.example.edu/data/gal-002",
    "fuse-001|FUSE|HD-209458|LWRS|fuv|https://archive.example.edu/data/fuse-001",
    "iue-001|IUE|HD-172167|SWP|uv|https://archive.example.edu/data/iue-001",
    "iue-002|IUE|HD-48915|LWP|uv|https://archive.example.edu/data/iue-002",
]

SMALL_PRODUCTS = [
    PRODUCT_HEADER,
    "hlsp-ultra-deep-survey|hlsp|Ultra Deep Imaging Survey|Stacked deep-field imaging."
    "|https://archive.example.edu/hlsp/ultra-deep-survey|t9gp4c",
    "kepler-input-catalog|catalog|Kepler Input Catalog|Source catalog for the Kepler field."
    "|https://archive.example.edu/catalogs/kepler-input|t9ct01",
    "kepler-q9-long-cadence|mission_subset|Kepler Quarter 9 Long Cadence|Quarter 9 files."
    "|https://archive.example.edu/subsets/kepler-q9-lc|t9ms01",
]


class TickingClock:
    """Deterministic strictly-increasing clock."""

    def __init__(self, start: datetime | None = None):
        self._now = start or datetime(2016, 3, 1, 12, 0, tzinfo=timezone.utc)

    def __call__(self) -> datetime:
        self._now += timedelta(seconds=1)
        return self._now


class ScriptedRng:
    """rng stand-in whose choice() plays back a fixed script, then a
    fallback sequence."""

    def __init__(self, script: str):
        self._script = list(script)
        self._fallback = 0

    def choice(self, seq):
        if self._script:
            return self._script.pop(0)
        self._fallback += 1
        return seq[self._fallback % len(seq)]


@pytest.fixture
def small_catalog() -> ObservationCatalog:
    catalog = ObservationCatalog()
    catalog.ingest_observations(SMALL_OBSERVATIONS)
    catalog.load_fixed_products(SMALL_PRODUCTS, prefix="10.17909")
    return catalog


@pytest.fixture
def clock() -> TickingClock:
    return TickingClock()


@pytest.fixture
def registry(small_catalog, clock) -> DoiRegistry:
    import random

    return DoiRegistry(small_catalog, rng=random.Random(7), clock=clock)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES_DIR


def sample_custom_kernel() -> MetadataKernel:
    """A fully-populated kernel for the custom DOI 10.17909/t9kk61."""
    return MetadataKernel(
        identifier=DoiName("10.17909", "t9kk61"),
        creators=[Creator(name="Author 01", affiliation="STScI")],
        title="Spectra analyzed for pilot manuscript 01",
        publisher="MAST",
        publication_year=2016,
        description="Aggregated archive observations cited in one research article.",
        date_created=datetime(2016, 3, 1, 12, 0, tzinfo=timezone.utc),
    )
