#!/usr/bin/env python3
"""Regenerate the shipped fixtures deterministically.

Writes into fixtures/: the observation table, the fixed-product
manifest, the pilot submission-session log (driven through the real
workflow engine), and the grant-attribution bibliography.
"""

from __future__ import annotations

import random
import sys
from datetime import datetime, timedelta, timezone
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from datadoi.catalog import OBSERVATION_HEADER, PRODUCT_HEADER, ObservationCatalog
from datadoi.metadata import Creator
from datadoi.metrics import BIBLIOGRAPHY_HEADER
from datadoi.registry import DoiRegistry
from datadoi.workflow import (
    DataAnswer,
    NonComplianceReason,
    PathOption,
    QuestionWording,
    SubmissionWorkflow,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
PREFIX = "10.17909"

MISSION_PLAN = [
    # mission, rows, instruments, bands, target stem
    ("HST", 6000, ["WFC3", "ACS", "STIS", "COS", "WFPC2"], ["optical", "uv", "nir"], "NGC"),
    ("Kepler", 4000, ["PHOTOMETER"], ["optical"], "KIC"),
    ("GALEX", 2500, ["FUV-DETECTOR", "NUV-DETECTOR"], ["fuv", "nuv"], "GAL"),
    ("FUSE", 1200, ["LWRS", "MDRS"], ["fuv"], "HD"),
    ("IUE", 800, ["SWP", "LWP"], ["uv"], "HD"),
]

PRODUCTS = [
    (
        "hlsp-ultra-deep-survey",
        "hlsp",
        "Ultra Deep Imaging Survey",
        "Stacked deep-field imaging assembled from multi-cycle observations.",
        "https://archive.example.edu/hlsp/ultra-deep-survey",
        "t9gp4c",
    ),
    (
        "hlsp-transit-lightcurves",
        "hlsp",
        "Uniform Transit Light Curve Collection",
        "Detrended light curves for confirmed transiting planets.",
        "https://archive.example.edu/hlsp/transit-lightcurves",
        "t9hl21",
    ),
    (
        "kepler-input-catalog",
        "catalog",
        "Kepler Input Catalog",
        "Photometric and astrometric source catalog for the Kepler field.",
        "https://archive.example.edu/catalogs/kepler-input",
        "t9ct01",
    ),
    (
        "galex-source-catalog",
        "catalog",
        "GALEX Merged Source Catalog",
        "Merged UV source catalog across all-sky imaging.",
        "https://archive.example.edu/catalogs/galex-sources",
        "t9ct02",
    ),
    (
        "kepler-q9-long-cadence",
        "mission_subset",
        "Kepler Quarter 9 Long Cadence",
        "All long-cadence target pixel files from quarter 9.",
        "https://archive.example.edu/subsets/kepler-q9-lc",
        "t9ms01",
    ),
    (
        "galex-ais-gr6",
        "mission_subset",
        "GALEX All-Sky Imaging Survey GR6",
        "The complete GR6 all-sky imaging tile set.",
        "https://archive.example.edu/subsets/galex-ais-gr6",
        "t9ms02",
    ),
]


def write_observations(path: Path) -> list[str]:
    lines = [OBSERVATION_HEADER]
    obs_ids = []
    for mission, rows, instruments, bands, stem in MISSION_PLAN:
        for i in range(rows):
            obs_id = f"{mission.lower()}-{i + 1:05d}"
            target = f"{stem}-{1000 + (i * 17) % 9000}"
            instrument = instruments[i % len(instruments)]
            band = bands[i % len(bands)]
            url = f"https://archive.example.edu/data/{obs_id}"
            lines.append(f"{obs_id}|{mission}|{target}|{instrument}|{band}|{url}")
            obs_ids.append(obs_id)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return obs_ids


def write_products(path: Path) -> None:
    lines = [PRODUCT_HEADER]
    for row in PRODUCTS:
        lines.append("|".join(row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


class TickingClock:
    """Strictly increasing fake time, for reproducible fixture output."""

    def __init__(self, start: datetime):
        self._now = start

    def __call__(self) -> datetime:
        self._now += timedelta(minutes=1)
        return self._now


def write_pilot_log(path: Path, obs_path: Path, products_path: Path) -> None:
    if path.exists():
        path.unlink()
    catalog = ObservationCatalog()
    catalog.ingest_observations(obs_path)
    catalog.load_fixed_products(products_path, prefix=PREFIX)
    clock = TickingClock(datetime(2016, 3, 1, 9, 0, tzinfo=timezone.utc))
    rng = random.Random(20160301)
    registry = DoiRegistry(catalog, prefix=PREFIX, rng=rng, clock=clock)
    flow = SubmissionWorkflow(
        registry,
        catalog,
        question_wording=QuestionWording.ORIGINAL,
        log_path=path,
        clock=clock,
    )
    all_obs = sorted(
        f"hst-{i + 1:05d}" for i in range(6000)
    )

    def mint(author_n: int, count: int) -> str:
        start = (author_n * 97) % 5000
        record = registry.mint_custom(
            Creator(name=f"Author {author_n:02d}", affiliation="STScI"),
            f"Observation set {author_n:02d}",
            f"Observations analyzed for pilot manuscript {author_n:02d}.",
            all_obs[start : start + count],
        )
        return str(record.name)

    session_n = 0

    def run_custom(double: bool = False) -> None:
        nonlocal session_n
        session_n += 1
        session = flow.start_session(f"author{session_n:02d}@stsci.edu")
        flow.answer_data_question(session.session_id, DataAnswer.YES)
        flow.choose_path(session.session_id, PathOption.CUSTOM)
        flow.attach_doi(session.session_id, mint(session_n, 3 + session_n % 6))
        if double:
            flow.attach_doi(session.session_id, mint(100 + session_n, 4))
        flow.complete(session.session_id)
        flow.mark_eligible(session.session_id)

    def run_fixed(product_id: str) -> None:
        nonlocal session_n
        session_n += 1
        session = flow.start_session(f"author{session_n:02d}@stsci.edu")
        flow.answer_data_question(session.session_id, DataAnswer.YES)
        flow.choose_path(session.session_id, PathOption.HLSP)
        record = registry.assign_fixed(product_id)
        flow.attach_doi(session.session_id, str(record.name))
        flow.complete(session.session_id)
        flow.mark_eligible(session.session_id)

    def run_declined(reason: NonComplianceReason) -> None:
        nonlocal session_n
        session_n += 1
        session = flow.start_session(f"author{session_n:02d}@stsci.edu")
        flow.answer_data_question(session.session_id, DataAnswer.NO)
        flow.complete(session.session_id)
        flow.mark_eligible(session.session_id)
        flow.record_noncompliance_reason(session.session_id, reason)

    def run_assist(reason: NonComplianceReason) -> None:
        nonlocal session_n
        session_n += 1
        session = flow.start_session(f"author{session_n:02d}@stsci.edu")
        flow.answer_data_question(
            session.session_id,
            DataAnswer.NEED_ASSISTANCE,
            message="Not sure which of my data products qualify.",
        )
        flow.complete(session.session_id)
        flow.mark_eligible(session.session_id)
        flow.record_noncompliance_reason(session.session_id, reason)

    def run_ungated(email: str) -> None:
        session = flow.start_session(email)
        flow.complete(session.session_id)

    # 22 eligible submissions: 15 custom (one of them double-DOI), 2 fixed,
    # 5 non-compliant with follow-up reasons.
    for i in range(14):
        run_custom()
    run_custom(double=True)
    run_fixed("hlsp-ultra-deep-survey")
    run_fixed("hlsp-transit-lightcurves")
    run_declined(NonComplianceReason.PURPOSE_CONFUSION)
    run_declined(NonComplianceReason.HOSTING_CONCERN)
    run_declined(NonComplianceReason.TIME_INVESTMENT)
    run_declined(NonComplianceReason.OTHER)
    run_assist(NonComplianceReason.PROVENANCE_CONFUSION)
    # Two sessions from outside the allow-list never see the prompt and do
    # not enter the eligible population.
    run_ungated("visitor1@obs.example.edu")
    run_ungated("visitor2@uni.example.edu")
    flow.close()


def write_bibliography(path: Path, total: int = 14459, unattributable: int = 763) -> None:
    rng = random.Random(2016)
    missing = set(rng.sample(range(total), unattributable))
    lines = [BIBLIOGRAPHY_HEADER]
    for i in range(total):
        year = 1991 + (i * 7) % 26
        flag = "no" if i in missing else "yes"
        lines.append(f"PUB-{i + 1:05d}|{year}|{flag}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    obs_path = FIXTURES / "observations.psv"
    products_path = FIXTURES / "fixed_products.psv"
    write_observations(obs_path)
    write_products(products_path)
    write_pilot_log(FIXTURES / "pilot_sessions.log", obs_path, products_path)
    write_bibliography(FIXTURES / "bibliography.psv")
    for name in (
        "observations.psv",
        "fixed_products.psv",
        "pilot_sessions.log",
        "bibliography.psv",
    ):
        size = (FIXTURES / name).stat().st_size
        print(f"wrote fixtures/{name} ({size} bytes)")


if __name__ == "__main__":
    main()
