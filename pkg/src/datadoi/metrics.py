"""Pilot outcome reporting and the link-survival argument.

Compliance aggregates are a pure fold over the submission log. The rot
simulation pits raw URLs (which break permanently on their first
unmaintained location change) against maintained identifiers (whose
target is updated on every change, so resolution never fails).
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

__all__ = [
    "MetricsError",
    "CorruptLog",
    "CorruptFixture",
    "ComplianceReport",
    "compliance_report",
    "RotParameters",
    "SurvivalComparison",
    "simulate_link_rot",
    "AttributionGapReport",
    "attribution_gap_report",
]


class MetricsError(Exception):
    pass


class CorruptLog(MetricsError):
    def __init__(self, line_number: int, detail: str):
        super().__init__(f"line {line_number}: {detail}")
        self.line_number = line_number


class CorruptFixture(MetricsError):
    def __init__(self, line_number: int, detail: str):
        super().__init__(f"line {line_number}: {detail}")
        self.line_number = line_number


def _read_lines(source: str | Path | Iterable[str]) -> list[str]:
    if isinstance(source, (str, Path)):
        return Path(source).read_text(encoding="utf-8").splitlines()
    return [line.rstrip("\n") for line in source]


# -- compliance ------------------------------------------------------------


@dataclass
class ComplianceReport:
    eligible_count: int
    compliant_count: int
    custom_doi_count: int
    fixed_doi_count: int
    compliance_rate_percent: float
    reason_histogram: dict[str, int] = field(default_factory=dict)
    empty: bool = False

    def to_document(self) -> dict:
        return {
            "eligible_count": self.eligible_count,
            "compliant_count": self.compliant_count,
            "custom_doi_count": self.custom_doi_count,
            "fixed_doi_count": self.fixed_doi_count,
            "compliance_rate_percent": self.compliance_rate_percent,
            "reason_histogram": dict(sorted(self.reason_histogram.items())),
            "empty": self.empty,
        }

    def render_table(self) -> str:
        lines = [
            "submission compliance",
            "---------------------",
            f"{'eligible submissions':<28}{self.eligible_count}",
            f"{'compliant submissions':<28}{self.compliant_count}",
            f"{'custom DOI submissions':<28}{self.custom_doi_count}",
            f"{'fixed DOI submissions':<28}{self.fixed_doi_count}",
        ]
        for reason, count in sorted(self.reason_histogram.items()):
            lines.append(f"{'reason ' + reason:<28}{count}")
        lines.append(f"{'compliance rate':<28}{self.compliance_rate_percent:.1f}%")
        return "\n".join(lines)


@dataclass
class _SessionFold:
    eligible: bool = False
    completed: bool = False
    compliant: bool = False
    kinds: set = field(default_factory=set)
    reason: str | None = None


def _truncate_rate(compliant: int, eligible: int) -> float:
    """One-decimal percent, truncated: 17/22 renders 77.2, not 77.3."""
    if eligible == 0:
        return 0.0
    return math.floor(compliant / eligible * 1000) / 10


def compliance_report(session_log: str | Path | Iterable[str]) -> ComplianceReport:
    """Fold a submission log into the pilot aggregates.

    A submission that attached several DOIs counts once. Order of lines
    across sessions does not matter; only each session's own events do.
    """
    lines = _read_lines(session_log)
    sessions: dict[str, _SessionFold] = {}
    for line_number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        parts = line.split("|", 4)
        if len(parts) != 5:
            raise CorruptLog(line_number, "expected seq|timestamp|session|event|payload")
        _seq, _ts, session_id, event, payload_text = parts
        try:
            payload = json.loads(payload_text)
        except json.JSONDecodeError as exc:
            raise CorruptLog(line_number, f"bad payload: {exc}") from None
        fold = sessions.setdefault(session_id, _SessionFold())
        if event == "eligible":
            fold.eligible = bool(payload["eligible"])
        elif event == "doi_attached":
            fold.kinds.add(payload["kind"])
        elif event == "completed":
            fold.completed = True
            fold.compliant = bool(payload["counted_compliant"])
        elif event == "reason":
            fold.reason = payload["reason"]
        elif event not in ("started", "answered", "path_chosen"):
            raise CorruptLog(line_number, f"unknown event {event!r}")

    eligible = [f for f in sessions.values() if f.eligible]
    compliant = [f for f in eligible if f.compliant]
    histogram: dict[str, int] = {}
    for fold in eligible:
        if not fold.compliant and fold.reason:
            histogram[fold.reason] = histogram.get(fold.reason, 0) + 1
    return ComplianceReport(
        eligible_count=len(eligible),
        compliant_count=len(compliant),
        custom_doi_count=sum(1 for f in compliant if "custom" in f.kinds),
        fixed_doi_count=sum(1 for f in compliant if "fixed" in f.kinds),
        compliance_rate_percent=_truncate_rate(len(compliant), len(eligible)),
        reason_histogram=histogram,
        empty=len(eligible) == 0,
    )


# -- link rot ---------------------------------------------------------------


@dataclass(frozen=True)
class RotParameters:
    link_count: int
    years: int
    annual_mutation_probability: float
    seed: int

    def __post_init__(self) -> None:
        if self.link_count <= 0 or self.years <= 0:
            raise ValueError("link_count and years must be positive")
        if not 0.0 <= self.annual_mutation_probability < 1.0:
            raise ValueError("annual mutation probability must be in [0, 1)")


@dataclass(frozen=True)
class SurvivalComparison:
    """Per-year broken fractions, with the analytic curve 1-(1-p)^t."""

    years: tuple[int, ...]
    broken_raw_fraction: tuple[float, ...]
    doi_failure_fraction: tuple[float, ...]
    analytic_fraction: tuple[float, ...]

    def to_document(self) -> dict:
        return {
            "years": list(self.years),
            "broken_raw_fraction": list(self.broken_raw_fraction),
            "doi_failure_fraction": list(self.doi_failure_fraction),
            "analytic_fraction": list(self.analytic_fraction),
        }

    def render_table(self) -> str:
        lines = [
            "year  raw broken  doi failed  analytic",
            "----  ----------  ----------  --------",
        ]
        for i, year in enumerate(self.years):
            lines.append(
                f"{year:>4}      {self.broken_raw_fraction[i]:.4f}"
                f"      {self.doi_failure_fraction[i]:.4f}    {self.analytic_fraction[i]:.4f}"
            )
        return "\n".join(lines)


def _first_mutation_year(seed: int, link_index: int, p: float, years: int) -> int | None:
    # String seeding keeps the draw stable per link, independent of the
    # order links are processed in.
    rng = random.Random(f"{seed}:{link_index}")
    for year in range(1, years + 1):
        if rng.random() < p:
            return year
    return None


def simulate_link_rot(params: RotParameters, maintain: bool = True) -> SurvivalComparison:
    """Simulate location churn for raw URLs versus maintained identifiers.

    Every link's location mutates each year with the given probability.
    A raw URL fails permanently at its first mutation. With maintenance
    on, each mutation triggers a target update, so identifier resolution
    keeps succeeding; with it off, the identifier's stored target goes
    stale exactly like the raw URL.
    """
    p = params.annual_mutation_probability
    horizon = params.years
    mutation_years = [
        _first_mutation_year(params.seed, i, p, horizon)
        for i in range(params.link_count)
    ]
    broken_raw = []
    doi_failed = []
    analytic = []
    for year in range(1, horizon + 1):
        broken = sum(1 for m in mutation_years if m is not None and m <= year)
        fraction = broken / params.link_count
        broken_raw.append(fraction)
        doi_failed.append(0.0 if maintain else fraction)
        analytic.append(1.0 - (1.0 - p) ** year)
    return SurvivalComparison(
        years=tuple(range(1, horizon + 1)),
        broken_raw_fraction=tuple(broken_raw),
        doi_failure_fraction=tuple(doi_failed),
        analytic_fraction=tuple(analytic),
    )


# -- attribution gap ---------------------------------------------------------

BIBLIOGRAPHY_HEADER = "pub_id|year|grant_attributable"


@dataclass(frozen=True)
class AttributionGapReport:
    unattributable_count: int
    total: int
    percent: float

    def to_document(self) -> dict:
        return {
            "unattributable_count": self.unattributable_count,
            "total": self.total,
            "percent": self.percent,
        }


def attribution_gap_report(source: str | Path | Iterable[str]) -> AttributionGapReport:
    """Count bibliography rows that cannot be attributed to any grant."""
    lines = _read_lines(source)
    if lines and lines[0] != BIBLIOGRAPHY_HEADER:
        raise CorruptFixture(1, f"header must be {BIBLIOGRAPHY_HEADER!r}")
    total = 0
    unattributable = 0
    for line_number, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split("|")
        if len(parts) != 3 or parts[2] not in ("yes", "no"):
            raise CorruptFixture(line_number, f"bad row {line!r}")
        total += 1
        if parts[2] == "no":
            unattributable += 1
    percent = 0.0 if total == 0 else round(unattributable / total * 100, 1)
    return AttributionGapReport(
        unattributable_count=unattributable, total=total, percent=percent
    )
