"""Journal-integration workflow: the author's path from prompt to paste-back.

Gated authors are asked whether archive data was used; "Yes" leads
through a path choice (custom mint or fixed menu) to attaching one or
more DOI strings. Nothing but the strings crosses the publisher
boundary. Every step is appended to a session log that the metrics
module folds into the pilot aggregates.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Callable

from .catalog import FixedProduct, ObservationCatalog, ProductKind
from .identifiers import format_doi, parse_doi
from .registry import CustomDataSet, DoiRegistry

__all__ = [
    "SessionState",
    "DataAnswer",
    "PathOption",
    "QuestionWording",
    "NonComplianceReason",
    "QUESTION_TEXT",
    "WorkflowError",
    "MalformedEmail",
    "WrongState",
    "DuplicateAttachment",
    "UnknownSession",
    "SubmissionSession",
    "SubmissionRecord",
    "SubmissionWorkflow",
]


class SessionState(str, Enum):
    STARTED = "Started"
    PROMPT_SHOWN = "PromptShown"
    DECLINED_MAST = "DeclinedMast"
    AT_DOI_HOME = "AtDoiHome"
    PATH_CHOSEN = "PathChosen"
    DOIS_ATTACHED = "DoisAttached"
    ASSISTANCE_REQUESTED = "AssistanceRequested"
    COMPLETED = "Completed"


class DataAnswer(str, Enum):
    YES = "Yes"
    NO = "No"
    NEED_ASSISTANCE = "NeedAssistance"


class PathOption(str, Enum):
    CUSTOM = "a"
    HLSP = "b"
    CATALOG = "c"
    MISSION_SUBSET = "d"


_PATH_TO_KIND = {
    PathOption.HLSP: ProductKind.HLSP,
    PathOption.CATALOG: ProductKind.CATALOG,
    PathOption.MISSION_SUBSET: ProductKind.MISSION_SUBSET,
}


class QuestionWording(str, Enum):
    ORIGINAL = "Original"
    REVISED = "Revised"


QUESTION_TEXT = {
    QuestionWording.ORIGINAL: (
        "Does your manuscript directly refer to data in MAST "
        "(i.e., data from Hubble, Kepler, GALEX, IUE, etc.)?"
    ),
    QuestionWording.REVISED: (
        "Does your manuscript use or analyze data from Hubble, Kepler, "
        "GALEX, IUE, or other data in MAST?"
    ),
}


class NonComplianceReason(str, Enum):
    PURPOSE_CONFUSION = "PurposeConfusion"
    HOSTING_CONCERN = "HostingConcern"
    PROVENANCE_CONFUSION = "ProvenanceConfusion"
    TIME_INVESTMENT = "TimeInvestment"
    OTHER = "Other"


class WorkflowError(Exception):
    pass


class MalformedEmail(WorkflowError):
    pass


class WrongState(WorkflowError):
    pass


class DuplicateAttachment(WorkflowError):
    pass


class UnknownSession(WorkflowError):
    pass


_EMAIL_RE = re.compile(r"^[^@\s]+@[^@\s]+\.[^@\s.]+$")


@dataclass
class SubmissionSession:
    session_id: str
    author_email: str
    state: SessionState
    question_wording: QuestionWording
    path: PathOption | None = None
    attached_dois: list[str] = field(default_factory=list)
    assist_message: str | None = None
    used_mast: bool | None = None
    eligible: bool | None = None
    reason: NonComplianceReason | None = None

    def to_document(self) -> dict:
        return {
            "session_id": self.session_id,
            "author_email": self.author_email,
            "state": self.state.value,
            "question_wording": self.question_wording.value,
            "path": self.path.value if self.path else None,
            "attached_dois": list(self.attached_dois),
            "assist_message": self.assist_message,
            "used_mast": self.used_mast,
            "eligible": self.eligible,
            "reason": self.reason.value if self.reason else None,
        }


@dataclass(frozen=True)
class SubmissionRecord:
    """Immutable completion record; stores DOI strings only."""

    session_id: str
    author_email: str
    used_mast: bool
    dois: tuple[str, ...]
    counted_compliant: bool

    def to_document(self) -> dict:
        return {
            "session_id": self.session_id,
            "author_email": self.author_email,
            "used_mast": self.used_mast,
            "dois": list(self.dois),
            "counted_compliant": self.counted_compliant,
        }


def _utc_now() -> datetime:
    return datetime.now(timezone.utc)


class SubmissionWorkflow:
    """State machine host for submission sessions, one log line per step."""

    def __init__(
        self,
        registry: DoiRegistry,
        catalog: ObservationCatalog,
        *,
        allowed_domains: tuple[str, ...] = ("stsci.edu",),
        question_wording: QuestionWording = QuestionWording.REVISED,
        log_path: str | Path | None = None,
        clock: Callable[[], datetime] = _utc_now,
    ) -> None:
        self._registry = registry
        self._catalog = catalog
        self._allowed_domains = tuple(d.lower() for d in allowed_domains)
        self._question_wording = question_wording
        self._clock = clock
        self._sessions: dict[str, SubmissionSession] = {}
        self._records: dict[str, SubmissionRecord] = {}
        self._contacts: list[dict] = []
        self._next_id = 1
        self._log_seq = 0
        self._log_lines: list[str] = []
        self._log_file = None
        if log_path is not None:
            path = Path(log_path)
            path.parent.mkdir(parents=True, exist_ok=True)
            self._log_file = path.open("a", encoding="utf-8")

    def close(self) -> None:
        if self._log_file is not None:
            self._log_file.close()
            self._log_file = None

    # -- log ---------------------------------------------------------------

    def _log(self, session_id: str, event: str, payload: dict) -> None:
        self._log_seq += 1
        line = "|".join(
            (
                str(self._log_seq),
                self._clock().isoformat(),
                session_id,
                event,
                json.dumps(payload, sort_keys=True),
            )
        )
        self._log_lines.append(line)
        if self._log_file is not None:
            self._log_file.write(line + "\n")
            self._log_file.flush()

    def log_lines(self) -> list[str]:
        return list(self._log_lines)

    @property
    def contacts(self) -> list[dict]:
        return list(self._contacts)

    # -- session access ------------------------------------------------------

    def get_session(self, session_id: str) -> SubmissionSession:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise UnknownSession(session_id) from None

    def get_record(self, session_id: str) -> SubmissionRecord:
        try:
            return self._records[session_id]
        except KeyError:
            raise UnknownSession(session_id) from None

    def _domain_gated(self, email: str) -> bool:
        domain = email.rsplit("@", 1)[1].lower()
        return any(
            domain == allowed or domain.endswith("." + allowed)
            for allowed in self._allowed_domains
        )

    # -- operations ----------------------------------------------------------

    def start_session(self, author_email: str) -> SubmissionSession:
        """Open a session; only allow-listed domains see the data prompt."""
        if not _EMAIL_RE.match(author_email or ""):
            raise MalformedEmail(f"{author_email!r} is not an email address")
        session_id = f"sess-{self._next_id:04d}"
        self._next_id += 1
        gated = self._domain_gated(author_email)
        session = SubmissionSession(
            session_id=session_id,
            author_email=author_email,
            state=SessionState.PROMPT_SHOWN if gated else SessionState.STARTED,
            question_wording=self._question_wording,
        )
        self._sessions[session_id] = session
        self._log(
            session_id,
            "started",
            {
                "author_email": author_email,
                "gated": gated,
                "question_wording": session.question_wording.value,
            },
        )
        return session

    def answer_data_question(
        self, session_id: str, answer: DataAnswer, message: str | None = None
    ) -> SubmissionSession:
        session = self.get_session(session_id)
        if session.state is not SessionState.PROMPT_SHOWN:
            raise WrongState(f"cannot answer the data question in {session.state.value}")
        if answer is DataAnswer.YES:
            session.state = SessionState.AT_DOI_HOME
            session.used_mast = True
        elif answer is DataAnswer.NO:
            session.state = SessionState.DECLINED_MAST
            session.used_mast = False
        else:
            session.state = SessionState.ASSISTANCE_REQUESTED
            session.used_mast = True
            session.assist_message = message or ""
            contact = {
                "session_id": session_id,
                "author_email": session.author_email,
                "message": session.assist_message,
                "at": self._clock().isoformat(),
            }
            self._contacts.append(contact)
        self._log(
            session_id,
            "answered",
            {"answer": answer.value, "state": session.state.value},
        )
        return session

    def choose_path(self, session_id: str, path: PathOption) -> SubmissionSession:
        session = self.get_session(session_id)
        if session.state is not SessionState.AT_DOI_HOME:
            raise WrongState(f"cannot choose a path in {session.state.value}")
        session.state = SessionState.PATH_CHOSEN
        session.path = path
        self._log(session_id, "path_chosen", {"path": path.value})
        return session

    def fixed_menu(self, path: PathOption) -> list[FixedProduct]:
        """The fixed-DOI menu for options b/c/d; empty for the custom path."""
        kind = _PATH_TO_KIND.get(path)
        if kind is None:
            return []
        return [p for p in self._catalog.get_fixed_products() if p.kind is kind]

    def attach_doi(self, session_id: str, doi_string: str) -> SubmissionSession:
        """Paste a DOI into the submission; only the string crosses over."""
        session = self.get_session(session_id)
        if session.state not in (SessionState.PATH_CHOSEN, SessionState.DOIS_ATTACHED):
            raise WrongState(f"cannot attach a DOI in {session.state.value}")
        name = parse_doi(doi_string)
        record = self._registry.get(name)  # raises UnknownDoi
        canonical = format_doi(name)
        if canonical in session.attached_dois:
            raise DuplicateAttachment(canonical)
        session.attached_dois.append(canonical)
        session.state = SessionState.DOIS_ATTACHED
        kind = "custom" if isinstance(record.dataset, CustomDataSet) else "fixed"
        self._log(session_id, "doi_attached", {"doi": canonical, "kind": kind})
        return session

    def complete(self, session_id: str) -> SubmissionRecord:
        """Close the session; a multi-DOI submission still counts once."""
        session = self.get_session(session_id)
        if session.state not in (
            SessionState.DECLINED_MAST,
            SessionState.DOIS_ATTACHED,
            SessionState.ASSISTANCE_REQUESTED,
            SessionState.STARTED,
        ):
            raise WrongState(f"cannot complete from {session.state.value}")
        used_mast = bool(session.used_mast)
        record = SubmissionRecord(
            session_id=session_id,
            author_email=session.author_email,
            used_mast=used_mast,
            dois=tuple(session.attached_dois),
            counted_compliant=used_mast and bool(session.attached_dois),
        )
        session.state = SessionState.COMPLETED
        self._records[session_id] = record
        self._log(
            session_id,
            "completed",
            {
                "used_mast": record.used_mast,
                "dois": list(record.dois),
                "counted_compliant": record.counted_compliant,
            },
        )
        return record

    def mark_eligible(self, session_id: str, eligible: bool = True) -> SubmissionSession:
        """Publisher-side verification that the manuscript used archive data."""
        session = self.get_session(session_id)
        session.eligible = eligible
        self._log(session_id, "eligible", {"eligible": eligible})
        return session

    def record_noncompliance_reason(
        self, session_id: str, reason: NonComplianceReason
    ) -> SubmissionSession:
        """Attach a follow-up reason to a session that produced no DOI."""
        session = self.get_session(session_id)
        if session.attached_dois:
            raise WrongState("session attached DOIs; it is not non-compliant")
        session.reason = reason
        self._log(session_id, "reason", {"reason": reason.value})
        return session
