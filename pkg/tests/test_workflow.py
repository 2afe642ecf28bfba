import json

import pytest

from datadoi.catalog import ProductKind
from datadoi.identifiers import MalformedDoi, format_doi
from datadoi.metadata import Creator
from datadoi.registry import UnknownDoi
from datadoi.workflow import (
    DataAnswer,
    DuplicateAttachment,
    MalformedEmail,
    NonComplianceReason,
    PathOption,
    SessionState,
    SubmissionWorkflow,
    WrongState,
)

CREATOR = Creator(name="Author 01", affiliation="STScI")


@pytest.fixture
def flow(registry, small_catalog):
    return SubmissionWorkflow(registry, small_catalog)


def fresh_doi(registry) -> str:
    return format_doi(
        registry.mint_custom(CREATOR, "Set", "", ["hst-001"]).name
    )


class TestStartSession:
    def test_allow_listed_domain_is_prompted(self, flow):
        session = flow.start_session("a@stsci.edu")
        assert session.state is SessionState.PROMPT_SHOWN

    def test_other_domain_is_not_prompted(self, flow):
        session = flow.start_session("a@example.edu")
        assert session.state is SessionState.STARTED
        # Ungated sessions complete without any DOI.
        record = flow.complete(session.session_id)
        assert record.used_mast is False
        assert record.counted_compliant is False

    def test_malformed_email(self, flow):
        with pytest.raises(MalformedEmail):
            flow.start_session("not-an-email")

    def test_subdomain_matches(self, registry, small_catalog):
        flow = SubmissionWorkflow(
            registry, small_catalog, allowed_domains=("stsci.edu",)
        )
        assert (
            flow.start_session("a@mail.stsci.edu").state is SessionState.PROMPT_SHOWN
        )

    def test_question_wording_recorded_per_session(self, registry, small_catalog):
        from datadoi.workflow import QUESTION_TEXT, QuestionWording

        assert set(QUESTION_TEXT) == {QuestionWording.ORIGINAL, QuestionWording.REVISED}
        flow = SubmissionWorkflow(
            registry, small_catalog, question_wording=QuestionWording.ORIGINAL
        )
        session = flow.start_session("a@stsci.edu")
        assert session.question_wording is QuestionWording.ORIGINAL
        assert "question_wording" in flow.log_lines()[0]


class TestAnswerDataQuestion:
    def test_yes_routes_to_doi_home(self, flow):
        session = flow.start_session("a@stsci.edu")
        assert (
            flow.answer_data_question(session.session_id, DataAnswer.YES).state
            is SessionState.AT_DOI_HOME
        )

    def test_no_reroutes_and_completes(self, flow):
        session = flow.start_session("a@stsci.edu")
        flow.answer_data_question(session.session_id, DataAnswer.NO)
        record = flow.complete(session.session_id)
        assert record.used_mast is False

    def test_assistance_emits_contact_record(self, flow):
        session = flow.start_session("a@stsci.edu")
        flow.answer_data_question(
            session.session_id, DataAnswer.NEED_ASSISTANCE, message="please help"
        )
        assert flow.get_session(session.session_id).state is (
            SessionState.ASSISTANCE_REQUESTED
        )
        assert flow.contacts == [
            {
                "session_id": session.session_id,
                "author_email": "a@stsci.edu",
                "message": "please help",
                "at": flow.contacts[0]["at"],
            }
        ]


class TestChoosePath:
    def test_custom_path(self, flow):
        session = flow.start_session("a@stsci.edu")
        flow.answer_data_question(session.session_id, DataAnswer.YES)
        session = flow.choose_path(session.session_id, PathOption.CUSTOM)
        assert session.state is SessionState.PATH_CHOSEN
        assert session.path is PathOption.CUSTOM
        assert flow.fixed_menu(PathOption.CUSTOM) == []

    def test_hlsp_menu_filtered_by_kind(self, flow):
        menu = flow.fixed_menu(PathOption.HLSP)
        assert menu and all(p.kind is ProductKind.HLSP for p in menu)
        assert any(format_doi(p.assigned_doi) == "10.17909/t9gp4c" for p in menu)

    def test_catalog_and_subset_menus(self, flow):
        assert all(
            p.kind is ProductKind.CATALOG for p in flow.fixed_menu(PathOption.CATALOG)
        )
        assert all(
            p.kind is ProductKind.MISSION_SUBSET
            for p in flow.fixed_menu(PathOption.MISSION_SUBSET)
        )

    def test_choose_before_answering(self, flow):
        session = flow.start_session("a@stsci.edu")
        with pytest.raises(WrongState):
            flow.choose_path(session.session_id, PathOption.CUSTOM)


class TestAttachDoi:
    def _at_path_chosen(self, flow):
        session = flow.start_session("a@stsci.edu")
        flow.answer_data_question(session.session_id, DataAnswer.YES)
        return flow.choose_path(session.session_id, PathOption.CUSTOM)

    def test_paste_minted_doi(self, flow, registry):
        session = self._at_path_chosen(flow)
        doi = fresh_doi(registry)
        session = flow.attach_doi(session.session_id, doi)
        assert session.state is SessionState.DOIS_ATTACHED
        assert session.attached_dois == [doi]

    def test_duplicate_rejected(self, flow, registry):
        session = self._at_path_chosen(flow)
        doi = fresh_doi(registry)
        flow.attach_doi(session.session_id, doi)
        with pytest.raises(DuplicateAttachment):
            flow.attach_doi(session.session_id, doi.upper())

    def test_two_distinct_dois_retained(self, flow, registry):
        session = self._at_path_chosen(flow)
        first, second = fresh_doi(registry), fresh_doi(registry)
        flow.attach_doi(session.session_id, first)
        flow.attach_doi(session.session_id, second)
        assert flow.get_session(session.session_id).attached_dois == [first, second]

    def test_malformed_and_unknown(self, flow, registry):
        session = self._at_path_chosen(flow)
        with pytest.raises(MalformedDoi):
            flow.attach_doi(session.session_id, "not-a-doi")
        with pytest.raises(UnknownDoi):
            flow.attach_doi(session.session_id, "10.17909/t9none")

    def test_only_the_string_crosses_the_boundary(self, flow, registry):
        session = self._at_path_chosen(flow)
        flow.attach_doi(session.session_id, fresh_doi(registry))
        record = flow.complete(session.session_id)
        doc = record.to_document()
        assert set(doc) == {
            "session_id",
            "author_email",
            "used_mast",
            "dois",
            "counted_compliant",
        }
        assert all(isinstance(d, str) for d in doc["dois"])


class TestComplete:
    def test_multi_doi_counts_once(self, flow, registry):
        session = flow.start_session("a@stsci.edu")
        flow.answer_data_question(session.session_id, DataAnswer.YES)
        flow.choose_path(session.session_id, PathOption.CUSTOM)
        flow.attach_doi(session.session_id, fresh_doi(registry))
        flow.attach_doi(session.session_id, fresh_doi(registry))
        record = flow.complete(session.session_id)
        assert record.counted_compliant is True
        assert len(record.dois) == 2  # one record, one compliance count

    def test_at_doi_home_cannot_complete(self, flow):
        session = flow.start_session("a@stsci.edu")
        flow.answer_data_question(session.session_id, DataAnswer.YES)
        with pytest.raises(WrongState):
            flow.complete(session.session_id)

    def test_assistance_session_completes_noncompliant(self, flow):
        session = flow.start_session("a@stsci.edu")
        flow.answer_data_question(session.session_id, DataAnswer.NEED_ASSISTANCE)
        record = flow.complete(session.session_id)
        assert record.used_mast is True
        assert record.counted_compliant is False


class TestReasonAndEligibility:
    def test_reason_on_declined(self, flow):
        session = flow.start_session("a@stsci.edu")
        flow.answer_data_question(session.session_id, DataAnswer.NO)
        flow.record_noncompliance_reason(
            session.session_id, NonComplianceReason.PURPOSE_CONFUSION
        )
        assert (
            flow.get_session(session.session_id).reason
            is NonComplianceReason.PURPOSE_CONFUSION
        )

    def test_reason_rejected_after_attachment(self, flow, registry):
        session = flow.start_session("a@stsci.edu")
        flow.answer_data_question(session.session_id, DataAnswer.YES)
        flow.choose_path(session.session_id, PathOption.CUSTOM)
        flow.attach_doi(session.session_id, fresh_doi(registry))
        with pytest.raises(WrongState):
            flow.record_noncompliance_reason(
                session.session_id, NonComplianceReason.OTHER
            )

    def test_mark_eligible_logged(self, flow):
        session = flow.start_session("a@stsci.edu")
        flow.mark_eligible(session.session_id)
        events = [line.split("|", 4)[3] for line in flow.log_lines()]
        assert "eligible" in events


class TestTransitionTable:
    """Exhaustive (state x action) legality check against the workflow
    diagram plus the assistance branch."""

    ACTIONS = ("answer", "choose_path", "attach", "complete")
    LEGAL = {
        (SessionState.PROMPT_SHOWN, "answer"),
        (SessionState.AT_DOI_HOME, "choose_path"),
        (SessionState.PATH_CHOSEN, "attach"),
        (SessionState.DOIS_ATTACHED, "attach"),
        (SessionState.STARTED, "complete"),
        (SessionState.DECLINED_MAST, "complete"),
        (SessionState.DOIS_ATTACHED, "complete"),
        (SessionState.ASSISTANCE_REQUESTED, "complete"),
    }

    def _session_in_state(self, flow, registry, state: SessionState):
        if state is SessionState.STARTED:
            return flow.start_session("a@uni.example.edu")
        session = flow.start_session("a@stsci.edu")
        if state is SessionState.PROMPT_SHOWN:
            return session
        if state is SessionState.DECLINED_MAST:
            return flow.answer_data_question(session.session_id, DataAnswer.NO)
        if state is SessionState.ASSISTANCE_REQUESTED:
            return flow.answer_data_question(
                session.session_id, DataAnswer.NEED_ASSISTANCE
            )
        flow.answer_data_question(session.session_id, DataAnswer.YES)
        if state is SessionState.AT_DOI_HOME:
            return session
        flow.choose_path(session.session_id, PathOption.CUSTOM)
        if state is SessionState.PATH_CHOSEN:
            return session
        flow.attach_doi(session.session_id, fresh_doi(registry))
        if state is SessionState.DOIS_ATTACHED:
            return session
        flow.complete(session.session_id)
        assert state is SessionState.COMPLETED
        return session

    def _apply(self, flow, registry, session, action: str):
        if action == "answer":
            flow.answer_data_question(session.session_id, DataAnswer.YES)
        elif action == "choose_path":
            flow.choose_path(session.session_id, PathOption.CUSTOM)
        elif action == "attach":
            flow.attach_doi(session.session_id, fresh_doi(registry))
        else:
            flow.complete(session.session_id)

    def test_every_state_action_pair(self, registry, small_catalog):
        for state in SessionState:
            for action in self.ACTIONS:
                flow = SubmissionWorkflow(registry, small_catalog)
                session = self._session_in_state(flow, registry, state)
                assert flow.get_session(session.session_id).state is state
                if (state, action) in self.LEGAL:
                    self._apply(flow, registry, session, action)
                else:
                    with pytest.raises(WrongState):
                        self._apply(flow, registry, session, action)


class TestSessionLog:
    def test_log_lines_are_parseable_records(self, registry, small_catalog, tmp_path):
        path = tmp_path / "sessions.log"
        flow = SubmissionWorkflow(registry, small_catalog, log_path=path)
        session = flow.start_session("a@stsci.edu")
        flow.answer_data_question(session.session_id, DataAnswer.YES)
        flow.choose_path(session.session_id, PathOption.CUSTOM)
        flow.attach_doi(session.session_id, fresh_doi(registry))
        flow.complete(session.session_id)
        flow.mark_eligible(session.session_id)
        flow.close()
        lines = path.read_text().splitlines()
        assert len(lines) == 6
        for i, line in enumerate(lines, start=1):
            seq, _ts, sid, event, payload = line.split("|", 4)
            assert int(seq) == i
            assert sid == session.session_id
            json.loads(payload)
        assert [line.split("|", 4)[3] for line in lines] == [
            "started",
            "answered",
            "path_chosen",
            "doi_attached",
            "completed",
            "eligible",
        ]
