"""Acceptance gate: one test per release criterion, at its stated tolerance.

Each test prints a single PASS line when its criterion holds; pytest
fails the run (and prints nothing for that criterion) otherwise. Run
with ``pytest tests/test_acceptance.py -s`` to see the lines.
"""

import random
import re
import time

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from conftest import FIXTURES_DIR, SMALL_OBSERVATIONS, SMALL_PRODUCTS, TickingClock
from datadoi.catalog import ObservationCatalog
from datadoi.cli import main as cli_main
from datadoi.identifiers import format_doi
from datadoi.metadata import (
    Creator,
    RelationType,
    inverse_relation,
    kernel_from_document,
    kernel_to_document,
)
from datadoi.metrics import RotParameters, simulate_link_rot
from datadoi.ra.client import RaClient
from datadoi.ra.stub import RaStore, build_ra_app
from datadoi.registry import (
    CustomDataSet,
    DoiRegistry,
    DoiState,
    EditRequest,
    RelatedIdentifier,
)
from datadoi.resolver import ResolutionOutcome, portal_dataset_view, resolve
from datadoi.workflow import (
    DataAnswer,
    PathOption,
    SessionState,
    SubmissionWorkflow,
    WrongState,
)

CREATOR = Creator(name="Author 01", affiliation="STScI")


def _report(criterion: str) -> None:
    print(f"ACCEPTANCE PASS: {criterion}")


def small_stack(seed=0, with_ra=False):
    catalog = ObservationCatalog()
    catalog.ingest_observations(SMALL_OBSERVATIONS)
    catalog.load_fixed_products(SMALL_PRODUCTS, prefix="10.17909")
    ra_client = None
    ra_store = None
    if with_ra:
        ra_store = RaStore()
        ra_client = RaClient(
            http_client=TestClient(build_ra_app(ra_store)), backoff=0.0
        )
    registry = DoiRegistry(
        catalog,
        rng=random.Random(seed),
        clock=TickingClock(),
        ra_client=ra_client,
    )
    return catalog, registry, ra_store, ra_client


class TestPilotComplianceReproduction:
    def test_report_compliance_matches_pilot_outcomes(self):
        started = time.perf_counter()
        result = CliRunner().invoke(
            cli_main,
            ["report", "compliance", str(FIXTURES_DIR / "pilot_sessions.log")],
        )
        elapsed = time.perf_counter() - started
        assert result.exit_code == 0
        table = result.output
        assert re.search(r"eligible submissions\s+22\b", table)
        assert re.search(r"compliant submissions\s+17\b", table)
        assert re.search(r"custom DOI submissions\s+15\b", table)
        assert re.search(r"fixed DOI submissions\s+2\b", table)
        assert table.rstrip().endswith("77.2%")
        assert elapsed < 1.0
        _report(
            "pilot compliance reproduction (eligible=22 compliant=17 custom=15 "
            f"fixed=2 rate=77.2% in {elapsed:.3f}s)"
        )


class TestPersistenceProperty:
    def test_every_minted_doi_resolves_after_1000_random_op_sequences(self):
        started = time.perf_counter()
        catalog = ObservationCatalog()
        catalog.ingest_observations(SMALL_OBSERVATIONS)
        catalog.load_fixed_products(SMALL_PRODUCTS, prefix="10.17909")
        checked = 0
        for sequence in range(1_000):
            rng = random.Random(20160308 + sequence)
            registry = DoiRegistry(
                catalog, rng=random.Random(sequence), clock=TickingClock()
            )
            minted = [
                registry.mint_custom(CREATOR, "seed set", "", ["hst-001"]).name
            ]
            for _ in range(rng.randint(4, 12)):
                op = rng.choice(
                    ["mint", "update_target", "supersede", "redirect_spurious", "lock"]
                )
                target = registry.get(rng.choice(minted))
                if op == "mint":
                    minted.append(
                        registry.mint_custom(CREATOR, "set", "", ["kep-001"]).name
                    )
                elif op == "update_target":
                    registry.update_target(
                        target.name, f"https://h{rng.randrange(16)}.example.edu/x"
                    )
                elif op == "lock":
                    registry.lock(target.name)
                elif op == "supersede":
                    registry.lock(target.name)
                    minted.append(
                        registry.supersede(
                            target.name, CustomDataSet(obs_ids=("gal-001",))
                        ).name
                    )
                else:
                    replacement = registry.get(rng.choice(minted))
                    if (
                        replacement.name != target.name
                        and replacement.state is not DoiState.REDIRECTED
                    ):
                        registry.redirect_spurious(
                            target.name, replacement.name, approval="ok"
                        )
            for name in minted:
                outcome = resolve(registry, format_doi(name)).outcome
                assert outcome is not ResolutionOutcome.NOT_FOUND
                checked += 1
        elapsed = time.perf_counter() - started
        assert elapsed < 60.0
        _report(
            f"persistence property (1000 sequences, {checked} resolutions, "
            f"0 NotFound in {elapsed:.1f}s)"
        )


class TestLinkRotComparison:
    def test_decade_and_three_year_fractions(self):
        started = time.perf_counter()
        params = RotParameters(
            link_count=10_000, years=10, annual_mutation_probability=0.05, seed=20160301
        )
        result = simulate_link_rot(params, maintain=True)
        year3 = result.broken_raw_fraction[2]
        year10 = result.broken_raw_fraction[9]
        assert abs(year10 - 0.4013) <= 0.02
        assert abs(year3 - 0.1426) <= 0.02
        assert all(f == 0.0 for f in result.doi_failure_fraction)
        elapsed = time.perf_counter() - started
        assert elapsed < 10.0
        _report(
            f"link-rot comparison (year3={year3:.4f}, year10={year10:.4f}, "
            f"doi failures 0.0 at every year, {elapsed:.2f}s)"
        )


class TestVersionSymmetry:
    def test_supersession_chains_cross_reference_mutually(self):
        for chain_length in range(1, 6):
            _catalog, registry, _store, _client = small_stack(seed=chain_length)
            current = registry.mint_custom(CREATOR, "v1", "", ["hst-001"])
            chain = [current.name]
            for _ in range(chain_length):
                registry.lock(current.name)
                current = registry.supersede(
                    current.name, CustomDataSet(obs_ids=("kep-001",))
                )
                chain.append(current.name)
            violations = 0
            for name in chain:
                record = registry.get(name)
                for rel in record.metadata.related_identifiers:
                    mirrored = RelatedIdentifier(
                        target=record.name,
                        relation_type=inverse_relation(rel.relation_type),
                    )
                    if mirrored not in registry.get(rel.target).metadata.related_identifiers:
                        violations += 1
                # Exhaustive pairing: consecutive versions must carry the
                # IsNewVersionOf / IsPreviousVersionOf pair.
            for older, newer in zip(chain, chain[1:]):
                assert (
                    RelatedIdentifier(older, RelationType.IS_NEW_VERSION_OF)
                    in registry.get(newer).metadata.related_identifiers
                )
                assert (
                    RelatedIdentifier(newer, RelationType.IS_PREVIOUS_VERSION_OF)
                    in registry.get(older).metadata.related_identifiers
                )
            assert violations == 0
        _report("version symmetry (chains of length 1..5, zero violations)")


class TestNoDeleteAtTheWire:
    def test_stub_refuses_delete_and_registry_grows_monotonically(self):
        http = TestClient(build_ra_app(RaStore()))
        for path in (
            "/",
            "/metadata/10.17909/t9kk61",
            "/target/10.17909/t9kk61",
            "/metadata/a/b/c",
            "/nonsense",
        ):
            assert http.delete(path).status_code == 405

        _catalog, registry, _store, _client = small_stack(seed=5, with_ra=True)
        counts = [len(registry)]

        def step(op):
            op()
            counts.append(len(registry))

        a = registry.mint_custom(CREATOR, "a", "", ["hst-001"])
        counts.append(len(registry))
        b = registry.mint_custom(CREATOR, "b", "", ["hst-002"])
        counts.append(len(registry))
        step(lambda: registry.assign_fixed("hlsp-ultra-deep-survey"))
        step(lambda: registry.update_target(a.name, "https://m.example.edu/a"))
        step(
            lambda: registry.edit_mediated(
                a.name, EditRequest(add_obs_ids=["gal-001"]), approval="ok"
            )
        )
        step(lambda: registry.lock(a.name))
        step(
            lambda: registry.supersede(a.name, CustomDataSet(obs_ids=("iue-001",)))
        )
        step(lambda: registry.redirect_spurious(b.name, a.name, approval="ok"))
        assert counts == sorted(counts)
        _report(
            "no-delete at the wire (DELETE=405 on all paths; record count "
            f"monotone over {len(counts)} checkpoints)"
        )


class TestScaleCheck:
    def test_mint_over_14001_observations(self):
        catalog = ObservationCatalog()
        catalog.ingest_observations(FIXTURES_DIR / "observations.psv")
        catalog.load_fixed_products(
            FIXTURES_DIR / "fixed_products.psv", prefix="10.17909"
        )
        registry = DoiRegistry(catalog, rng=random.Random(14001), clock=TickingClock())
        all_ids = sorted(
            line.split("|", 1)[0]
            for line in (FIXTURES_DIR / "observations.psv")
            .read_text()
            .splitlines()[1:]
        )
        chosen = all_ids[:14_001]
        started = time.perf_counter()
        record = registry.mint_custom(
            CREATOR, "Everything analyzed", "", chosen
        )
        elapsed = time.perf_counter() - started
        assert elapsed < 5.0
        assert len(record.dataset.obs_ids) == 14_001
        view = portal_dataset_view(registry, catalog, record.name)
        assert [obs.obs_id for obs in view] == chosen
        _report(
            f"scale check (minted over 14001 observations in {elapsed * 1000:.0f}ms; "
            "portal view equals the input id set)"
        )


class TestWorkflowLegality:
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

    def test_exhaustive_state_action_enumeration(self):
        catalog, registry, _store, _client = small_stack(seed=9)

        def fresh_doi():
            return format_doi(
                registry.mint_custom(CREATOR, "set", "", ["hst-001"]).name
            )

        def place(flow, state):
            if state is SessionState.STARTED:
                return flow.start_session("a@uni.example.edu")
            session = flow.start_session("a@stsci.edu")
            steps = {
                SessionState.PROMPT_SHOWN: [],
                SessionState.DECLINED_MAST: [("answer", DataAnswer.NO)],
                SessionState.ASSISTANCE_REQUESTED: [
                    ("answer", DataAnswer.NEED_ASSISTANCE)
                ],
                SessionState.AT_DOI_HOME: [("answer", DataAnswer.YES)],
                SessionState.PATH_CHOSEN: [("answer", DataAnswer.YES), ("path", None)],
                SessionState.DOIS_ATTACHED: [
                    ("answer", DataAnswer.YES),
                    ("path", None),
                    ("attach", None),
                ],
                SessionState.COMPLETED: [
                    ("answer", DataAnswer.YES),
                    ("path", None),
                    ("attach", None),
                    ("complete", None),
                ],
            }[state]
            for kind, arg in steps:
                if kind == "answer":
                    flow.answer_data_question(session.session_id, arg)
                elif kind == "path":
                    flow.choose_path(session.session_id, PathOption.CUSTOM)
                elif kind == "attach":
                    flow.attach_doi(session.session_id, fresh_doi())
                else:
                    flow.complete(session.session_id)
            return session

        checked = 0
        for state in SessionState:
            for action in self.ACTIONS:
                flow = SubmissionWorkflow(registry, catalog)
                session = place(flow, state)
                assert flow.get_session(session.session_id).state is state

                def apply():
                    if action == "answer":
                        flow.answer_data_question(session.session_id, DataAnswer.YES)
                    elif action == "choose_path":
                        flow.choose_path(session.session_id, PathOption.CUSTOM)
                    elif action == "attach":
                        flow.attach_doi(session.session_id, fresh_doi())
                    else:
                        flow.complete(session.session_id)

                if (state, action) in self.LEGAL:
                    apply()
                else:
                    with pytest.raises(WrongState):
                        apply()
                checked += 1
        assert checked == len(SessionState) * len(self.ACTIONS)
        _report(
            f"workflow legality ({checked} state-action pairs match the "
            "transition table; all illegal pairs raise WrongState)"
        )


def full_acceptance_scenario(registry):
    """Touch every mutating operation at least once."""
    a = registry.mint_custom(CREATOR, "Scenario A", "", ["hst-001", "hst-002"])
    b = registry.mint_custom(CREATOR, "Scenario B", "", ["kep-001", "kep-002"])
    fixed = registry.assign_fixed("hlsp-ultra-deep-survey")
    registry.edit_mediated(
        a.name,
        EditRequest(add_obs_ids=["gal-001"], description="expanded"),
        approval="aas-ok",
    )
    registry.update_target(b.name, "https://moved.example.edu/b")
    registry.lock(a.name)
    c = registry.supersede(
        a.name, CustomDataSet(obs_ids=("iue-001", "iue-002")), title="Scenario A v2"
    )
    registry.lock(c.name)
    d = registry.supersede(c.name, CustomDataSet(obs_ids=("fuse-001",)))
    registry.redirect_spurious(b.name, d.name, approval="aas-ok")
    registry.update_target(d.name, "https://moved.example.edu/d")
    registry.lock(fixed.name)
    return registry


class TestJournalDeterminism:
    def test_replay_digest_equals_live_digest(self):
        catalog, registry, _store, _client = small_stack(seed=77, with_ra=True)
        full_acceptance_scenario(registry)
        replayed = DoiRegistry.replay(registry.journal_lines(), catalog)
        assert replayed.state_digest() == registry.state_digest()
        assert replayed.snapshot_document() == registry.snapshot_document()
        _report(
            "journal determinism (replayed digest "
            f"{replayed.state_digest()[:12]}… equals live digest)"
        )


class TestMetadataRoundTrip:
    def test_every_record_kernel_survives_the_wire(self):
        _catalog, registry, _store, ra_client = small_stack(seed=31, with_ra=True)
        full_acceptance_scenario(registry)
        count = 0
        for name in registry.all_names():
            record = registry.get(name)
            # serialize -> RA-register -> fetch -> parse
            ra_client.register_metadata(record)
            fetched_doc, _url = ra_client.fetch_registration(record.name)
            assert kernel_from_document(fetched_doc) == record.metadata
            assert fetched_doc == kernel_to_document(record.metadata)
            count += 1
        assert count >= 5
        _report(
            f"metadata round-trip ({count} records survive "
            "serialize→register→fetch→parse field-for-field)"
        )
