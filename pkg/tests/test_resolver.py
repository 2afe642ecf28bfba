import random

import pytest

from conftest import ScriptedRng, TickingClock
from datadoi.identifiers import MalformedDoi, format_doi
from datadoi.metadata import Creator, RelationType
from datadoi.registry import CustomDataSet, DoiRegistry, EditRequest, UnknownDoi
from datadoi.resolver import (
    NotACustomDoi,
    ResolutionOutcome,
    landing_html,
    portal_dataset_view,
    render_landing,
    resolve,
)

CREATOR = Creator(name="Author 01", affiliation="STScI")


class TestResolve:
    def test_custom_doi_resolves_to_landing_with_portal_link(self, small_catalog, clock):
        registry = DoiRegistry(small_catalog, rng=ScriptedRng("kk61"), clock=clock)
        record = registry.mint_custom(CREATOR, "Set one", "", ["hst-001", "hst-002"])
        assert format_doi(record.name) == "10.17909/t9kk61"
        result = resolve(registry, "10.17909/t9kk61")
        assert result.outcome is ResolutionOutcome.REDIRECT_TO_LANDING
        assert result.landing is not None
        assert result.landing.dataset["kind"] == "custom"
        assert result.landing.dataset["link"].endswith("/portal/10.17909/t9kk61")

    def test_never_minted_not_found(self, registry):
        result = resolve(registry, "10.17909/zzzzzz")
        assert result.outcome is ResolutionOutcome.NOT_FOUND
        assert result.landing is None

    def test_malformed_doi(self, registry):
        with pytest.raises(MalformedDoi):
            resolve(registry, "not-a-doi")

    def test_redirect_resolves_in_two_steps(self, registry):
        a = registry.mint_custom(CREATOR, "A", "", ["hst-001"])
        b = registry.mint_custom(CREATOR, "B", "", ["hst-002"])
        registry.redirect_spurious(a.name, b.name, approval="ok")

        # Walk oracle: first hop names the replacement, second hop lands.
        first = resolve(registry, format_doi(a.name))
        assert first.outcome is ResolutionOutcome.REDIRECTED_RECORD
        assert first.redirect_to == b.name
        second = resolve(registry, format_doi(first.redirect_to))
        assert second.outcome is ResolutionOutcome.REDIRECT_TO_LANDING
        assert second.landing.doi == format_doi(b.name)

    def test_resolution_totality_small_scale(self, registry):
        minted = []
        for i in range(6):
            minted.append(
                registry.mint_custom(CREATOR, f"Set {i}", "", ["hst-001"]).name
            )
        registry.lock(minted[0])
        minted.append(
            registry.supersede(minted[0], CustomDataSet(obs_ids=("kep-001",))).name
        )
        registry.redirect_spurious(minted[1], minted[2], approval="ok")
        for name in minted:
            assert (
                resolve(registry, format_doi(name)).outcome
                is not ResolutionOutcome.NOT_FOUND
            )


class TestRenderLanding:
    def test_fixed_product_links_to_info_url(self, registry):
        registry.assign_fixed("hlsp-ultra-deep-survey")
        doc = render_landing(registry, "10.17909/t9gp4c")
        assert doc.dataset["kind"] == "fixed"
        assert doc.dataset["link"] == "https://archive.example.edu/hlsp/ultra-deep-survey"
        assert doc.title == "Ultra Deep Imaging Survey"

    def test_custom_reports_observation_count(self, registry):
        record = registry.mint_custom(
            CREATOR, "Three", "", ["hst-001", "hst-002", "hst-003"]
        )
        doc = render_landing(registry, record.name)
        assert doc.dataset["observation_count"] == 3
        assert doc.dataset["link"].endswith(
            f"/portal/{record.name.prefix}/{record.name.suffix}"
        )

    def test_superseded_record_lists_successor(self, registry):
        old = registry.mint_custom(CREATOR, "Old", "", ["hst-001"])
        registry.lock(old.name)
        new = registry.supersede(old.name, CustomDataSet(obs_ids=("hst-002",)))
        doc = render_landing(registry, old.name)
        # Oracle: the registry's own relation table.
        expected = [
            {"target": format_doi(rel.target), "relation_type": rel.relation_type.value}
            for rel in registry.get(old.name).metadata.related_identifiers
        ]
        assert doc.related_identifiers == expected
        assert {
            "target": format_doi(new.name),
            "relation_type": RelationType.IS_PREVIOUS_VERSION_OF.value,
        } in doc.related_identifiers

    def test_unknown_doi(self, registry):
        with pytest.raises(UnknownDoi):
            render_landing(registry, "10.17909/t9none")

    def test_read_your_writes(self, registry):
        record = registry.mint_custom(CREATOR, "Set", "", ["hst-001"])
        registry.update_target(record.name, "https://moved.example.edu/x")
        assert (
            render_landing(registry, record.name).dataset["link"]
            == "https://moved.example.edu/x"
        )
        registry.edit_mediated(record.name, EditRequest(title="Renamed"), approval="ok")
        assert render_landing(registry, record.name).title == "Renamed"

    def test_html_has_stable_element_ids(self, registry):
        record = registry.mint_custom(CREATOR, "Set <one>", "", ["hst-001"])
        page = landing_html(render_landing(registry, record.name))
        for element_id in (
            "doi",
            "title",
            "creators",
            "publisher",
            "publication-year",
            "description",
            "dataset",
            "related-identifiers",
            "state",
        ):
            assert f'id="{element_id}"' in page
        assert "Set &lt;one&gt;" in page  # escaped


class TestPortalDatasetView:
    def test_membership_identity_in_mint_order(self, registry, small_catalog):
        record = registry.mint_custom(
            CREATOR, "Trio", "", ["kep-002", "hst-001", "gal-001"]
        )
        rows = portal_dataset_view(registry, small_catalog, record.name)
        assert [r.obs_id for r in rows] == ["kep-002", "hst-001", "gal-001"]

    def test_fixed_doi_rejected(self, registry, small_catalog):
        registry.assign_fixed("hlsp-ultra-deep-survey")
        with pytest.raises(NotACustomDoi):
            portal_dataset_view(registry, small_catalog, "10.17909/t9gp4c")

    def test_unknown(self, registry, small_catalog):
        with pytest.raises(UnknownDoi):
            portal_dataset_view(registry, small_catalog, "10.17909/t9none")


class TestUpdateResolveInterleavings:
    def test_thousand_random_interleavings_never_fail(self, small_catalog):
        registry = DoiRegistry(
            small_catalog, rng=random.Random(5), clock=TickingClock()
        )
        records = [
            registry.mint_custom(CREATOR, f"Set {i}", "", ["hst-001"]) for i in range(4)
        ]
        last_url = {format_doi(r.name): r.target_url for r in records}
        rng = random.Random(77)
        for step in range(1_000):
            doi = format_doi(rng.choice(records).name)
            if rng.random() < 0.5:
                url = f"https://host{rng.randint(0, 99)}.example.edu/{step}"
                registry.update_target(doi, url)
                last_url[doi] = url
            else:
                result = resolve(registry, doi)
                assert result.outcome is ResolutionOutcome.REDIRECT_TO_LANDING
                assert result.landing.dataset["link"] == last_url[doi]
