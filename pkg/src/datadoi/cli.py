"""Operator command line: ingestion, serving, minting, resolution, reports.

Every subcommand is a thin adapter over the same operations the HTTP
services call, against the same journal-backed registry, so CLI and
service use produce identical state.
"""

from __future__ import annotations

import json
import shutil
import threading
import time
from pathlib import Path

import click
import uvicorn

from .catalog import CatalogError, ObservationCatalog
from .config import ServiceConfig, load_config
from .identifiers import MalformedDoi, format_doi, parse_doi
from .metadata import Creator
from .metrics import (
    MetricsError,
    RotParameters,
    compliance_report,
    simulate_link_rot,
)
from .ra.client import RaClient, RaError
from .ra.stub import RaStore, build_ra_app
from .registry import CustomDataSet, RegistryError
from .resolver import NotACustomDoi, ResolutionOutcome, resolve
from .service import build_archive_app, build_context, build_workflow_app
from .workflow import WorkflowError

_DOMAIN_ERRORS = (
    CatalogError,
    RegistryError,
    WorkflowError,
    MetricsError,
    MalformedDoi,
    RaError,
    NotACustomDoi,
)


def _fail(exc: Exception) -> click.ClickException:
    return click.ClickException(f"{type(exc).__name__}: {exc}")


def _in_process_ra_client(ra_app) -> RaClient:
    # Same wire contract as the TCP stub, dispatched in process.
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    return RaClient(http_client=TestClient(ra_app), backoff=0.0)


def _load_catalog(config: ServiceConfig) -> ObservationCatalog:
    catalog = ObservationCatalog()
    if not config.observations_path.exists():
        raise click.ClickException(
            f"no ingested catalog under {config.data_dir}; run `datadoi ingest` first"
        )
    catalog.ingest_observations(config.observations_path)
    if config.products_path.exists():
        catalog.load_fixed_products(config.products_path, prefix=config.prefix)
    return catalog


def _load_context(config: ServiceConfig, ra_app=None):
    catalog = _load_catalog(config)
    ra_app = ra_app if ra_app is not None else build_ra_app(RaStore())
    ctx = build_context(
        config,
        catalog,
        ra_client=_in_process_ra_client(ra_app),
        journal_path=config.journal_path,
        session_log_path=config.session_log_path,
    )
    # Fixed DOIs are pre-assigned: make every manifest product resolvable
    # up front (idempotent on reload).
    for product in catalog.get_fixed_products():
        ctx.registry.assign_fixed(product.product_id)
    return ctx


def _sync_registry_to_ra(ctx) -> None:
    """Re-register journal-replayed records with this process's agency.

    The stub's store is process-local; a real agency would already hold
    them. PUTs are idempotent, so this is safe on every boot.
    """
    from datadoi.registry import DoiState

    for name in ctx.registry.all_names():
        record = ctx.registry.get(name)
        if record.state is DoiState.DRAFT:
            continue
        try:
            ctx.ra_client.register_metadata(record)
            ctx.ra_client.register_target(record.name, record.target_url)
        except RaError:
            continue


@click.group()
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="JSON configuration file (env vars DATADOI_* override).",
)
@click.pass_context
def main(ctx: click.Context, config_path: str | None):
    """Archive DOI service operations."""
    ctx.obj = load_config(config_path)


@main.command()
@click.argument("obs_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("product_manifest", type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
def ingest(config: ServiceConfig, obs_file: str, product_manifest: str):
    """Validate and install the observation table and fixed-product manifest."""
    catalog = ObservationCatalog()
    try:
        count = catalog.ingest_observations(obs_file)
        products = catalog.load_fixed_products(product_manifest, prefix=config.prefix)
    except _DOMAIN_ERRORS as exc:
        raise _fail(exc)
    config.data_dir.mkdir(parents=True, exist_ok=True)
    shutil.copyfile(obs_file, config.observations_path)
    shutil.copyfile(product_manifest, config.products_path)
    click.echo(f"ingested {count} observations, {products} fixed products")


@main.command()
@click.option("--creator", required=True, help="Submitting author name.")
@click.option("--affiliation", default=None, help="Author affiliation.")
@click.option("--title", required=True, help="Data set title.")
@click.option("--description", default="", help="Free-text data set description.")
@click.option(
    "--obs-file",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
    help="File with one obs_id per line.",
)
@click.pass_obj
def mint_custom(
    config: ServiceConfig,
    creator: str,
    affiliation: str | None,
    title: str,
    description: str,
    obs_file: str,
):
    """Mint a custom DOI over the observations listed in OBS-FILE."""
    obs_ids = [
        line.strip() for line in Path(obs_file).read_text().splitlines() if line.strip()
    ]
    ctx = _load_context(config)
    try:
        record = ctx.registry.mint_custom(
            Creator(name=creator, affiliation=affiliation), title, description, obs_ids
        )
    except _DOMAIN_ERRORS as exc:
        raise _fail(exc)
    finally:
        ctx.registry.close()
    click.echo(format_doi(record.name))
    click.echo(f"title: {record.metadata.title}")
    click.echo(f"observations: {len(record.dataset.obs_ids)}")
    click.echo(f"state: {record.state.value}")
    click.echo(f"target: {record.target_url}")


@main.command(name="resolve")
@click.argument("doi")
@click.pass_obj
def resolve_cmd(config: ServiceConfig, doi: str):
    """Resolve DOI and print its landing location and title."""
    ctx = _load_context(config)
    try:
        result = resolve(ctx.registry, doi)
        while result.outcome is ResolutionOutcome.REDIRECTED_RECORD:
            click.echo(f"redirected: {format_doi(result.redirect_to)}")
            result = resolve(ctx.registry, format_doi(result.redirect_to))
        if result.outcome is ResolutionOutcome.NOT_FOUND:
            raise click.ClickException(f"NotFound: {doi} was never minted")
        name = result.doi
        click.echo(f"{config.resolver_base_url}/landing/{name.prefix}/{name.suffix}")
        click.echo(result.landing.title)
    except _DOMAIN_ERRORS as exc:
        raise _fail(exc)
    finally:
        ctx.registry.close()


@main.command()
@click.argument("doi")
@click.option(
    "--obs-file",
    default=None,
    type=click.Path(exists=True, dir_okay=False),
    help="Observations for the new version (defaults to the old set).",
)
@click.option("--title", default=None)
@click.option("--description", default=None)
@click.pass_obj
def supersede(
    config: ServiceConfig,
    doi: str,
    obs_file: str | None,
    title: str | None,
    description: str | None,
):
    """Mint a new version of a published DOI; both versions stay resolvable."""
    ctx = _load_context(config)
    try:
        old = ctx.registry.get(parse_doi(doi))
        if obs_file is not None:
            obs_ids = [
                line.strip()
                for line in Path(obs_file).read_text().splitlines()
                if line.strip()
            ]
            dataset = CustomDataSet(obs_ids=tuple(obs_ids))
        else:
            dataset = old.dataset
        record = ctx.registry.supersede(
            old.name, dataset, title=title, description=description
        )
    except _DOMAIN_ERRORS as exc:
        raise _fail(exc)
    finally:
        ctx.registry.close()
    click.echo(format_doi(record.name))
    click.echo(f"supersedes: {doi.lower()}")


@main.command()
@click.argument("doi")
@click.pass_obj
def lock(config: ServiceConfig, doi: str):
    """Freeze a record after its manuscript is published."""
    ctx = _load_context(config)
    try:
        record = ctx.registry.lock(parse_doi(doi))
    except _DOMAIN_ERRORS as exc:
        raise _fail(exc)
    finally:
        ctx.registry.close()
    click.echo(f"locked {format_doi(record.name)}")


@main.group()
def report():
    """Pilot-outcome reports."""


@report.command()
@click.argument("log", type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True, help="Emit the machine document.")
def compliance(log: str, as_json: bool):
    """Aggregate a submission session LOG into compliance counts."""
    try:
        result = compliance_report(log)
    except MetricsError as exc:
        raise _fail(exc)
    if as_json:
        click.echo(json.dumps(result.to_document(), indent=2, sort_keys=True))
    else:
        click.echo(result.render_table())


@report.command()
@click.option("--p", "probability", type=float, required=True)
@click.option("--years", type=int, required=True)
@click.option("--links", type=int, required=True)
@click.option("--seed", type=int, required=True)
@click.option("--no-maintain", is_flag=True, help="Let identifier targets go stale.")
@click.option("--json", "as_json", is_flag=True, help="Emit the machine document.")
def rot(probability: float, years: int, links: int, seed: int, no_maintain: bool, as_json: bool):
    """Simulate raw-URL link rot against maintained identifiers."""
    try:
        params = RotParameters(
            link_count=links,
            years=years,
            annual_mutation_probability=probability,
            seed=seed,
        )
    except ValueError as exc:
        raise _fail(exc)
    result = simulate_link_rot(params, maintain=not no_maintain)
    if as_json:
        click.echo(json.dumps(result.to_document(), indent=2, sort_keys=True))
    else:
        click.echo(result.render_table())


@main.command()
@click.pass_obj
def serve(config: ServiceConfig):
    """Run the archive, workflow, and registration-agency services."""
    ra_app = build_ra_app(RaStore())
    ctx = _load_context(config, ra_app=ra_app)
    _sync_registry_to_ra(ctx)
    archive_app = build_archive_app(ctx)
    workflow_app = build_workflow_app(ctx)

    servers = []
    threads = []
    for app, port in (
        (archive_app, config.resolver_port),
        (workflow_app, config.workflow_port),
        (ra_app, config.ra_port),
    ):
        server = uvicorn.Server(
            uvicorn.Config(app, host="127.0.0.1", port=port, log_level="warning")
        )
        thread = threading.Thread(target=server.run, daemon=True)
        thread.start()
        servers.append(server)
        threads.append(thread)

    click.echo(f"archive service   http://127.0.0.1:{config.resolver_port}")
    click.echo(f"workflow service  http://127.0.0.1:{config.workflow_port}")
    click.echo(f"ra stub           http://127.0.0.1:{config.ra_port}")
    try:
        while any(t.is_alive() for t in threads):
            time.sleep(0.2)
    except KeyboardInterrupt:
        pass
    finally:
        for server in servers:
            server.should_exit = True
        for thread in threads:
            thread.join(timeout=5)
        ctx.registry.close()
        ctx.workflow.close()


if __name__ == "__main__":
    main()
