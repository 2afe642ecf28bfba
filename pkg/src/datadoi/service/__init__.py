"""FastAPI apps wrapping the core package: archive service, workflow service."""

from .apps import AppContext, build_archive_app, build_workflow_app, build_context

__all__ = ["AppContext", "build_archive_app", "build_workflow_app", "build_context"]
