"""Registration-agency gateway: mint/update wire client plus an in-process stub."""

from .client import (
    RaClient,
    RaError,
    RaOperation,
    RaReceipt,
    RaRejectedInvalidKernel,
    RaUnknownDoi,
    RaUnreachable,
)
from .stub import RaStore, build_ra_app

__all__ = [
    "RaClient",
    "RaError",
    "RaOperation",
    "RaReceipt",
    "RaRejectedInvalidKernel",
    "RaUnknownDoi",
    "RaUnreachable",
    "RaStore",
    "build_ra_app",
]
