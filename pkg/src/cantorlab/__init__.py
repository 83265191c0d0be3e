"""cantorlab: a numerical laboratory for Cantor-type interval systems.

Builds interval systems by harmonic-measure certified deletion, evaluates
the associated rational products and their square-root branches, tracks
sheets along paths, and assembles plurisubharmonic witness functions that
separate the two sheets.
"""

from .backend import active_backend
from .intervals import (
    AuditRecord,
    CantorState,
    ConstructionParams,
    Interval,
    blocks,
    construct,
    construction_discs,
    next_candidate,
    trapped_length,
)

__version__ = "0.1.0"

__all__ = [
    "active_backend",
    "AuditRecord",
    "CantorState",
    "ConstructionParams",
    "Interval",
    "blocks",
    "construct",
    "construction_discs",
    "next_candidate",
    "trapped_length",
    "__version__",
]
