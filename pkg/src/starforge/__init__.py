"""Space-time adapter synthesis: bind an I/O access schedule to FIFO, LIFO and
register storage, merge time-disjoint structures and verify by simulation."""

from .binder import BindingConfig, StorageKind, StorageStructure, bind
from .optimizer import optimize
from .pipeline import Design, synthesize
from .rcg import CompatTag, build_rcg, classify_pair
from .schedule import AccessSchedule, DataToken, parse_schedule, star_schedule

__all__ = [
    "AccessSchedule",
    "BindingConfig",
    "CompatTag",
    "DataToken",
    "Design",
    "StorageKind",
    "StorageStructure",
    "bind",
    "build_rcg",
    "classify_pair",
    "optimize",
    "parse_schedule",
    "star_schedule",
    "synthesize",
]
