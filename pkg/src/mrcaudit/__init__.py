"""Workbench for auditing machine reading comprehension gold standards."""

from .entries import GoldEntry, Passage, read_entries, write_entries
from .records import AnnotationRecord, diff, read_records, validate, write_records
from .taxonomy import Label, taxonomy

__version__ = "0.1.0"

__all__ = [
    "AnnotationRecord",
    "GoldEntry",
    "Label",
    "Passage",
    "diff",
    "read_entries",
    "read_records",
    "taxonomy",
    "validate",
    "write_entries",
    "write_records",
    "__version__",
]
