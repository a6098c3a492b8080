"""Append-only annotation log with a materialized latest-record view.

Every accepted submission is one JSON line appended to the log file and
fsynced before the call returns, so an acknowledged write survives a crash
at any later point. The in-memory view keyed by (entry_id, annotator_id) is
a pure fold over the events; replaying the file reproduces it exactly.

This module deliberately depends only on the record serialization so that
tooling (including crash drills) can use it without pulling in the HTTP
stack.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Union

from .entries import dumps_line
from .records import AnnotationRecord, record_from_dict, record_to_dict


@dataclass(frozen=True)
class LogEvent:
    timestamp: str
    annotator_id: str
    entry_id: str
    record: AnnotationRecord


def fold(events: Iterable[LogEvent]) -> dict[tuple[str, str], AnnotationRecord]:
    """Latest record per (entry, annotator); later events win."""
    view: dict[tuple[str, str], AnnotationRecord] = {}
    for event in events:
        view[(event.entry_id, event.annotator_id)] = event.record
    return view


class AnnotationStore:
    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        self._events: list[LogEvent] = []
        if self.path.exists():
            self._replay()

    def _replay(self) -> None:
        with open(self.path, "r", encoding="utf-8") as fp:
            for line_no, line in enumerate(fp, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    data = json.loads(line)
                    event = LogEvent(
                        timestamp=data["ts"],
                        annotator_id=data["annotator_id"],
                        entry_id=data["entry_id"],
                        record=record_from_dict(data["record"]),
                    )
                except (KeyError, TypeError, ValueError) as exc:
                    raise ValueError(f"{self.path}: bad log line {line_no}: {exc}") from exc
                self._events.append(event)

    def append(self, record: AnnotationRecord) -> LogEvent:
        """Durably append one submission; returns after fsync."""
        event = LogEvent(
            timestamp=datetime.now(timezone.utc).isoformat(),
            annotator_id=record.annotator_id,
            entry_id=record.entry_id,
            record=record,
        )
        line = dumps_line(
            {
                "ts": event.timestamp,
                "annotator_id": event.annotator_id,
                "entry_id": event.entry_id,
                "record": record_to_dict(record),
            }
        )
        with open(self.path, "a", encoding="utf-8") as fp:
            fp.write(line + "\n")
            fp.flush()
            os.fsync(fp.fileno())
        self._events.append(event)
        return event

    @property
    def events(self) -> tuple[LogEvent, ...]:
        return tuple(self._events)

    def view(self) -> dict[tuple[str, str], AnnotationRecord]:
        return fold(self._events)

    def records_for_entry(self, entry_id: str) -> dict[str, AnnotationRecord]:
        return {
            annotator: record
            for (eid, annotator), record in self.view().items()
            if eid == entry_id
        }
