"""HTTP task service for annotators.

The Workbench owns all behavior (task listing, claims, validated submits,
export, progress, second-pass subset selection); the FastAPI layer is a thin
binding. Writes serialize through one lock and acknowledge only after the
store has fsynced, so a kill at any point never loses an accepted
submission. Entries are read-only throughout.

Authentication, when configured, is a static bearer-token table mapping
token to annotator id; without a table the service trusts the annotator id
inside the submitted record. Responses always carry the schema version
header.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Mapping, Optional, Sequence

import numpy as np
from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from .entries import SCHEMA_VERSION, GoldEntry, dumps_line, entry_to_dict
from .records import (
    AnnotationRecord,
    ValidationResult,
    record_from_dict,
    record_to_dict,
    rule_manifest,
    validate,
)
from .store import AnnotationStore
from .taxonomy import taxonomy

VERSION_HEADER = "X-Schema-Version"

UNCLAIMED = "unclaimed"
IN_PROGRESS = "in_progress"
SUBMITTED = "submitted"


@dataclass(frozen=True)
class TaskState:
    entry_id: str
    dataset: str
    status: str
    assigned: Optional[str]
    updated_at: Optional[str]
    annotators: tuple[str, ...]


@dataclass(frozen=True)
class SubmitResult:
    accepted: bool
    validation: ValidationResult


class Workbench:
    """Task queue over a fixed entry sample plus an append-only store."""

    def __init__(self, entries: Sequence[GoldEntry], log_path):
        self.entries: dict[str, GoldEntry] = {}
        for entry in entries:
            if entry.id in self.entries:
                raise ValueError(f"duplicate entry id {entry.id!r} in sample")
            self.entries[entry.id] = entry
        if not self.entries:
            raise ValueError("workbench needs at least one entry")
        self.store = AnnotationStore(log_path)
        self._write_lock = threading.Lock()
        self._claims: dict[str, tuple[str, str]] = {}

    def _task_state(self, entry_id: str) -> TaskState:
        entry = self.entries[entry_id]
        submitted = sorted(
            (event for event in self.store.events if event.entry_id == entry_id),
            key=lambda event: event.timestamp,
        )
        if submitted:
            latest = submitted[-1]
            annotators = tuple(sorted({event.annotator_id for event in submitted}))
            return TaskState(entry_id, entry.dataset, SUBMITTED, latest.annotator_id, latest.timestamp, annotators)
        claim = self._claims.get(entry_id)
        if claim:
            return TaskState(entry_id, entry.dataset, IN_PROGRESS, claim[0], claim[1], ())
        return TaskState(entry_id, entry.dataset, UNCLAIMED, None, None, ())

    def list_tasks(
        self,
        dataset: Optional[str] = None,
        status: Optional[str] = None,
        annotator: Optional[str] = None,
    ) -> list[TaskState]:
        tasks = []
        for entry_id in sorted(self.entries):
            task = self._task_state(entry_id)
            if dataset is not None and task.dataset != dataset:
                continue
            if status is not None and task.status != status:
                continue
            if annotator is not None and task.assigned != annotator and annotator not in task.annotators:
                continue
            tasks.append(task)
        return tasks

    def claim(self, entry_id: str, annotator_id: str) -> TaskState:
        if entry_id not in self.entries:
            raise KeyError(entry_id)
        with self._write_lock:
            current = self._claims.get(entry_id)
            if current and current[0] != annotator_id and self._task_state(entry_id).status == IN_PROGRESS:
                raise PermissionError(f"entry {entry_id} already claimed by {current[0]}")
            self._claims[entry_id] = (annotator_id, datetime.now(timezone.utc).isoformat())
        return self._task_state(entry_id)

    def record_for(self, entry_id: str, annotator_id: Optional[str]) -> Optional[AnnotationRecord]:
        records = self.store.records_for_entry(entry_id)
        if not records:
            return None
        if annotator_id is not None:
            return records.get(annotator_id)
        latest = max(
            (event for event in self.store.events if event.entry_id == entry_id),
            key=lambda event: event.timestamp,
        )
        return latest.record

    def submit(self, entry_id: str, annotator_id: str, record: AnnotationRecord) -> SubmitResult:
        entry = self.entries.get(entry_id)
        if entry is None:
            raise KeyError(entry_id)
        if record.entry_id != entry_id:
            raise ValueError(f"record is for entry {record.entry_id!r}, submitted under {entry_id!r}")
        if record.annotator_id != annotator_id:
            raise ValueError(
                f"record annotator {record.annotator_id!r} does not match submitter {annotator_id!r}"
            )
        result = validate(record, entry)
        if not result.ok:
            return SubmitResult(False, result)
        with self._write_lock:
            self.store.append(record)
        return SubmitResult(True, result)

    def export(
        self,
        dataset: Optional[str] = None,
        annotator: Optional[str] = None,
    ) -> tuple[list[AnnotationRecord], list[GoldEntry]]:
        records = []
        for (entry_id, annotator_id), record in sorted(self.store.view().items()):
            entry = self.entries.get(entry_id)
            if entry is None:
                continue
            if dataset is not None and entry.dataset != dataset:
                continue
            if annotator is not None and annotator_id != annotator:
                continue
            records.append(record)
        entry_ids = sorted({record.entry_id for record in records})
        return records, [self.entries[eid] for eid in entry_ids]

    def progress(self) -> dict:
        tasks = self.list_tasks()
        by_status = {UNCLAIMED: 0, IN_PROGRESS: 0, SUBMITTED: 0}
        by_annotator: dict[str, int] = {}
        for task in tasks:
            by_status[task.status] += 1
            for annotator in task.annotators:
                by_annotator[annotator] = by_annotator.get(annotator, 0) + 1
        return {
            "total": len(tasks),
            "by_status": by_status,
            "by_annotator": dict(sorted(by_annotator.items())),
        }

    def second_pass(self, fraction: float = 0.2, mode: str = "random", seed: int = 0) -> list[str]:
        """Entry ids a second annotator should re-annotate.

        Drawn from submitted entries; "random" samples the pool uniformly,
        "stratified" keeps each dataset's share. At least one entry per
        non-empty stratum.
        """
        if not 0.0 < fraction <= 1.0:
            raise ValueError(f"fraction must be in (0, 1], got {fraction}")
        if mode not in ("random", "stratified"):
            raise ValueError(f"unknown second-pass mode {mode!r}")
        submitted = [task.entry_id for task in self.list_tasks(status=SUBMITTED)]
        if not submitted:
            return []
        rng = np.random.Generator(np.random.PCG64(seed))
        if mode == "random":
            count = max(1, math.ceil(fraction * len(submitted)))
            picked = rng.permutation(len(submitted))[:count]
            return sorted(submitted[int(i)] for i in picked)
        if mode == "stratified":
            by_dataset: dict[str, list[str]] = {}
            for entry_id in submitted:
                by_dataset.setdefault(self.entries[entry_id].dataset, []).append(entry_id)
            chosen = []
            for dataset in sorted(by_dataset):
                pool = by_dataset[dataset]
                count = max(1, math.ceil(fraction * len(pool)))
                picked = rng.permutation(len(pool))[:count]
                chosen.extend(pool[int(i)] for i in picked)
            return sorted(chosen)
        raise ValueError(f"unknown second-pass mode {mode!r}")


def _task_to_dict(task: TaskState) -> dict:
    return {
        "entry_id": task.entry_id,
        "dataset": task.dataset,
        "status": task.status,
        "assigned": task.assigned,
        "updated_at": task.updated_at,
        "annotators": list(task.annotators),
    }


def _validation_to_dict(result: ValidationResult) -> dict:
    return {
        "errors": [{"rule": f.rule, "message": f.message, "subject": f.subject} for f in result.errors],
        "warnings": [{"rule": f.rule, "message": f.message, "subject": f.subject} for f in result.warnings],
    }


def create_app(
    workbench: Workbench,
    tokens: Optional[Mapping[str, str]] = None,
    ui_dir: Optional[str] = None,
) -> FastAPI:
    app = FastAPI(title="mrcaudit workbench", version=SCHEMA_VERSION)

    @app.middleware("http")
    async def version_header(request: Request, call_next):
        response = await call_next(request)
        response.headers[VERSION_HEADER] = SCHEMA_VERSION
        return response

    def authenticate(request: Request) -> Optional[str]:
        if tokens is None:
            return None
        header = request.headers.get("authorization", "")
        if header.lower().startswith("bearer "):
            token = header[7:].strip()
            annotator = tokens.get(token)
            if annotator:
                return annotator
        raise HTTPException(status_code=401, detail="missing or unknown annotator token")

    @app.get("/taxonomy")
    def get_taxonomy():
        return {
            "schema_version": SCHEMA_VERSION,
            "taxonomy": taxonomy().to_dict(),
            "rules": rule_manifest(),
        }

    @app.get("/tasks")
    def get_tasks(dataset: Optional[str] = None, status: Optional[str] = None, annotator: Optional[str] = None):
        tasks = workbench.list_tasks(dataset=dataset, status=status, annotator=annotator)
        return {"tasks": [_task_to_dict(task) for task in tasks]}

    @app.get("/tasks/{entry_id}")
    def get_task(entry_id: str, request: Request, annotator: Optional[str] = None):
        if entry_id not in workbench.entries:
            raise HTTPException(status_code=404, detail=f"unknown entry {entry_id!r}")
        identity = authenticate(request) if tokens is not None else annotator
        record = workbench.record_for(entry_id, identity)
        return {
            "task": _task_to_dict(workbench._task_state(entry_id)),
            "entry": entry_to_dict(workbench.entries[entry_id]),
            "record": record_to_dict(record) if record else None,
        }

    @app.post("/tasks/{entry_id}/claim")
    async def claim_task(entry_id: str, request: Request):
        body = await request.json() if (await request.body()) else {}
        identity = authenticate(request) if tokens is not None else body.get("annotator_id")
        if not identity:
            raise HTTPException(status_code=400, detail="annotator_id required")
        try:
            task = workbench.claim(entry_id, identity)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown entry {entry_id!r}")
        except PermissionError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return {"task": _task_to_dict(task)}

    @app.put("/tasks/{entry_id}/annotation")
    async def put_annotation(entry_id: str, request: Request):
        try:
            payload = await request.json()
        except Exception:
            raise HTTPException(status_code=400, detail="body must be a JSON record")
        try:
            record = record_from_dict(payload)
        except (KeyError, TypeError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=f"malformed record: {exc}")
        identity = authenticate(request) if tokens is not None else record.annotator_id
        try:
            result = workbench.submit(entry_id, identity, record)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown entry {entry_id!r}")
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        if not result.accepted:
            return JSONResponse(
                status_code=422,
                content={"status": "rejected", "validation": _validation_to_dict(result.validation)},
            )
        return {"status": "accepted", "validation": _validation_to_dict(result.validation)}

    @app.get("/export")
    def get_export(dataset: Optional[str] = None, annotator: Optional[str] = None, format: str = "json"):
        records, entries = workbench.export(dataset=dataset, annotator=annotator)
        if not records:
            return Response(status_code=204)
        if format == "ndjson":
            lines = [dumps_line(record_to_dict(record)) for record in records]
            return PlainTextResponse("\n".join(lines) + "\n", media_type="application/x-ndjson")
        return {
            "schema_version": SCHEMA_VERSION,
            "records": [record_to_dict(record) for record in records],
            "entries": [entry_to_dict(entry) for entry in entries],
        }

    @app.get("/progress")
    def get_progress():
        return workbench.progress()

    @app.get("/second-pass")
    def get_second_pass(fraction: float = 0.2, mode: str = "random", seed: int = 0):
        try:
            entry_ids = workbench.second_pass(fraction=fraction, mode=mode, seed=seed)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"entry_ids": entry_ids}

    if ui_dir:
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
