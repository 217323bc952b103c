"""Native-speaker verification workflow.

A seeded sample of translated sentences becomes a set of review tasks; a
reviewer answers four questions per task (meaning preserved? and, per entity:
transferred / translation correct / boundaries correct). Judgments are
persisted to an append-only JSONL log and served over a small JSON API that
also hosts the static review frontend.
"""

from __future__ import annotations

import json
import os
import random
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping

from fastapi import FastAPI, Request
from fastapi.responses import HTMLResponse, JSONResponse

from .corpus import Corpus, EntitySpan
from .metrics import review_aggregate


class ReviewError(Exception):
    """Invalid task, judgment, or judgment-log contents."""


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _entity_dicts(entities: Iterable[EntitySpan]) -> list[dict]:
    return [{"id": e.id, "start": e.char_start, "end": e.char_end, "type": e.entity_type}
            for e in entities]


def _entity_tuple(objs: Iterable[dict]) -> tuple[EntitySpan, ...]:
    return tuple(EntitySpan(id=o["id"], char_start=o["start"], char_end=o["end"],
                            entity_type=o["type"]) for o in objs)


@dataclass(frozen=True)
class ReviewTask:
    """One side-by-side sentence pair queued for human review."""

    task_id: str
    language: str
    sentence_id: str
    source_text: str
    source_entities: tuple[EntitySpan, ...]
    translated_text: str
    translated_entities: tuple[EntitySpan, ...]

    def __post_init__(self):
        source_ids = {e.id for e in self.source_entities}
        stray = {e.id for e in self.translated_entities} - source_ids
        if stray:
            raise ReviewError(
                f"task {self.task_id!r}: translated entities {sorted(stray)} "
                "have no source counterpart")

    @property
    def aligned_ids(self) -> tuple[int, ...]:
        recovered = {e.id for e in self.translated_entities}
        return tuple(sorted(e.id for e in self.source_entities if e.id in recovered))

    @property
    def missing_ids(self) -> tuple[int, ...]:
        recovered = {e.id for e in self.translated_entities}
        return tuple(sorted(e.id for e in self.source_entities if e.id not in recovered))

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "language": self.language,
            "sentence_id": self.sentence_id,
            "source": {"text": self.source_text,
                       "entities": _entity_dicts(self.source_entities)},
            "translated": {"text": self.translated_text,
                           "entities": _entity_dicts(self.translated_entities)},
            "aligned_ids": list(self.aligned_ids),
            "missing_ids": list(self.missing_ids),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "ReviewTask":
        return cls(
            task_id=obj["task_id"],
            language=obj["language"],
            sentence_id=obj["sentence_id"],
            source_text=obj["source"]["text"],
            source_entities=_entity_tuple(obj["source"]["entities"]),
            translated_text=obj["translated"]["text"],
            translated_entities=_entity_tuple(obj["translated"]["entities"]),
        )


@dataclass(frozen=True)
class EntityVerdict:
    transferred: bool
    translation_correct: bool
    boundary_correct: bool

    def __post_init__(self):
        # The follow-up questions only apply to transferred entities.
        if not self.transferred and (self.translation_correct or self.boundary_correct):
            raise ReviewError(
                "translation_correct/boundary_correct require transferred=true")

    def to_dict(self) -> dict:
        return {"transferred": self.transferred,
                "translation_correct": self.translation_correct,
                "boundary_correct": self.boundary_correct}


@dataclass(frozen=True)
class Judgment:
    task_id: str
    reviewer_id: str
    meaning_preserved: bool
    entities: Mapping[int, EntityVerdict]
    submitted_at: str

    def validate_against(self, task: ReviewTask) -> None:
        expected = {e.id for e in task.source_entities}
        got = set(self.entities)
        if got != expected:
            raise ReviewError(
                f"verdicts must cover exactly the source entity ids {sorted(expected)}, "
                f"got {sorted(got)}")

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "reviewer_id": self.reviewer_id,
            "meaning_preserved": self.meaning_preserved,
            "entities": {str(k): v.to_dict() for k, v in sorted(self.entities.items())},
            "submitted_at": self.submitted_at,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "Judgment":
        try:
            entities = {}
            for key, v in obj["entities"].items():
                entities[int(key)] = EntityVerdict(
                    transferred=bool(v["transferred"]),
                    translation_correct=bool(v["translation_correct"]),
                    boundary_correct=bool(v["boundary_correct"]),
                )
            return cls(
                task_id=obj["task_id"],
                reviewer_id=obj["reviewer_id"],
                meaning_preserved=bool(obj["meaning_preserved"]),
                entities=entities,
                submitted_at=obj.get("submitted_at") or _utc_now(),
            )
        except ReviewError:
            raise
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise ReviewError(f"malformed judgment: {exc}") from exc


# --------------------------------------------------------------------------
# Sampling
# --------------------------------------------------------------------------

SAMPLING_METHOD = "seeded-uniform"


def build_sample(source: Corpus, translated: Corpus, n: int, seed: int
                 ) -> tuple[ReviewTask, ...]:
    """Draw a uniform sample of n aligned sentence pairs, deterministically.

    Tasks come back in corpus order. Identical (corpora, n, seed) give an
    identical sample.
    """
    if n < 0:
        raise ReviewError("sample size must be non-negative")
    if n > len(source.sentences):
        raise ReviewError(
            f"sample size {n} exceeds corpus size {len(source.sentences)}")
    translated_by_id = {s.sentence_id: s for s in translated.sentences}
    absent = [s.sentence_id for s in source.sentences if s.sentence_id not in translated_by_id]
    if absent:
        raise ReviewError(f"corpora are not aligned; missing sentence ids {absent[:5]}")

    indices = sorted(random.Random(seed).sample(range(len(source.sentences)), n))
    tasks = []
    for i in indices:
        src = source.sentences[i]
        tgt = translated_by_id[src.sentence_id]
        tasks.append(ReviewTask(
            task_id=f"{translated.language}:{src.sentence_id}",
            language=translated.language,
            sentence_id=src.sentence_id,
            source_text=src.text,
            source_entities=src.entities,
            translated_text=tgt.text,
            translated_entities=tgt.entities,
        ))
    return tuple(tasks)


def save_sample(tasks: Iterable[ReviewTask], path: str | Path, *,
                seed: int, n: int) -> None:
    """Persist a task set plus how it was drawn (sampling is a local choice,
    so the file records it)."""
    tasks = list(tasks)
    doc = {
        "sampling": {"method": SAMPLING_METHOD, "seed": seed, "n": n},
        "tasks": [t.to_dict() for t in tasks],
    }
    Path(path).write_text(json.dumps(doc, ensure_ascii=False, indent=2) + "\n",
                          encoding="utf-8")


def load_sample(path: str | Path) -> tuple[ReviewTask, ...]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    tasks = tuple(ReviewTask.from_dict(o) for o in doc["tasks"])
    seen = set()
    for t in tasks:
        if t.task_id in seen:
            raise ReviewError(f"duplicate task_id {t.task_id!r}")
        seen.add(t.task_id)
    return tasks


# --------------------------------------------------------------------------
# Judgment log
# --------------------------------------------------------------------------

class JudgmentLog:
    """Append-only JSONL store; acknowledgment happens only after fsync.

    Supersession is applied at read time (the aggregator keeps the last
    judgment per task), so the log keeps the full annotation history.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def append(self, judgment: Judgment) -> None:
        line = json.dumps(judgment.to_dict(), ensure_ascii=False,
                          separators=(",", ":")) + "\n"
        with self._lock:
            with open(self.path, "a", encoding="utf-8", newline="\n") as fh:
                fh.write(line)
                fh.flush()
                os.fsync(fh.fileno())

    def replay(self) -> list[Judgment]:
        if not self.path.exists():
            return []
        out = []
        with open(self.path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    out.append(Judgment.from_dict(json.loads(line)))
                except (json.JSONDecodeError, ReviewError) as exc:
                    raise ReviewError(f"{self.path}:{lineno}: {exc}") from exc
        return out


# --------------------------------------------------------------------------
# HTTP service
# --------------------------------------------------------------------------

def create_app(tasks: Iterable[ReviewTask], log: JudgmentLog,
               static_dir: str | Path | None = None):
    """Build the review service: task delivery, judgment intake, reporting."""
    task_map: dict[str, ReviewTask] = {}
    for t in tasks:
        if t.task_id in task_map:
            raise ReviewError(f"duplicate task_id {t.task_id!r}")
        task_map[t.task_id] = t

    app = FastAPI(title="span transfer review", docs_url=None, redoc_url=None)

    @app.get("/api/health")
    def health():
        return {"status": "ok", "tasks": len(task_map)}

    @app.get("/api/tasks")
    def list_tasks(lang: str | None = None):
        selected = [t for t in task_map.values() if lang is None or t.language == lang]
        return [t.to_dict() for t in selected]

    @app.get("/api/tasks/{task_id}")
    def get_task(task_id: str):
        task = task_map.get(task_id)
        if task is None:
            return JSONResponse(status_code=404,
                                content={"detail": f"unknown task {task_id!r}"})
        return task.to_dict()

    @app.post("/api/judgments")
    async def submit_judgment(request: Request):
        try:
            body = await request.json()
        except Exception:
            return JSONResponse(status_code=422,
                                content={"detail": "body is not valid JSON"})
        try:
            judgment = Judgment.from_dict(body)
        except ReviewError as exc:
            return JSONResponse(status_code=422, content={"detail": str(exc)})
        task = task_map.get(judgment.task_id)
        if task is None:
            return JSONResponse(
                status_code=404,
                content={"detail": f"unknown task {judgment.task_id!r}"})
        try:
            judgment.validate_against(task)
        except ReviewError as exc:
            return JSONResponse(status_code=422, content={"detail": str(exc)})
        log.append(judgment)
        return {"status": "accepted", "task_id": judgment.task_id,
                "submitted_at": judgment.submitted_at}

    @app.get("/api/report")
    def report(lang: str | None = None):
        aggregates = review_aggregate(log.replay(), task_map)
        if lang is None:
            return {language: agg.to_dict() for language, agg in sorted(aggregates.items())}
        agg = aggregates.get(lang)
        if agg is None:
            # No judgments yet for this language: an all-zero row, so the
            # report view is well defined from the first page load.
            return {"language": lang, "sentences_reviewed": 0,
                    "sentences_meaning_ok": 0, "entities_total": 0,
                    "entities_transferred_ok": 0, "entities_translation_ok": 0,
                    "entities_boundary_ok": 0}
        return agg.to_dict()

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="static")
    else:
        @app.get("/", response_class=HTMLResponse)
        def index():
            return ("<!doctype html><title>span transfer review</title>"
                    "<p>No frontend assets found. The JSON API is live under /api/.</p>")

    return app


def serve(tasks: Iterable[ReviewTask], judgment_log_path: str | Path,
          bind_address: str = "127.0.0.1:8571",
          static_dir: str | Path | None = None) -> None:
    """Run the review service until interrupted."""
    import uvicorn

    host, _, port = bind_address.partition(":")
    app = create_app(tasks, JudgmentLog(judgment_log_path), static_dir=static_dir)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or "8571"),
                log_level="warning")
