"""End-to-end corpus translation: encode, translate, decode, repair, filter.

Every run emits three artifacts: the translated corpus, a TransferReport and a
TranslationRunManifest recording the per-sentence outcome (auditable
provenance). Entities whose tags did not survive translation are dropped from
the output sentence; relations losing an endpoint are dropped and counted.
Sentences whose markup cannot be decoded at all are carried through with their
source text and annotations, flagged untranslated in the manifest, and kept
out of the transfer-statistics denominators.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Iterator

from .backends import BackendError, TranslationBackend, TranslationRequest
from .corpus import (AnnotatedSentence, Corpus, EntitySpan, Relation,
                     corpus_digest, validate_corpus)
from .markup import AnomalyRecord, DecodeError, decode_sentence, encode_sentence
from .metrics import TransferReport, transfer_stats
from .postprocess import PunctuationPolicy, apply_postprocess

OUTCOME_STATUSES = ("ok", "entities_missing", "decode_error")


@dataclass(frozen=True)
class SentenceOutcome:
    sentence_id: str
    status: str
    missing_entity_ids: tuple[int, ...] = ()
    dropped_relations: int = 0
    anomalies: tuple[AnomalyRecord, ...] = ()
    error: str | None = None

    def __post_init__(self):
        if self.status not in OUTCOME_STATUSES:
            raise ValueError(f"unknown outcome status {self.status!r}")

    def to_dict(self) -> dict:
        return {
            "sentence_id": self.sentence_id,
            "status": self.status,
            "missing_entity_ids": list(self.missing_entity_ids),
            "dropped_relations": self.dropped_relations,
            "anomalies": [
                {"kind": a.kind, "entity_id": a.entity_id, "detail": a.detail}
                for a in self.anomalies
            ],
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "SentenceOutcome":
        return cls(
            sentence_id=obj["sentence_id"],
            status=obj["status"],
            missing_entity_ids=tuple(obj["missing_entity_ids"]),
            dropped_relations=obj["dropped_relations"],
            anomalies=tuple(AnomalyRecord(kind=a["kind"], entity_id=a["entity_id"],
                                          detail=a["detail"]) for a in obj["anomalies"]),
            error=obj.get("error"),
        )


@dataclass(frozen=True)
class TranslationRunManifest:
    source_language: str
    source_domain: str
    source_split: str
    source_digest: str
    target_lang: str
    backend: str
    policy_digest: str
    sentences: tuple[SentenceOutcome, ...]
    started_at: str
    finished_at: str

    def to_dict(self) -> dict:
        # Timestamps are isolated in one key so identical re-runs differ in
        # nothing else.
        return {
            "source": {
                "language": self.source_language,
                "domain": self.source_domain,
                "split": self.source_split,
                "digest": self.source_digest,
            },
            "target_lang": self.target_lang,
            "backend": self.backend,
            "policy_digest": self.policy_digest,
            "sentences": [o.to_dict() for o in self.sentences],
            "timestamps": {"started": self.started_at, "finished": self.finished_at},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2) + "\n"

    @classmethod
    def from_dict(cls, obj: dict) -> "TranslationRunManifest":
        return cls(
            source_language=obj["source"]["language"],
            source_domain=obj["source"]["domain"],
            source_split=obj["source"]["split"],
            source_digest=obj["source"]["digest"],
            target_lang=obj["target_lang"],
            backend=obj["backend"],
            policy_digest=obj["policy_digest"],
            sentences=tuple(SentenceOutcome.from_dict(o) for o in obj["sentences"]),
            started_at=obj["timestamps"]["started"],
            finished_at=obj["timestamps"]["finished"],
        )

    @classmethod
    def from_json_file(cls, path: str | Path) -> "TranslationRunManifest":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def policy_digest(policy: PunctuationPolicy) -> str:
    return hashlib.sha256(policy.digest_text().encode("utf-8")).hexdigest()


def _resolve_overlaps(spans: tuple[EntitySpan, ...]) -> tuple[tuple[EntitySpan, ...], set[int]]:
    """Greedy left-to-right keep; overlapping later spans are dropped."""
    kept: list[EntitySpan] = []
    dropped: set[int] = set()
    for sp in sorted(spans, key=lambda e: (e.char_start, e.char_end, e.id)):
        if kept and sp.char_start < kept[-1].char_end:
            dropped.add(sp.id)
        else:
            kept.append(sp)
    return tuple(kept), dropped


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def translate_corpus(corpus: Corpus, backend: TranslationBackend, target_lang: str,
                     policy: PunctuationPolicy | None = None,
                     ) -> tuple[Corpus, TransferReport, TranslationRunManifest]:
    """Translate every sentence of `corpus` into `target_lang`.

    Per sentence: encode -> translate -> decode -> strip trailing punctuation.
    Missing entities and relations touching them are dropped (and counted);
    overlapping recovered spans are resolved by keeping the earlier span.
    """
    policy = policy or PunctuationPolicy.default()
    validate_corpus(corpus)
    started = _utc_now()

    docs = tuple(encode_sentence(s) for s in corpus.sentences)
    if docs:
        request = TranslationRequest(documents=docs, source_lang=corpus.language,
                                     target_lang=target_lang)
        try:
            result = backend.translate(request)
        except BackendError as exc:
            raise BackendError(
                f"translating {corpus.language}->{target_lang} "
                f"({corpus.domain}/{corpus.split}, {len(docs)} sentences): {exc}") from exc
        if len(result.documents) != len(docs):
            raise BackendError(
                f"backend returned {len(result.documents)} documents for {len(docs)} requests")
        translated_texts = result.documents
    else:
        translated_texts = ()

    outcomes: list[SentenceOutcome] = []
    out_sentences: list[AnnotatedSentence] = []
    for s, doc_text in zip(corpus.sentences, translated_texts):
        try:
            decoded = decode_sentence(doc_text, s)
        except DecodeError as exc:
            outcomes.append(SentenceOutcome(sentence_id=s.sentence_id, status="decode_error",
                                            error=str(exc)))
            out_sentences.append(s)  # untranslated carry-over, flagged in the manifest
            continue
        decoded = apply_postprocess(decoded, s, policy)
        spans, overlap_dropped = _resolve_overlaps(decoded.spans)
        missing = tuple(sorted(set(decoded.missing_ids) | overlap_dropped))
        kept_ids = {sp.id for sp in spans}
        relations = tuple(r for r in s.relations
                          if r.head_id in kept_ids and r.tail_id in kept_ids)
        out_sentences.append(AnnotatedSentence(
            sentence_id=s.sentence_id, text=decoded.text,
            entities=spans, relations=relations))
        outcomes.append(SentenceOutcome(
            sentence_id=s.sentence_id,
            status="entities_missing" if missing else "ok",
            missing_entity_ids=missing,
            dropped_relations=len(s.relations) - len(relations),
            anomalies=decoded.anomalies,
        ))

    out_corpus = Corpus(language=target_lang, domain=corpus.domain, split=corpus.split,
                        sentences=tuple(out_sentences))
    validate_corpus(out_corpus)
    manifest = TranslationRunManifest(
        source_language=corpus.language, source_domain=corpus.domain,
        source_split=corpus.split, source_digest=corpus_digest(corpus),
        target_lang=target_lang, backend=backend.describe(),
        policy_digest=policy_digest(policy), sentences=tuple(outcomes),
        started_at=started, finished_at=_utc_now(),
    )
    report = transfer_stats(corpus, out_corpus, manifest)
    return out_corpus, report, manifest


def back_translate(c_translated: Corpus, backend: TranslationBackend, original_language: str,
                   policy: PunctuationPolicy | None = None,
                   ) -> tuple[Corpus, TransferReport, TranslationRunManifest]:
    """Same contract as translate_corpus with the language pair reversed."""
    return translate_corpus(c_translated, backend, original_language, policy)


# --------------------------------------------------------------------------
# Relation-classification instance export
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MarkerConfig:
    """Surface form of the four markers wrapping a relation's argument spans.

    Templates take a `{t}` placeholder that expands to `:<entity type>` when
    include_entity_type is set and to nothing otherwise.
    """

    e1_start: str = "<e1{t}>"
    e1_end: str = "</e1{t}>"
    e2_start: str = "<e2{t}>"
    e2_end: str = "</e2{t}>"
    include_entity_type: bool = False

    def __post_init__(self):
        probe = {self.expand(w, "x") for w in ("e1_start", "e1_end", "e2_start", "e2_end")}
        if len(probe) != 4:
            raise ValueError("marker templates must expand to four distinct strings")

    def expand(self, which: str, entity_type: str) -> str:
        t = f":{entity_type}" if self.include_entity_type else ""
        return getattr(self, which).format(t=t)


@dataclass(frozen=True)
class RcInstance:
    sentence_id: str
    text: str
    label: str
    head_id: int
    tail_id: int

    def to_dict(self) -> dict:
        return {"sentence_id": self.sentence_id, "text": self.text, "label": self.label,
                "head": self.head_id, "tail": self.tail_id}


def mark_relation(s: AnnotatedSentence, relation: Relation, config: MarkerConfig) -> str:
    """Insert the four entity markers around the relation's argument spans."""
    head = s.entity_by_id(relation.head_id)
    tail = s.entity_by_id(relation.tail_id)
    inserts = [
        (head.char_start, 1, config.expand("e1_start", head.entity_type) + " "),
        (head.char_end, 0, " " + config.expand("e1_end", head.entity_type)),
        (tail.char_start, 1, config.expand("e2_start", tail.entity_type) + " "),
        (tail.char_end, 0, " " + config.expand("e2_end", tail.entity_type)),
    ]
    text = s.text
    # Right-to-left keeps earlier offsets valid; at a shared offset the end
    # marker must land left of the start marker, hence the kind tiebreak.
    for pos, _kind, ins in sorted(inserts, key=lambda t: (t[0], t[1]), reverse=True):
        text = text[:pos] + ins + text[pos:]
    return text


def export_rc_instances(corpus: Corpus, config: MarkerConfig | None = None
                        ) -> Iterator[RcInstance]:
    """One marked instance per relation, in corpus order."""
    config = config or MarkerConfig()
    validate_corpus(corpus)
    for s in corpus.sentences:
        for r in s.relations:
            yield RcInstance(sentence_id=s.sentence_id, text=mark_relation(s, r, config),
                             label=r.label, head_id=r.head_id, tail_id=r.tail_id)


def write_rc_instances(instances: Iterable[RcInstance], path: str | Path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for inst in instances:
            fh.write(json.dumps(inst.to_dict(), ensure_ascii=False, separators=(",", ":")) + "\n")
            n += 1
    return n
