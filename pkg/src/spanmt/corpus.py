"""Data model for sentence-level entity/relation corpora.

All spans are half-open character offsets into the sentence text. Token-indexed
source files are converted once on import; character offsets are the only span
currency after that (token indices do not survive translation into languages
without whitespace tokenization).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

DOMAINS = frozenset({"news", "politics", "science", "music", "literature", "ai"})
SPLITS = frozenset({"train", "dev", "test"})


class CorpusError(Exception):
    """Base class for corpus-layer failures."""


class ValidationError(CorpusError):
    """An invariant of the data model is violated."""

    def __init__(self, message: str, sentence_id: str | None = None):
        self.sentence_id = sentence_id
        if sentence_id is not None:
            message = f"sentence {sentence_id!r}: {message}"
        super().__init__(message)


class ParseError(CorpusError):
    """A source record or serialized line cannot be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class EntitySpan:
    """A labelled character span. `id` is stable within its sentence."""

    id: int
    char_start: int
    char_end: int
    entity_type: str


@dataclass(frozen=True)
class Relation:
    """Typed, ordered link between two entity ids of the same sentence.

    `extra` carries source-corpus metadata untouched (key order preserved).
    """

    head_id: int
    tail_id: int
    label: str
    extra: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class AnnotatedSentence:
    sentence_id: str
    text: str
    entities: tuple[EntitySpan, ...] = ()
    relations: tuple[Relation, ...] = ()

    def __post_init__(self):
        ents = tuple(sorted(self.entities, key=lambda e: (e.char_start, e.char_end)))
        object.__setattr__(self, "entities", ents)
        object.__setattr__(self, "relations", tuple(self.relations))

    def entity_by_id(self, entity_id: int) -> EntitySpan:
        for e in self.entities:
            if e.id == entity_id:
                return e
        raise KeyError(entity_id)

    def entity_text(self, entity_id: int) -> str:
        e = self.entity_by_id(entity_id)
        return self.text[e.char_start:e.char_end]


@dataclass(frozen=True)
class Corpus:
    language: str
    domain: str
    split: str
    sentences: tuple[AnnotatedSentence, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))


@dataclass(frozen=True)
class DomainCount:
    domain: str
    split: str
    sentence_count: int
    relation_count: int


def validate_sentence(s: AnnotatedSentence, label_set: frozenset[str] | None = None) -> None:
    """Raise ValidationError if any sentence-level invariant fails."""
    n = len(s.text)
    seen_ids: set[int] = set()
    for e in s.entities:
        if e.id < 0:
            raise ValidationError(f"entity id {e.id} is negative", s.sentence_id)
        if e.id in seen_ids:
            raise ValidationError(f"duplicate entity id {e.id}", s.sentence_id)
        seen_ids.add(e.id)
        if not (0 <= e.char_start < e.char_end <= n):
            raise ValidationError(
                f"entity {e.id} span [{e.char_start},{e.char_end}) outside text of length {n}",
                s.sentence_id,
            )
    prev: EntitySpan | None = None
    for e in s.entities:  # sorted by char_start in the constructor
        if prev is not None and e.char_start < prev.char_end:
            raise ValidationError(
                f"entities {prev.id} and {e.id} overlap "
                f"([{prev.char_start},{prev.char_end}) vs [{e.char_start},{e.char_end}))",
                s.sentence_id,
            )
        prev = e
    for r in s.relations:
        if r.head_id not in seen_ids:
            raise ValidationError(f"relation head id {r.head_id} has no entity", s.sentence_id)
        if r.tail_id not in seen_ids:
            raise ValidationError(f"relation tail id {r.tail_id} has no entity", s.sentence_id)
        if label_set is not None and r.label not in label_set:
            raise ValidationError(f"relation label {r.label!r} not in inventory", s.sentence_id)


def validate_corpus(c: Corpus, label_set: frozenset[str] | None = None) -> None:
    if c.domain not in DOMAINS:
        raise ValidationError(f"domain {c.domain!r} not in {sorted(DOMAINS)}")
    if c.split not in SPLITS:
        raise ValidationError(f"split {c.split!r} not in {sorted(SPLITS)}")
    seen: set[str] = set()
    for s in c.sentences:
        if s.sentence_id in seen:
            raise ValidationError("duplicate sentence_id", s.sentence_id)
        seen.add(s.sentence_id)
        validate_sentence(s, label_set)


def load_label_inventory(path: str | Path) -> frozenset[str]:
    """Relation label inventory: one label per line, blanks and # comments ignored."""
    labels = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            labels.append(line)
    if not labels:
        raise ValidationError(f"label inventory {path} is empty")
    return frozenset(labels)


# --------------------------------------------------------------------------
# Canonical JSONL (one sentence object per line, fixed key order, UTF-8, LF)
# --------------------------------------------------------------------------

def sentence_to_dict(s: AnnotatedSentence) -> dict:
    return {
        "sentence_id": s.sentence_id,
        "text": s.text,
        "entities": [
            {"id": e.id, "start": e.char_start, "end": e.char_end, "type": e.entity_type}
            for e in s.entities
        ],
        "relations": [
            {"head": r.head_id, "tail": r.tail_id, "label": r.label, "extra": dict(r.extra)}
            for r in s.relations
        ],
    }


def sentence_from_dict(obj: dict) -> AnnotatedSentence:
    try:
        entities = tuple(
            EntitySpan(id=e["id"], char_start=e["start"], char_end=e["end"], entity_type=e["type"])
            for e in obj["entities"]
        )
        relations = tuple(
            Relation(head_id=r["head"], tail_id=r["tail"], label=r["label"],
                     extra={str(k): str(v) for k, v in r.get("extra", {}).items()})
            for r in obj["relations"]
        )
        return AnnotatedSentence(
            sentence_id=str(obj["sentence_id"]),
            text=obj["text"],
            entities=entities,
            relations=relations,
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"sentence object missing/invalid field: {exc}") from None


def serialize(corpus: Corpus) -> str:
    """Canonical JSONL text for the corpus (may be empty for an empty corpus)."""
    return "".join(
        json.dumps(sentence_to_dict(s), ensure_ascii=False, separators=(",", ":")) + "\n"
        for s in corpus.sentences
    )


def deserialize(stream: str | Iterable[str], *, language: str, domain: str, split: str) -> Corpus:
    """Parse canonical JSONL back into a validated Corpus.

    The line schema carries no corpus metadata, so language/domain/split are
    supplied by the caller (CLI resolves them from flags, a sidecar meta file,
    or the file name).
    """
    lines: Iterable[str]
    if isinstance(stream, str):
        lines = stream.splitlines()
    else:
        lines = stream
    sentences = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", line=lineno) from None
        if not isinstance(obj, dict):
            raise ParseError("line is not a JSON object", line=lineno)
        try:
            sentences.append(sentence_from_dict(obj))
        except ParseError as exc:
            raise ParseError(str(exc), line=lineno) from None
    corpus = Corpus(language=language, domain=domain, split=split, sentences=tuple(sentences))
    validate_corpus(corpus)
    return corpus


def corpus_digest(c: Corpus) -> str:
    """Stable content digest over the corpus identity and canonical serialization."""
    h = hashlib.sha256()
    h.update(f"{c.language}\x00{c.domain}\x00{c.split}\x00".encode("utf-8"))
    h.update(serialize(c).encode("utf-8"))
    return h.hexdigest()


def save_corpus(corpus: Corpus, path: str | Path, *, with_meta: bool = True) -> None:
    path = Path(path)
    path.write_text(serialize(corpus), encoding="utf-8", newline="\n")
    if with_meta:
        meta = {"language": corpus.language, "domain": corpus.domain, "split": corpus.split}
        meta_path(path).write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")


def meta_path(corpus_path: str | Path) -> Path:
    return Path(str(corpus_path) + ".meta.json")


def resolve_metadata(path: str | Path, language: str | None = None,
                     domain: str | None = None, split: str | None = None) -> tuple[str, str, str]:
    """Resolve (language, domain, split) for a corpus file.

    Precedence: explicit arguments, then the sidecar meta file, then a
    `<domain>-<split>` file-name pattern. Missing pieces raise ValidationError.
    """
    meta: dict = {}
    mp = meta_path(path)
    if mp.exists():
        meta = json.loads(mp.read_text(encoding="utf-8"))
    stem = Path(path).stem
    parts = stem.split("-")
    guess_domain = parts[0] if len(parts) >= 2 and parts[0] in DOMAINS else None
    guess_split = parts[1] if len(parts) >= 2 and parts[1] in SPLITS else None
    language = language or meta.get("language")
    domain = domain or meta.get("domain") or guess_domain
    split = split or meta.get("split") or guess_split
    if not language:
        raise ValidationError(f"cannot determine language for {path}; pass it explicitly")
    if not domain:
        raise ValidationError(f"cannot determine domain for {path}; pass it explicitly")
    if not split:
        raise ValidationError(f"cannot determine split for {path}; pass it explicitly")
    return language, domain, split


def load_corpus(path: str | Path, *, language: str | None = None,
                domain: str | None = None, split: str | None = None) -> Corpus:
    language, domain, split = resolve_metadata(path, language, domain, split)
    text = Path(path).read_text(encoding="utf-8")
    return deserialize(text, language=language, domain=domain, split=split)


# --------------------------------------------------------------------------
# Token-indexed import
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldMapping:
    """Names the fields of a token-indexed source record.

    Defaults match the published CrossRE schema: one JSON object per line with
    `doc_key`, `sentence` (token list), `ner` (`[start, end, type]` with
    inclusive token ends) and `relations`
    (`[h_start, h_end, t_start, t_end, label, *extras]`).
    """

    sentence_id_field: str = "doc_key"
    tokens_field: str = "sentence"
    entities_field: str = "ner"
    relations_field: str = "relations"
    token_end_inclusive: bool = True
    relation_extra_fields: tuple[str, ...] = ("explanation", "uncertain", "syntax-ambiguity")

    @classmethod
    def from_json_file(cls, path: str | Path) -> "FieldMapping":
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(obj) - known
        if unknown:
            raise ParseError(f"unknown mapping keys: {sorted(unknown)}")
        if "relation_extra_fields" in obj:
            obj["relation_extra_fields"] = tuple(obj["relation_extra_fields"])
        return cls(**obj)


def _token_offsets(tokens: list[str]) -> list[tuple[int, int]]:
    # Tokens are joined with single ASCII spaces; offsets follow directly.
    offsets = []
    pos = 0
    for tok in tokens:
        offsets.append((pos, pos + len(tok)))
        pos += len(tok) + 1
    return offsets


def _extra_value(value) -> str:
    return value if isinstance(value, str) else json.dumps(value)


def import_token_indexed(records: Iterable[str | dict], mapping: FieldMapping | None = None, *,
                         language: str, domain: str, split: str,
                         label_set: frozenset[str] | None = None) -> Corpus:
    """Convert a token-indexed record stream into a validated character-offset Corpus.

    `records` yields JSON lines or already-parsed dicts. Entity ids are
    assigned in source order; relation endpoints are resolved by exact token
    span match.
    """
    mapping = mapping or FieldMapping()
    sentences = []
    for lineno, rec in enumerate(records, start=1):
        if isinstance(rec, str):
            if not rec.strip():
                continue
            try:
                rec = json.loads(rec)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", line=lineno) from None
        try:
            sid = str(rec[mapping.sentence_id_field])
            tokens = list(rec[mapping.tokens_field])
            raw_entities = rec[mapping.entities_field]
            raw_relations = rec[mapping.relations_field]
        except (KeyError, TypeError) as exc:
            raise ParseError(f"record missing field: {exc}", line=lineno) from None

        offsets = _token_offsets(tokens)
        text = " ".join(tokens)

        def char_span(ts: int, te: int) -> tuple[int, int]:
            last = te if mapping.token_end_inclusive else te - 1
            if not (0 <= ts < len(tokens) and ts <= last < len(tokens)):
                raise ParseError(f"token span ({ts},{te}) outside sentence of {len(tokens)} tokens",
                                 line=lineno)
            return offsets[ts][0], offsets[last][1]

        entities = []
        span_to_id: dict[tuple[int, int], int] = {}
        for eid, ent in enumerate(raw_entities):
            try:
                ts, te, etype = ent[0], ent[1], ent[2]
            except (IndexError, TypeError):
                raise ParseError(f"malformed entity record {ent!r}", line=lineno) from None
            start, end = char_span(ts, te)
            entities.append(EntitySpan(id=eid, char_start=start, char_end=end,
                                       entity_type=str(etype)))
            span_to_id[(ts, te)] = eid

        relations = []
        for rel in raw_relations:
            try:
                h_ts, h_te, t_ts, t_te, label = rel[0], rel[1], rel[2], rel[3], rel[4]
            except (IndexError, TypeError):
                raise ParseError(f"malformed relation record {rel!r}", line=lineno) from None
            head_id = span_to_id.get((h_ts, h_te))
            tail_id = span_to_id.get((t_ts, t_te))
            if head_id is None:
                raise ValidationError(f"relation head span ({h_ts},{h_te}) matches no entity", sid)
            if tail_id is None:
                raise ValidationError(f"relation tail span ({t_ts},{t_te}) matches no entity", sid)
            extra = {
                name: _extra_value(rel[5 + i])
                for i, name in enumerate(mapping.relation_extra_fields)
                if 5 + i < len(rel)
            }
            relations.append(Relation(head_id=head_id, tail_id=tail_id, label=str(label),
                                      extra=extra))

        sentences.append(AnnotatedSentence(sentence_id=sid, text=text,
                                           entities=tuple(entities), relations=tuple(relations)))

    corpus = Corpus(language=language, domain=domain, split=split, sentences=tuple(sentences))
    validate_corpus(corpus, label_set)
    return corpus
