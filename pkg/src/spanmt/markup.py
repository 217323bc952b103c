"""Inline id-tag codec for span-preserving machine translation.

A sentence's entities are wrapped in numbered inline tags before translation:

    <m id="0">machine learning</m> is a subfield

Tag grammar (bit-exact): ``<m id="N">`` ... ``</m>`` with N matching
``[0-9]+``; no other attributes, no self-closing form. Text outside and inside
tags is escaped with the minimal three-character set (``<``, ``>``, ``&``), so
stripping all tags and resolving escapes always yields the exact source text.

Decoding is deliberately forgiving: translation services drop, duplicate and
nest tags. Every such corruption either maps to a span plus an AnomalyRecord
or, when the tag structure itself is broken (an unclosed tag), to a
DecodeError the caller can act on.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from xml.sax.saxutils import escape, unescape

from .corpus import AnnotatedSentence, EntitySpan

OPEN_TAG = re.compile(r'<m id="([0-9]+)">')
CLOSE_TAG = "</m>"
_TOKEN = re.compile(r'<m id="([0-9]+)">|</m>')

ANOMALY_KINDS = frozenset(
    {"duplicate_id", "nested_tag", "unknown_id", "empty_span", "overlap_after_decode"}
)


class DecodeError(Exception):
    """Tag structure too broken to recover spans (e.g. an unclosed tag)."""

    def __init__(self, message: str, source_sentence_id: str):
        self.source_sentence_id = source_sentence_id
        super().__init__(f"sentence {source_sentence_id!r}: {message}")


@dataclass(frozen=True)
class AnomalyRecord:
    kind: str
    entity_id: int | None
    detail: str

    def __post_init__(self):
        if self.kind not in ANOMALY_KINDS:
            raise ValueError(f"unknown anomaly kind {self.kind!r}")


@dataclass(frozen=True)
class MarkupDocument:
    text: str
    source_sentence_id: str


@dataclass(frozen=True)
class DecodedSentence:
    text: str
    spans: tuple[EntitySpan, ...]
    missing_ids: tuple[int, ...]
    anomalies: tuple[AnomalyRecord, ...]


def encode_sentence(s: AnnotatedSentence) -> MarkupDocument:
    """Wrap each entity of `s` in its id tag; escape <, > and & everywhere."""
    parts: list[str] = []
    pos = 0
    for e in s.entities:
        parts.append(escape(s.text[pos:e.char_start]))
        parts.append(f'<m id="{e.id}">{escape(s.text[e.char_start:e.char_end])}</m>')
        pos = e.char_end
    parts.append(escape(s.text[pos:]))
    return MarkupDocument(text="".join(parts), source_sentence_id=s.sentence_id)


def strip_tags(doc: str) -> str:
    """Tag-free text with escapes resolved; the translated sentence surface."""
    return unescape(_TOKEN.sub("", doc))


def decode_sentence(doc: str, source: AnnotatedSentence) -> DecodedSentence:
    """Recover entity spans from a translated markup document.

    Resolution rules for corrupted markup:
      * id absent from the document       -> listed in missing_ids
      * id tagged more than once          -> longest segment kept, duplicate_id
      * tag opened inside another tag     -> both extents kept, nested_tag
      * id not present in the source      -> segment dropped, unknown_id
      * tag wrapping the empty string     -> segment dropped, empty_span
      * surviving spans that intersect    -> kept, overlap_after_decode

    Raises DecodeError when open/close tags do not balance.
    """
    out: list[str] = []
    out_len = 0
    segments: list[tuple[int, int, int]] = []  # (id, start, end) in decoded text
    anomalies: list[AnomalyRecord] = []
    stack: list[tuple[int, int]] = []  # (id, start)

    pos = 0
    for m in _TOKEN.finditer(doc):
        chunk = unescape(doc[pos:m.start()])
        out.append(chunk)
        out_len += len(chunk)
        pos = m.end()
        if m.group(0) == CLOSE_TAG:
            if not stack:
                raise DecodeError("closing tag without a matching open tag",
                                  source.sentence_id)
            tag_id, start = stack.pop()
            segments.append((tag_id, start, out_len))
        else:
            tag_id = int(m.group(1))
            if stack:
                anomalies.append(AnomalyRecord(
                    kind="nested_tag", entity_id=tag_id,
                    detail=f"tag {tag_id} opened inside tag {stack[-1][0]}"))
            stack.append((tag_id, out_len))
    if stack:
        raise DecodeError(f"unclosed tag id {stack[-1][0]}", source.sentence_id)
    chunk = unescape(doc[pos:])
    out.append(chunk)
    out_len += len(chunk)
    text = "".join(out)

    source_ids = {e.id: e for e in source.entities}

    by_id: dict[int, list[tuple[int, int]]] = {}
    for tag_id, start, end in segments:
        if tag_id not in source_ids:
            anomalies.append(AnomalyRecord(
                kind="unknown_id", entity_id=tag_id,
                detail=f"tag id {tag_id} does not occur in the source sentence"))
            continue
        by_id.setdefault(tag_id, []).append((start, end))

    spans: list[EntitySpan] = []
    recovered: set[int] = set()
    for tag_id, segs in by_id.items():
        if len(segs) > 1:
            anomalies.append(AnomalyRecord(
                kind="duplicate_id", entity_id=tag_id,
                detail=f"id {tag_id} tagged {len(segs)} times; keeping the longest segment"))
        nonempty = [(start, end) for start, end in segs if end > start]
        for start, end in segs:
            if end == start:
                anomalies.append(AnomalyRecord(
                    kind="empty_span", entity_id=tag_id,
                    detail=f"tag id {tag_id} wraps an empty segment at offset {start}"))
        if not nonempty:
            continue
        # Longest segment wins; earliest on ties.
        start, end = max(nonempty, key=lambda seg: (seg[1] - seg[0], -seg[0]))
        spans.append(EntitySpan(id=tag_id, char_start=start, char_end=end,
                                entity_type=source_ids[tag_id].entity_type))
        recovered.add(tag_id)

    spans.sort(key=lambda e: (e.char_start, e.char_end, e.id))
    for i, a in enumerate(spans):
        for b in spans[i + 1:]:
            if b.char_start >= a.char_end:
                break
            anomalies.append(AnomalyRecord(
                kind="overlap_after_decode", entity_id=b.id,
                detail=f"span of id {b.id} overlaps span of id {a.id}"))

    missing = tuple(sorted(set(source_ids) - recovered))
    return DecodedSentence(text=text, spans=tuple(spans), missing_ids=missing,
                           anomalies=tuple(anomalies))
