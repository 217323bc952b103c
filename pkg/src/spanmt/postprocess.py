"""Trailing-punctuation repair for decoded spans.

Translation tends to over-extend a tagged entity by a trailing punctuation
mark ("maschinelles Lernen," for "machine learning"). The single repair rule:
strip trailing punctuation from a recovered span unless the original entity
text ends with that same character. Leading punctuation and surrounding
function words are left alone on purpose.
"""

from __future__ import annotations

import functools
import sys
import unicodedata
from dataclasses import dataclass, replace
from pathlib import Path

from .corpus import AnnotatedSentence, EntitySpan
from .markup import AnomalyRecord, DecodedSentence

REQUIRED_PUNCTUATION = frozenset(',.;:!?)]}"\'')


class PostprocessError(Exception):
    """Stripping would reduce the span to the empty string."""


@functools.lru_cache(maxsize=1)
def _unicode_punctuation() -> frozenset[str]:
    # Every general-category P* code point; the corpus spans many scripts.
    return frozenset(
        c for c in map(chr, range(sys.maxunicode + 1))
        if unicodedata.category(c).startswith("P")
    )


@dataclass(frozen=True)
class PunctuationPolicy:
    punct_set: frozenset[str]

    def __post_init__(self):
        if not self.punct_set:
            raise ValueError("punctuation set is empty")
        missing = REQUIRED_PUNCTUATION - self.punct_set
        if missing:
            raise ValueError(f"punctuation set lacks required characters: {sorted(missing)}")

    @classmethod
    def default(cls) -> "PunctuationPolicy":
        return cls(punct_set=REQUIRED_PUNCTUATION | _unicode_punctuation())

    @classmethod
    def with_extra(cls, extra: str) -> "PunctuationPolicy":
        return cls(punct_set=cls.default().punct_set | frozenset(extra))

    @classmethod
    def from_config_file(cls, path: str | Path) -> "PunctuationPolicy":
        """Extra punctuation characters, one line per run of characters."""
        extra = "".join(
            line.strip() for line in Path(path).read_text(encoding="utf-8").splitlines()
        )
        return cls.with_extra(extra)

    def digest_text(self) -> str:
        return "".join(sorted(self.punct_set))


def strip_trailing_punctuation(original_entity_text: str, span: EntitySpan,
                               translated_text: str,
                               policy: PunctuationPolicy) -> EntitySpan:
    """Shrink `span` while its surface ends in punctuation the original lacks.

    Raises PostprocessError when the whole surface is strippable punctuation;
    the span never becomes empty.
    """
    if not (0 <= span.char_start < span.char_end <= len(translated_text)):
        raise ValueError(f"span [{span.char_start},{span.char_end}) outside translated text")
    end = span.char_end
    while True:
        last = translated_text[end - 1]
        if last not in policy.punct_set or original_entity_text.endswith(last):
            break
        if end - span.char_start == 1:
            raise PostprocessError(
                f"span of entity {span.id} is all strippable punctuation "
                f"({translated_text[span.char_start:span.char_end]!r})")
        end -= 1
    return replace(span, char_end=end)


def apply_postprocess(d: DecodedSentence, source: AnnotatedSentence,
                      policy: PunctuationPolicy) -> DecodedSentence:
    """Strip every recovered span; text stays untouched.

    Spans whose surface is pure punctuation are kept unstripped and flagged
    with an empty_span anomaly (deduplicated, so the operation is idempotent).
    """
    spans: list[EntitySpan] = []
    anomalies = list(d.anomalies)
    for span in d.spans:
        original = source.entity_text(span.id)
        try:
            spans.append(strip_trailing_punctuation(original, span, d.text, policy))
        except PostprocessError as exc:
            spans.append(span)
            record = AnomalyRecord(kind="empty_span", entity_id=span.id,
                                   detail=f"trailing-punctuation strip aborted: {exc}")
            if record not in anomalies:
                anomalies.append(record)
    return DecodedSentence(text=d.text, spans=tuple(spans),
                           missing_ids=d.missing_ids, anomalies=tuple(anomalies))
