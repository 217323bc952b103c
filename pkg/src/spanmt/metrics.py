"""Quantitative machinery: transfer statistics, corpus counts, scoring.

Percentages are rounded half-up to one decimal everywhere they are reported.
macro_f1 runs on exact rational arithmetic internally so that results agree
bit-for-bit with any exact independent recount.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

from .corpus import Corpus, DomainCount, corpus_digest

if TYPE_CHECKING:
    from .pipeline import TranslationRunManifest
    from .review import Judgment, ReviewTask

DOMAIN_ORDER = ("news", "politics", "science", "music", "literature", "ai")
SPLIT_ORDER = ("train", "dev", "test")


class MetricError(Exception):
    pass


class ConstantInputError(MetricError):
    """Pearson correlation is undefined for a constant sequence."""


def round_half_up(value: float | Fraction | Decimal, decimals: int = 1) -> float:
    quantum = Decimal(1).scaleb(-decimals)
    if isinstance(value, Fraction):
        dec = Decimal(value.numerator) / Decimal(value.denominator)
    else:
        dec = Decimal(str(value))
    return float(dec.quantize(quantum, rounding=ROUND_HALF_UP))


def _pct(part: int, total: int) -> float:
    # Nothing in scope counts as a vacuous 100% (keeps "no drops => 100/100").
    if total == 0:
        return 100.0
    return round_half_up(Fraction(100 * part, total), 1)


# --------------------------------------------------------------------------
# Transfer statistics
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TransferReport:
    language: str
    domain: str
    split: str
    entities_total: int
    entities_transferred: int
    relations_total: int
    relations_surviving: int

    def __post_init__(self):
        if not (0 <= self.entities_transferred <= self.entities_total):
            raise MetricError("entities_transferred exceeds entities_total")
        if not (0 <= self.relations_surviving <= self.relations_total):
            raise MetricError("relations_surviving exceeds relations_total")

    @property
    def pct_entities(self) -> float:
        return _pct(self.entities_transferred, self.entities_total)

    @property
    def pct_relations(self) -> float:
        return _pct(self.relations_surviving, self.relations_total)

    def to_dict(self) -> dict:
        return {
            "language": self.language,
            "domain": self.domain,
            "split": self.split,
            "entities_total": self.entities_total,
            "entities_transferred": self.entities_transferred,
            "relations_total": self.relations_total,
            "relations_surviving": self.relations_surviving,
            "pct_entities": self.pct_entities,
            "pct_relations": self.pct_relations,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2) + "\n"


def combine_reports(reports: Sequence[TransferReport]) -> TransferReport:
    """Aggregate reports (e.g. one per domain/split) into one per-language row."""
    if not reports:
        raise MetricError("no reports to combine")
    languages = {r.language for r in reports}
    if len(languages) > 1:
        raise MetricError(f"cannot combine reports across languages {sorted(languages)}")
    domains = {r.domain for r in reports}
    splits = {r.split for r in reports}
    return TransferReport(
        language=reports[0].language,
        domain=domains.pop() if len(domains) == 1 else "all",
        split=splits.pop() if len(splits) == 1 else "all",
        entities_total=sum(r.entities_total for r in reports),
        entities_transferred=sum(r.entities_transferred for r in reports),
        relations_total=sum(r.relations_total for r in reports),
        relations_surviving=sum(r.relations_surviving for r in reports),
    )


def transfer_stats(source: Corpus, result: Corpus,
                   manifest: "TranslationRunManifest") -> TransferReport:
    """Recount transfer percentages from the manifest's per-sentence outcomes.

    Decode-error sentences stay out of the denominators; they were never
    translated. Raises MetricError when `source` is not the corpus the
    manifest was produced from (digest disagreement).
    """
    if corpus_digest(source) != manifest.source_digest:
        raise MetricError("source corpus digest does not match the manifest")
    by_id = {s.sentence_id: s for s in source.sentences}
    entities_total = entities_transferred = 0
    relations_total = relations_surviving = 0
    for outcome in manifest.sentences:
        if outcome.status == "decode_error":
            continue
        s = by_id[outcome.sentence_id]
        missing = set(outcome.missing_entity_ids)
        entities_total += len(s.entities)
        entities_transferred += len(s.entities) - len(missing)
        relations_total += len(s.relations)
        relations_surviving += sum(
            1 for r in s.relations if r.head_id not in missing and r.tail_id not in missing)
    return TransferReport(
        language=manifest.target_lang, domain=source.domain, split=source.split,
        entities_total=entities_total, entities_transferred=entities_transferred,
        relations_total=relations_total, relations_surviving=relations_surviving,
    )


def transfer_stats_from_corpora(source: Corpus, translated: Corpus) -> TransferReport:
    """Transfer percentages by direct corpus alignment (no manifest needed).

    Counts entities/relations per sentence_id in both corpora; sentences absent
    from the translated corpus count as fully untransferred. This is the route
    for auditing released data that ships without run manifests.
    """
    translated_by_id = {s.sentence_id: s for s in translated.sentences}
    entities_total = entities_transferred = 0
    relations_total = relations_surviving = 0
    for s in source.sentences:
        t = translated_by_id.get(s.sentence_id)
        entities_total += len(s.entities)
        relations_total += len(s.relations)
        if t is not None:
            entities_transferred += min(len(t.entities), len(s.entities))
            relations_surviving += min(len(t.relations), len(s.relations))
    return TransferReport(
        language=translated.language, domain=source.domain, split=source.split,
        entities_total=entities_total, entities_transferred=entities_transferred,
        relations_total=relations_total, relations_surviving=relations_surviving,
    )


# --------------------------------------------------------------------------
# Corpus statistics
# --------------------------------------------------------------------------

def corpus_stats(corpora: Corpus | Iterable[Corpus]) -> list[DomainCount]:
    """Sentence and relation counts per (domain, split), in canonical order.

    Totals are not materialized as rows (domain/split are closed sets); use
    `stats_totals` or the table renderer for them.
    """
    if isinstance(corpora, Corpus):
        corpora = [corpora]
    counts: dict[tuple[str, str], list[int]] = {}
    for c in corpora:
        cell = counts.setdefault((c.domain, c.split), [0, 0])
        cell[0] += len(c.sentences)
        cell[1] += sum(len(s.relations) for s in c.sentences)
    order = {d: i for i, d in enumerate(DOMAIN_ORDER)}
    split_order = {s: i for i, s in enumerate(SPLIT_ORDER)}
    return [
        DomainCount(domain=d, split=s, sentence_count=v[0], relation_count=v[1])
        for (d, s), v in sorted(counts.items(),
                                key=lambda kv: (order[kv[0][0]], split_order[kv[0][1]]))
    ]


def stats_totals(counts: Iterable[DomainCount]) -> tuple[int, int]:
    counts = list(counts)
    return (sum(c.sentence_count for c in counts), sum(c.relation_count for c in counts))


# --------------------------------------------------------------------------
# Scoring
# --------------------------------------------------------------------------

def macro_f1(gold: Sequence[str], pred: Sequence[str],
             label_set: Iterable[str] | None = None) -> float:
    """Unweighted mean of per-label F1 (2PR/(P+R), zero when P+R is), in [0,100].

    Averages over the labels occurring in `gold` unless an explicit label set
    is given (absent labels then contribute an F1 of zero).
    """
    gold = list(gold)
    pred = list(pred)
    if len(gold) != len(pred):
        raise MetricError(f"gold and pred lengths differ ({len(gold)} vs {len(pred)})")
    if not gold:
        raise MetricError("empty input")
    labels = sorted(set(gold)) if label_set is None else sorted(set(label_set))
    if not labels:
        raise MetricError("empty label set")
    total = Fraction(0)
    for label in labels:
        tp = sum(1 for g, p in zip(gold, pred) if g == label and p == label)
        fp = sum(1 for g, p in zip(gold, pred) if p == label and g != label)
        fn = sum(1 for g, p in zip(gold, pred) if g == label and p != label)
        precision = Fraction(tp, tp + fp) if tp + fp else Fraction(0)
        recall = Fraction(tp, tp + fn) if tp + fn else Fraction(0)
        if precision + recall:
            total += 2 * precision * recall / (precision + recall)
    return float(100 * total / len(labels))


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample Pearson correlation coefficient in [-1, 1]."""
    xs = [float(v) for v in x]
    ys = [float(v) for v in y]
    if len(xs) != len(ys):
        raise MetricError(f"sequence lengths differ ({len(xs)} vs {len(ys)})")
    if len(xs) < 2:
        raise MetricError("need at least two points")
    mx = sum(xs) / len(xs)
    my = sum(ys) / len(ys)
    dx = [v - mx for v in xs]
    dy = [v - my for v in ys]
    sxx = sum(d * d for d in dx)
    syy = sum(d * d for d in dy)
    if sxx == 0.0 or syy == 0.0:
        raise ConstantInputError("correlation undefined for a constant sequence")
    sxy = sum(a * b for a, b in zip(dx, dy))
    return sxy / math.sqrt(sxx * syy)


def cosine_distance(u: Sequence[float], v: Sequence[float]) -> float:
    """1 - cos(u, v), clamped to [0, 2]."""
    us = [float(a) for a in u]
    vs = [float(b) for b in v]
    if len(us) != len(vs):
        raise MetricError(f"dimension mismatch ({len(us)} vs {len(vs)})")
    dot = sum(a * b for a, b in zip(us, vs))
    nu = math.sqrt(sum(a * a for a in us))
    nv = math.sqrt(sum(b * b for b in vs))
    if nu == 0.0 or nv == 0.0:
        raise MetricError("cosine distance undefined for a zero vector")
    return min(2.0, max(0.0, 1.0 - dot / (nu * nv)))


# --------------------------------------------------------------------------
# Typological language vectors
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LanguageVectorSet:
    """Per-language typological feature vectors (syntax + phonology + inventory
    concatenation), supplied as an external JSON file, never fetched."""

    vectors: dict[str, tuple[float, ...]]

    def __post_init__(self):
        dims = {len(v) for v in self.vectors.values()}
        if len(dims) > 1:
            raise MetricError(f"vectors have mixed dimensionality: {sorted(dims)}")
        object.__setattr__(
            self, "vectors", {k: tuple(float(x) for x in v) for k, v in self.vectors.items()})

    @classmethod
    def from_json_file(cls, path: str | Path) -> "LanguageVectorSet":
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(vectors={str(k): tuple(v) for k, v in obj.items()})

    def distance(self, lang_a: str, lang_b: str) -> float:
        for lang in (lang_a, lang_b):
            if lang not in self.vectors:
                raise MetricError(f"no vector for language {lang!r}")
        return cosine_distance(self.vectors[lang_a], self.vectors[lang_b])


# Reference typological distances from English (lang2vec syntax+phonology+
# inventory cosine distance), shipped as static data.
LANG2VEC_REFERENCE_DISTANCES: dict[str, float] = {
    "de": 0.18, "da": 0.18, "pt-BR": 0.18, "pt-PT": 0.18, "nl": 0.19,
    "uk": 0.21, "sv": 0.21, "sl": 0.22, "it": 0.22, "ro": 0.23,
    "bg": 0.23, "fr": 0.23, "sk": 0.23, "id": 0.24, "lv": 0.25,
    "es": 0.27, "hu": 0.27, "el": 0.27, "et": 0.27, "lt": 0.27,
    "pl": 0.27, "fi": 0.28, "cs": 0.29, "zh": 0.30, "tr": 0.38,
    "ja": 0.41,
}


# --------------------------------------------------------------------------
# Review aggregation
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ReviewAggregate:
    language: str
    sentences_reviewed: int
    sentences_meaning_ok: int
    entities_total: int
    entities_transferred_ok: int
    entities_translation_ok: int
    entities_boundary_ok: int

    def __post_init__(self):
        for ok in (self.entities_transferred_ok, self.entities_translation_ok,
                   self.entities_boundary_ok):
            if ok > self.entities_total:
                raise MetricError("ok-count exceeds entity total")
        if self.sentences_meaning_ok > self.sentences_reviewed:
            raise MetricError("sentences_meaning_ok exceeds sentences_reviewed")

    def to_dict(self) -> dict:
        return {
            "language": self.language,
            "sentences_reviewed": self.sentences_reviewed,
            "sentences_meaning_ok": self.sentences_meaning_ok,
            "entities_total": self.entities_total,
            "entities_transferred_ok": self.entities_transferred_ok,
            "entities_translation_ok": self.entities_translation_ok,
            "entities_boundary_ok": self.entities_boundary_ok,
        }


def review_aggregate(judgments: Iterable["Judgment"],
                     tasks: Mapping[str, "ReviewTask"]) -> dict[str, ReviewAggregate]:
    """Aggregate judgments per language, Table-style.

    A later judgment for the same task supersedes earlier ones (the review
    setup is one reviewer per language; with several reviewers the last writer
    wins). Only judged tasks contribute to the entity totals.
    """
    latest: dict[str, "Judgment"] = {}
    for j in judgments:
        if j.task_id not in tasks:
            raise MetricError(f"judgment references unknown task {j.task_id!r}")
        latest[j.task_id] = j

    per_language: dict[str, list[tuple["ReviewTask", "Judgment"]]] = {}
    for task_id, j in latest.items():
        task = tasks[task_id]
        per_language.setdefault(task.language, []).append((task, j))

    out: dict[str, ReviewAggregate] = {}
    for language, pairs in sorted(per_language.items()):
        reviewed = len(pairs)
        meaning_ok = sum(1 for _, j in pairs if j.meaning_preserved)
        total = transferred = translated = boundary = 0
        for task, j in pairs:
            total += len(task.source_entities)
            for verdict in j.entities.values():
                transferred += verdict.transferred
                translated += verdict.translation_correct
                boundary += verdict.boundary_correct
        out[language] = ReviewAggregate(
            language=language, sentences_reviewed=reviewed,
            sentences_meaning_ok=meaning_ok, entities_total=total,
            entities_transferred_ok=transferred, entities_translation_ok=translated,
            entities_boundary_ok=boundary,
        )
    return out


# --------------------------------------------------------------------------
# Aligned-column plain-text tables
# --------------------------------------------------------------------------

def _render_table(header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(header[i]), *(len(r[i]) for r in rows)) if rows else len(header[i])
              for i in range(len(header))]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for r in rows:
        lines.append("  ".join(c.rjust(w) for c, w in zip(r, widths)))
    return "\n".join(lines) + "\n"


def format_domain_counts(counts: Iterable[DomainCount]) -> str:
    """Domain-by-split grid of sentence and relation counts with totals."""
    cells = {(c.domain, c.split): c for c in counts}
    domains = [d for d in DOMAIN_ORDER if any((d, s) in cells for s in SPLIT_ORDER)]
    header = ["domain",
              "sent:train", "sent:dev", "sent:test", "sent:tot",
              "rel:train", "rel:dev", "rel:test", "rel:tot"]
    rows = []
    col_sents = {s: 0 for s in SPLIT_ORDER}
    col_rels = {s: 0 for s in SPLIT_ORDER}
    for d in domains:
        sents = [cells.get((d, s), DomainCount(d, s, 0, 0)).sentence_count for s in SPLIT_ORDER]
        rels = [cells.get((d, s), DomainCount(d, s, 0, 0)).relation_count for s in SPLIT_ORDER]
        for s, n in zip(SPLIT_ORDER, sents):
            col_sents[s] += n
        for s, n in zip(SPLIT_ORDER, rels):
            col_rels[s] += n
        rows.append([d] + [str(n) for n in sents] + [str(sum(sents))]
                    + [str(n) for n in rels] + [str(sum(rels))])
    rows.append(["total"]
                + [str(col_sents[s]) for s in SPLIT_ORDER] + [str(sum(col_sents.values()))]
                + [str(col_rels[s]) for s in SPLIT_ORDER] + [str(sum(col_rels.values()))])
    return _render_table(header, rows)


def format_transfer_reports(reports: Iterable[TransferReport]) -> str:
    header = ["language", "domain", "split", "entities", "transferred", "pct",
              "relations", "surviving", "pct"]
    rows = [[r.language, r.domain, r.split,
             str(r.entities_total), str(r.entities_transferred), f"{r.pct_entities:.1f}",
             str(r.relations_total), str(r.relations_surviving), f"{r.pct_relations:.1f}"]
            for r in reports]
    return _render_table(header, rows)


def format_review_aggregates(aggregates: Iterable[ReviewAggregate]) -> str:
    header = ["language", "reviewed", "meaning ok", "entities",
              "transferred", "translated", "boundaries"]
    rows = [[a.language, str(a.sentences_reviewed), str(a.sentences_meaning_ok),
             str(a.entities_total), str(a.entities_transferred_ok),
             str(a.entities_translation_ok), str(a.entities_boundary_ok)]
            for a in aggregates]
    return _render_table(header, rows)
