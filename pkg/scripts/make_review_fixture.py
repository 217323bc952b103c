"""Generate a deterministic review fixture: 30 tasks over 160 entities.

Writes a tasks file for `spanmt review serve --tasks` plus the source and
translated corpora it was sampled from. The shape (10 sentences with 6
entities, 20 with 5) makes the all-correct review session aggregate to the
easily recognizable 30 / 160 / 160 / 160 row, which the frontend test suite
checks against the report endpoint.
"""

import argparse
from pathlib import Path

from spanmt.backends import MockBackend, MockBehavior
from spanmt.corpus import AnnotatedSentence, Corpus, EntitySpan, Relation, save_corpus
from spanmt.pipeline import translate_corpus
from spanmt.review import build_sample, save_sample

TYPES = ("person", "organisation", "location", "misc", "concept")


def sentence(idx: int, n_entities: int) -> AnnotatedSentence:
    words = [f"item{idx}x{k}" for k in range(n_entities)]
    entities, pos = [], 0
    for k, w in enumerate(words):
        entities.append(EntitySpan(id=k, char_start=pos, char_end=pos + len(w),
                                   entity_type=TYPES[k % len(TYPES)]))
        pos += len(w) + 1
    relations = (Relation(head_id=0, tail_id=1, label="related-to"),)
    return AnnotatedSentence(sentence_id=f"fixture-{idx}", text=" ".join(words),
                             entities=tuple(entities), relations=relations)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    sentences = tuple(sentence(i, 6 if i < 10 else 5) for i in range(30))
    source = Corpus(language="en", domain="news", split="test", sentences=sentences)
    backend = MockBackend(MockBehavior(word_transform="reverse_words_inside_tags"))
    translated, report, _ = translate_corpus(source, backend, "de")
    assert report.pct_entities == 100.0

    save_corpus(source, out / "source.jsonl")
    save_corpus(translated, out / "translated-de.jsonl")
    tasks = build_sample(source, translated, n=30, seed=args.seed)
    save_sample(tasks, out / "tasks.json", seed=args.seed, n=30)

    n_entities = sum(len(t.source_entities) for t in tasks)
    print(f"wrote {len(tasks)} tasks covering {n_entities} entities -> {out}/tasks.json")
    print("all-correct session aggregates to "
          f"{len(tasks)} / {n_entities} / {n_entities} / {n_entities}")


if __name__ == "__main__":
    main()
