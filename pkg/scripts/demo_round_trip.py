"""End-to-end demo: mock-translate a tiny corpus, inspect what survives.

Runs the forward leg with a backend that reorders words inside spans, drops
one entity, and grows another by a comma; then translates back. Prints the
markup at each stage and both transfer reports.
"""

import argparse

from spanmt.backends import MockBackend, MockBehavior
from spanmt.corpus import AnnotatedSentence, Corpus, EntitySpan, Relation
from spanmt.markup import encode_sentence
from spanmt.metrics import format_transfer_reports
from spanmt.pipeline import back_translate, translate_corpus


def build_corpus() -> Corpus:
    s1 = AnnotatedSentence(
        sentence_id="demo-1",
        text="We apply machine learning to classification tasks.",
        entities=(EntitySpan(0, 9, 25, "field"), EntitySpan(1, 29, 43, "task")),
        relations=(Relation(head_id=0, tail_id=1, label="part-of"),),
    )
    s2 = AnnotatedSentence(
        sentence_id="demo-2",
        text="Alice moved from Zürich to 北京 last year.",
        entities=(EntitySpan(0, 0, 5, "person"), EntitySpan(1, 17, 23, "location"),
                  EntitySpan(2, 27, 29, "location")),
        relations=(Relation(head_id=0, tail_id=1, label="origin"),
                   Relation(head_id=0, tail_id=2, label="physical"),),
    )
    return Corpus(language="en", domain="news", split="test", sentences=(s1, s2))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--target", default="de", help="target language tag")
    args = parser.parse_args()

    corpus = build_corpus()
    print("== encoded source ==")
    for s in corpus.sentences:
        print(f"  {encode_sentence(s).text}")

    forward = MockBackend(MockBehavior(
        word_transform="reverse_words_inside_tags",
        drop_tag_ids={("demo-1", 1)},
        append_comma_ids={("demo-2", 0)},
    ))
    translated, report1, manifest1 = translate_corpus(corpus, forward, args.target)

    print(f"\n== after the forward leg (en -> {args.target}) ==")
    for s, outcome in zip(translated.sentences, manifest1.sentences):
        print(f"  [{outcome.status}] {s.text}")
        for e in s.entities:
            print(f"      id={e.id} {e.entity_type}: {s.entity_text(e.id)!r}")
        if outcome.missing_entity_ids:
            print(f"      lost entity ids: {list(outcome.missing_entity_ids)}, "
                  f"dropped relations: {outcome.dropped_relations}")
    print()
    print(format_transfer_reports([report1]), end="")

    back = MockBackend(MockBehavior(word_transform="reverse_words_inside_tags"))
    restored, report2, _ = back_translate(translated, back, "en")
    print(f"\n== after the return leg ({args.target} -> en) ==")
    for s in restored.sentences:
        print(f"  {s.text}")
    print()
    print(format_transfer_reports([report2]), end="")


if __name__ == "__main__":
    main()
