"""Shared fixtures: hand-built corpora and a seeded random sentence generator.

The random generator mixes ASCII, accented Latin, CJK and markup-hostile
tokens (`<`, `>`, `&`) so codec tests exercise escaping and multi-script text.
"""

from __future__ import annotations

import random

import pytest
from hypothesis import settings

from spanmt.corpus import AnnotatedSentence, Corpus, EntitySpan, Relation

settings.register_profile("suite", deadline=None)
settings.load_profile("suite")

ASCII_WORDS = [
    "Alice", "Bob", "model", "data", "learning", "machine", "prize", "city",
    "committee", "album", "novel", "signal", "market", "villa", "tree",
]
UNICODE_WORDS = ["café", "naïve", "Zürich", "Ångström", "œuvre", "Ñandú"]
CJK_WORDS = ["機械学習", "分類", "ノーベル", "東京大学", "自然言語", "北京"]
HOSTILE_WORDS = ["<tag>", "R&D", "a<b", "x&amp;y", "5>3"]
PUNCT_TAILS = ["", "", "", "", ",", ".", "!?", ";", "。", "、"]
ENTITY_TYPES = ["person", "organisation", "location", "misc", "concept"]
RELATION_LABELS = ["role", "part-of", "physical", "related-to", "win-defeat"]


def make_sentence(sid: str, text: str, ents=(), rels=()) -> AnnotatedSentence:
    entities = tuple(EntitySpan(id=i, char_start=a, char_end=b, entity_type=t)
                     for i, (a, b, t) in enumerate(ents))
    relations = tuple(
        Relation(head_id=r[0], tail_id=r[1], label=r[2],
                 extra=dict(r[3]) if len(r) > 3 else {})
        for r in rels)
    return AnnotatedSentence(sentence_id=sid, text=text, entities=entities,
                             relations=relations)


def random_sentence(rng: random.Random, sid: str, max_entities: int = 8) -> AnnotatedSentence:
    pool = ASCII_WORDS + UNICODE_WORDS + CJK_WORDS + HOSTILE_WORDS
    n_words = rng.randint(1, 14)
    words = []
    for _ in range(n_words):
        w = rng.choice(pool)
        if rng.random() < 0.25:
            w += rng.choice(PUNCT_TAILS)
        words.append(w)
    text = " ".join(words)

    # Word-aligned character offsets.
    offsets = []
    pos = 0
    for w in words:
        offsets.append((pos, pos + len(w)))
        pos += len(w) + 1

    entities = []
    i = 0
    next_id = 0
    while i < n_words and next_id < max_entities:
        if rng.random() < 0.45:
            j = min(n_words - 1, i + rng.randint(0, 2))
            entities.append(EntitySpan(id=next_id, char_start=offsets[i][0],
                                       char_end=offsets[j][1],
                                       entity_type=rng.choice(ENTITY_TYPES)))
            next_id += 1
            i = j + 1
        else:
            i += 1

    relations = []
    if len(entities) >= 2:
        for _ in range(rng.randint(0, 4)):
            head, tail = rng.sample(entities, 2)
            relations.append(Relation(head_id=head.id, tail_id=tail.id,
                                      label=rng.choice(RELATION_LABELS),
                                      extra={"explanation": "generated"}
                                      if rng.random() < 0.3 else {}))
    return AnnotatedSentence(sentence_id=sid, text=text, entities=tuple(entities),
                             relations=tuple(relations))


def random_corpus(rng: random.Random, n_sentences: int, language: str = "en",
                  domain: str | None = None, split: str | None = None) -> Corpus:
    domain = domain or rng.choice(["news", "politics", "science", "music", "literature", "ai"])
    split = split or rng.choice(["train", "dev", "test"])
    sentences = tuple(random_sentence(rng, f"{domain}-{split}-{i}")
                      for i in range(n_sentences))
    return Corpus(language=language, domain=domain, split=split, sentences=sentences)


@pytest.fixture
def two_person_sentence() -> AnnotatedSentence:
    return make_sentence(
        "s1", "Alice met Bob.",
        ents=[(0, 5, "person"), (10, 13, "person")],
        rels=[(0, 1, "role")],
    )


@pytest.fixture
def small_corpus(two_person_sentence) -> Corpus:
    return Corpus(language="en", domain="news", split="test",
                  sentences=(two_person_sentence,))
