import random
import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spanmt.corpus import AnnotatedSentence, EntitySpan
from spanmt.markup import (AnomalyRecord, DecodeError, decode_sentence,
                           encode_sentence, strip_tags)

from conftest import make_sentence, random_sentence

TAGGED = re.compile(r'<m id="([0-9]+)">(.*?)</m>', re.DOTALL)


def kinds(decoded):
    return {a.kind for a in decoded.anomalies}


class TestEncode:
    def test_direct_construction(self):
        s = make_sentence("s1", "machine learning is a subfield", ents=[(0, 16, "field")])
        doc = encode_sentence(s)
        assert doc.text == '<m id="0">machine learning</m> is a subfield'
        assert doc.source_sentence_id == "s1"

    def test_zero_entities_text_unchanged_after_escaping(self):
        s = make_sentence("s1", "A < B & C > D")
        assert encode_sentence(s).text == "A &lt; B &amp; C &gt; D"
        assert strip_tags(encode_sentence(s).text) == s.text

    def test_adjacent_entities_strip_tags_oracle(self):
        s = make_sentence("s1", "Alice met", ents=[(0, 5, "person"), (6, 9, "verb")])
        doc = encode_sentence(s)
        assert doc.text == '<m id="0">Alice</m> <m id="1">met</m>'
        assert strip_tags(doc.text) == s.text

    def test_escaping_inside_entities(self):
        s = make_sentence("s1", "R&D <lab>", ents=[(0, 3, "org"), (4, 9, "org")])
        doc = encode_sentence(s)
        assert doc.text == '<m id="0">R&amp;D</m> <m id="1">&lt;lab&gt;</m>'

    def test_literal_escape_sequence_in_source(self):
        # Text that already looks escaped must survive one more round.
        s = make_sentence("s1", "x&amp;y stays", ents=[(0, 7, "misc")])
        d = decode_sentence(encode_sentence(s).text, s)
        assert d.text == s.text
        assert d.spans == s.entities


class TestDecodeHappyPath:
    def test_round_trip_identity(self, two_person_sentence):
        s = two_person_sentence
        d = decode_sentence(encode_sentence(s).text, s)
        assert d.text == s.text
        assert d.spans == s.entities
        assert d.missing_ids == ()
        assert d.anomalies == ()

    def test_comma_expansion_recovered_as_longer_span(self):
        s = make_sentence("s1", "machine learning is a subfield", ents=[(0, 16, "field")])
        d = decode_sentence('<m id="0">maschinelles Lernen,</m> ist ein Teilgebiet', s)
        assert d.text == "maschinelles Lernen, ist ein Teilgebiet"
        assert d.spans == (EntitySpan(0, 0, 20, "field"),)
        assert d.text[0:20] == "maschinelles Lernen,"
        assert d.missing_ids == ()

    def test_untagged_output_reports_missing(self):
        source = AnnotatedSentence("s1", "the Nobel laureate",
                                   entities=(EntitySpan(2, 4, 9, "misc"),))
        d = decode_sentence("nobelpristageren", source)
        assert d.text == "nobelpristageren"
        assert d.spans == ()
        assert d.missing_ids == (2,)

    @given(st.integers(min_value=0, max_value=100_000))
    def test_round_trip_property(self, seed):
        s = random_sentence(random.Random(seed), "fz")
        d = decode_sentence(encode_sentence(s).text, s)
        assert (d.text, d.spans, d.missing_ids, d.anomalies) == (
            s.text, s.entities, (), ())


class TestDecodeCorruption:
    def setup_method(self):
        self.s = make_sentence("s1", "Alice met Bob today",
                               ents=[(0, 5, "person"), (10, 13, "person")])

    def test_dropped_tag_goes_missing(self):
        d = decode_sentence('<m id="0">Alice</m> met Bob today', self.s)
        assert d.missing_ids == (1,)
        assert [sp.id for sp in d.spans] == [0]

    def test_duplicate_id_keeps_longest_segment(self):
        d = decode_sentence('<m id="0">Al</m> met <m id="0">Bobby</m> today', self.s)
        assert len(d.spans) == 1
        sp = d.spans[0]
        assert d.text[sp.char_start:sp.char_end] == "Bobby"
        assert kinds(d) == {"duplicate_id"}
        assert d.missing_ids == (1,)

    def test_duplicate_tie_keeps_earliest(self):
        d = decode_sentence('<m id="0">abc</m> x <m id="0">def</m>', self.s)
        sp = d.spans[0]
        assert d.text[sp.char_start:sp.char_end] == "abc"

    def test_nested_tags_keep_both_extents(self):
        d = decode_sentence('<m id="0">Alice <m id="1">met</m> Bob</m> today', self.s)
        assert kinds(d) >= {"nested_tag", "overlap_after_decode"}
        by_id = {sp.id: sp for sp in d.spans}
        assert d.text[by_id[0].char_start:by_id[0].char_end] == "Alice met Bob"
        assert d.text[by_id[1].char_start:by_id[1].char_end] == "met"
        assert d.missing_ids == ()

    def test_unknown_id_dropped(self):
        d = decode_sentence('<m id="0">Alice</m> met <m id="7">Bob</m> today', self.s)
        assert [sp.id for sp in d.spans] == [0]
        assert kinds(d) == {"unknown_id"}
        assert d.missing_ids == (1,)

    def test_empty_tag_counts_missing(self):
        d = decode_sentence('<m id="0"></m>Alice met Bob today', self.s)
        assert kinds(d) == {"empty_span"}
        assert 0 in d.missing_ids

    def test_empty_duplicate_falls_back_to_nonempty(self):
        d = decode_sentence('<m id="0"></m><m id="0">Alice</m> met Bob today', self.s)
        assert [sp.id for sp in d.spans] == [0]
        assert d.missing_ids == (1,)
        assert kinds(d) == {"duplicate_id", "empty_span"}

    def test_unclosed_tag_is_decode_error(self):
        with pytest.raises(DecodeError, match="s1"):
            decode_sentence('<m id="0">Alice met', self.s)

    def test_stray_close_is_decode_error(self):
        with pytest.raises(DecodeError, match="matching open"):
            decode_sentence('Alice</m> met', self.s)

    def test_text_equals_strip_tags(self):
        doc = '<m id="0">Alice</m> met <m id="1">Bob</m> &amp; co'
        d = decode_sentence(doc, self.s)
        assert d.text == strip_tags(doc) == "Alice met Bob & co"


def corrupt(doc: str, rng: random.Random, source_ids: list[int]) -> str:
    """Balanced-tag corruption: drop, duplicate, wrap or empty-append tags."""
    out = []
    pos = 0
    appendix = []
    for m in TAGGED.finditer(doc):
        out.append(doc[pos:m.start()])
        pos = m.end()
        whole, inner, tag_id = m.group(0), m.group(2), int(m.group(1))
        op = rng.randrange(6)
        if op == 0:
            out.append(inner)  # tags dropped by the translator
        elif op == 1:
            out.append(whole)
            appendix.append(f' <m id="{tag_id}">{inner}</m>')  # duplicated
        elif op == 2:
            wrapper = rng.choice(source_ids + [97]) if source_ids else 97
            out.append(f'<m id="{wrapper}">{whole}</m>')  # nested
        elif op == 3:
            out.append(f'<m id="{tag_id}"></m>')  # emptied
        elif op == 4:
            out.append(f'<m id="99">{inner}</m>')  # relabelled to unknown id
        else:
            out.append(whole)
    out.append(doc[pos:])
    return "".join(out) + "".join(appendix)


class TestFuzzProperties:
    @given(st.integers(min_value=0, max_value=100_000))
    @settings(max_examples=300)
    def test_partition_and_bounds_under_balanced_corruption(self, seed):
        rng = random.Random(seed)
        s = random_sentence(rng, "fz")
        doc = corrupt(encode_sentence(s).text, rng, [e.id for e in s.entities])
        d = decode_sentence(doc, s)
        source_ids = {e.id for e in s.entities}
        recovered = {sp.id for sp in d.spans}
        assert recovered | set(d.missing_ids) == source_ids
        assert recovered & set(d.missing_ids) == set()
        assert d.text == strip_tags(doc)
        for sp in d.spans:
            assert 0 <= sp.char_start < sp.char_end <= len(d.text)
        ids = [sp.id for sp in d.spans]
        assert len(ids) == len(set(ids))

    @given(st.integers(min_value=0, max_value=100_000))
    @settings(max_examples=300)
    def test_decoder_total_under_unbalanced_corruption(self, seed):
        rng = random.Random(seed)
        s = random_sentence(rng, "fz")
        doc = corrupt(encode_sentence(s).text, rng, [e.id for e in s.entities])
        # Structural damage on top: truncation or a stray close tag.
        if rng.random() < 0.5:
            doc = doc[:rng.randrange(len(doc) + 1)]
        else:
            cut = rng.randrange(len(doc) + 1)
            doc = doc[:cut] + "</m>" + doc[cut:]
        try:
            d = decode_sentence(doc, s)
        except DecodeError:
            return
        source_ids = {e.id for e in s.entities}
        recovered = {sp.id for sp in d.spans}
        assert recovered | set(d.missing_ids) == source_ids
        assert recovered & set(d.missing_ids) == set()
        for sp in d.spans:
            assert 0 <= sp.char_start < sp.char_end <= len(d.text)


class TestAnomalyRecord:
    def test_kind_closed_set(self):
        with pytest.raises(ValueError):
            AnomalyRecord(kind="novel_kind", entity_id=None, detail="")
        AnomalyRecord(kind="duplicate_id", entity_id=1, detail="ok")
