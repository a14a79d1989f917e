import random
import re
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphlin.rdf import (
    RdfEntry,
    RdfFormatError,
    RdfTriple,
    linearize_rdf,
    randomize_rdf,
    read_rdf_jsonl,
    read_webnlg_xml,
    split_predicate,
)
from tests.conftest import RDF_SAMPLE

NED = RdfEntry(
    triples=(
        RdfTriple("Ned", "fatherOf", "Rod"),
        RdfTriple("Ned", "fatherOf", "Todd"),
    ),
    references=("Ned is the father of Rod and Todd.",),
)


class TestLinearize:
    def test_worked_example(self):
        assert linearize_rdf(NED) == (
            "<rel> <S> Ned <V> father of <O> Rod "
            "<rel> <S> Ned <V> father of <O> Todd"
        ).split()

    def test_single_triple_single_block(self):
        entry = RdfEntry((RdfTriple("A", "b", "C"),), ("A b C",))
        tokens = linearize_rdf(entry)
        assert tokens.count("<rel>") == 1

    def test_camel_case_split_matches_oracle(self):
        oracle = lambda p: re.sub(r"(?=[A-Z])", " ", p).lower().split()
        for predicate in (
            "fatherOf", "birthPlace", "cityServed", "runwayLength",
            "operatingOrganisation", "areaTotal", "isPartOf", "mean",
        ):
            assert split_predicate(predicate).split() == oracle(predicate)

    def test_token_count_formula(self):
        for entry in read_rdf_jsonl(RDF_SAMPLE)[:20]:
            expected = sum(
                4
                + len(t.subject.split())
                + len(split_predicate(t.predicate).split())
                + len(t.object.split())
                for t in entry.triples
            )
            assert len(linearize_rdf(entry)) == expected


class TestRandomize:
    def test_single_triple_unchanged(self):
        entry = RdfEntry((RdfTriple("A", "b", "C"),), ("ref",))
        assert randomize_rdf(entry, random.Random(5)) == entry

    def test_two_triple_orders_are_balanced(self):
        flipped = 0
        for seed in range(10_000):
            shuffled = randomize_rdf(NED, random.Random(seed))
            if shuffled.triples[0].object == "Todd":
                flipped += 1
        assert 0.48 <= flipped / 10_000 <= 0.52

    @given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=1, max_value=6))
    @settings(max_examples=60, deadline=None)
    def test_multiset_and_references_preserved(self, seed, k):
        triples = tuple(RdfTriple(f"s{i}", "linkTo", f"o{i}") for i in range(k))
        entry = RdfEntry(triples, ("a ref",), "cat")
        shuffled = randomize_rdf(entry, random.Random(seed))
        assert Counter(shuffled.triples) == Counter(entry.triples)
        assert shuffled.references == entry.references

    def test_rel_blocks_equal_as_multiset(self):
        def blocks(tokens):
            out, current = [], []
            for tok in tokens:
                if tok == "<rel>" and current:
                    out.append(tuple(current))
                    current = []
                current.append(tok)
            out.append(tuple(current))
            return Counter(out)

        shuffled = randomize_rdf(NED, random.Random(123))
        assert blocks(linearize_rdf(shuffled)) == blocks(linearize_rdf(NED))


class TestReaders:
    def test_jsonl_sample(self):
        entries = read_rdf_jsonl(RDF_SAMPLE)
        assert len(entries) == 50
        assert all(entry.triples and entry.references for entry in entries)

    def test_underscores_cleaned(self):
        entries = read_rdf_jsonl(RDF_SAMPLE)
        assert not any("_" in t.subject for e in entries for t in e.triples)

    def test_webnlg_xml(self, tmp_path):
        xml = """<?xml version="1.0"?>
<benchmark>
  <entries>
    <entry category="Airport" eid="Id1">
      <modifiedtripleset>
        <mtriple>Aarhus_Airport | cityServed | Aarhus</mtriple>
      </modifiedtripleset>
      <lex lid="Id1">Aarhus airport serves the city of Aarhus.</lex>
      <lex lid="Id2">Aarhus is served by Aarhus airport.</lex>
    </entry>
  </entries>
</benchmark>
"""
        path = tmp_path / "webnlg.xml"
        path.write_text(xml, encoding="utf-8")
        entries = read_webnlg_xml(path)
        assert len(entries) == 1
        assert entries[0].category == "Airport"
        assert entries[0].triples == (RdfTriple("Aarhus Airport", "cityServed", "Aarhus"),)
        assert len(entries[0].references) == 2

    def test_reserved_tokens_rejected(self):
        with pytest.raises(RdfFormatError):
            RdfTriple("Ned <M>", "fatherOf", "Rod")
        with pytest.raises(RdfFormatError):
            RdfTriple("", "fatherOf", "Rod")

    def test_empty_entry_rejected(self):
        with pytest.raises(RdfFormatError):
            RdfEntry((), ("ref",))
        with pytest.raises(RdfFormatError):
            RdfEntry((RdfTriple("a", "b", "c"),), ())
