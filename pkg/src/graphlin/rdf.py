"""WebNLG-style RDF triple sets: readers, special-token linearization, shuffling."""

from __future__ import annotations

import json
import random
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path

from graphlin.penman import RESERVED_TOKENS, TokenSeq

REL_TOKEN = "<rel>"
SUBJ_TOKEN = "<S>"
PRED_TOKEN = "<V>"
OBJ_TOKEN = "<O>"

_CAMEL_SPLIT_RE = re.compile(r"(?<=[a-z0-9])(?=[A-Z])")


class RdfFormatError(Exception):
    """Malformed or reserved-token-bearing RDF input."""


@dataclass(frozen=True)
class RdfTriple:
    subject: str
    predicate: str
    object: str

    def __post_init__(self):
        for field_value in (self.subject, self.predicate, self.object):
            if not field_value:
                raise RdfFormatError("triple fields must be non-empty")
            if any(special in field_value for special in RESERVED_TOKENS):
                raise RdfFormatError(f"reserved token inside triple element: {field_value!r}")


@dataclass(frozen=True)
class RdfEntry:
    triples: tuple[RdfTriple, ...]
    references: tuple[str, ...]
    category: str = ""

    def __post_init__(self):
        if not self.triples:
            raise RdfFormatError("entry has no triples")
        if not self.references:
            raise RdfFormatError("entry has no reference sentences")


def clean_entity(text: str) -> str:
    """WebNLG cleanup: underscores become spaces, whitespace collapsed."""
    return " ".join(text.replace("_", " ").split())


def split_predicate(predicate: str) -> str:
    """Split camelCase predicates into lowercase words (`fatherOf` -> `father of`)."""
    return _CAMEL_SPLIT_RE.sub(" ", clean_entity(predicate)).lower()


def linearize_rdf(entry: RdfEntry) -> TokenSeq:
    """`<rel> <S> subject <V> predicate <O> object` per triple, in order."""
    tokens: TokenSeq = []
    for triple in entry.triples:
        tokens.append(REL_TOKEN)
        tokens.append(SUBJ_TOKEN)
        tokens.extend(triple.subject.split())
        tokens.append(PRED_TOKEN)
        tokens.extend(split_predicate(triple.predicate).split())
        tokens.append(OBJ_TOKEN)
        tokens.extend(triple.object.split())
    return tokens


def randomize_rdf(entry: RdfEntry, rng: random.Random) -> RdfEntry:
    """Permute triple order uniformly at random; references are untouched."""
    shuffled = rng.sample(entry.triples, len(entry.triples))
    return RdfEntry(tuple(shuffled), entry.references, entry.category)


def _make_triple(subject: str, predicate: str, object_: str) -> RdfTriple:
    return RdfTriple(clean_entity(subject), predicate.strip(), clean_entity(object_))


def read_webnlg_xml(path: str | Path) -> list[RdfEntry]:
    """Read WebNLG release XML (`benchmark/entries/entry` structure)."""
    tree = ET.parse(path)
    entries: list[RdfEntry] = []
    for entry in tree.getroot().iter("entry"):
        category = entry.get("category", "")
        triples = []
        tripleset = entry.find("modifiedtripleset")
        if tripleset is None:
            tripleset = entry.find("originaltripleset")
        if tripleset is None:
            raise RdfFormatError(f"entry {entry.get('eid')!r} has no triple set")
        for mtriple in tripleset:
            parts = [p.strip() for p in (mtriple.text or "").split("|")]
            if len(parts) != 3:
                raise RdfFormatError(f"bad triple text: {mtriple.text!r}")
            triples.append(_make_triple(*parts))
        references = tuple(
            (lex.text or "").strip() for lex in entry.iter("lex") if (lex.text or "").strip()
        )
        entries.append(RdfEntry(tuple(triples), references, category))
    return entries


def read_rdf_jsonl(path: str | Path) -> list[RdfEntry]:
    """Read the simplified JSONL form: {"triples": [[s,p,o],...], "refs": [...], "category"}."""
    entries: list[RdfEntry] = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            record = json.loads(line)
            try:
                triples = tuple(_make_triple(*t) for t in record["triples"])
                entries.append(
                    RdfEntry(triples, tuple(record["refs"]), record.get("category", ""))
                )
            except (KeyError, TypeError) as exc:
                raise RdfFormatError(f"line {line_no}: {exc}") from exc
    return entries
