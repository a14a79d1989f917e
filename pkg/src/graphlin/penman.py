"""PENMAN text codec: parsing, serialization, simplification, corpus reading."""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence, Union

from graphlin.graph import (
    AmrGraph,
    Attribute,
    Const,
    Instance,
    LinearTree,
    Ref,
    Relation,
    TreeNode,
    graph_from_triples,
    invert_role,
    is_inverted,
    is_valid_variable,
)

TokenSeq = list[str]

MASK_TOKEN = "<M>"
RESERVED_TOKENS = ("<M>", "<rel>", "<S>", "<V>", "<O>")

# Bare atoms that are constants by AMR convention even though they look like
# variable names.
_CONSTANT_KEYWORDS = frozenset({"imperative", "expressive", "interrogative", "-", "+"})

# Shape of bare atoms treated as (possibly dangling) variable references:
# lowercase letters with an optional numeric suffix, e.g. `a`, `d2`, `ii`.
_VARIABLE_RE = re.compile(r"^[a-z]+[0-9]*$")

_SENSE_RE = re.compile(r"-[0-9]+$")
_ALIGNMENT_RE = re.compile(r"~(?:[a-z]\.)?[0-9]+(?:,[0-9]+)*$")


class PenmanError(Exception):
    """Base class for codec failures."""


class PenmanSyntaxError(PenmanError):
    """Malformed PENMAN text, with position information."""

    def __init__(self, line: int, col: int, expected: str, found: str = ""):
        self.line = line
        self.col = col
        self.expected = expected
        self.found = found
        where = f"line {line}, col {col}"
        detail = f" (found {found!r})" if found else ""
        super().__init__(f"expected {expected} at {where}{detail}")


class DuplicateDefinition(PenmanError):
    """A variable has two concept-bearing nodes."""


class DanglingReference(PenmanError):
    """A referenced variable is never defined."""


@dataclass(frozen=True)
class _Token:
    text: str
    line: int
    col: int


def _lex(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    stripped_alignment = False
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch in "()/":
            tokens.append(_Token(ch, line, col))
            i += 1
            col += 1
            continue
        if ch == '"':
            start_line, start_col = line, col
            j = i + 1
            while j < n and (text[j] != '"' or text[j - 1] == "\\"):
                if text[j] == "\n":
                    raise PenmanSyntaxError(start_line, start_col, "closing quote")
                j += 1
            if j >= n:
                raise PenmanSyntaxError(start_line, start_col, "closing quote")
            j += 1
            literal = text[i:j]
            width = j - i
            # Alignment markers may trail the closing quote.
            while j < n and text[j] == "~":
                k = j + 1
                while k < n and text[k] not in ' \t\r\n()/"':
                    k += 1
                stripped_alignment = True
                width += k - j
                j = k
            tokens.append(_Token(literal, start_line, start_col))
            i = j
            col += width
            continue
        j = i
        while j < n and text[j] not in ' \t\r\n()/"':
            j += 1
        raw = text[i:j]
        atom = _ALIGNMENT_RE.sub("", raw)
        if atom != raw:
            stripped_alignment = True
        tokens.append(_Token(atom, line, col))
        col += j - i
        i = j
    if stripped_alignment:
        warnings.warn("alignment markers (~e.N) stripped from PENMAN text", stacklevel=3)
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0
        self.definitions: dict[str, "_MutableNode"] = {}

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self, expected: str) -> _Token:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else _Token("", 1, 1)
            raise PenmanSyntaxError(last.line, last.col + len(last.text), expected)
        self.pos += 1
        return tok

    def expect(self, literal: str) -> _Token:
        tok = self.next(repr(literal))
        if tok.text != literal:
            raise PenmanSyntaxError(tok.line, tok.col, repr(literal), tok.text)
        return tok

    def parse_node(self) -> "_MutableNode":
        self.expect("(")
        var_tok = self.next("variable")
        if var_tok.text in "()/" or var_tok.text.startswith(":") or not is_valid_variable(var_tok.text):
            raise PenmanSyntaxError(var_tok.line, var_tok.col, "variable", var_tok.text)
        self.expect("/")
        concept_tok = self.next("concept")
        if concept_tok.text in "()/" or concept_tok.text.startswith(":"):
            raise PenmanSyntaxError(concept_tok.line, concept_tok.col, "concept", concept_tok.text)
        node = _MutableNode(var_tok.text, concept_tok.text)
        if node.var in self.definitions:
            raise DuplicateDefinition(f"variable {node.var!r} defined twice")
        self.definitions[node.var] = node
        while True:
            tok = self.peek()
            if tok is None:
                raise PenmanSyntaxError(concept_tok.line, concept_tok.col, "')' or role")
            if tok.text == ")":
                self.pos += 1
                return node
            if not tok.text.startswith(":"):
                raise PenmanSyntaxError(tok.line, tok.col, "')' or role", tok.text)
            role = self.next("role").text
            child_tok = self.peek()
            if child_tok is None or child_tok.text == ")" or child_tok.text.startswith(":"):
                where = child_tok or tok
                raise PenmanSyntaxError(where.line, where.col, "node, reference, or constant")
            if child_tok.text == "(":
                node.branches.append((role, self.parse_node()))
            else:
                atom = self.next("atom")
                if atom.text in "/)":
                    raise PenmanSyntaxError(atom.line, atom.col, "node, reference, or constant", atom.text)
                node.branches.append((role, _Atom(atom.text)))


class _MutableNode:
    __slots__ = ("var", "concept", "branches")

    def __init__(self, var: str, concept: str):
        self.var = var
        self.concept = concept
        self.branches: list = []


class _Atom:
    __slots__ = ("text",)

    def __init__(self, text: str):
        self.text = text


def _freeze(node: _MutableNode, defined: set[str]) -> TreeNode:
    branches = []
    for role, child in node.branches:
        if isinstance(child, _MutableNode):
            branches.append((role, _freeze(child, defined)))
        else:
            branches.append((role, _resolve_atom(child.text, defined)))
    return TreeNode(node.var, node.concept, tuple(branches))


def _resolve_atom(text: str, defined: set[str]) -> Union[Ref, Const]:
    if text.startswith('"'):
        return Const(text)
    if text in _CONSTANT_KEYWORDS:
        return Const(text)
    if text[0].isdigit() or (text[0] in "+-." and len(text) > 1):
        return Const(text)
    if text in defined:
        return Ref(text)
    if _VARIABLE_RE.match(text):
        raise DanglingReference(f"variable {text!r} is referenced but never defined")
    return Const(text)


def parse_penman(text: str) -> LinearTree:
    """Parse PENMAN text into a tree, preserving branch order and surface roles.

    Grammar: ``node := "(" var "/" concept (role (node|var|constant))* ")"``.
    Forward references are allowed; a bare atom shaped like a variable that is
    never defined raises DanglingReference.
    """
    tokens = _lex(text)
    if not tokens:
        raise PenmanSyntaxError(1, 1, "'('")
    parser = _Parser(tokens)
    root = parser.parse_node()
    trailing = parser.peek()
    if trailing is not None:
        raise PenmanSyntaxError(trailing.line, trailing.col, "end of input", trailing.text)
    return LinearTree(_freeze(root, set(parser.definitions)))


def tree_to_graph(t: LinearTree, allow_cycles: bool = False) -> AmrGraph:
    """Undo surface inversions and validate the tree's triples as a graph."""
    triples: list = []

    def walk(node: TreeNode) -> None:
        triples.append(Instance(node.var, node.concept))
        for role, child in node.branches:
            if isinstance(child, Const):
                triples.append(Attribute(node.var, role, child.value))
                continue
            other = child.var
            if is_inverted(role):
                triples.append(Relation(other, invert_role(role), node.var))
            else:
                triples.append(Relation(node.var, role, other))
            if isinstance(child, TreeNode):
                walk(child)

    walk(t.root)
    return graph_from_triples(triples, t.root.var, allow_cycles=allow_cycles)


def serialize(t: LinearTree) -> TokenSeq:
    """Emit the tree as tokens; parentheses are always standalone tokens."""
    out: TokenSeq = []

    def walk(node: TreeNode) -> None:
        out.extend(("(", node.var, "/", node.concept))
        for role, child in node.branches:
            out.append(role)
            if isinstance(child, TreeNode):
                walk(child)
            elif isinstance(child, Ref):
                out.append(child.var)
            else:
                out.append(child.value)
        out.append(")")

    walk(t.root)
    return out


def strip_sense(concept: str) -> str:
    """Remove a trailing numeric word-sense suffix (`dream-01` -> `dream`)."""
    return _SENSE_RE.sub("", concept)


def simplify(seq: Sequence[str]) -> TokenSeq:
    """Drop variables and `/`, strip senses, and inline references.

    Each ``var / concept`` pair becomes the sense-stripped concept; reference
    mentions become the referenced concept token; parentheses, roles, and
    constants are kept. Idempotent.
    """
    concepts: dict[str, str] = {}
    n = len(seq)
    for i in range(n - 3):
        if seq[i] == "(" and seq[i + 2] == "/":
            concepts[seq[i + 1]] = seq[i + 3]
    out: TokenSeq = []
    i = 0
    while i < n:
        tok = seq[i]
        if tok == "(" and i + 3 < n and seq[i + 2] == "/":
            out.append("(")
            out.append(strip_sense(seq[i + 3]))
            i += 4
        elif tok in concepts and not tok.startswith(":") and tok not in "()":
            out.append(strip_sense(concepts[tok]))
            i += 1
        else:
            out.append(tok)
            i += 1
    return out


def join_tokens(seq: Sequence[str]) -> str:
    return " ".join(seq)


def split_tokens(text: str) -> TokenSeq:
    """Whitespace tokenizer that keeps quoted string literals intact."""
    tokens: TokenSeq = []
    i, n = 0, len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        if text[i] == '"':
            j = i + 1
            while j < n and (text[j] != '"' or text[j - 1] == "\\"):
                j += 1
            j = min(j + 1, n)
            tokens.append(text[i:j])
            i = j
            continue
        j = i
        while j < n and not text[j].isspace():
            j += 1
        tokens.append(text[i:j])
        i = j
    return tokens


@dataclass(frozen=True)
class CorpusEntry:
    """One block of an AMR release file: id, sentence, raw PENMAN text."""

    id: str
    snt: str
    text: str


def read_corpus(path: str | Path) -> Iterator[CorpusEntry]:
    """Yield entries from an AMR corpus file.

    Blocks are separated by blank lines; ``# ::id`` and ``# ::snt`` metadata
    lines are captured, other comment lines ignored. Entries without an id
    get a positional one.
    """
    block_lines: list[str] = []
    index = 0

    def flush() -> CorpusEntry | None:
        nonlocal index
        if not any(line.strip() for line in block_lines):
            return None
        entry_id, snt = "", ""
        graph_lines = []
        for line in block_lines:
            if line.startswith("#"):
                if line.startswith("# ::id"):
                    rest = line[len("# ::id"):].strip()
                    entry_id = rest.split()[0] if rest else ""
                elif line.startswith("# ::snt"):
                    snt = line[len("# ::snt"):].strip()
                continue
            graph_lines.append(line)
        index += 1
        if not entry_id:
            entry_id = f"entry-{index}"
        return CorpusEntry(entry_id, snt, "\n".join(graph_lines).strip())

    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.rstrip("\n")
            if line.strip():
                block_lines.append(line)
            elif block_lines:
                entry = flush()
                if entry is not None:
                    yield entry
                block_lines = []
    if block_lines:
        entry = flush()
        if entry is not None:
            yield entry


def format_entry(entry_id: str, snt: str, text: str) -> str:
    """Render one corpus block (inverse of what read_corpus consumes)."""
    return f"# ::id {entry_id}\n# ::snt {snt}\n{text}\n"
