"""Seeded synthetic graph generation for tests, fixtures, and sample corpora."""

from __future__ import annotations

import random
from typing import Sequence

from graphlin.graph import AmrGraph, Attribute, Instance, LinearTree, Relation, graph_from_triples
from graphlin.penman import strip_sense
from graphlin.relinearize import reconfigure

CONCEPTS = (
    "want-01", "go-02", "dream-01", "resemble-01", "disturb-01", "fascinate-01",
    "say-01", "believe-01", "see-01", "give-01", "know-01", "help-01",
    "arrive-01", "leave-11", "describe-01", "cause-01", "expect-01", "read-01",
    "and", "or", "boy", "girl", "film", "city", "country", "team", "book",
    "house", "dog", "cat", "teacher", "storm", "river", "music", "window",
    "possible", "small", "fast", "person", "thing",
)

ROLES = (
    ":ARG0", ":ARG1", ":ARG2", ":ARG3", ":op1", ":op2", ":op3",
    ":mod", ":time", ":location", ":manner", ":purpose", ":part", ":poss",
)

_ATTRIBUTE_CHOICES = (
    (":quant", lambda rng: str(rng.randint(1, 500))),
    (":polarity", lambda rng: "-"),
    (":mode", lambda rng: "imperative"),
    (":wiki", lambda rng: '"' + rng.choice(("New York", "Rio Grande", "Alpha", "Red_Lion")) + '"'),
)


def _fresh_variable(concept: str, used: set[str]) -> str:
    letter = concept[0].lower()
    if not letter.isalpha():
        letter = "x"
    name = letter
    counter = 2
    while name in used:
        name = f"{letter}{counter}"
        counter += 1
    used.add(name)
    return name


def random_graph(
    rng: random.Random,
    min_vars: int = 1,
    max_vars: int = 8,
    concepts: Sequence[str] = CONCEPTS,
    reentrancy_prob: float = 0.35,
    attribute_prob: float = 0.3,
) -> AmrGraph:
    """Build a valid rooted graph: a spanning skeleton from the top plus
    optional re-entrant relations and attribute leaves."""
    n = rng.randint(min_vars, max_vars)
    used: set[str] = set()
    variables: list[str] = []
    triples: list = []
    for _ in range(n):
        concept = rng.choice(concepts)
        var = _fresh_variable(concept, used)
        variables.append(var)
        triples.append(Instance(var, concept))
        if len(variables) > 1:
            parent = rng.choice(variables[:-1])
            triples.append(Relation(parent, rng.choice(ROLES), var))

    # Extra edges create re-entrancies; keep the directed view acyclic by
    # only linking earlier-created variables to later ones.
    if n >= 3:
        extra = sum(1 for _ in range(n - 1) if rng.random() < reentrancy_prob)
        for _ in range(extra):
            i = rng.randrange(0, n - 1)
            j = rng.randrange(i + 1, n)
            triples.append(Relation(variables[i], rng.choice(ROLES), variables[j]))

    for var in variables:
        if rng.random() < attribute_prob:
            role, make_value = _ATTRIBUTE_CHOICES[rng.randrange(len(_ATTRIBUTE_CHOICES))]
            triples.append(Attribute(var, role, make_value(rng)))

    return graph_from_triples(triples, variables[0])


def canonical_tree(g: AmrGraph, rng: random.Random) -> LinearTree:
    """A reproducible 'corpus' tree for a synthetic graph."""
    return reconfigure(g, rng)


def sentence_for(tree: LinearTree) -> str:
    """A deterministic toy verbalization: concepts in tree order."""
    words = [strip_sense(node.concept) for node in tree.nodes()]
    return " ".join(words)
