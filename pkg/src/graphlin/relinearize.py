"""Spanning-tree relinearization strategies: canonical, reconfigure, randomize."""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from graphlin.graph import (
    AmrGraph,
    Attribute,
    Const,
    Instance,
    LinearTree,
    Ref,
    Relation,
    TreeNode,
    invert_role,
)
from graphlin.penman import TokenSeq, serialize, simplify


class Strategy(Enum):
    CANONICAL = "canonical"
    RECONFIGURED = "reconfigured"
    RANDOMIZED = "randomized"


@dataclass(frozen=True)
class LinearizationStrategy:
    kind: Strategy
    seed: int = 0


class CanonicalUnavailable(Exception):
    """Canonical linearization requested but no corpus tree was supplied."""


# Adjacency entry: (triple index, surface role at this endpoint, payload).
# For relations the payload is the far variable; for attributes the constant.
def _adjacency(g: AmrGraph) -> dict[str, list[tuple[int, str, str, bool]]]:
    adj: dict[str, list[tuple[int, str, str, bool]]] = {v: [] for v in g.variables()}
    idx = 0
    for t in g.triples:
        if isinstance(t, Instance):
            continue
        if isinstance(t, Relation):
            adj[t.source].append((idx, t.role, t.target, False))
            adj[t.target].append((idx, invert_role(t.role), t.source, False))
        elif isinstance(t, Attribute):
            adj[t.source].append((idx, t.role, t.value, True))
        idx += 1
    return adj


def _grow_tree(g: AmrGraph, root: str, rng: random.Random) -> LinearTree:
    concepts = g.instances()
    adj = _adjacency(g)
    realized: set[int] = set()
    defined = {root}

    def expand(var: str) -> TreeNode:
        branches = []
        candidates = list(adj[var])
        rng.shuffle(candidates)
        for idx, role, payload, is_attr in candidates:
            if idx in realized:
                continue
            realized.add(idx)
            if is_attr:
                branches.append((role, Const(payload)))
            elif payload in defined:
                branches.append((role, Ref(payload)))
            else:
                defined.add(payload)
                branches.append((role, expand(payload)))
        return TreeNode(var, concepts[var], tuple(branches))

    return LinearTree(expand(root))


def reconfigure(g: AmrGraph, rng: random.Random) -> LinearTree:
    """Re-derive a spanning tree, ignoring all canonical order except the top.

    Every relation/attribute triple is realized exactly once; a relation whose
    far endpoint is already defined becomes a reference branch, with the
    surface role inverted when the edge is traversed target-to-source.
    """
    return _grow_tree(g, g.top, rng)


def randomize(g: AmrGraph, rng: random.Random) -> LinearTree:
    """As reconfigure, but rooted at a uniformly random variable."""
    root = rng.choice(sorted(g.variables()))
    return _grow_tree(g, root, rng)


def linearize(
    g: AmrGraph,
    canonical_tree: Optional[LinearTree],
    strategy: Strategy,
    rng: random.Random,
) -> TokenSeq:
    """Dispatch to a strategy, then serialize and simplify."""
    if strategy is Strategy.CANONICAL:
        if canonical_tree is None:
            raise CanonicalUnavailable("canonical linearization requires the corpus tree")
        tree = canonical_tree
    elif strategy is Strategy.RECONFIGURED:
        tree = reconfigure(g, rng)
    else:
        tree = randomize(g, rng)
    return simplify(serialize(tree))
