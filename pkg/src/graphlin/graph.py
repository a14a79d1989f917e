"""Graph data model: triples, role algebra, validation, structural statistics."""

from __future__ import annotations

import warnings
from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

# Roles whose trailing "-of" is part of the label rather than an inversion
# marker. Empty by default; corpus-specific frame roles may be passed to the
# role helpers explicitly.
DEFAULT_INVERSION_EXCEPTIONS: frozenset[str] = frozenset()

_VARIABLE_FORBIDDEN = set(" \t\r\n/():")


class GraphError(Exception):
    """Base class for graph construction and validation failures."""


class Disconnected(GraphError):
    """Some variable is unreachable in the undirected relation view."""


class Cyclic(GraphError):
    """The normalized directed relation view contains a cycle."""


class MissingInstance(GraphError):
    """A variable appears in a triple but carries no instance."""


class NoTop(GraphError):
    """The designated top variable has no instance triple."""


class DuplicateInstance(GraphError):
    """A variable carries more than one instance triple."""


def is_valid_variable(name: str) -> bool:
    return bool(name) and not _VARIABLE_FORBIDDEN.intersection(name)


def is_valid_role(label: str) -> bool:
    return label.startswith(":") and len(label) > 1 and not set(label[1:]) & _VARIABLE_FORBIDDEN


def is_inverted(role: str, exceptions: frozenset[str] = DEFAULT_INVERSION_EXCEPTIONS) -> bool:
    """True if `role` denotes the reversed reading of an edge (ends in -of)."""
    return role.endswith("-of") and role not in exceptions


def invert_role(role: str, exceptions: frozenset[str] = DEFAULT_INVERSION_EXCEPTIONS) -> str:
    """Reverse an edge label: `:X` <-> `:X-of`. Involutive."""
    if is_inverted(role, exceptions):
        return role[: -len("-of")]
    return role + "-of"


@dataclass(frozen=True)
class Instance:
    """Binding of a variable to its concept."""

    var: str
    concept: str


@dataclass(frozen=True)
class Relation:
    """Directed edge between two variables; `role` is stored non-inverted."""

    source: str
    role: str
    target: str


@dataclass(frozen=True)
class Attribute:
    """Edge from a variable to a constant (number, quoted string, `-`, ...)."""

    source: str
    role: str
    value: str


Triple = Union[Instance, Relation, Attribute]


@dataclass(frozen=True)
class Ref:
    """Mention of an already-defined variable inside a tree."""

    var: str


@dataclass(frozen=True)
class Const:
    """Constant leaf; the value is kept verbatim, including quotes."""

    value: str


@dataclass(frozen=True)
class TreeNode:
    """Defining occurrence of a variable with its ordered branches.

    Each branch is a (surface role, child) pair where the child is a nested
    TreeNode, a Ref back to a defined variable, or a Const leaf. Surface roles
    may be inverted (`-of`) relative to the stored graph orientation.
    """

    var: str
    concept: str
    branches: tuple[tuple[str, Union["TreeNode", Ref, Const]], ...] = ()


@dataclass(frozen=True)
class LinearTree:
    """An ordered spanning-tree arrangement of a graph."""

    root: TreeNode

    def nodes(self) -> Iterator[TreeNode]:
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            for _, child in reversed(node.branches):
                if isinstance(child, TreeNode):
                    stack.append(child)


@dataclass(frozen=True)
class AmrGraph:
    """A validated rooted graph: a multiset of triples plus a top variable.

    Construct through :func:`graph_from_triples`, which normalizes relation
    orientation and enforces the structural invariants.
    """

    triples: tuple[Triple, ...]
    top: str

    def instances(self) -> dict[str, str]:
        return {t.var: t.concept for t in self.triples if isinstance(t, Instance)}

    def relations(self) -> list[Relation]:
        return [t for t in self.triples if isinstance(t, Relation)]

    def attributes(self) -> list[Attribute]:
        return [t for t in self.triples if isinstance(t, Attribute)]

    def variables(self) -> set[str]:
        return {t.var for t in self.triples if isinstance(t, Instance)}

    def triple_multiset(self) -> Counter:
        return Counter(self.triples)


def graphs_equal(a: AmrGraph, b: AmrGraph, check_top: bool = True) -> bool:
    """Multiset equality of normalized triples, optionally including the top."""
    if check_top and a.top != b.top:
        return False
    return a.triple_multiset() == b.triple_multiset()


def _collect_variables(triples: Iterable[Triple]) -> set[str]:
    seen: set[str] = set()
    for t in triples:
        if isinstance(t, Instance):
            seen.add(t.var)
        elif isinstance(t, Relation):
            seen.update((t.source, t.target))
        else:
            seen.add(t.source)
    return seen


def graph_from_triples(
    triples: Iterable[Triple],
    top: str,
    allow_cycles: bool = False,
    inversion_exceptions: frozenset[str] = DEFAULT_INVERSION_EXCEPTIONS,
) -> AmrGraph:
    """Validate a triple multiset and return an AmrGraph.

    Relation roles given in inverted form are normalized (source and target
    swapped, `-of` stripped). Raises Disconnected, Cyclic, MissingInstance,
    DuplicateInstance, or NoTop on invalid input; with ``allow_cycles`` a
    directed cycle is downgraded to a warning.
    """
    normalized: list[Triple] = []
    for t in triples:
        if isinstance(t, Relation) and is_inverted(t.role, inversion_exceptions):
            normalized.append(Relation(t.target, invert_role(t.role, inversion_exceptions), t.source))
        else:
            normalized.append(t)

    variables = _collect_variables(normalized)
    instance_counts = Counter(t.var for t in normalized if isinstance(t, Instance))
    for var, count in instance_counts.items():
        if count > 1:
            raise DuplicateInstance(f"variable {var!r} has {count} instance triples")
    missing = variables - set(instance_counts)
    if missing:
        raise MissingInstance(f"variables without an instance: {sorted(missing)}")
    if top not in instance_counts:
        raise NoTop(f"top variable {top!r} has no instance triple")

    relations = [t for t in normalized if isinstance(t, Relation)]

    # Undirected connectivity over relation edges only.
    adjacency: dict[str, set[str]] = {v: set() for v in variables}
    for rel in relations:
        adjacency[rel.source].add(rel.target)
        adjacency[rel.target].add(rel.source)
    reached = {top}
    queue = deque([top])
    while queue:
        for nxt in adjacency[queue.popleft()]:
            if nxt not in reached:
                reached.add(nxt)
                queue.append(nxt)
    unreached = variables - reached
    if unreached:
        raise Disconnected(f"variables unreachable from top: {sorted(unreached)}")

    _check_acyclic(relations, allow_cycles)
    return AmrGraph(tuple(normalized), top)


def _check_acyclic(relations: list[Relation], allow_cycles: bool) -> None:
    out_edges: dict[str, list[str]] = {}
    indegree: Counter = Counter()
    nodes: set[str] = set()
    for rel in relations:
        out_edges.setdefault(rel.source, []).append(rel.target)
        indegree[rel.target] += 1
        nodes.update((rel.source, rel.target))
    queue = deque(n for n in nodes if indegree[n] == 0)
    visited = 0
    while queue:
        node = queue.popleft()
        visited += 1
        for nxt in out_edges.get(node, ()):
            indegree[nxt] -= 1
            if indegree[nxt] == 0:
                queue.append(nxt)
    if visited < len(nodes):
        if allow_cycles:
            warnings.warn("normalized directed view contains a cycle", stacklevel=3)
        else:
            raise Cyclic("normalized directed view contains a cycle")


def edge_count(g: AmrGraph) -> int:
    """Number of relation plus attribute triples (instances excluded)."""
    return sum(1 for t in g.triples if not isinstance(t, Instance))


def variable_mentions(t: LinearTree) -> Counter:
    """How many times each variable occurs in the tree (definition + references)."""
    mentions: Counter = Counter()
    for node in t.nodes():
        mentions[node.var] += 1
        for _, child in node.branches:
            if isinstance(child, Ref):
                mentions[child.var] += 1
    return mentions


def reentrancy_count(t: LinearTree) -> int:
    """Total variable mentions minus distinct variables (= reference mentions)."""
    mentions = variable_mentions(t)
    return sum(mentions.values()) - len(mentions)


def child_side_indegrees(t: LinearTree) -> Counter:
    """Per variable, how many branches of the tree have it on the child side."""
    indeg: Counter = Counter()
    for node in t.nodes():
        for _, child in node.branches:
            if isinstance(child, TreeNode):
                indeg[child.var] += 1
            elif isinstance(child, Ref):
                indeg[child.var] += 1
    return indeg
