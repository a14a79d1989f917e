"""graphlin: graph linearization, denoising scaffolds, and generation-fidelity evaluation."""

from graphlin.graph import (
    AmrGraph,
    Attribute,
    Const,
    Instance,
    LinearTree,
    Ref,
    Relation,
    TreeNode,
    edge_count,
    graph_from_triples,
    graphs_equal,
    invert_role,
    reentrancy_count,
)
from graphlin.penman import (
    CorpusEntry,
    parse_penman,
    read_corpus,
    serialize,
    simplify,
    tree_to_graph,
)
from graphlin.relinearize import Strategy, linearize, randomize, reconfigure

__version__ = "0.1.0"

__all__ = [
    "AmrGraph",
    "Attribute",
    "Const",
    "CorpusEntry",
    "Instance",
    "LinearTree",
    "Ref",
    "Relation",
    "Strategy",
    "TreeNode",
    "edge_count",
    "graph_from_triples",
    "graphs_equal",
    "invert_role",
    "linearize",
    "parse_penman",
    "randomize",
    "read_corpus",
    "reconfigure",
    "reentrancy_count",
    "serialize",
    "simplify",
    "tree_to_graph",
]
