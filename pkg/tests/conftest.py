"""Shared fixtures: the worked three-linearization example and graph generators."""

from __future__ import annotations

import random
from pathlib import Path

import pytest

from graphlin.graph import Instance, Relation, graph_from_triples
from graphlin.synth import random_graph

ROOT = Path(__file__).resolve().parent.parent
SAMPLE_CORPUS = ROOT / "data" / "sample" / "sample_corpus.amr"
RDF_SAMPLE = ROOT / "data" / "sample" / "webnlg_sample.jsonl"
REGRESS_FIXTURE = ROOT / "data" / "sample" / "regress_rows.jsonl"

# The canonical, reconfigured, and randomized renderings of one sentence's
# graph ("The film is a dream and, like a dream, is both fascinating and
# disturbing."). All three encode the same nine relations over seven nodes.
FIG2A = """\
(a / and
  :op1 (d / dream-01
      :ARG1 (f / film
          :ARG0-of (d2 / disturb-01))
      :ARG2-of (r / resemble-01
            :ARG1 a2))
  :op2 (a2 / and
      :op1 (f2 / fascinate-01
           :ARG0 f)
      :op2 d2))
"""

FIG2B = """\
(a / and
  :op1 (d / dream-01
      :ARG2-of (r / resemble-01)
      :ARG1 (f / film
          :ARG0-of (f2 / fascinate-01)
          :ARG0-of d2))
  :op2 (a2 / and
      :op2 (d2 / disturb-01)
      :op1 f2
      :ARG1-of r))
"""

FIG2C = """\
(r / resemble-01
  :ARG2 (d / dream-01
      :op1-of (a / and
            :op2 a2)
      :ARG1 (f / film))
  :ARG1 (a2 / and
       :op1 (f2 / fascinate-01
           :ARG0 f)
       :op2 (d2 / disturb-01
           :ARG0 f)))
"""

# The same graph as a hand-written triple set (normalized orientation),
# independent of the parser.
FIG2_INSTANCES = [
    Instance("a", "and"),
    Instance("d", "dream-01"),
    Instance("f", "film"),
    Instance("d2", "disturb-01"),
    Instance("r", "resemble-01"),
    Instance("a2", "and"),
    Instance("f2", "fascinate-01"),
]

FIG2_RELATIONS = [
    Relation("a", ":op1", "d"),
    Relation("d", ":ARG1", "f"),
    Relation("d2", ":ARG0", "f"),
    Relation("r", ":ARG2", "d"),
    Relation("r", ":ARG1", "a2"),
    Relation("a", ":op2", "a2"),
    Relation("a2", ":op1", "f2"),
    Relation("f2", ":ARG0", "f"),
    Relation("a2", ":op2", "d2"),
]


def fig2_graph():
    return graph_from_triples(FIG2_INSTANCES + FIG2_RELATIONS, "a")


@pytest.fixture
def fig2():
    return fig2_graph()


def seeded_graphs(count: int, base_seed: int = 0, **kwargs):
    """Deterministic stream of random valid graphs."""
    for i in range(count):
        yield random_graph(random.Random(base_seed + i), **kwargs)


ONE_NODE = "(w / want-01)"

STUPEFY = ["(", "stupefy", ":ARG1", "(", "we", ")", ")"]
