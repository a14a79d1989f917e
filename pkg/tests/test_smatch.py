import random

import pytest

from graphlin.graph import Instance, Relation, graph_from_triples
from graphlin.metrics.smatch import TooLarge, scored_triple_count, smatch, smatch_exact
from graphlin.penman import parse_penman, tree_to_graph
from graphlin.synth import random_graph
from tests.conftest import seeded_graphs

# Small shared vocabulary so cross-graph matching is nontrivial.
POOL = ("and", "boy", "girl", "want-01", "go-02", "see-01", "city", "dog")


def _pool_graph(seed: int):
    return random_graph(
        random.Random(seed), min_vars=1, max_vars=6, concepts=POOL, attribute_prob=0.2
    )


class TestSelfScore:
    def test_identity_is_perfect(self):
        for seed in range(30):
            g = _pool_graph(seed)
            result = smatch(g, g, rng=random.Random(seed))
            assert result.f_score == pytest.approx(1.0)
            assert result.precision == result.recall == pytest.approx(1.0)

    def test_disjoint_concepts_score_zero(self):
        g1 = tree_to_graph(parse_penman("(a / cat)"))
        g2 = tree_to_graph(parse_penman("(x / dog)"))
        assert smatch(g1, g2, rng=random.Random(0)).f_score == 0.0
        assert smatch_exact(g1, g2).f_score == 0.0

    def test_disjoint_roles_and_concepts_score_zero(self):
        g1 = tree_to_graph(parse_penman("(a / cat :op1 (b / fish))"))
        g2 = tree_to_graph(parse_penman("(x / dog :op2 (y / bird))"))
        assert smatch_exact(g1, g2).f_score == 0.0


class TestHandDerivedExample:
    def test_and_boy_vs_and_girl(self):
        # Each side scores 4 triples: 2 instances, 1 relation, 1 top marker.
        # Under a->x, b->y: instance(and), relation(:op1), and top match; the
        # boy/girl instance does not. 3/4 on both sides.
        g1 = tree_to_graph(parse_penman("(a / and :op1 (b / boy))"))
        g2 = tree_to_graph(parse_penman("(x / and :op1 (y / girl))"))
        assert scored_triple_count(g1) == scored_triple_count(g2) == 4
        result = smatch_exact(g1, g2)
        assert result.precision == pytest.approx(0.75)
        assert result.recall == pytest.approx(0.75)
        assert result.f_score == pytest.approx(0.75)
        assert result.best_mapping == {"a": "x", "b": "y"}

    def test_top_marker_counts(self):
        # Same instances/relations, different top: only the TOP triple differs.
        triples = [Instance("p", "possible"), Instance("g", "go-02"), Relation("p", ":ARG1", "g")]
        g1 = graph_from_triples(triples, "p")
        g2 = graph_from_triples(triples, "g")
        result = smatch_exact(g1, g2)
        assert result.f_score == pytest.approx(3 / 4)


class TestExactProperties:
    def test_symmetric_f(self):
        for seed in range(20):
            g1, g2 = _pool_graph(seed), _pool_graph(seed + 1000)
            assert smatch_exact(g1, g2).f_score == pytest.approx(smatch_exact(g2, g1).f_score)

    def test_too_large(self):
        big1 = random_graph(random.Random(0), min_vars=9, max_vars=9)
        big2 = random_graph(random.Random(1), min_vars=9, max_vars=9)
        with pytest.raises(TooLarge):
            smatch_exact(big1, big2)

    def test_one_small_side_is_enough(self):
        small = _pool_graph(3)
        big = random_graph(random.Random(2), min_vars=9, max_vars=9, concepts=POOL)
        result = smatch_exact(small, big)
        assert 0.0 <= result.f_score <= 1.0


class TestHillClimb:
    def test_never_exceeds_exact(self):
        for seed in range(40):
            g1, g2 = _pool_graph(seed), _pool_graph(seed + 7777)
            approx = smatch(g1, g2, restarts=4, rng=random.Random(seed))
            exact = smatch_exact(g1, g2)
            assert approx.f_score <= exact.f_score + 1e-12

    def test_usually_reaches_exact(self):
        agree = 0
        for seed in range(40):
            g1, g2 = _pool_graph(seed), _pool_graph(seed + 4242)
            approx = smatch(g1, g2, restarts=4, rng=random.Random(seed))
            exact = smatch_exact(g1, g2)
            agree += approx.f_score == pytest.approx(exact.f_score)
        assert agree >= 38

    def test_deterministic_given_seeds(self):
        g1, g2 = _pool_graph(5), _pool_graph(6)
        a = smatch(g1, g2, rng=random.Random(3))
        b = smatch(g1, g2, rng=random.Random(3))
        assert a == b

    def test_mapping_is_injective(self):
        for seed in range(20):
            g1, g2 = _pool_graph(seed), _pool_graph(seed + 31)
            mapping = smatch(g1, g2, rng=random.Random(seed)).best_mapping
            assert len(set(mapping.values())) == len(mapping)


class TestTripleCounting:
    def test_count_is_triples_plus_top(self):
        for g in seeded_graphs(10):
            assert scored_triple_count(g) == len(g.triples) + 1
