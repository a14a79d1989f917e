"""Graph-overlap scoring: hill-climbing over variable mappings plus an exact oracle."""

from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from graphlin.graph import AmrGraph, Attribute, Instance, Relation

EXACT_VARIABLE_LIMIT = 8

_UNMAPPED = object()


class TooLarge(Exception):
    """Both graphs exceed the exhaustive-search variable limit."""


@dataclass(frozen=True)
class SmatchResult:
    precision: float
    recall: float
    f_score: float
    best_mapping: dict[str, str] = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f_score": self.f_score,
            "mapping": dict(sorted(self.best_mapping.items())),
        }


def scored_triple_count(g: AmrGraph) -> int:
    """Number of triples entering the overlap score (includes the TOP marker)."""
    return len(_triple_bag(g))


def _triple_bag(g: AmrGraph) -> list[tuple]:
    """Scored triples: instances, relations, attributes, and the TOP marker."""
    bag: list[tuple] = []
    concepts = g.instances()
    for t in g.triples:
        if isinstance(t, Instance):
            bag.append(("instance", t.var, t.concept))
        elif isinstance(t, Relation):
            bag.append(("relation", t.role, t.source, t.target))
        elif isinstance(t, Attribute):
            bag.append(("attribute", t.role, t.source, t.value))
    bag.append(("top", g.top, concepts[g.top]))
    return bag


def _mapped_counter(bag: list[tuple], mapping: dict[str, object]) -> Counter:
    mapped = []
    for triple in bag:
        kind = triple[0]
        if kind == "instance":
            _, var, concept = triple
            mapped.append((kind, mapping.get(var, _UNMAPPED), concept))
        elif kind == "relation":
            _, role, source, target = triple
            mapped.append((kind, role, mapping.get(source, _UNMAPPED), mapping.get(target, _UNMAPPED)))
        elif kind == "attribute":
            _, role, source, value = triple
            mapped.append((kind, role, mapping.get(source, _UNMAPPED), value))
        else:
            _, var, concept = triple
            mapped.append((kind, mapping.get(var, _UNMAPPED), concept))
    return Counter(m for m in mapped if _UNMAPPED not in m)


def _matched(bag1: list[tuple], bag2_counter: Counter, mapping: dict[str, object]) -> int:
    return sum((_mapped_counter(bag1, mapping) & bag2_counter).values())


def _result(matched: int, size1: int, size2: int, mapping: dict[str, str]) -> SmatchResult:
    precision = matched / size1 if size1 else 0.0
    recall = matched / size2 if size2 else 0.0
    f_score = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return SmatchResult(precision, recall, f_score, mapping)


def _smart_init(vars1: list[str], vars2: list[str], g1: AmrGraph, g2: AmrGraph) -> dict[str, str]:
    concepts1 = g1.instances()
    by_concept: dict[str, list[str]] = {}
    for v in vars2:
        by_concept.setdefault(g2.instances()[v], []).append(v)
    mapping: dict[str, str] = {}
    used: set[str] = set()
    for v in vars1:
        for candidate in by_concept.get(concepts1[v], ()):
            if candidate not in used:
                mapping[v] = candidate
                used.add(candidate)
                break
    return mapping


def _random_init(vars1: list[str], vars2: list[str], rng: random.Random) -> dict[str, str]:
    k = min(len(vars1), len(vars2))
    chosen1 = rng.sample(vars1, k)
    chosen2 = rng.sample(vars2, k)
    return dict(zip(chosen1, chosen2))


def _hill_climb(
    bag1: list[tuple],
    bag2_counter: Counter,
    vars1: list[str],
    vars2: list[str],
    mapping: dict[str, str],
) -> tuple[int, dict[str, str]]:
    current = dict(mapping)
    score = _matched(bag1, bag2_counter, current)
    improved = True
    while improved:
        improved = False
        best_score, best_mapping = score, current
        used = set(current.values())
        # Move: reassign one variable to any free target (or unmap it).
        for v in vars1:
            for target in [*(t for t in vars2 if t not in used or current.get(v) == t), None]:
                if current.get(v) == target:
                    continue
                trial = dict(current)
                if target is None:
                    trial.pop(v, None)
                else:
                    trial[v] = target
                trial_score = _matched(bag1, bag2_counter, trial)
                if trial_score > best_score:
                    best_score, best_mapping = trial_score, trial
        # Move: swap the images of two variables.
        for a, b in itertools.combinations(vars1, 2):
            if a not in current and b not in current:
                continue
            trial = dict(current)
            img_a, img_b = trial.get(a), trial.get(b)
            if img_b is None:
                trial.pop(a, None)
            else:
                trial[a] = img_b
            if img_a is None:
                trial.pop(b, None)
            else:
                trial[b] = img_a
            trial_score = _matched(bag1, bag2_counter, trial)
            if trial_score > best_score:
                best_score, best_mapping = trial_score, trial
        if best_score > score:
            score, current = best_score, best_mapping
            improved = True
    return score, current


def smatch(
    g1: AmrGraph,
    g2: AmrGraph,
    restarts: int = 4,
    rng: Optional[random.Random] = None,
) -> SmatchResult:
    """Greedy hill-climbing overlap score over one-to-one variable mappings.

    One smart initialization by concept match plus random restarts; never
    exceeds the exhaustive optimum.
    """
    rng = rng or random.Random(0)
    bag1, bag2 = _triple_bag(g1), _triple_bag(g2)
    bag2_counter = Counter(bag2)
    vars1, vars2 = sorted(g1.variables()), sorted(g2.variables())
    best_score = -1
    best_mapping: dict[str, str] = {}
    for attempt in range(max(1, restarts)):
        if attempt == 0:
            init = _smart_init(vars1, vars2, g1, g2)
        else:
            init = _random_init(vars1, vars2, rng)
        score, mapping = _hill_climb(bag1, bag2_counter, vars1, vars2, init)
        if score > best_score:
            best_score, best_mapping = score, mapping
    return _result(best_score, len(bag1), len(bag2), best_mapping)


def smatch_exact(g1: AmrGraph, g2: AmrGraph) -> SmatchResult:
    """True maximum overlap by exhausting injective variable mappings.

    Requires the smaller graph to have at most EXACT_VARIABLE_LIMIT variables.
    """
    vars1, vars2 = sorted(g1.variables()), sorted(g2.variables())
    if min(len(vars1), len(vars2)) > EXACT_VARIABLE_LIMIT:
        raise TooLarge(
            f"exact search needs one side with <= {EXACT_VARIABLE_LIMIT} variables"
        )
    if len(vars1) > len(vars2):
        swapped = smatch_exact(g2, g1)
        return SmatchResult(
            precision=swapped.recall,
            recall=swapped.precision,
            f_score=swapped.f_score,
            best_mapping={v: k for k, v in swapped.best_mapping.items()},
        )
    bag1, bag2 = _triple_bag(g1), _triple_bag(g2)
    bag2_counter = Counter(bag2)
    best_score = -1
    best_mapping: dict[str, str] = {}
    for image in itertools.permutations(vars2, len(vars1)):
        mapping = dict(zip(vars1, image))
        score = _matched(bag1, bag2_counter, mapping)
        if score > best_score:
            best_score, best_mapping = score, mapping
    return _result(best_score, len(bag1), len(bag2), best_mapping)
