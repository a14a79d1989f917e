"""Training-stream assembly: generation pairs, scaffolds, per-epoch relinearization, task-mixture batches."""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from graphlin.corruption import MaskStrategy, Target, mask, sentence_mlm
from graphlin.graph import AmrGraph, GraphError, LinearTree
from graphlin.penman import (
    PenmanError,
    TokenSeq,
    parse_penman,
    read_corpus,
    serialize,
    simplify,
    split_tokens,
    tree_to_graph,
)
from graphlin.relinearize import Strategy, linearize, randomize, reconfigure
from graphlin.seeding import derive_rng

log = logging.getLogger(__name__)


class TaskKind(Enum):
    GENERATE_TEXT = "generate"
    MASK_ALL = "mask_all"
    MASK_COMPONENTS = "mask_components"
    MASK_NODES = "mask_nodes"
    MASK_ALL_RECONFIGURED = "mask_all_reconfigured"
    MASK_COMPONENTS_RECONFIGURED = "mask_components_reconfigured"
    MASK_NODES_RECONFIGURED = "mask_nodes_reconfigured"
    SENTENCE_MLM = "sentence_mlm"
    REORDER_FROM_RECONFIGURED = "reorder_from_reconfigured"
    REORDER_FROM_RANDOMIZED = "reorder_from_randomized"


SCAFFOLD_TASKS = tuple(t for t in TaskKind if t is not TaskKind.GENERATE_TEXT)

_MASK_TARGETS = {
    TaskKind.MASK_ALL: Target.ALL_GRAPH_TOKENS,
    TaskKind.MASK_COMPONENTS: Target.COMPONENTS_ONLY,
    TaskKind.MASK_NODES: Target.NODES_ONLY,
    TaskKind.MASK_ALL_RECONFIGURED: Target.ALL_GRAPH_TOKENS,
    TaskKind.MASK_COMPONENTS_RECONFIGURED: Target.COMPONENTS_ONLY,
    TaskKind.MASK_NODES_RECONFIGURED: Target.NODES_ONLY,
}

_RECONFIGURED_MASKS = (
    TaskKind.MASK_ALL_RECONFIGURED,
    TaskKind.MASK_COMPONENTS_RECONFIGURED,
    TaskKind.MASK_NODES_RECONFIGURED,
)


@dataclass(frozen=True)
class TrainingExample:
    id: str
    task: TaskKind
    input: tuple[str, ...]
    target: tuple[str, ...]

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "task": self.task.value,
            "input": " ".join(self.input),
            "target": " ".join(self.target),
        }

    @classmethod
    def from_record(cls, record: Mapping) -> "TrainingExample":
        # split_tokens keeps quoted string constants whole.
        return cls(
            id=record["id"],
            task=TaskKind(record["task"]),
            input=tuple(split_tokens(record["input"])),
            target=tuple(split_tokens(record["target"])),
        )


@dataclass(frozen=True)
class MixtureConfig:
    scaffold_probability: float = 0.5
    enabled_scaffolds: tuple[TaskKind, ...] = ()
    batch_size: int = 6
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.scaffold_probability <= 1:
            raise ValueError("scaffold_probability must lie in [0, 1]")
        if self.batch_size < 1:
            raise ValueError("batch_size must be positive")


class NoScaffolds(Exception):
    """q > 0 but no scaffold task is enabled."""


@dataclass(frozen=True)
class ParsedExample:
    """A corpus entry with its parsed canonical tree and validated graph."""

    id: str
    snt: str
    canonical: LinearTree
    graph: AmrGraph

    def sentence_tokens(self) -> TokenSeq:
        return self.snt.split()


def load_corpus(
    path: str | Path, strict: bool = False, allow_cycles: bool = False
) -> tuple[list[ParsedExample], list[tuple[str, str]]]:
    """Parse a corpus file, skipping (and logging) malformed entries.

    Returns (examples, failures); failures are (id, message) pairs. With
    ``strict`` the first failure is re-raised.
    """
    examples: list[ParsedExample] = []
    failures: list[tuple[str, str]] = []
    for entry in read_corpus(path):
        try:
            tree = parse_penman(entry.text)
            graph = tree_to_graph(tree, allow_cycles=allow_cycles)
        except (PenmanError, GraphError) as exc:
            if strict:
                raise
            failures.append((entry.id, str(exc)))
            log.warning("skipping entry %s: %s", entry.id, exc)
            continue
        examples.append(ParsedExample(entry.id, entry.snt, tree, graph))
    return examples, failures


def subset_examples(examples: Sequence[ParsedExample], n: Optional[int], seed: int) -> list[ParsedExample]:
    """First n examples after a seeded shuffle; reproducible low-resource subsets."""
    if n is None or n >= len(examples):
        return list(examples)
    shuffled = list(examples)
    random.Random(seed).shuffle(shuffled)
    return shuffled[:n]


def generate_example(example: ParsedExample, strategy: Strategy, rng: random.Random) -> TrainingExample:
    tokens = linearize(example.graph, example.canonical, strategy, rng)
    return TrainingExample(
        id=example.id,
        task=TaskKind.GENERATE_TEXT,
        input=tuple(tokens),
        target=tuple(example.sentence_tokens()),
    )


def reorder_pair(
    g: AmrGraph, canonical: LinearTree, mode: Strategy, rng: random.Random
) -> TrainingExample:
    """Scaffold pair: permuted linearization in, canonical linearization out."""
    if mode is Strategy.RECONFIGURED:
        permuted = reconfigure(g, rng)
        task = TaskKind.REORDER_FROM_RECONFIGURED
    elif mode is Strategy.RANDOMIZED:
        permuted = randomize(g, rng)
        task = TaskKind.REORDER_FROM_RANDOMIZED
    else:
        raise ValueError("reorder scaffold requires a permuting mode")
    return TrainingExample(
        id="",
        task=task,
        input=tuple(simplify(serialize(permuted))),
        target=tuple(simplify(serialize(canonical))),
    )


def scaffold_example(
    example: ParsedExample, task: TaskKind, rng: random.Random, rate: float = 0.15
) -> TrainingExample:
    """Build one scaffold example of the requested kind."""
    if task in (TaskKind.REORDER_FROM_RECONFIGURED, TaskKind.REORDER_FROM_RANDOMIZED):
        mode = Strategy.RECONFIGURED if task is TaskKind.REORDER_FROM_RECONFIGURED else Strategy.RANDOMIZED
        pair = reorder_pair(example.graph, example.canonical, mode, rng)
        return TrainingExample(example.id, task, pair.input, pair.target)
    if task is TaskKind.SENTENCE_MLM:
        pair = sentence_mlm(example.sentence_tokens(), rng, global_rate=rate)
        return TrainingExample(example.id, task, pair.input, pair.target)
    if task in _MASK_TARGETS:
        if task in _RECONFIGURED_MASKS:
            tree = reconfigure(example.graph, rng)
        else:
            tree = example.canonical
        tokens = simplify(serialize(tree))
        pair = mask(tokens, MaskStrategy(_MASK_TARGETS[task], rate), rng)
        return TrainingExample(example.id, task, pair.input, pair.target)
    raise ValueError(f"not a scaffold task: {task}")


def adversarial_stream(
    examples: Iterable[ParsedExample],
    strategy: Strategy,
    epoch: int,
    seed: int,
) -> Iterator[TrainingExample]:
    """Generation pairs whose linearization is freshly drawn each epoch.

    The per-example generator is keyed on (seed, id, epoch), so the stream is
    identical regardless of iteration parallelism; the canonical strategy
    yields the same stream for every epoch.
    """
    for example in examples:
        rng = derive_rng(seed, example.id, epoch, "generate")
        yield generate_example(example, strategy, rng)


def scaffold_stream(
    examples: Iterable[ParsedExample],
    task: TaskKind,
    epoch: int,
    seed: int,
    rate: float = 0.15,
) -> Iterator[TrainingExample]:
    for example in examples:
        rng = derive_rng(seed, example.id, epoch, task.value)
        yield scaffold_example(example, task, rng, rate=rate)


def mixture_batches(
    streams: Mapping[TaskKind, Sequence[TrainingExample]],
    config: MixtureConfig,
    rng: random.Random,
    num_batches: Optional[int] = None,
) -> Iterator[list[TrainingExample]]:
    """Per-batch task sampling: scaffold with probability q, else generation.

    Every batch is homogeneous in task kind; each task's stream is consumed
    round-robin (cycling when exhausted). The default batch count covers the
    generation stream once.
    """
    q = config.scaffold_probability
    scaffolds = [t for t in config.enabled_scaffolds if t is not TaskKind.GENERATE_TEXT]
    if q > 0 and not scaffolds:
        raise NoScaffolds("scaffold probability > 0 but no scaffold tasks enabled")
    generation = streams.get(TaskKind.GENERATE_TEXT, ())
    if num_batches is None:
        num_batches = max(1, -(-len(generation) // config.batch_size))
    cursors: dict[TaskKind, int] = {}

    def take(task: TaskKind) -> list[TrainingExample]:
        pool = streams[task]
        if not pool:
            raise ValueError(f"empty stream for task {task.value!r}")
        start = cursors.get(task, 0)
        batch = [pool[(start + i) % len(pool)] for i in range(config.batch_size)]
        cursors[task] = (start + config.batch_size) % len(pool)
        return batch

    for _ in range(num_batches):
        if q > 0 and rng.random() < q:
            task = scaffolds[rng.randrange(len(scaffolds))]
        else:
            task = TaskKind.GENERATE_TEXT
        yield take(task)


def write_stream(path: str | Path, examples: Iterable[TrainingExample]) -> int:
    """Write examples as JSONL; returns the number of records."""
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for example in examples:
            handle.write(json.dumps(example.to_record(), sort_keys=True))
            handle.write("\n")
            count += 1
    return count


def read_stream(path: str | Path) -> Iterator[TrainingExample]:
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                yield TrainingExample.from_record(json.loads(line))
