"""
Synthetic Adversarial Benchmark

Generates a keyword library, training pairs and test records where plain
Trie-constrained beam search is known to go wrong. Every test query gets its
own head token ``h`` and golden tail ``g``; the query text is ``"h g"``.

Scenario families:

``trap``
    ``h`` is followed by several popular prefixes whose many completions never
    contain ``g``, and by a rarer prefix ``r`` whose only completion is ``g``.
    Golden: ``h r g``.
``fork``
    ``h`` forks into comparable branches; the least popular one is the only
    branch that continues with ``g``. Golden: ``h f g``.
``noise``
    Golden ``h n g`` goes through a noise token ``n`` that is rarer in training
    than each of several distractor branches. The distractors spread over many
    children that never include ``g``; after ``n`` the only continuation is ``g``.
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .datasets import QueryRecord
from .datasets import write_dataset
from .datasets import write_keywords
from .datasets import write_pairs
from .vocab import Vocabulary
from .vocab import build_vocab

logger = logging.getLogger(__name__)

FAMILIES = ("noise", "trap", "fork")

SYLLABLES = tuple(c + v for c in "bdfgklmnprstvz" for v in "aeiou")

TRAP_RARE_SHARE = 0.7
FORK_CHILD_COUNT = 4
FORK_GOLDEN_COUNT = 20
FORK_RUNNER_UP_COUNT = 8
NOISE_RARE_SHARE = 0.75


@dataclass(frozen=True)
class SynthSpec:
    queries: int
    noise: float = 0.2
    trap: float = 0.4
    fork: float = 0.4
    trap_branch_count: int = 50
    trap_prefix_count: int = 5
    fork_width: int = 6
    fork_children: int = 8
    noise_distractors: int = 5
    noise_children: int = 40

    @property
    def weights(self):
        raw = np.array([self.noise, self.trap, self.fork], dtype=np.float64)
        return raw / raw.sum()


@dataclass(frozen=True)
class SynthDataset:
    keywords: tuple[str, ...]
    train_pairs: tuple[tuple[str, str], ...]
    test_records: tuple[QueryRecord, ...]
    vocab: Vocabulary

    def write(self, out_dir):
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        write_keywords(out_dir / "keywords.txt", self.keywords)
        write_pairs(out_dir / "train.tsv", self.train_pairs)
        write_dataset(out_dir / "test.tsv", self.test_records)
        self.vocab.save(out_dir / "vocab.txt")
        return {
            "keywords": out_dir / "keywords.txt",
            "train": out_dir / "train.tsv",
            "test": out_dir / "test.tsv",
            "vocab": out_dir / "vocab.txt",
        }


class WordPool:
    """Distinct pseudo-words drawn from a shared generator, so pools never overlap."""

    def __init__(self, rng):
        self.rng = rng
        self.used = set()

    def take(self, count):
        words = []
        while len(words) < count:
            length = int(self.rng.integers(2, 4))
            word = "".join(SYLLABLES[i] for i in self.rng.integers(0, len(SYLLABLES), size=length))
            if word not in self.used:
                self.used.add(word)
                words.append(word)
        return words


class _Builder:
    def __init__(self, spec: SynthSpec, rng):
        self.spec = spec
        self.rng = rng
        words = self.words = WordPool(rng)
        self.heads = words.take(spec.queries)
        self.prefixes = words.take(max(4 * (spec.trap_prefix_count + 1), 4 * spec.fork_width, 4 * spec.noise_distractors, 20))
        self.children = words.take(
            max(4 * spec.trap_branch_count, 4 * spec.fork_children, 2 * spec.noise_distractors * spec.noise_children, 200),
        )
        self.goldens = words.take(max(spec.queries // 2, 50))
        self.library = set()
        self.pairs = []
        self.records = []

    def sample(self, pool, count):
        return [pool[i] for i in self.rng.choice(len(pool), size=count, replace=False)]

    def add(self, head, *rest, count=1):
        keyword = " ".join((head, *rest))
        self.library.add(keyword)
        self.pairs.extend([(f"{head} {rest[-1]}", keyword)] * count)
        return keyword

    def trap(self, head, golden):
        spec = self.spec
        *traps, rare = self.sample(self.prefixes, spec.trap_prefix_count + 1)
        for prefix in traps:
            for child in self.sample(self.children, spec.trap_branch_count):
                self.add(head, prefix, child)
        rare_count = max(1, math.ceil(TRAP_RARE_SHARE * spec.trap_branch_count))
        return self.add(head, rare, golden, count=rare_count)

    def fork(self, head, golden):
        spec = self.spec
        *others, target = self.sample(self.prefixes, spec.fork_width)
        for branch in others:
            for child in self.sample(self.children, spec.fork_children):
                self.add(head, branch, child, count=FORK_CHILD_COUNT)
        runner_up = golden
        while runner_up == golden:
            runner_up = self.goldens[int(self.rng.integers(len(self.goldens)))]
        self.add(head, target, runner_up, count=FORK_RUNNER_UP_COUNT)
        return self.add(head, target, golden, count=FORK_GOLDEN_COUNT)

    def noise(self, head, golden):
        spec = self.spec
        distractors = self.sample(self.prefixes, spec.noise_distractors)
        children = self.sample(self.children, spec.noise_distractors * spec.noise_children)
        for position, branch in enumerate(distractors):
            for child in children[position * spec.noise_children:(position + 1) * spec.noise_children]:
                self.add(head, branch, child)
        # One fresh noise word per query, so nothing but g ever follows it.
        noise_word = self.words.take(1)[0]
        noise_count = max(1, math.floor(NOISE_RARE_SHARE * spec.noise_children))
        return self.add(head, noise_word, golden, count=noise_count)

    def build(self):
        families = self.rng.choice(len(FAMILIES), size=self.spec.queries, p=self.spec.weights)
        for record_id, (head, family_index) in enumerate(zip(self.heads, families, strict=True), start=1):
            family = FAMILIES[int(family_index)]
            golden = self.goldens[int(self.rng.integers(len(self.goldens)))]
            keyword = getattr(self, family)(head, golden)
            self.records.append(QueryRecord(record_id, f"{head} {golden}", (keyword,), family))
        order = self.rng.permutation(len(self.pairs))
        return [self.pairs[i] for i in order]


def synth_generate(seed: int, spec: SynthSpec) -> SynthDataset:
    """Deterministic in ``seed``: equal seeds and specs give identical datasets."""
    rng = np.random.default_rng(seed)
    builder = _Builder(spec, rng)
    pairs = builder.build()
    keywords = tuple(sorted(builder.library))

    corpus = [*keywords, *(record.query for record in builder.records)]
    vocab = build_vocab(corpus, max_size=len(builder.words.used) + 3)

    families = {family: sum(record.scenario == family for record in builder.records) for family in FAMILIES}
    logger.info(
        "Generated synthetic benchmark: %d keywords, %d training pairs, %d queries %s",
        len(keywords),
        len(pairs),
        len(builder.records),
        families,
    )
    return SynthDataset(keywords, tuple(pairs), tuple(builder.records), vocab)
