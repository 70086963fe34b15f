"""
Evaluation Harness

Runs a retrieval system over a dataset of :class:`QueryRecord`s and reports
recall@K and MAP@K. A *system* is any callable ``(record, top) -> ranked
keyword strings``; helpers below wrap the decoder, the BM25 baseline and
merged combinations of systems.
"""

import logging
import time
from collections.abc import Callable
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from dataclasses import field
from dataclasses import replace

import pandas as pd

from keywords.core.exceptions import EvaluationError

from .bm25 import bm25_query
from .datasets import QueryRecord
from .decoder import BeamConfig
from .decoder import beam_search
from .decoder import merge_results
from .metrics import average_precision_at_k
from .metrics import recall_at_k
from .vocab import UNK_ID
from .vocab import detokenize
from .vocab import split_words
from .vocab import tokenize

logger = logging.getLogger(__name__)

System = Callable[[QueryRecord, int], list[str]]


@dataclass
class MetricsReport:
    name: str
    ks: tuple[int, ...]
    recall: dict[int, float]
    map: dict[int, float]
    query_count: int
    rows: list[dict] = field(default_factory=list, repr=False)

    @classmethod
    def from_rows(cls, name, ks, rows):
        count = len(rows)
        recall = {k: sum(row[f"recall@{k}"] for row in rows) / count if count else 0.0 for k in ks}
        mean_ap = {k: sum(row[f"ap@{k}"] for row in rows) / count if count else 0.0 for k in ks}
        return cls(name, tuple(ks), recall, mean_ap, count, rows)

    def by_scenario(self) -> dict[str, "MetricsReport"]:
        grouped = {}
        for row in self.rows:
            grouped.setdefault(row["scenario"] or "all", []).append(row)
        return {
            scenario: MetricsReport.from_rows(f"{self.name} [{scenario}]", self.ks, rows)
            for scenario, rows in sorted(grouped.items())
        }

    def frame(self):
        """Per-query detail as a DataFrame."""
        return pd.DataFrame(self.rows)

    def to_dict(self):
        return {
            "name": self.name,
            "ks": list(self.ks),
            "query_count": self.query_count,
            "recall": {str(k): value for k, value in self.recall.items()},
            "map": {str(k): value for k, value in self.map.items()},
            "scenarios": {
                scenario: {
                    "query_count": report.query_count,
                    "recall": {str(k): value for k, value in report.recall.items()},
                    "map": {str(k): value for k, value in report.map.items()},
                }
                for scenario, report in self.by_scenario().items()
            },
        }


def check_golden_in_trie(dataset, trie, vocab):
    """
    Raise :class:`EvaluationError` naming every record whose golden keyword is not in the Trie.

    A golden with an out-of-vocabulary word counts as missing even when the
    Trie holds the same UNK-bearing id sequence.
    """
    offending = [
        record.record_id
        for record in dataset
        if not all(_golden_in_trie(golden, trie, vocab) for golden in record.golden)
    ]
    if offending:
        msg = "golden keyword not in trie for records"
        raise EvaluationError(msg, offending)


def _golden_in_trie(golden, trie, vocab):
    tokens = tokenize(golden, vocab)
    return UNK_ID not in tokens and trie.contains(tokens)


def _row(record, outputs, ks, outputs_by_k=None):
    row = {
        "record_id": record.record_id,
        "query": record.query,
        "scenario": record.scenario,
        "outputs": list(outputs),
    }
    for k in ks:
        ranked = outputs_by_k[k] if outputs_by_k is not None else outputs
        row[f"recall@{k}"] = recall_at_k(ranked, record.golden, k)
        row[f"ap@{k}"] = average_precision_at_k(ranked, record.golden, k)
    return row


def evaluate(
    dataset: Sequence[QueryRecord],
    system: System,
    ks: Sequence[int],
    *,
    name="system",
    trie=None,
    vocab=None,
    workers=1,
    rerun_per_k=False,
) -> MetricsReport:
    """
    Score ``system`` on ``dataset`` at every K in ``ks``.

    By default the system runs once per query at ``max(ks)`` and metrics are
    read off that list. With ``rerun_per_k`` the system runs again at each K.
    """
    if not dataset:
        msg = "empty dataset"
        raise EvaluationError(msg)
    ks = tuple(sorted(set(ks)))
    if not ks or ks[0] < 1:
        msg = "K values must be positive"
        raise EvaluationError(msg)
    if trie is not None and vocab is not None:
        check_golden_in_trie(dataset, trie, vocab)

    def run(record):
        if rerun_per_k:
            by_k = {k: list(system(record, k)) for k in ks}
            return _row(record, by_k[ks[-1]], ks, by_k)
        return _row(record, list(system(record, ks[-1])), ks)

    started = time.perf_counter()
    if workers > 1 and len(dataset) > 1:
        with ThreadPoolExecutor(max_workers=min(workers, len(dataset))) as executor:
            rows = list(executor.map(run, dataset))
    else:
        rows = [run(record) for record in dataset]

    report = MetricsReport.from_rows(name, ks, rows)
    logger.info(
        "Evaluated %s on %d queries in %.2fs: %s",
        name,
        report.query_count,
        time.perf_counter() - started,
        {f"R@{k}": round(value, 4) for k, value in report.recall.items()},
    )
    return report


def evaluate_grid(
    dataset: Sequence[QueryRecord],
    systems: Sequence[tuple[str, System]],
    ks: Sequence[int],
    *,
    workers=1,
    rerun_per_k=False,
) -> list[MetricsReport]:
    """
    Evaluate every named system, several at once; reports keep the order of ``systems``.

    ``workers`` is the total thread budget, shared between concurrent systems
    and the queries inside each.
    """
    if not systems:
        return []
    concurrent = max(1, min(workers, len(systems)))
    per_system = max(1, workers // concurrent)

    def run(named):
        name, system = named
        return evaluate(dataset, system, ks, name=name, workers=per_system, rerun_per_k=rerun_per_k)

    if concurrent == 1:
        return [run(named) for named in systems]
    with ThreadPoolExecutor(max_workers=concurrent) as executor:
        return list(executor.map(run, systems))


def decoder_system(trie, scorer, vocab, config: BeamConfig) -> System:
    """Beam search with beam size equal to the requested list length."""

    def system(record, top):
        result = beam_search(tokenize(record.query, vocab), trie, scorer, replace(config, beam_size=top))
        return [detokenize(keyword, vocab) for keyword in result.keywords()]

    return system


def bm25_system(index) -> System:
    def system(record, top):
        return [" ".join(keyword) for keyword, _ in bm25_query(index, split_words(record.query), top)]

    return system


def merged_system(systems: Sequence[System]) -> System:
    """Round-robin merge of the systems' lists, kept whole so metrics truncate at K."""

    def system(record, top):
        rankings = [run(record, top) for run in systems]
        return merge_results(rankings, sum(len(ranking) for ranking in rankings))

    return system
