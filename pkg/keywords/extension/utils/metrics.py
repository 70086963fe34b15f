from collections.abc import Collection
from collections.abc import Sequence

from keywords.core.exceptions import EvaluationError


def _check(golden, k):
    if not golden:
        msg = "empty golden set"
        raise EvaluationError(msg)
    if k < 1:
        msg = f"k must be positive, got {k}"
        raise EvaluationError(msg)


def recall_at_k(results: Sequence, golden: Collection, k: int) -> float:
    _check(golden, k)
    golden = set(golden)
    return len(golden.intersection(results[:k])) / len(golden)


def average_precision_at_k(results: Sequence, golden: Collection, k: int) -> float:
    """Truncated AP: sum of precision at each relevant rank, over ``min(|golden|, k)``."""
    _check(golden, k)
    golden = set(golden)
    hits = 0
    total = 0.0
    seen = set()
    for rank, item in enumerate(results[:k], start=1):
        if item in golden and item not in seen:
            hits += 1
            total += hits / rank
        seen.add(item)
    return total / min(len(golden), k)


def map_at_k(results: Sequence[Sequence], goldens: Sequence[Collection], k: int) -> float:
    if len(results) != len(goldens):
        msg = "results and golden sets differ in length"
        raise EvaluationError(msg)
    if not results:
        return 0.0
    return sum(average_precision_at_k(ranked, golden, k) for ranked, golden in zip(results, goldens, strict=True)) / len(
        results,
    )
