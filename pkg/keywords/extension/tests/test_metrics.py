import numpy as np
import pytest

from keywords.core.exceptions import EvaluationError
from keywords.extension.utils.metrics import average_precision_at_k
from keywords.extension.utils.metrics import map_at_k
from keywords.extension.utils.metrics import recall_at_k


def brute_force_ap(results, golden, k):
    relevant = [item in golden for item in results[:k]]
    precisions = [sum(relevant[: rank + 1]) / (rank + 1) for rank in range(len(relevant)) if relevant[rank]]
    return sum(precisions) / min(len(golden), k)


class TestRecall:
    def test_examples(self):
        assert recall_at_k(["A", "B", "C"], {"A", "C"}, 1) == 0.5
        assert recall_at_k(["A", "B", "C"], {"A", "C"}, 3) == 1.0
        assert recall_at_k([], {"A"}, 5) == 0.0

    def test_monotone_in_k(self):
        results = ["D", "A", "E", "C", "B"]
        values = [recall_at_k(results, {"A", "B", "C"}, k) for k in range(1, 6)]
        assert values == sorted(values)

    def test_empty_golden(self):
        with pytest.raises(EvaluationError, match="empty golden set"):
            recall_at_k(["A"], set(), 1)

    def test_k_must_be_positive(self):
        with pytest.raises(EvaluationError):
            recall_at_k(["A"], {"A"}, 0)


class TestAveragePrecision:
    def test_examples(self):
        assert average_precision_at_k(["A", "B", "C"], {"A", "C"}, 3) == pytest.approx((1 + 2 / 3) / 2)
        assert average_precision_at_k(["A", "B", "C"], {"A", "C"}, 1) == 1.0
        assert average_precision_at_k(["A", "B", "C"], {"Z"}, 3) == 0.0

    def test_denominator_capped_at_k(self):
        assert average_precision_at_k(["A", "B"], {"A", "B", "C", "D"}, 2) == 1.0

    def test_repeated_items_count_once(self):
        assert average_precision_at_k(["A", "A", "B"], {"A", "B"}, 3) == pytest.approx((1 + 2 / 3) / 2)

    def test_map_averages_queries(self):
        results = [["A", "B"], ["X", "Y"]]
        goldens = [{"A"}, {"Y"}]
        assert map_at_k(results, goldens, 2) == pytest.approx((1.0 + 0.5) / 2)

    def test_map_length_mismatch(self):
        with pytest.raises(EvaluationError, match="differ in length"):
            map_at_k([["A"]], [{"A"}, {"B"}], 1)


def test_metrics_match_brute_force():
    rng = np.random.default_rng(31)
    items = [f"kw{i}" for i in range(30)]
    for _ in range(1000):
        results = list(rng.permutation(items)[: int(rng.integers(0, 21))])
        golden = set(rng.choice(items, size=int(rng.integers(1, 8)), replace=False))
        k = int(rng.integers(1, 21))
        expected_recall = len(golden.intersection(results[:k])) / len(golden)
        assert recall_at_k(results, golden, k) == pytest.approx(expected_recall)
        assert average_precision_at_k(results, golden, k) == pytest.approx(brute_force_ap(results, golden, k))
