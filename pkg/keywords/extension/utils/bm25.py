"""
BM25 Baseline

Okapi BM25 retrieval where every library keyword is one document.
"""

import logging
import math
from collections import Counter
from collections import defaultdict
from collections.abc import Sequence
from dataclasses import dataclass

from keywords.core.exceptions import ConfigurationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Bm25Params:
    k1: float = 1.2
    b: float = 0.75
    epsilon: float = 0.25

    @classmethod
    def from_settings(cls, params):
        return cls(**{key: float(value) for key, value in params.items()})


class Bm25Index:
    """Immutable after build; safe for concurrent queries."""

    def __init__(self, documents, params: Bm25Params):
        self.params = params
        self.documents = tuple(tuple(document) for document in documents)
        self.labels = tuple(" ".join(map(str, document)) for document in self.documents)
        self.doc_term_freqs = tuple(Counter(document) for document in self.documents)
        self.doc_lengths = tuple(len(document) for document in self.documents)
        self.avg_doc_length = sum(self.doc_lengths) / len(self.documents)

        self.postings = defaultdict(list)
        for doc_id, freqs in enumerate(self.doc_term_freqs):
            for term in freqs:
                self.postings[term].append(doc_id)
        self.doc_freqs = {term: len(doc_ids) for term, doc_ids in self.postings.items()}
        self.idf = self._compute_idf()

    def _compute_idf(self):
        total = len(self.documents)
        idf = {term: math.log((total - df + 0.5) / (df + 0.5) + 1.0) for term, df in self.doc_freqs.items()}
        if not idf:
            return idf
        floor = self.params.epsilon * sum(idf.values()) / len(idf)
        return {term: max(value, floor) for term, value in idf.items()}

    def __len__(self):
        return len(self.documents)

    def tf_component(self, doc_id, term):
        freq = self.doc_term_freqs[doc_id].get(term, 0)
        if not freq:
            return 0.0
        k1, b = self.params.k1, self.params.b
        norm = k1 * (1.0 - b + b * self.doc_lengths[doc_id] / self.avg_doc_length)
        return freq * (k1 + 1.0) / (freq + norm)

    def score(self, query: Sequence, doc_id: int) -> float:
        return sum(self.idf.get(term, 0.0) * self.tf_component(doc_id, term) for term in query)

    def scores(self, query: Sequence) -> dict[int, float]:
        """Scores of every document sharing at least one term with ``query``."""
        totals = defaultdict(float)
        for term in query:
            idf = self.idf.get(term)
            if idf is None:
                continue
            for doc_id in self.postings[term]:
                totals[doc_id] += idf * self.tf_component(doc_id, term)
        return dict(totals)


def bm25_build(keywords: Sequence[Sequence], params: Bm25Params | None = None) -> Bm25Index:
    if not keywords:
        msg = "empty keyword library"
        raise ConfigurationError(msg)
    index = Bm25Index(keywords, params or Bm25Params())
    logger.info("Built BM25 index over %d keywords, %d terms", len(index), len(index.idf))
    return index


def bm25_query(index: Bm25Index, query: Sequence, k: int, *, include_zero=False) -> list[tuple[tuple, float]]:
    """
    Top-``k`` ``(keyword, score)`` pairs, ties broken by keyword text.

    Keywords sharing no term with the query are left out unless
    ``include_zero`` is set, in which case they fill the tail.
    """
    scored = index.scores(query)
    ranked = sorted(scored.items(), key=lambda item: (-item[1], index.labels[item[0]]))
    if include_zero and len(ranked) < k:
        rest = sorted((doc_id for doc_id in range(len(index)) if doc_id not in scored), key=index.labels.__getitem__)
        ranked.extend((doc_id, 0.0) for doc_id in rest)
    return [(index.documents[doc_id], score) for doc_id, score in ranked[:k]]
