"""
Scorers

A scorer maps ``(query, prefix)`` to an :class:`NGramPrediction`: one
log-probability distribution over the vocabulary for each of the next ``n``
output positions. Two implementations:

* :class:`TableScorer` returns fixed distributions read from a JSON-lines
  file, uniform for anything not listed. Used for fixtures.
* :class:`CountScorer` is a Jelinek-Mercer interpolated count model over
  keyword n-grams with a copy bonus for query tokens. Future positions are
  top-k sum-marginals over partial continuations.
"""

import json
import logging
import math
from collections import Counter
from collections.abc import Sequence
from dataclasses import asdict
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Protocol

import numpy as np

from keywords.core.exceptions import ScorerError

from .vocab import BOS_ID
from .vocab import EOS_ID
from .vocab import RESERVED_IDS

logger = logging.getLogger(__name__)

DEFAULT_FLOOR_LOGPROB = math.log(1e-10)
COUNT_SCORER_FORMAT = "count-scorer"
COUNT_SCORER_VERSION = 1


@dataclass(frozen=True)
class NGramPrediction:
    """``dists[k]`` is the log-distribution for output position ``len(prefix) + k + 1``."""

    dists: tuple[np.ndarray, ...]

    @property
    def order(self):
        return len(self.dists)

    def __getitem__(self, k):
        return self.dists[k]


class Scorer(Protocol):
    order: int
    vocab_size: int

    def predict(self, query: Sequence[int], prefix: Sequence[int], order: int | None = None) -> NGramPrediction:
        ...


def floor_fill(probs, floor_logprob=DEFAULT_FLOOR_LOGPROB):
    """
    Normalise ``probs`` and lift every entry to at least ``exp(floor_logprob)``.

    The floor is applied as the mixture ``(1 - V*f) * p + f`` so the result
    still sums to one. Returns log-probabilities.
    """
    probs = np.asarray(probs, dtype=np.float64)
    size = probs.shape[0]
    floor = math.exp(floor_logprob)
    if size * floor >= 1.0:
        msg = f"floor {floor_logprob} is too high for a vocabulary of {size}"
        raise ScorerError(msg)
    total = probs.sum()
    probs = probs / total if total > 0 else np.full(size, 1.0 / size)
    return np.log((1.0 - size * floor) * probs + floor)


def _uniform(vocab_size):
    return np.full(vocab_size, -math.log(vocab_size))


# ------------------------------------------------------------------ table


class TableScorer:
    def __init__(self, vocab_size, order, table, floor_logprob=DEFAULT_FLOOR_LOGPROB):
        self.vocab_size = vocab_size
        self.order = order
        self.table = table
        self.floor_logprob = floor_logprob
        self._uniform = _uniform(vocab_size)

    def predict(self, query, prefix, order=None):
        order = order or self.order
        prefix = tuple(prefix)
        dists = self.table.get((tuple(query), prefix))
        if dists is None:
            dists = self.table.get((None, prefix))
        if dists is None:
            return NGramPrediction((self._uniform,) * order)
        return NGramPrediction(tuple(dists[:order]))


def table_scorer_load(path, vocab, floor_logprob=DEFAULT_FLOOR_LOGPROB) -> TableScorer:
    """
    Load a table scorer from JSON lines.

    Each record: ``{"query": str | null, "prefix": str, "dists": [[[token, p], ...], ...]}``
    with linear probabilities. A null or missing query matches every query.
    """
    # Imported lazily: the serializer module pulls in the ORM models.
    from keywords.extension.serializers import TableRecordSerializer  # noqa: PLC0415
    from keywords.extension.serializers import first_error  # noqa: PLC0415

    from .vocab import tokenize  # noqa: PLC0415

    table = {}
    order = None
    with Path(path).open(encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                payload = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ScorerError(f"invalid JSON ({exc.msg})", line=line_number) from exc  # noqa: EM102
            serializer = TableRecordSerializer(data=payload)
            if not serializer.is_valid():
                raise ScorerError(first_error(serializer.errors), line=line_number)
            record = serializer.validated_data

            if order is None:
                order = len(record["dists"])
            elif len(record["dists"]) != order:
                msg = f"expected {order} distributions, found {len(record['dists'])}"
                raise ScorerError(msg, line=line_number)

            dists = []
            for pairs in record["dists"]:
                probs = np.zeros(len(vocab))
                for token, probability in pairs:
                    if token not in vocab:
                        raise ScorerError(f"unknown token {token!r}", line=line_number)  # noqa: EM102
                    probs[vocab.id_of(token)] = probability
                dists.append(floor_fill(probs, floor_logprob))

            query = record["query"]
            key = (None if query is None else tuple(tokenize(query, vocab)), tuple(tokenize(record["prefix"], vocab)))
            table[key] = tuple(dists)

    if order is None:
        msg = f"{path}: no records"
        raise ScorerError(msg)
    logger.info("Loaded table scorer with %d entries (order %d) from %s", len(table), order, path)
    return TableScorer(len(vocab), order, table, floor_logprob)


# ------------------------------------------------------------------ count model


@dataclass(frozen=True)
class CountScorerConfig:
    markov_order: int = 3
    interpolation_weights: tuple[float, ...] = (0.1, 0.3, 0.6)
    copy_bonus_beta: float = 1.0
    floor_logprob: float = DEFAULT_FLOOR_LOGPROB
    future_top_k: int = 8
    prediction_order: int = 3

    def validate(self):
        if self.markov_order < 1:
            msg = "markov order must be positive"
            raise ScorerError(msg)
        weights = self.interpolation_weights
        if len(weights) != self.markov_order:
            msg = f"expected {self.markov_order} interpolation weights, got {len(weights)}"
            raise ScorerError(msg)
        if any(weight < 0 for weight in weights) or abs(sum(weights) - 1.0) > 1e-9:  # noqa: PLR2004
            msg = "interpolation weights must be non-negative and sum to 1"
            raise ScorerError(msg)
        if self.copy_bonus_beta < 0:
            msg = "copy bonus must be non-negative"
            raise ScorerError(msg)
        if self.future_top_k < 1 or self.prediction_order < 1:
            msg = "future_top_k and prediction_order must be positive"
            raise ScorerError(msg)
        return self


class CountScorer:
    """
    Interpolated n-gram scorer over keyword sequences.

    Histories are padded with ``markov_order - 1`` BOS tokens. The order-1
    component is an add-one smoothed unigram over every non-BOS token; higher
    orders are relative frequencies, contributing nothing for unseen contexts.
    """

    def __init__(self, config, vocab_size, ngram_counts, cache_size=16_384):
        self.config = config.validate()
        self.vocab_size = vocab_size
        self.order = config.prediction_order
        self.ngram_counts = dict(ngram_counts)
        if any(count < 0 for count in self.ngram_counts.values()):
            msg = "negative n-gram count"
            raise ScorerError(msg)
        if any(max(gram) >= vocab_size for gram in self.ngram_counts):
            msg = "n-gram references a token outside the vocabulary"
            raise ScorerError(msg)

        self._unigram = self._build_unigram()
        self._continuations = self._build_continuations()
        self._boost = math.exp(config.copy_bonus_beta)
        self._step = lru_cache(maxsize=cache_size)(self._step_distribution)

    @property
    def markov_order(self):
        return self.config.markov_order

    def _build_unigram(self):
        counts = np.zeros(self.vocab_size)
        for gram, count in self.ngram_counts.items():
            if len(gram) == 1:
                counts[gram[0]] += count
        counts += 1.0
        counts[BOS_ID] = 0.0
        return counts / counts.sum()

    def _build_continuations(self):
        grouped = {}
        for gram, count in self.ngram_counts.items():
            if len(gram) > 1 and count > 0:
                grouped.setdefault(gram[:-1], {})[gram[-1]] = count
        continuations = {}
        for context, followers in grouped.items():
            ids = np.fromiter(sorted(followers), dtype=np.int64)
            counts = np.array([followers[token_id] for token_id in ids], dtype=np.float64)
            continuations[context] = (ids, counts / counts.sum())
        return continuations

    def history(self, prefix):
        return (BOS_ID,) * max(self.markov_order - 1, 1) + tuple(prefix)

    def query_key(self, query):
        return tuple(sorted({token_id for token_id in query if token_id not in RESERVED_IDS}))

    def _step_distribution(self, query_key, context, ended):
        if ended:
            probs = np.zeros(self.vocab_size)
            probs[EOS_ID] = 1.0
            return np.exp(floor_fill(probs, self.config.floor_logprob))

        weights = self.config.interpolation_weights
        probs = weights[0] * self._unigram
        for order in range(2, self.markov_order + 1):
            if not weights[order - 1]:
                continue
            found = self._continuations.get(context[len(context) - (order - 1):])
            if found is not None:
                ids, conditional = found
                probs[ids] += weights[order - 1] * conditional
        probs[BOS_ID] = 0.0
        if query_key and self.config.copy_bonus_beta:
            probs[list(query_key)] *= self._boost
        return np.exp(floor_fill(probs, self.config.floor_logprob))

    def step_distribution(self, query, history):
        """Linear next-token distribution after ``history`` (BOS-padded)."""
        return self._step(self.query_key(query), self._context(history), history[-1] == EOS_ID)

    def _context(self, history):
        width = self.markov_order - 1
        return tuple(history[len(history) - width:]) if width else ()

    def predict(self, query, prefix, order=None):
        order = min(order or self.order, self.order)
        query_key = self.query_key(query)
        top_k = self.config.future_top_k
        frontier = [(1.0, self.history(prefix))]
        dists = []
        for level in range(order):
            total = sum(weight for weight, _ in frontier)
            mixture = np.zeros(self.vocab_size)
            steps = []
            for weight, history in frontier:
                step = self._step(query_key, self._context(history), history[-1] == EOS_ID)
                steps.append(step)
                mixture += (weight / total) * step
            dists.append(np.log(mixture))
            if level == order - 1:
                break
            candidates = []
            for (weight, history), step in zip(frontier, steps, strict=True):
                best = np.argpartition(-step, top_k - 1)[:top_k] if top_k < self.vocab_size else range(self.vocab_size)
                candidates.extend((weight * step[token_id], (*history, int(token_id))) for token_id in best)
            candidates.sort(key=lambda item: (-item[0], item[1]))
            frontier = candidates[:top_k]
        return NGramPrediction(tuple(dists))

    def to_dict(self):
        return {
            "format": COUNT_SCORER_FORMAT,
            "version": COUNT_SCORER_VERSION,
            "vocab_size": self.vocab_size,
            "config": {**asdict(self.config), "interpolation_weights": list(self.config.interpolation_weights)},
            "ngram_counts": {" ".join(map(str, gram)): count for gram, count in self.ngram_counts.items()},
        }

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), sort_keys=True), encoding="utf-8")
        logger.info("Saved count scorer (%d n-grams) to %s", len(self.ngram_counts), path)

    @classmethod
    def from_dict(cls, payload):
        if payload.get("format") != COUNT_SCORER_FORMAT:
            msg = "not a count scorer model"
            raise ScorerError(msg)
        if payload.get("version") != COUNT_SCORER_VERSION:
            msg = f"unsupported count scorer version {payload.get('version')}"
            raise ScorerError(msg)
        try:
            raw = payload["config"]
            config = CountScorerConfig(**{**raw, "interpolation_weights": tuple(raw["interpolation_weights"])})
            counts = {tuple(int(part) for part in key.split()): int(count) for key, count in payload["ngram_counts"].items()}
            return cls(config, int(payload["vocab_size"]), counts)
        except (KeyError, TypeError, ValueError) as exc:
            msg = f"malformed count scorer model: {exc}"
            raise ScorerError(msg) from exc

    @classmethod
    def load(cls, path):
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ScorerError(f"invalid JSON ({exc.msg})", line=exc.lineno) from exc  # noqa: EM102
        scorer = cls.from_dict(payload)
        logger.info("Loaded count scorer (%d n-grams) from %s", len(scorer.ngram_counts), path)
        return scorer


def count_scorer_train(pairs, config=None, vocab_size=None) -> CountScorer:
    """
    Count target-side k-grams (k <= markov order) over BOS-padded, EOS-closed keywords.

    ``pairs`` holds ``(query_ids, keyword_ids)``; queries do not enter the
    counts, they only matter at predict time through the copy bonus.
    """
    config = (config or CountScorerConfig()).validate()
    if not pairs:
        msg = "empty training set"
        raise ScorerError(msg)

    padding = (BOS_ID,) * max(config.markov_order - 1, 1)
    counts = Counter()
    highest = EOS_ID
    skipped = 0
    for _, keyword_ids in pairs:
        if not keyword_ids or any(token_id in (BOS_ID, EOS_ID) for token_id in keyword_ids):
            skipped += 1
            continue
        highest = max(highest, *keyword_ids)
        sequence = (*padding, *keyword_ids, EOS_ID)
        for end in range(len(padding), len(sequence)):
            for width in range(1, config.markov_order + 1):
                start = end - width + 1
                if start < 0:
                    break
                counts[sequence[start:end + 1]] += 1
    if skipped:
        logger.warning("Skipped %d training pairs with empty or reserved-token keywords", skipped)
    if not counts:
        msg = "empty training set"
        raise ScorerError(msg)

    vocab_size = vocab_size or highest + 1
    logger.info("Trained count scorer on %d pairs: %d distinct n-grams", len(pairs) - skipped, len(counts))
    return CountScorer(config, vocab_size, dict(sorted(counts.items())))


def load_scorer(path, vocab, floor_logprob=DEFAULT_FLOOR_LOGPROB):
    """Load either a saved count model or a JSON-lines table."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        payload = json.loads(text)
    except json.JSONDecodeError:
        payload = None
    if isinstance(payload, dict) and payload.get("format") == COUNT_SCORER_FORMAT:
        scorer = CountScorer.from_dict(payload)
        if scorer.vocab_size != len(vocab):
            msg = f"scorer vocabulary size {scorer.vocab_size} does not match {len(vocab)}"
            raise ScorerError(msg)
        return scorer
    return table_scorer_load(path, vocab, floor_logprob)
