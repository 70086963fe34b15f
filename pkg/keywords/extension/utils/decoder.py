"""
Trie-constrained Lookahead Beam Search

Every hypothesis is a path in the keyword Trie, so every finished output is
a library keyword. Candidates are *ranked* with a lookahead-modified step
score: a token's own log-probability interpolated (weight ``λ``) with the best
score reachable below it in the Trie over the next ``n - 1`` predicted
positions. Hypotheses *store* the unmodified model score, so reported scores
are always the plain sum of first-position log-probabilities along the path.
"""

import logging
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from dataclasses import field
from dataclasses import replace

from keywords.core.exceptions import ConfigurationError
from keywords.core.exceptions import DecodeError

from .vocab import BOS_ID
from .vocab import EOS_ID

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BeamConfig:
    beam_size: int = 5
    ngram_order: int = 2
    residual_weight: float = 0.8
    max_length: int = 20
    length_norm_alpha: float = 0.0

    def validate(self):
        if not 0.0 <= self.residual_weight <= 1.0:
            msg = "lambda must be in [0,1]"
            raise ConfigurationError(msg)
        if self.beam_size < 1:
            msg = "beam size must be positive"
            raise ConfigurationError(msg)
        if self.ngram_order < 1:
            msg = "n-gram order must be positive"
            raise ConfigurationError(msg)
        if self.max_length < 1:
            msg = "max length must be positive"
            raise ConfigurationError(msg)
        if self.length_norm_alpha < 0:
            msg = "length normalization alpha must be non-negative"
            raise ConfigurationError(msg)
        return self

    @property
    def lookahead_depth(self):
        return self.ngram_order - 1

    @property
    def uses_lookahead(self):
        return self.ngram_order > 1 and self.residual_weight < 1.0

    def plain(self):
        """The same search without lookahead."""
        return replace(self, residual_weight=1.0)

    def normalize(self, score, length):
        if self.length_norm_alpha <= 0 or length <= 0:
            return score
        return score / length**self.length_norm_alpha

    def to_dict(self):
        return {
            "beam_size": self.beam_size,
            "ngram_order": self.ngram_order,
            "residual_weight": self.residual_weight,
            "max_length": self.max_length,
            "length_norm_alpha": self.length_norm_alpha,
        }


@dataclass(frozen=True)
class Hypothesis:
    tokens: tuple[int, ...]
    original_score: float
    ranking_score: float
    finished: bool = False

    @property
    def prefix(self):
        return self.tokens[1:]

    @property
    def length(self):
        return len(self.tokens) - 1


@dataclass(frozen=True)
class ScoredKeyword:
    tokens: tuple[int, ...]
    original_score: float
    normalized_score: float


@dataclass(frozen=True)
class ExtensionResult:
    outputs: tuple[ScoredKeyword, ...]
    config: BeamConfig
    diagnostics: dict = field(default_factory=dict, compare=False)

    def keywords(self):
        return [output.tokens for output in self.outputs]

    def __len__(self):
        return len(self.outputs)


def lookahead_modify(prediction, trie, prefix: Sequence[int], residual_weight: float, depth: int) -> dict[int, float]:
    """
    Modified first-position scores for every Trie-allowed successor of ``prefix``.

    Level ``k`` (0-based) scores become ``λ·g_k[t] + (1-λ)·max_child(modified g_{k+1})``;
    level ``depth - 1`` uses the raw ``g``. Tokens not returned are masked out.
    """
    node = trie.node_at(prefix)
    if node is None:
        msg = "prefix outside trie"
        raise DecodeError(msg)
    if depth < 1:
        msg = "lookahead depth must be positive"
        raise DecodeError(msg)
    if depth > prediction.order:
        msg = "lookahead depth exceeds scorer order"
        raise DecodeError(msg)

    dists = prediction.dists
    last = depth - 1
    lam = residual_weight

    def score(token_id, child, level):
        raw = float(dists[level][token_id])
        if level == last or lam == 1.0:
            return raw
        future = best_future(token_id, child, level + 1)
        if future is None:
            return lam * raw
        return lam * raw + (1.0 - lam) * future

    def best_future(token_id, child, level):
        # EOS leaf: the keyword is over, the only continuation is EOS again.
        if token_id == EOS_ID:
            return score(EOS_ID, None, level)
        ids = child.child_ids
        if not ids:
            return None
        if level == last:
            return float(dists[level][child.child_array].max())
        return max(score(next_id, child.children[next_id], level) for next_id in ids)

    return {token_id: score(token_id, node.children[token_id], 0) for token_id in node.child_ids}


def _rank_key(config):
    return lambda hyp: (-config.normalize(hyp.ranking_score, hyp.length), hyp.tokens)


def beam_search(query: Sequence[int], trie, scorer, config: BeamConfig) -> ExtensionResult:
    config.validate()
    if trie.keyword_count == 0:
        msg = "empty trie"
        raise DecodeError(msg)
    if config.ngram_order > scorer.order:
        msg = "lookahead depth exceeds scorer order"
        raise DecodeError(msg)

    query = tuple(query)
    rank_key = _rank_key(config)
    lookahead = config.uses_lookahead
    order = config.ngram_order if lookahead else 1

    alive = [Hypothesis((BOS_ID,), 0.0, 0.0)]
    finished: list[Hypothesis] = []
    steps = expanded = scored = 0

    while alive and steps < config.max_length:
        steps += 1
        candidates = []
        for hyp in alive:
            prefix = hyp.prefix
            node = trie.node_at(prefix)
            prediction = scorer.predict(query, prefix, order=order)
            first = prediction[0]
            modified = (
                lookahead_modify(prediction, trie, prefix, config.residual_weight, config.ngram_order)
                if lookahead
                else None
            )
            expanded += 1
            for token_id in node.child_ids:
                step = float(first[token_id])
                ranking_step = modified[token_id] if modified is not None else step
                candidates.append(
                    Hypothesis(
                        (*hyp.tokens, token_id),
                        hyp.original_score + step,
                        hyp.original_score + ranking_step,
                        finished=token_id == EOS_ID,
                    ),
                )
        scored += len(candidates)
        candidates.sort(key=rank_key)

        alive = [hyp for hyp in candidates if not hyp.finished][: config.beam_size]
        finished = sorted(finished + [hyp for hyp in candidates if hyp.finished], key=rank_key)[: config.beam_size]

        if alive and len(finished) >= config.beam_size:
            best_alive = config.normalize(alive[0].ranking_score, alive[0].length)
            worst_finished = config.normalize(finished[-1].ranking_score, finished[-1].length)
            if best_alive <= worst_finished:
                break

    outputs = sorted(
        (
            ScoredKeyword(
                hyp.tokens[1:-1],
                hyp.original_score,
                config.normalize(hyp.original_score, hyp.length),
            )
            for hyp in finished
        ),
        key=lambda output: (-output.normalized_score, output.tokens),
    )
    diagnostics = {"steps": steps, "expanded": expanded, "candidates": scored}
    logger.debug("Decoded query of %d tokens: %d outputs, %s", len(query), len(outputs), diagnostics)
    return ExtensionResult(tuple(outputs), config, diagnostics)


def merge_results(results, k: int):
    """Round-robin union of ranked lists, first occurrence wins, truncated to ``k``."""
    rankings = [result.keywords() if isinstance(result, ExtensionResult) else list(result) for result in results]
    merged = []
    seen = set()
    for rank in range(max((len(ranking) for ranking in rankings), default=0)):
        for ranking in rankings:
            if rank < len(ranking) and ranking[rank] not in seen:
                seen.add(ranking[rank])
                merged.append(ranking[rank])
    return merged[:k]


def extend_queries(queries, trie, scorer, config: BeamConfig, workers=1) -> list[ExtensionResult]:
    """Decode many queries over the shared read-only Trie and scorer; results keep input order."""
    config.validate()
    queries = [tuple(query) for query in queries]
    if workers <= 1 or len(queries) <= 1:
        return [beam_search(query, trie, scorer, config) for query in queries]
    with ThreadPoolExecutor(max_workers=min(workers, len(queries))) as executor:
        return list(executor.map(lambda query: beam_search(query, trie, scorer, config), queries))


def rescore(keyword_ids: Sequence[int], query: Sequence[int], scorer) -> float:
    """Sum of unmodified first-position log-probabilities along ``keyword`` plus EOS."""
    path = (*keyword_ids, EOS_ID)
    total = 0.0
    for position, token_id in enumerate(path):
        total += float(scorer.predict(query, path[:position], order=1)[0][token_id])
    return total
