"""Random scorers, random libraries and reference searches for property tests."""

from functools import lru_cache

import numpy as np

from keywords.extension.utils.decoder import rescore
from keywords.extension.utils.scorer import NGramPrediction
from keywords.extension.utils.scorer import floor_fill
from keywords.extension.utils.trie import trie_build
from keywords.extension.utils.vocab import BOS_ID
from keywords.extension.utils.vocab import EOS_ID
from keywords.extension.utils.vocab import RESERVED_IDS


class RandomScorer:
    """
    Deterministic pseudo-random scorer.

    Every ``(query, prefix, level)`` gets its own Dirichlet draw, so the
    first-position distribution does not depend on how many levels are asked for.
    """

    def __init__(self, vocab_size, order, seed=0, concentration=0.3):
        self.vocab_size = vocab_size
        self.order = order
        self.seed = seed
        self.concentration = concentration
        self._level = lru_cache(maxsize=65_536)(self._draw)

    def _draw(self, query, prefix, level):
        rng = np.random.default_rng([self.seed, level, len(query), *query, len(prefix), *prefix])
        probs = rng.dirichlet(np.full(self.vocab_size, self.concentration))
        probs[BOS_ID] = 0.0
        return floor_fill(probs)

    def predict(self, query, prefix, order=None):
        order = min(order or self.order, self.order)
        query, prefix = tuple(query), tuple(prefix)
        return NGramPrediction(tuple(self._level(query, prefix, level) for level in range(order)))


def random_keywords(rng, vocab_size, count, max_length=5):
    first = len(RESERVED_IDS)
    keywords = set()
    while len(keywords) < count:
        length = int(rng.integers(1, max_length + 1))
        keywords.add(tuple(int(token) for token in rng.integers(first, vocab_size, size=length)))
    return sorted(keywords)


def random_trie(rng, vocab_size, count, max_length=5):
    keywords = random_keywords(rng, vocab_size, count, max_length)
    return keywords, trie_build(keywords, vocab_size=vocab_size)


def plain_beam_search(query, trie, scorer, beam_size, max_length):
    """Trie-constrained beam search without lookahead; returns ``[(tokens, score)]`` best first."""
    alive = [((), 0.0)]
    finished = []
    for _ in range(max_length):
        if not alive:
            break
        candidates = []
        for prefix, score in alive:
            dist = scorer.predict(query, prefix, order=1)[0]
            for token_id in trie.node_at(prefix).child_ids:
                candidates.append(((*prefix, token_id), score + float(dist[token_id])))
        candidates.sort(key=lambda item: (-item[1], item[0]))
        alive = [item for item in candidates if item[0][-1] != EOS_ID][:beam_size]
        finished = sorted(
            finished + [item for item in candidates if item[0][-1] == EOS_ID],
            key=lambda item: (-item[1], item[0]),
        )[:beam_size]
        if alive and len(finished) >= beam_size and alive[0][1] <= finished[-1][1]:
            break
    return [(tokens[:-1], score) for tokens, score in finished]


def exhaustive_ranking(query, keywords, scorer):
    scored = [(tuple(keyword), rescore(keyword, query, scorer)) for keyword in keywords]
    return sorted(scored, key=lambda item: (-item[1], item[0]))
