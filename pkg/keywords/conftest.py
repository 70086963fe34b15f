import json

import pytest

from keywords.extension.utils.scorer import table_scorer_load
from keywords.extension.utils.trie import load_keyword_library
from keywords.extension.utils.trie import save_trie
from keywords.extension.utils.trie import trie_build
from keywords.extension.utils.vocab import Vocabulary
from keywords.extension.utils.vocab import build_vocab

HOTEL_KEYWORDS = [
    "the best hotel in texas",
    "the best hotel in toronto",
    "the best hotel of tokyo",
]

# "of" scores higher than "in" on its own, but only "in" leads to a likely suffix.
HOTEL_TABLE = [
    {"prefix": "", "dists": [[["the", 1.0]], [["best", 1.0]]]},
    {"prefix": "the", "dists": [[["best", 1.0]], [["hotel", 1.0]]]},
    {"prefix": "the best", "dists": [[["hotel", 1.0]], [["in", 0.5], ["of", 0.5]]]},
    {
        "prefix": "the best hotel",
        "dists": [
            [["of", 0.5], ["in", 0.4], ["the", 0.1]],
            # texas lowered from 0.9 to 0.85 so the row sums to 1.
            [["texas", 0.85], ["toronto", 0.05], ["tokyo", 0.1]],
        ],
    },
    {"prefix": "the best hotel in", "dists": [[["texas", 0.9], ["toronto", 0.1]], [["</s>", 1.0]]]},
    {"prefix": "the best hotel of", "dists": [[["tokyo", 1.0]], [["</s>", 1.0]]]},
    {"prefix": "the best hotel in texas", "dists": [[["</s>", 1.0]], [["</s>", 1.0]]]},
    {"prefix": "the best hotel in toronto", "dists": [[["</s>", 1.0]], [["</s>", 1.0]]]},
    {"prefix": "the best hotel of tokyo", "dists": [[["</s>", 1.0]], [["</s>", 1.0]]]},
]


@pytest.fixture
def hotel_paths(tmp_path):
    """Keyword file, vocabulary, table scorer and Trie for the in/of fork fixture."""
    keywords_path = tmp_path / "keywords.txt"
    keywords_path.write_text("\n".join(HOTEL_KEYWORDS) + "\n", encoding="utf-8")

    vocab = build_vocab(HOTEL_KEYWORDS, max_size=100)
    vocab_path = tmp_path / "vocab.txt"
    vocab.save(vocab_path)

    scorer_path = tmp_path / "table.jsonl"
    scorer_path.write_text("".join(json.dumps(record) + "\n" for record in HOTEL_TABLE), encoding="utf-8")

    trie_path = tmp_path / "library.trie"
    save_trie(trie_build(load_keyword_library(keywords_path, vocab), vocab_size=len(vocab)), trie_path)
    return {"keywords": keywords_path, "vocab": vocab_path, "scorer": scorer_path, "trie": trie_path}


@pytest.fixture
def hotel(hotel_paths):
    vocab = Vocabulary.load(hotel_paths["vocab"])
    trie = trie_build(load_keyword_library(hotel_paths["keywords"], vocab), vocab_size=len(vocab))
    scorer = table_scorer_load(hotel_paths["scorer"], vocab)
    return vocab, trie, scorer
