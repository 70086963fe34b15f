"""
Vocabulary and Tokenization

Token/id mapping shared by the Trie, the scorers, the decoder and the BM25
baseline. Tokenization is lowercase + whitespace split; words outside the
vocabulary map to UNK.
"""

import logging
from collections import Counter
from collections.abc import Iterable
from collections.abc import Sequence
from dataclasses import dataclass
from dataclasses import field
from pathlib import Path

from keywords.core.exceptions import VocabularyError

logger = logging.getLogger(__name__)

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"
RESERVED_TOKENS = (BOS, EOS, UNK)

BOS_ID = 0
EOS_ID = 1
UNK_ID = 2
RESERVED_IDS = frozenset((BOS_ID, EOS_ID, UNK_ID))


@dataclass(frozen=True)
class Vocabulary:
    """
    Immutable bijection between token strings and ids.

    Reserved tokens always occupy ids 0 (BOS), 1 (EOS) and 2 (UNK).
    """

    tokens: tuple[str, ...]
    index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.tokens[:3] != RESERVED_TOKENS:
            msg = "reserved tokens must occupy ids 0-2"
            raise VocabularyError(msg)
        index = {token: token_id for token_id, token in enumerate(self.tokens)}
        if len(index) != len(self.tokens):
            msg = "duplicate token in vocabulary"
            raise VocabularyError(msg)
        object.__setattr__(self, "index", index)

    def __len__(self):
        return len(self.tokens)

    def __contains__(self, token):
        return token in self.index

    def id_of(self, token):
        return self.index.get(token, UNK_ID)

    def token_of(self, token_id):
        if not 0 <= token_id < len(self.tokens):
            msg = f"unknown token id {token_id}"
            raise VocabularyError(msg)
        return self.tokens[token_id]

    def save(self, path):
        Path(path).write_text("".join(f"{token}\n" for token in self.tokens), encoding="utf-8")
        logger.info("Saved vocabulary of %d tokens to %s", len(self), path)

    @classmethod
    def load(cls, path):
        text = Path(path).read_text(encoding="utf-8")
        tokens = tuple(line for line in text.split("\n") if line)
        if len(tokens) < len(RESERVED_TOKENS) or tokens[:3] != RESERVED_TOKENS:
            msg = f"{path}: reserved tokens must sit on lines 0-2"
            raise VocabularyError(msg)
        logger.info("Loaded vocabulary of %d tokens from %s", len(tokens), path)
        return cls(tokens)


def split_words(text):
    return text.lower().split()


def build_vocab(corpus_lines: Sequence[str], max_size: int) -> Vocabulary:
    """
    Build a vocabulary from raw text lines.

    Tokens are ordered by descending frequency, ties broken lexicographically,
    after the reserved tokens. The result holds at most ``max_size`` tokens
    (reserved tokens included).
    """
    if not corpus_lines:
        msg = "empty corpus"
        raise VocabularyError(msg)
    if max_size < len(RESERVED_TOKENS):
        msg = f"max_size must be at least {len(RESERVED_TOKENS)}"
        raise VocabularyError(msg)

    counts = Counter()
    for line in corpus_lines:
        counts.update(word for word in split_words(line) if word not in RESERVED_TOKENS)

    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    kept = [token for token, _ in ranked[: max_size - len(RESERVED_TOKENS)]]
    if len(kept) < len(ranked):
        logger.info("Vocabulary truncated: %d of %d distinct words kept", len(kept), len(ranked))
    return Vocabulary((*RESERVED_TOKENS, *kept))


def tokenize(text: str, vocab: Vocabulary) -> list[int]:
    return [vocab.id_of(word) for word in split_words(text)]


def detokenize(ids: Iterable[int], vocab: Vocabulary) -> str:
    words = []
    for token_id in ids:
        token = vocab.token_of(token_id)
        if token_id in (BOS_ID, EOS_ID):
            continue
        words.append(token)
    return " ".join(words)
