"""
Keyword Trie

Prefix tree over tokenized keywords; the constrained search space of the
decoder. Keyword ends are explicit EOS edges, so a node is terminal iff it
has an EOS child.

Binary layout (little-endian)::

    b"TRIE" | version u32 | vocab size u32 | node records in preorder

    node record: child count u32, then per child (token id u32, offset u64)

where ``offset`` is the absolute byte position of the child's record.
"""

import logging
import struct
from collections.abc import Iterable
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from keywords.core.exceptions import TrieError
from keywords.core.exceptions import TrieFormatError

from .vocab import BOS_ID
from .vocab import EOS_ID
from .vocab import RESERVED_IDS
from .vocab import tokenize

logger = logging.getLogger(__name__)

MAGIC = b"TRIE"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sII")
_COUNT = struct.Struct("<I")
_EDGE = struct.Struct("<IQ")


class TrieNode:
    __slots__ = ("_array", "_ids", "children")

    def __init__(self):
        self.children: dict[int, TrieNode] = {}
        self._ids = None
        self._array = None

    @property
    def child_ids(self) -> tuple[int, ...]:
        if self._ids is not None:
            return self._ids
        return tuple(sorted(self.children))

    @property
    def is_terminal(self):
        return EOS_ID in self.children

    @property
    def child_array(self):
        if self._array is not None:
            return self._array
        return np.array(self.child_ids, dtype=np.int64)

    def _freeze(self):
        self._ids = tuple(sorted(self.children))
        self._array = np.array(self._ids, dtype=np.int64)


@dataclass(frozen=True)
class SuffixSet:
    """Allowed next tokens after a prefix; the dense mask is 0 on them, -inf elsewhere."""

    allowed: tuple[int, ...]
    vocab_size: int

    def __contains__(self, token_id):
        return token_id in self.allowed

    def __len__(self):
        return len(self.allowed)

    def mask(self, vocab_size=None):
        size = vocab_size if vocab_size is not None else self.vocab_size
        dense = np.full(size, -np.inf)
        if self.allowed:
            dense[list(self.allowed)] = 0.0
        return dense


class Trie:
    def __init__(self, vocab_size=0):
        self.root = TrieNode()
        self.keyword_count = 0
        self.vocab_size = vocab_size
        self.frozen = False

    def __len__(self):
        return self.keyword_count

    def insert(self, keyword_ids: Sequence[int]):
        if self.frozen:
            msg = "trie is frozen"
            raise TrieError(msg)
        if not keyword_ids:
            msg = "empty keyword"
            raise TrieError(msg)
        if any(token_id in (BOS_ID, EOS_ID) for token_id in keyword_ids):
            msg = "reserved token in keyword"
            raise TrieError(msg)
        if any(token_id < 0 for token_id in keyword_ids):
            msg = "negative token id in keyword"
            raise TrieError(msg)

        node = self.root
        for token_id in keyword_ids:
            node = node.children.setdefault(int(token_id), TrieNode())
        if EOS_ID not in node.children:
            node.children[EOS_ID] = TrieNode()
            self.keyword_count += 1
        self.vocab_size = max(self.vocab_size, max(keyword_ids) + 1)
        return self

    def freeze(self):
        for node in self.iter_nodes():
            node._freeze()  # noqa: SLF001
        self.frozen = True
        return self

    def iter_nodes(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(node.children.values())

    def node_at(self, prefix: Iterable[int]):
        node = self.root
        for token_id in prefix:
            node = node.children.get(token_id)
            if node is None:
                return None
        return node

    def suffixes(self, prefix: Iterable[int]) -> SuffixSet:
        node = self.node_at(prefix)
        allowed = node.child_ids if node is not None else ()
        return SuffixSet(allowed, self.vocab_size)

    def contains(self, keyword_ids: Iterable[int]) -> bool:
        node = self.node_at(keyword_ids)
        return node is not None and node.is_terminal

    def keywords(self):
        """All keyword id sequences, sorted by token-id sequence."""
        found = []
        stack = [(self.root, ())]
        while stack:
            node, path = stack.pop()
            for token_id, child in node.children.items():
                if token_id == EOS_ID:
                    found.append(path)
                else:
                    stack.append((child, (*path, token_id)))
        return sorted(found)

    def serialize(self) -> bytes:
        return trie_serialize(self)


def _count_keywords(trie):
    return sum(1 for node in trie.iter_nodes() if node.is_terminal)


def trie_insert(trie: Trie, keyword_ids: Sequence[int]) -> Trie:
    """Insert a keyword; re-inserting an existing keyword leaves the count unchanged."""
    return trie.insert(keyword_ids)


def trie_build(keywords: Iterable[Sequence[int]], vocab_size=None) -> Trie:
    trie = Trie(vocab_size or 0)
    for line_number, keyword_ids in enumerate(keywords, start=1):
        try:
            trie_insert(trie, keyword_ids)
        except TrieError as exc:
            msg = f"keyword {line_number}: {exc}"
            raise TrieError(msg) from exc
    if vocab_size is not None:
        if trie.vocab_size > vocab_size:
            msg = f"token id {trie.vocab_size - 1} exceeds vocabulary size {vocab_size}"
            raise TrieError(msg)
        trie.vocab_size = vocab_size
    trie.freeze()
    logger.info("Built trie with %d keywords", trie.keyword_count)
    return trie


def trie_suffixes(trie: Trie, prefix: Sequence[int]) -> SuffixSet:
    return trie.suffixes(prefix)


def trie_contains(trie: Trie, keyword_ids: Sequence[int]) -> bool:
    return trie.contains(keyword_ids)


def trie_serialize(trie: Trie) -> bytes:
    # First pass: preorder record offsets. Second pass: emit records in the same order.
    order = []
    offsets = {}
    position = _HEADER.size
    stack = [trie.root]
    while stack:
        node = stack.pop()
        offsets[id(node)] = position
        order.append(node)
        ids = node.child_ids
        position += _COUNT.size + _EDGE.size * len(ids)
        stack.extend(node.children[token_id] for token_id in reversed(ids))

    chunks = [_HEADER.pack(MAGIC, FORMAT_VERSION, trie.vocab_size)]
    for node in order:
        ids = node.child_ids
        chunks.append(_COUNT.pack(len(ids)))
        chunks.extend(_EDGE.pack(token_id, offsets[id(node.children[token_id])]) for token_id in ids)
    return b"".join(chunks)


def _unpack(fmt, data, offset, what):
    if offset + fmt.size > len(data):
        msg = f"truncated {what}"
        raise TrieFormatError(msg, offset)
    return fmt.unpack_from(data, offset)


def trie_deserialize(data: bytes, vocab_size=None) -> Trie:
    """Rebuild a frozen Trie; never returns a partially built tree."""
    magic, version, stored_vocab_size = _unpack(_HEADER, data, 0, "header")
    if magic != MAGIC:
        msg = "bad magic"
        raise TrieFormatError(msg, 0)
    if version != FORMAT_VERSION:
        msg = f"unsupported format version {version}"
        raise TrieFormatError(msg, 4)
    if vocab_size is not None and stored_vocab_size != vocab_size:
        msg = f"vocabulary size {stored_vocab_size} does not match {vocab_size}"
        raise TrieFormatError(msg, 8)

    trie = Trie(stored_vocab_size)
    consumed = _HEADER.size
    stack = [(trie.root, _HEADER.size, None)]
    while stack:
        node, offset, token_id = stack.pop()
        (count,) = _unpack(_COUNT, data, offset, "node record")
        if token_id == EOS_ID and count:
            msg = "EOS edge with children"
            raise TrieFormatError(msg, offset)
        consumed += _COUNT.size + _EDGE.size * count
        edge_offset = offset + _COUNT.size
        for _ in range(count):
            child_token, child_offset = _unpack(_EDGE, data, edge_offset, "edge")
            if child_token == BOS_ID or child_token >= max(stored_vocab_size, len(RESERVED_IDS)):
                msg = f"invalid token id {child_token}"
                raise TrieFormatError(msg, edge_offset)
            if child_token in node.children:
                msg = f"duplicate child {child_token}"
                raise TrieFormatError(msg, edge_offset)
            if child_offset <= offset or child_offset >= len(data):
                msg = f"child offset {child_offset} out of range"
                raise TrieFormatError(msg, edge_offset)
            child = TrieNode()
            node.children[child_token] = child
            stack.append((child, child_offset, child_token))
            edge_offset += _EDGE.size
    if consumed != len(data):
        msg = "node records do not cover the payload exactly"
        raise TrieFormatError(msg, consumed)

    trie.keyword_count = _count_keywords(trie)
    trie.freeze()
    return trie


def save_trie(trie: Trie, path):
    Path(path).write_bytes(trie_serialize(trie))
    logger.info("Saved trie with %d keywords to %s", trie.keyword_count, path)


def load_trie(path, vocab_size=None) -> Trie:
    trie = trie_deserialize(Path(path).read_bytes(), vocab_size=vocab_size)
    logger.info("Loaded trie with %d keywords from %s", trie.keyword_count, path)
    return trie


def load_keyword_library(path, vocab):
    """Read a keyword file (one keyword per line, blank lines skipped) into id sequences."""
    keywords = []
    with Path(path).open(encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            keyword_ids = tokenize(line, vocab)
            if any(token_id in (BOS_ID, EOS_ID) for token_id in keyword_ids):
                msg = f"{path}:{line_number}: reserved token in keyword"
                raise TrieError(msg)
            keywords.append(keyword_ids)
    return keywords
