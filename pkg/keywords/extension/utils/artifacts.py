"""
Artifact Loading and System Cells

Loads the vocabulary, Trie and scorer a command or task works on, and turns
an evaluation *cell* (a small JSON-able dict) into a runnable system. Cells
travel unchanged through celery, so both the inline and the queued
evaluation paths build systems the same way.
"""

import json
import logging
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

from django.conf import settings

from keywords.core.exceptions import ConfigurationError

from .bm25 import Bm25Params
from .bm25 import bm25_build
from .decoder import BeamConfig
from .evaluation import bm25_system
from .evaluation import decoder_system
from .evaluation import merged_system
from .manifest import manifest_path
from .scorer import load_scorer
from .trie import load_trie
from .vocab import Vocabulary

logger = logging.getLogger(__name__)


def require_file(path):
    if path is None or not Path(path).is_file():
        msg = f"file not found: {path}"
        raise ConfigurationError(msg)
    return Path(path)


def resolve_vocab_path(trie_path, vocab_path=None):
    """Explicit vocabulary path, or the one recorded in the Trie's manifest."""
    if vocab_path:
        return require_file(vocab_path)
    recorded = manifest_path(trie_path)
    if recorded.is_file():
        inputs = json.loads(recorded.read_text(encoding="utf-8")).get("inputs", {})
        if "vocab" in inputs:
            return require_file(inputs["vocab"]["path"])
    msg = f"no vocabulary given and none recorded for {trie_path}"
    raise ConfigurationError(msg)


@dataclass(frozen=True)
class Artifacts:
    vocab: Vocabulary
    trie: object
    scorer: object

    @cached_property
    def bm25_index(self):
        documents = [[self.vocab.token_of(token_id) for token_id in keyword] for keyword in self.trie.keywords()]
        return bm25_build(documents, Bm25Params.from_settings(settings.BM25_PARAMS))


def load_artifacts(trie_path, scorer_path, vocab_path=None) -> Artifacts:
    trie_path = require_file(trie_path)
    vocab = Vocabulary.load(resolve_vocab_path(trie_path, vocab_path))
    trie = load_trie(trie_path, vocab_size=len(vocab))
    scorer = load_scorer(
        require_file(scorer_path),
        vocab,
        floor_logprob=settings.COUNT_SCORER_DEFAULTS["floor_logprob"],
    )
    return Artifacts(vocab, trie, scorer)


def default_beam_config(**overrides):
    values = {
        "beam_size": settings.EXTENSION_BEAM_SIZE,
        "ngram_order": settings.EXTENSION_NGRAM_ORDER,
        "residual_weight": settings.EXTENSION_RESIDUAL_WEIGHT,
        "max_length": settings.EXTENSION_MAX_LENGTH,
        "length_norm_alpha": settings.EXTENSION_LENGTH_NORM_ALPHA,
    }
    values.update({key: value for key, value in overrides.items() if value is not None})
    return BeamConfig(**values).validate()


def decoder_cell(ngram_order, residual_weight, max_length=None, length_norm_alpha=None):
    # λ has no effect without a future position to look at.
    if ngram_order == 1:
        residual_weight = 1.0
    config = default_beam_config(
        ngram_order=ngram_order,
        residual_weight=residual_weight,
        max_length=max_length,
        length_norm_alpha=length_norm_alpha,
    )
    cell = {"kind": "decoder", **config.to_dict()}
    cell.pop("beam_size")
    return cell


def cell_name(cell):
    if cell["kind"] == "bm25":
        return "BM25"
    if cell["kind"] == "merge":
        return "Merged(" + " + ".join(cell_name(part) for part in cell["parts"]) + ")"
    if cell["residual_weight"] == 1.0:
        return f"n={cell['ngram_order']} plain"
    return f"n={cell['ngram_order']} lambda={cell['residual_weight']:g}"


def build_system(cell, artifacts: Artifacts):
    kind = cell["kind"]
    if kind == "bm25":
        return bm25_system(artifacts.bm25_index)
    if kind == "merge":
        return merged_system([build_system(part, artifacts) for part in cell["parts"]])
    if kind == "decoder":
        config = BeamConfig(
            beam_size=1,
            ngram_order=cell["ngram_order"],
            residual_weight=cell["residual_weight"],
            max_length=cell["max_length"],
            length_norm_alpha=cell["length_norm_alpha"],
        ).validate()
        return decoder_system(artifacts.trie, artifacts.scorer, artifacts.vocab, config)
    msg = f"unknown evaluation cell kind {kind!r}"
    raise ConfigurationError(msg)
