"""
Build the keyword Trie.

Usage:
    python manage.py build_trie --keywords keywords.txt --vocab vocab.txt --out library.trie
"""

from keywords.extension.management.base import ExtensionCommand
from keywords.extension.utils.artifacts import require_file
from keywords.extension.utils.manifest import RunManifest
from keywords.extension.utils.trie import load_keyword_library
from keywords.extension.utils.trie import save_trie
from keywords.extension.utils.trie import trie_build
from keywords.extension.utils.vocab import Vocabulary


class Command(ExtensionCommand):
    help = "Build and serialize the keyword Trie from a keyword file"

    def add_arguments(self, parser):
        parser.add_argument("--keywords", required=True, help="One keyword per line")
        parser.add_argument("--vocab", required=True)
        parser.add_argument("--out", required=True)

    def run(self, **options):
        keywords_path = require_file(options["keywords"])
        vocab_path = require_file(options["vocab"])
        vocab = Vocabulary.load(vocab_path)

        trie = trie_build(load_keyword_library(keywords_path, vocab), vocab_size=len(vocab))
        save_trie(trie, options["out"])
        RunManifest.for_inputs(
            "build_trie",
            {"vocab_size": len(vocab)},
            {"keywords": keywords_path, "vocab": vocab_path},
        ).write(options["out"])
        self.stdout.write(f"keywords: {trie.keyword_count}")
