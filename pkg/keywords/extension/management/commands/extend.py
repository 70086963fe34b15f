"""
Extend queries into ranked library keywords.

Usage:
    python manage.py extend --trie library.trie --scorer scorer.json --query "lone wolf discount"
    python manage.py extend --trie library.trie --scorer scorer.json --query "hotel" --query "wolf" --workers 4

Prints one ``score<TAB>keyword`` line per output, best first. With several
queries each block is headed by ``[query]``.
"""

from keywords.core.utils import decode_threads
from keywords.extension.management.base import ExtensionCommand
from keywords.extension.utils.artifacts import default_beam_config
from keywords.extension.utils.artifacts import load_artifacts
from keywords.extension.utils.decoder import extend_queries
from keywords.extension.utils.vocab import detokenize
from keywords.extension.utils.vocab import tokenize


class Command(ExtensionCommand):
    help = "Run Trie-constrained lookahead beam search for one or more queries"

    def add_arguments(self, parser):
        parser.add_argument("--trie", required=True)
        parser.add_argument("--scorer", required=True)
        parser.add_argument("--vocab", help="Defaults to the vocabulary recorded in the trie manifest")
        parser.add_argument("--query", required=True, action="append", help="Repeat to decode several queries")
        parser.add_argument("--beam", type=int)
        parser.add_argument("--ngram", type=int)
        parser.add_argument("--lambda", dest="residual_weight", type=float)
        parser.add_argument("--max-len", type=int)
        parser.add_argument("--alpha", type=float, help="Length normalization exponent")
        parser.add_argument("--plain", action="store_true", help="Disable lookahead (lambda = 1)")
        parser.add_argument("--workers", type=int, help="Decode threads (default: TRIE_DECODE_THREADS)")

    def run(self, **options):
        config = default_beam_config(
            beam_size=options["beam"],
            ngram_order=options["ngram"],
            residual_weight=options["residual_weight"],
            max_length=options["max_len"],
            length_norm_alpha=options["alpha"],
        )
        if options["plain"]:
            config = config.plain()

        artifacts = load_artifacts(options["trie"], options["scorer"], options["vocab"])
        queries = options["query"]
        results = extend_queries(
            [tokenize(query, artifacts.vocab) for query in queries],
            artifacts.trie,
            artifacts.scorer,
            config,
            workers=options["workers"] or decode_threads(),
        )
        for position, (query, result) in enumerate(zip(queries, results, strict=True)):
            if len(queries) > 1:
                if position:
                    self.stdout.write("")
                self.stdout.write(f"[{query}]")
            if not result.outputs:
                self.stdout.write(self.style.WARNING("no keyword finished within the length limit"))
            for output in result.outputs:
                self.stdout.write(f"{output.original_score:.6f}\t{detokenize(output.tokens, artifacts.vocab)}")
