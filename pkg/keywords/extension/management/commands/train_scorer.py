"""
Train the count n-gram scorer on query/keyword pairs.

Usage:
    python manage.py train_scorer --pairs train.tsv --vocab vocab.txt --order 3 --beta 1.0 --out scorer.json
"""

from dataclasses import asdict

from django.conf import settings

from keywords.core.exceptions import ConfigurationError
from keywords.core.utils import parse_list
from keywords.extension.management.base import ExtensionCommand
from keywords.extension.utils.artifacts import require_file
from keywords.extension.utils.datasets import read_pairs
from keywords.extension.utils.manifest import RunManifest
from keywords.extension.utils.scorer import CountScorerConfig
from keywords.extension.utils.scorer import count_scorer_train
from keywords.extension.utils.vocab import Vocabulary
from keywords.extension.utils.vocab import tokenize


def default_weights(order):
    configured = tuple(settings.COUNT_SCORER_DEFAULTS["interpolation_weights"])
    if len(configured) == order:
        return configured
    raw = [position**2 for position in range(1, order + 1)]
    return tuple(value / sum(raw) for value in raw)


class Command(ExtensionCommand):
    help = "Train a count n-gram scorer with a copy bonus from a pairs TSV"

    def add_arguments(self, parser):
        defaults = settings.COUNT_SCORER_DEFAULTS
        parser.add_argument("--pairs", required=True, help="TSV: query<TAB>keyword")
        parser.add_argument("--vocab", required=True)
        parser.add_argument("--order", type=int, default=defaults["markov_order"], help="Markov order")
        parser.add_argument("--beta", type=float, default=defaults["copy_bonus_beta"], help="Copy bonus")
        parser.add_argument("--weights", help="Comma separated interpolation weights, lowest order first")
        parser.add_argument("--prediction-order", type=int, help="Future positions predicted (default: --order)")
        parser.add_argument("--future-top-k", type=int, default=defaults["future_top_k"])
        parser.add_argument("--out", required=True)

    def run(self, **options):
        pairs_path = require_file(options["pairs"])
        vocab_path = require_file(options["vocab"])
        vocab = Vocabulary.load(vocab_path)

        order = options["order"]
        try:
            weights = tuple(parse_list(options["weights"], float)) if options["weights"] else default_weights(order)
        except ValueError as exc:
            msg = f"invalid --weights: {options['weights']}"
            raise ConfigurationError(msg) from exc
        config = CountScorerConfig(
            markov_order=order,
            interpolation_weights=weights,
            copy_bonus_beta=options["beta"],
            floor_logprob=settings.COUNT_SCORER_DEFAULTS["floor_logprob"],
            future_top_k=options["future_top_k"],
            prediction_order=options["prediction_order"] or order,
        )

        pairs = [(tokenize(query, vocab), tokenize(keyword, vocab)) for query, keyword in read_pairs(pairs_path)]
        scorer = count_scorer_train(pairs, config, vocab_size=len(vocab))
        scorer.save(options["out"])

        RunManifest.for_inputs(
            "train_scorer",
            {**asdict(config), "interpolation_weights": list(config.interpolation_weights)},
            {"pairs": pairs_path, "vocab": vocab_path},
        ).write(options["out"])
        self.success(f"n-grams: {len(scorer.ngram_counts)}")
