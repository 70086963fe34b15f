"""
Build the token vocabulary from keyword libraries and pair files.

Usage:
    python manage.py build_vocab --corpus keywords.txt --corpus train.tsv --out vocab.txt
"""

from pathlib import Path

from keywords.extension.management.base import ExtensionCommand
from keywords.extension.utils.artifacts import require_file
from keywords.extension.utils.manifest import RunManifest
from keywords.extension.utils.vocab import build_vocab


class Command(ExtensionCommand):
    help = "Build a vocabulary (one token per line) from raw text files"

    def add_arguments(self, parser):
        parser.add_argument("--corpus", action="append", required=True, help="Text file; repeatable")
        parser.add_argument("--max-size", type=int, default=50_000, help="Vocabulary size cap, reserved tokens included")
        parser.add_argument("--out", required=True)

    def run(self, **options):
        lines = []
        for path in options["corpus"]:
            lines.extend(require_file(path).read_text(encoding="utf-8").splitlines())
        vocab = build_vocab([line for line in lines if line.strip()], options["max_size"])
        vocab.save(options["out"])

        RunManifest.for_inputs(
            "build_vocab",
            {"max_size": options["max_size"]},
            {f"corpus_{position}": Path(path) for position, path in enumerate(options["corpus"])},
        ).write(options["out"])
        self.success(f"tokens: {len(vocab)}")
