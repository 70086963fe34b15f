"""
Generate the synthetic adversarial benchmark.

Usage:
    python manage.py synth --seed 7 --spec spec.json --out-dir data/synth

``spec.json`` holds the generator parameters, e.g. ``{"queries": 500}``.
"""

import json
from pathlib import Path

from keywords.core.exceptions import ConfigurationError
from keywords.extension.management.base import ExtensionCommand
from keywords.extension.serializers import SynthSpecSerializer
from keywords.extension.serializers import first_error
from keywords.extension.utils.artifacts import require_file
from keywords.extension.utils.manifest import RunManifest
from keywords.extension.utils.synth import SynthSpec
from keywords.extension.utils.synth import synth_generate


def load_spec(path):
    try:
        payload = json.loads(require_file(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        msg = f"{path}: invalid JSON ({exc.msg})"
        raise ConfigurationError(msg) from exc
    serializer = SynthSpecSerializer(data=payload)
    if not serializer.is_valid():
        msg = f"{path}: {first_error(serializer.errors)}"
        raise ConfigurationError(msg)
    return SynthSpec(**serializer.validated_data)


class Command(ExtensionCommand):
    help = "Write keywords.txt, train.tsv, test.tsv and vocab.txt for a seeded synthetic benchmark"

    def add_arguments(self, parser):
        parser.add_argument("--seed", type=int, required=True)
        parser.add_argument("--spec", required=True, help="JSON generator parameters")
        parser.add_argument("--out-dir", required=True)

    def run(self, **options):
        spec = load_spec(options["spec"])
        dataset = synth_generate(options["seed"], spec)
        paths = dataset.write(options["out_dir"])

        RunManifest.for_inputs(
            "synth",
            dict(SynthSpecSerializer(spec).data),
            {"spec": Path(options["spec"])},
            seed=options["seed"],
        ).write(Path(options["out_dir"]))
        for name, path in paths.items():
            self.stdout.write(f"{name}: {path}")
        self.success(f"queries: {len(dataset.test_records)}, keywords: {len(dataset.keywords)}")
