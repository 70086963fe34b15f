"""
Run Manifests

Every artifact-producing command writes ``<out>.manifest.json`` next to its
output: the command, its fully resolved configuration, the digests of its
inputs, the seed and the tool version. Two runs whose manifests match
(timestamp aside) produce identical outputs.
"""

import json
import logging
from dataclasses import asdict
from dataclasses import dataclass
from dataclasses import field
from pathlib import Path

from django.conf import settings
from django.utils import timezone

from keywords.core.utils import file_digest

logger = logging.getLogger(__name__)

MANIFEST_SUFFIX = ".manifest.json"


@dataclass
class RunManifest:
    command: str
    config: dict
    inputs: dict = field(default_factory=dict)
    seed: int | None = None
    created_at: str = field(default_factory=lambda: timezone.now().isoformat())
    version: str = field(default_factory=lambda: settings.EXTENSION_ARTIFACT_VERSION)

    @classmethod
    def for_inputs(cls, command, config, inputs, seed=None):
        digests = {
            name: {"path": str(path), "sha256": file_digest(path)}
            for name, path in inputs.items()
            if path is not None
        }
        return cls(command, config, digests, seed)

    def to_dict(self):
        return asdict(self)

    def comparable(self):
        """Everything except the timestamp."""
        payload = self.to_dict()
        payload.pop("created_at")
        return payload

    def write(self, out_path):
        path = manifest_path(out_path)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
        logger.info("Wrote manifest %s", path)
        return path

    @classmethod
    def read(cls, path):
        return cls(**json.loads(Path(path).read_text(encoding="utf-8")))


def manifest_path(out_path):
    out_path = Path(out_path)
    return out_path.with_name(out_path.name + MANIFEST_SUFFIX)
