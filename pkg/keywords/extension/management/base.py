"""
Shared plumbing for the engine's management commands.

Exit codes: 0 success, 2 usage/configuration/parse errors (including missing
files), 3 data validation failures.
"""

import logging
import time

from django.core.management.base import BaseCommand
from django.core.management.base import CommandError

from keywords.core.exceptions import EvaluationError
from keywords.core.exceptions import KeywordExtensionError

logger = logging.getLogger(__name__)

USAGE_ERROR = 2
DATA_ERROR = 3


class ExtensionCommand(BaseCommand):
    """Subclasses implement :meth:`run`; domain errors become ``CommandError``s."""

    def handle(self, *args, **options):
        started = time.perf_counter()
        try:
            self.run(**options)
        except EvaluationError as exc:
            raise CommandError(str(exc), returncode=DATA_ERROR) from exc
        except KeywordExtensionError as exc:
            raise CommandError(str(exc), returncode=USAGE_ERROR) from exc
        except FileNotFoundError as exc:
            raise CommandError(f"file not found: {exc.filename}", returncode=USAGE_ERROR) from exc
        logger.debug("%s finished in %.2fs", self.__module__.rsplit(".", 1)[-1], time.perf_counter() - started)

    def run(self, **options):
        raise NotImplementedError

    def success(self, message):
        self.stdout.write(self.style.SUCCESS(message))
