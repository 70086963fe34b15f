"""
Browse recorded evaluation runs.

Usage:
    python manage.py runs
    python manage.py runs --show 3f0c...
    python manage.py runs --archive 3f0c...
"""

import json

from django.core.exceptions import ValidationError as DjangoValidationError

from keywords.core.exceptions import ConfigurationError
from keywords.extension.management.base import ExtensionCommand
from keywords.extension.models import EvaluationRun
from keywords.extension.serializers import EvaluationRunSerializer


def get_run(run_id):
    try:
        return EvaluationRun.objects.get(pk=run_id)
    except (EvaluationRun.DoesNotExist, DjangoValidationError) as exc:
        msg = f"no evaluation run {run_id}"
        raise ConfigurationError(msg) from exc


class Command(ExtensionCommand):
    help = "List, show, archive or restore recorded evaluation runs"

    def add_arguments(self, parser):
        actions = parser.add_mutually_exclusive_group()
        actions.add_argument("--show", metavar="ID", help="Print one run as JSON")
        actions.add_argument("--archive", metavar="ID", help="Hide a run from the listing")
        actions.add_argument("--restore", metavar="ID", help="Bring an archived run back")
        parser.add_argument("--all", action="store_true", help="Include archived runs")

    def run(self, **options):
        if options["show"]:
            payload = EvaluationRunSerializer(get_run(options["show"])).data
            self.stdout.write(json.dumps(payload, indent=2, sort_keys=True, default=str))
            return
        for action in ("archive", "restore"):
            if options[action]:
                run = get_run(options[action])
                try:
                    getattr(run, action)()
                except DjangoValidationError as exc:
                    msg = f"{run.name}: {exc.message_dict['non_field_errors'][0]}"
                    raise ConfigurationError(msg) from exc
                self.success(f"{action}d run {run.pk}")
                return

        runs = EvaluationRun.objects.all() if options["all"] else EvaluationRun.objects.unarchived()
        if not runs.exists():
            self.stdout.write(self.style.WARNING("no recorded runs"))
            return
        for run in runs:
            time = f"{run.processing_time:.2f}s" if run.processing_time is not None else "-"
            self.stdout.write(f"{run.pk}\t{run.name}\t{run.status}\t{run.query_count}\t{time}")
