"""
Evaluate decoder configurations (and baselines) on a dataset.

Usage:
    python manage.py evaluate --trie library.trie --scorer scorer.json --dataset test.tsv \\
        --beams 5,10,15,20 --ngrams 1,2,3 --lambdas 0.4,0.6,0.8 --bm25 --merge

Every (n-gram order, lambda) pair is one configuration cell. ``--beams`` are
the K values; by default each system decodes once at the largest K.
Cells are evaluated concurrently within the ``--workers`` thread budget.
"""

import time

from keywords.core.exceptions import ConfigurationError
from keywords.core.utils import decode_threads
from keywords.core.utils import parse_list
from keywords.extension.management.base import ExtensionCommand
from keywords.extension.models import EvaluationRun
from keywords.extension.tasks import evaluate_cell
from keywords.extension.utils.artifacts import build_system
from keywords.extension.utils.artifacts import cell_name
from keywords.extension.utils.artifacts import decoder_cell
from keywords.extension.utils.artifacts import load_artifacts
from keywords.extension.utils.artifacts import require_file
from keywords.extension.utils.artifacts import resolve_vocab_path
from keywords.extension.utils.datasets import read_dataset
from keywords.extension.utils.evaluation import check_golden_in_trie
from keywords.extension.utils.evaluation import evaluate_grid
from keywords.extension.utils.manifest import RunManifest
from keywords.extension.utils.reporting import build_report
from keywords.extension.utils.reporting import format_table
from keywords.extension.utils.reporting import scenario_tables
from keywords.extension.utils.reporting import write_report


def _parse(value, cast, flag):
    try:
        parsed = parse_list(value, cast)
    except ValueError as exc:
        msg = f"invalid {flag}: {value}"
        raise ConfigurationError(msg) from exc
    if not parsed:
        msg = f"{flag} is empty"
        raise ConfigurationError(msg)
    return parsed


class Command(ExtensionCommand):
    help = "Compute recall@K and MAP@K for a grid of decoder configurations"

    def add_arguments(self, parser):
        parser.add_argument("--trie", required=True)
        parser.add_argument("--scorer", required=True)
        parser.add_argument("--vocab", help="Defaults to the vocabulary recorded in the trie manifest")
        parser.add_argument("--dataset", required=True, help="TSV: query<TAB>golden[ || golden][<TAB>scenario]")
        parser.add_argument("--beams", default="5,10,15,20", help="K values / beam sizes")
        parser.add_argument("--ngrams", default="1,2,3")
        parser.add_argument("--lambdas", default="0.4,0.6,0.8")
        parser.add_argument("--max-len", type=int)
        parser.add_argument("--alpha", type=float, help="Length normalization exponent")
        parser.add_argument("--bm25", action="store_true", help="Add the BM25 baseline row")
        parser.add_argument("--merge", action="store_true", help="Add a row merging every other system")
        parser.add_argument("--per-beam", action="store_true", help="Rerun each system at every K")
        parser.add_argument("--workers", type=int, help="Decode threads (default: TRIE_DECODE_THREADS)")
        parser.add_argument("--report", help="Write the JSON report here")
        parser.add_argument("--record", action="store_true", help="Store the run as an EvaluationRun")
        parser.add_argument("--name", default="evaluation")
        parser.add_argument("--queue", action="store_true", help="Dispatch cells as celery tasks")

    def build_cells(self, options):
        ks = _parse(options["beams"], int, "--beams")
        cells = []
        for ngram_order in _parse(options["ngrams"], int, "--ngrams"):
            for residual_weight in _parse(options["lambdas"], float, "--lambdas"):
                cell = decoder_cell(ngram_order, residual_weight, options["max_len"], options["alpha"])
                if cell not in cells:
                    cells.append(cell)
        if options["bm25"]:
            cells.append({"kind": "bm25"})
        if options["merge"]:
            if len(cells) < 2:  # noqa: PLR2004
                msg = "--merge needs at least two systems"
                raise ConfigurationError(msg)
            cells.append({"kind": "merge", "parts": list(cells)})
        return ks, cells

    def run(self, **options):
        ks, cells = self.build_cells(options)
        paths = {
            "trie": str(require_file(options["trie"])),
            "scorer": str(require_file(options["scorer"])),
            "vocab": str(resolve_vocab_path(options["trie"], options["vocab"])),
            "dataset": str(require_file(options["dataset"])),
        }
        manifest = RunManifest.for_inputs(
            "evaluate",
            {"ks": ks, "cells": cells, "cell_count": len(cells), "per_beam": options["per_beam"]},
            paths,
        )
        dataset = read_dataset(paths["dataset"])
        artifacts = load_artifacts(paths["trie"], paths["scorer"], paths["vocab"])
        check_golden_in_trie(dataset, artifacts.trie, artifacts.vocab)

        if options["queue"]:
            self.dispatch(cells, paths, ks, manifest, options)
            return

        run = self.start_run(manifest, dataset, options)
        started = time.perf_counter()
        workers = options["workers"] or decode_threads()
        try:
            reports = evaluate_grid(
                dataset,
                [(cell_name(cell), build_system(cell, artifacts)) for cell in cells],
                ks,
                workers=workers,
                rerun_per_k=options["per_beam"],
            )
        except Exception as exc:
            if run is not None:
                run.mark_failed(exc)
            raise
        elapsed = time.perf_counter() - started

        self.stdout.write(format_table(reports))
        if any(record.scenario for record in dataset):
            for scenario, table in scenario_tables(reports).items():
                self.stdout.write(f"\n[{scenario}]\n{table}")
        if options["report"]:
            write_report(options["report"], reports, manifest)
            manifest.write(options["report"])
        if run is not None:
            run.mark_completed(build_report(reports, manifest), elapsed)
            self.success(f"recorded run {run.pk}")

    def start_run(self, manifest, dataset, options):
        if not options["record"]:
            return None
        run = EvaluationRun.objects.create(name=options["name"], query_count=len(dataset), manifest=manifest.to_dict())
        run.mark_running()
        return run

    def dispatch(self, cells, paths, ks, manifest, options):
        run_id = None
        if options["record"]:
            run = EvaluationRun.objects.create(name=options["name"], manifest=manifest.to_dict())
            run.mark_running()
            run_id = str(run.pk)
        for cell in cells:
            task = evaluate_cell.delay(
                cell,
                paths,
                ks,
                per_beam=options["per_beam"],
                run_id=run_id,
            )
            self.success(f"Queued {cell_name(cell)} → task {task.id}")
