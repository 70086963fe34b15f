import logging
import time

from celery import shared_task
from django.db import transaction

from keywords.extension.models import EvaluationRun
from keywords.extension.utils.artifacts import build_system
from keywords.extension.utils.artifacts import cell_name
from keywords.extension.utils.artifacts import load_artifacts
from keywords.extension.utils.datasets import read_dataset
from keywords.extension.utils.evaluation import evaluate

logger = logging.getLogger(__name__)


@shared_task(bind=True)
def evaluate_cell(self, cell, paths, ks, per_beam=False, run_id=None):  # noqa: FBT002
    """
    Evaluate one configuration cell and return its report dict.

    When ``run_id`` is given the cell report is appended to that
    :class:`EvaluationRun`; the run completes once every cell has reported.
    """
    started = time.perf_counter()
    try:
        artifacts = load_artifacts(paths["trie"], paths["scorer"], paths.get("vocab"))
        dataset = read_dataset(paths["dataset"])
        report = evaluate(
            dataset,
            build_system(cell, artifacts),
            ks,
            name=cell_name(cell),
            trie=artifacts.trie,
            vocab=artifacts.vocab,
            rerun_per_k=per_beam,
        )
    except Exception as exc:
        logger.exception("Evaluation cell %s failed", cell_name(cell))
        run = EvaluationRun.objects.filter(pk=run_id).first() if run_id is not None else None
        if run is not None:
            run.mark_failed(exc)
        raise

    result = report.to_dict()
    if run_id is not None:
        _record_cell(run_id, result, time.perf_counter() - started)
    logger.info("Task %s evaluated %s", self.request.id, result["name"])
    return result


def _record_cell(run_id, result, elapsed):
    with transaction.atomic():
        run = EvaluationRun.objects.select_for_update().get(pk=run_id)
        systems = run.report.setdefault("systems", [])
        systems.append(result)
        run.query_count = result["query_count"]
        run.processing_time = (run.processing_time or 0.0) + elapsed
        if len(systems) >= run.manifest.get("config", {}).get("cell_count", 1) and run.status != "failed":
            run.status = "completed"
        run.save(update_fields=["report", "query_count", "processing_time", "status", "updated_at"])
