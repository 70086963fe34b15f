"""
Report Writers

A system comparison table (one row per system or configuration, recall@K
columns then MAP@K columns, values in percent) and a JSON report.
"""

import json
import logging
from pathlib import Path

import pandas as pd

logger = logging.getLogger(__name__)

MAP_CONVENTION = "AP@K divides by min(|golden|, K); MAP is the mean over queries"


def report_table(reports, index_name="system"):
    rows = []
    for report in reports:
        row = {f"R@{k}": 100.0 * value for k, value in report.recall.items()}
        row.update({f"MAP@{k}": 100.0 * value for k, value in report.map.items()})
        rows.append(pd.Series(row, name=report.name))
    frame = pd.DataFrame(rows)
    frame.index.name = index_name
    ordered = [column for column in frame.columns if column.startswith("R@")]
    ordered += [column for column in frame.columns if column.startswith("MAP@")]
    return frame[ordered]


def format_table(reports, index_name="system"):
    if not reports:
        return ""
    return report_table(reports, index_name).to_string(float_format=lambda value: f"{value:.2f}")


def scenario_tables(reports):
    """One table per scenario family, rows are systems."""
    grouped = {}
    for report in reports:
        for scenario, sub in report.by_scenario().items():
            grouped.setdefault(scenario, []).append(sub)
    return {scenario: format_table(subs) for scenario, subs in grouped.items()}


def build_report(reports, manifest=None):
    return {
        "map_convention": MAP_CONVENTION,
        "systems": [report.to_dict() for report in reports],
        "table": format_table(reports),
        "manifest": manifest.to_dict() if manifest is not None else None,
    }


def write_report(path, reports, manifest=None):
    payload = build_report(reports, manifest)
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    logger.info("Wrote report for %d systems to %s", len(reports), path)
    return payload
