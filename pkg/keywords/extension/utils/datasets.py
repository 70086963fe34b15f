"""
Dataset Files

Readers and writers for the TSV inputs of the engine:

* pairs file: ``query<TAB>keyword``, one training pair per line
* dataset file: ``query<TAB>golden[ || golden ...][<TAB>scenario]``
"""

import csv
import logging
from dataclasses import dataclass
from pathlib import Path

import pandas as pd

from keywords.core.exceptions import DatasetError

logger = logging.getLogger(__name__)

GOLDEN_SEPARATOR = " || "
PAIR_COLUMNS = ["query", "keyword"]
DATASET_COLUMNS = ["query", "golden", "scenario"]


@dataclass(frozen=True)
class QueryRecord:
    record_id: int
    query: str
    golden: tuple[str, ...]
    scenario: str | None = None

    def __post_init__(self):
        if not self.golden:
            msg = "empty golden set"
            raise DatasetError(msg, line=self.record_id)


def normalize_keyword(text):
    return " ".join(text.lower().split())


def _read_tsv(path, names):
    try:
        frame = pd.read_csv(
            path,
            sep="\t",
            header=None,
            names=names,
            dtype=str,
            quoting=csv.QUOTE_NONE,
            keep_default_na=False,
            skip_blank_lines=False,
            encoding="utf-8",
        )
    except pd.errors.EmptyDataError:
        return pd.DataFrame(columns=names)
    except pd.errors.ParserError as exc:
        msg = f"{path}: malformed TSV ({exc})"
        raise DatasetError(msg) from exc
    return frame.fillna("")


def _data_lines(frame):
    """Yield ``(file line number, row)`` for every non-blank line."""
    for index, row in zip(frame.index, frame.itertuples(index=False), strict=True):
        if any(value.strip() for value in row):
            yield index + 1, row


def read_pairs(path) -> list[tuple[str, str]]:
    frame = _read_tsv(path, PAIR_COLUMNS)
    pairs = []
    for line_number, row in _data_lines(frame):
        query, keyword = row.query.strip(), normalize_keyword(row.keyword)
        if not query or not keyword:
            msg = f"{path}: expected 'query<TAB>keyword'"
            raise DatasetError(msg, line=line_number)
        pairs.append((query, keyword))
    logger.info("Read %d training pairs from %s", len(pairs), path)
    return pairs


def write_pairs(path, pairs):
    frame = pd.DataFrame(list(pairs), columns=PAIR_COLUMNS)
    frame.to_csv(path, sep="\t", header=False, index=False, quoting=csv.QUOTE_NONE, lineterminator="\n")


def read_dataset(path) -> list[QueryRecord]:
    frame = _read_tsv(path, DATASET_COLUMNS)
    records = []
    for record_id, (line_number, row) in enumerate(_data_lines(frame), start=1):
        goldens = []
        for part in row.golden.split(GOLDEN_SEPARATOR.strip()):
            keyword = normalize_keyword(part)
            if keyword and keyword not in goldens:
                goldens.append(keyword)
        if not row.query.strip() or not goldens:
            msg = f"{path}: expected 'query<TAB>golden keywords'"
            raise DatasetError(msg, line=line_number)
        records.append(QueryRecord(record_id, row.query.strip(), tuple(goldens), row.scenario.strip() or None))
    if not records:
        msg = f"{path}: empty dataset"
        raise DatasetError(msg)
    logger.info("Read %d query records from %s", len(records), path)
    return records


def write_dataset(path, records):
    rows = [
        (record.query, GOLDEN_SEPARATOR.join(record.golden), record.scenario or "")
        for record in records
    ]
    frame = pd.DataFrame(rows, columns=DATASET_COLUMNS)
    if not frame["scenario"].astype(bool).any():
        frame = frame.drop(columns="scenario")
    frame.to_csv(path, sep="\t", header=False, index=False, quoting=csv.QUOTE_NONE, lineterminator="\n")


def write_keywords(path, keywords):
    Path(path).write_text("".join(f"{keyword}\n" for keyword in keywords), encoding="utf-8")
