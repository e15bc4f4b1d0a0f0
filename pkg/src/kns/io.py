"""File ingestion and artifact writers.

Two input formats are supported. ``delimited``: one point per line, fields
split on commas or whitespace, with an optional header line auto-detected
by a non-numeric first row. ``arcene``: whitespace-separated integers, one
instance per line, equal field counts, trailing whitespace tolerated (the
layout of the UCI mass-spectrometry matrices). Parse errors name the
offending 1-based line number.

All floats in artifacts are rendered with %.17g so a rewrite of the same
result is byte-identical and values survive a parse round trip exactly.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from kns.detector import ScoreReport
from kns.errors import InvalidDataError, ParameterError
from kns.section_space import as_data_matrix

FORMATS = ("delimited", "arcene")


def _split(line: str) -> list[str]:
    return line.split(",") if "," in line else line.split()


def _is_numeric_row(fields: list[str]) -> bool:
    try:
        for f in fields:
            float(f)
    except ValueError:
        return False
    return True


def ingest_matrix(path, format: str = "delimited") -> np.ndarray:
    """Parse a matrix file into the validated (n, m) float64 contract."""
    if format not in FORMATS:
        raise ParameterError(f"unknown format {format!r}; choose from {FORMATS}")
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InvalidDataError(f"cannot read {path}: {exc}") from exc

    rows: list[list[float]] = []
    width: int | None = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = _split(line.strip())
        if format == "delimited" and lineno == 1 and not _is_numeric_row(fields):
            continue  # header line
        values = []
        for col, f in enumerate(fields, start=1):
            try:
                values.append(float(int(f)) if format == "arcene" else float(f))
            except ValueError:
                raise InvalidDataError(
                    f"{path}: line {lineno}, field {col}: "
                    f"{f!r} is not a valid {'integer' if format == 'arcene' else 'number'}"
                ) from None
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise InvalidDataError(
                f"{path}: line {lineno}: expected {width} fields, got {len(values)}"
            )
        rows.append(values)
    if not rows:
        raise InvalidDataError(f"{path}: no data rows")
    try:
        return as_data_matrix(rows)
    except InvalidDataError as exc:
        raise InvalidDataError(f"{path}: {exc}") from exc


# --------------------------------------------------------------------------
# artifact writers / readers


def fmt(value: float) -> str:
    return format(float(value), ".17g")


def write_config_header(fh, config: dict) -> None:
    fh.write("# config: " + json.dumps(config, sort_keys=True) + "\n")


def write_scores(path, report: ScoreReport, top_n: int, config: dict) -> Path:
    """Ranked score table: rank, 1-based point ID, score, top-n flag."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    in_top = set(report.top_ids(min(top_n, report.n)).tolist())
    with path.open("w") as fh:
        write_config_header(fh, config)
        fh.write("rank,point_id,si,top\n")
        for rank, pid in enumerate(report.ranking.tolist(), start=1):
            fh.write(f"{rank},{pid},{fmt(report.si[pid - 1])},{int(pid in in_top)}\n")
    return path


def read_ranking(path) -> tuple[list[int], dict]:
    """Read back a score table; returns (ranked point IDs, embedded config)."""
    path = Path(path)
    config: dict = {}
    ranking: list[int] = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        if line.startswith("# config: "):
            config = json.loads(line[len("# config: ") :])
            continue
        if line.startswith("#") or not line.strip():
            continue
        if line.startswith("rank,"):
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise InvalidDataError(f"{path}: line {lineno}: expected 4 fields")
        ranking.append(int(parts[1]))
    if not ranking:
        raise InvalidDataError(f"{path}: no ranking rows")
    return ranking, config


def write_pr_table(path, recalls: Iterable[float], precisions: Iterable[float], config: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as fh:
        write_config_header(fh, config)
        fh.write("recall,precision\n")
        for r, p in zip(recalls, precisions):
            fh.write(f"{fmt(r)},{fmt(p)}\n")
    return path


def write_delimited(path, header: Sequence[str], rows: Iterable[Sequence], config: dict | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as fh:
        if config is not None:
            write_config_header(fh, config)
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) if isinstance(v, float) else str(v) for v in row) + "\n")
    return path
