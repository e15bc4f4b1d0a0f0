"""Precision/recall measurement protocol and the benchmark driver.

Rankings are walked top-down; each time a true outlier is retrieved the
pair (recall = found/total, precision = found/rank) is recorded, giving one
curve point per outlier. The best F-measure is the maximum of 2PR/(P+R)
over those steps. Scoring time is process CPU time of the scoring call
alone (generation and I/O excluded); algorithms run sequentially so the
measurements do not contaminate each other.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from kns.datagen import LabeledDataset
from kns.detector import ScoreReport
from kns.errors import ParameterError


@dataclass(frozen=True)
class PRCurve:
    """One (recall, precision) point per retrieved true outlier."""

    recalls: np.ndarray
    precisions: np.ndarray
    best_f: float
    best_cutoff: int

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.recalls.tolist(), self.precisions.tolist()))

    @property
    def final_precision(self) -> float:
        """Precision at full recall (the last retrieved outlier's step)."""
        return float(self.precisions[-1])


def f_measure(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def pr_curve(ranking: Sequence[int], truth) -> PRCurve:
    """Walk a ranking and record precision at each recall step.

    ``ranking`` lists 1-based point IDs best-first; ``truth`` is the set of
    true outlier IDs, all of which must appear in the ranking.
    """
    truth_set = {int(t) for t in np.asarray(list(truth)).ravel()}
    if not truth_set:
        raise ParameterError("truth set must not be empty")
    if not truth_set <= {int(p) for p in ranking}:
        raise ParameterError("every true outlier ID must appear in the ranking")
    total = len(truth_set)
    recalls, precisions = [], []
    found = 0
    best_f, best_cutoff = 0.0, 0
    for rank, pid in enumerate(ranking, start=1):
        if int(pid) in truth_set:
            found += 1
            r = found / total
            p = found / rank
            recalls.append(r)
            precisions.append(p)
            f = f_measure(p, r)
            if f > best_f:
                best_f, best_cutoff = f, rank
            if found == total:
                break
    return PRCurve(
        recalls=np.asarray(recalls),
        precisions=np.asarray(precisions),
        best_f=best_f,
        best_cutoff=best_cutoff,
    )


def precision_recall_at(report: ScoreReport, truth, top_n: int) -> tuple[float, float, float]:
    """(precision, recall, F) of the report's top ``top_n`` against truth."""
    truth_set = {int(t) for t in np.asarray(list(truth)).ravel()}
    if not truth_set:
        raise ParameterError("truth set must not be empty")
    hits = len(truth_set.intersection(report.top_ids(top_n).tolist()))
    p = hits / top_n if top_n else 0.0
    r = hits / len(truth_set)
    return p, r, f_measure(p, r)


@dataclass(frozen=True)
class OverlapReport:
    """Pairwise top-n agreement between named rankings."""

    top_n: int
    top_sets: dict[str, list[int]]
    pairwise: dict[tuple[str, str], int]
    common: list[int]


def top_n_overlap(reports: Mapping[str, ScoreReport], top_n: int) -> OverlapReport:
    """Sizes of pairwise top-n intersections plus the IDs common to all."""
    for name, report in reports.items():
        if top_n > report.n:
            raise ParameterError(
                f"top_n = {top_n} exceeds point count {report.n} of {name!r}"
            )
    tops = {name: report.top_ids(top_n).tolist() for name, report in reports.items()}
    names = list(tops)
    pairwise = {
        (a, b): len(set(tops[a]) & set(tops[b]))
        for i, a in enumerate(names)
        for b in names[i + 1 :]
    }
    common: set[int] = set(tops[names[0]]) if names else set()
    for name in names[1:]:
        common &= set(tops[name])
    return OverlapReport(
        top_n=top_n, top_sets=tops, pairwise=pairwise, common=sorted(common)
    )


# --------------------------------------------------------------------------
# benchmark driver

Scorer = Callable[[np.ndarray], ScoreReport]


@dataclass(frozen=True)
class AlgoResult:
    curve: PRCurve | None
    cpu_seconds: float
    error: str | None = None


@dataclass(frozen=True)
class EvalReport:
    """Per-algorithm curves and CPU timings on one dataset instance."""

    fingerprint: dict
    results: dict[str, AlgoResult] = field(default_factory=dict)

    def best_f(self, algo: str) -> float:
        result = self.results[algo]
        if result.curve is None:
            return 0.0
        return result.curve.best_f


def benchmark(dataset: LabeledDataset, scorers: Mapping[str, Scorer]) -> EvalReport:
    """Run each scorer once on the same data and measure scoring CPU time.

    A scorer failure is recorded for that algorithm and the rest proceed.
    An empty scorer mapping yields an empty report.
    """
    truth = dataset.outlier_ids
    fingerprint = {
        "n_points": dataset.spec.n_points,
        "n_dims": dataset.spec.n_dims,
        "seed": dataset.spec.seed,
        "n_outliers": dataset.spec.n_outliers,
    }
    results: dict[str, AlgoResult] = {}
    for name, scorer in scorers.items():
        start = time.process_time()
        try:
            report = scorer(dataset.data)
        except Exception as exc:  # recorded, not fatal to the sweep
            results[name] = AlgoResult(
                curve=None, cpu_seconds=time.process_time() - start, error=str(exc)
            )
            continue
        elapsed = time.process_time() - start
        curve = pr_curve(report.ranking.tolist(), truth) if truth.size else None
        results[name] = AlgoResult(curve=curve, cpu_seconds=elapsed)
    return EvalReport(fingerprint=fingerprint, results=results)
