"""Comparison detectors sharing the section-space framework, plus LOF.

PSD (projected section density) reuses the k-NS orchestration but scores a
projected section by the product of its occupancy and the length of the
contiguous run of occupied sections containing it, normalized by the
co-section average of that product. RPGS (rim projected grid statistic)
scores how far a point's section sits from the center of the occupied range
of each dimension; it is kept for experimentation and excluded from default
benchmark suites. LOF is the classic density-based local outlier factor
over Euclidean distance, with exact O(n^2) neighbor search, which is the
honest baseline at the dataset sizes this package targets.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.spatial.distance import cdist

from kns.detector import (
    DetectorParams,
    ScoreReport,
    assemble_scores,
    projection_schedule,
    small_section_threshold,
)
from kns.errors import InternalContractError, ParameterError
from kns.section_space import SectionSpace, as_data_matrix, build_section_space

# --------------------------------------------------------------------------
# PSD


def section_cluster_lengths(space: SectionSpace) -> np.ndarray:
    """Length of the occupied-section run containing each section, per dimension.

    A cluster is a maximal run of consecutive sections with occupancy > 0.
    Returns an int64 (m, scn) array; entries for empty sections are 0 (no
    point ever queries them). Per dimension, the lengths of distinct runs
    sum to the number of occupied sections.
    """
    m, scn = space.section_info.shape
    out = np.zeros((m, scn), dtype=np.int64)
    for i in range(m):
        occupied = space.section_info[i] > 0
        # run ids change where occupancy flips; label runs then count sizes
        boundaries = np.diff(occupied.astype(np.int8), prepend=0)
        run_id = np.cumsum(boundaries == 1) - 1
        sizes = np.bincount(run_id[occupied], minlength=max(run_id.max() + 1, 1))
        out[i, occupied] = sizes[run_id[occupied]]
    return out


def psd_sec_valp(
    space: SectionSpace, source_dim: int, target_dim: int, point: int
) -> float:
    """Projected density-run ratio of one point.

    With S the point's co-section set in the source dimension, returns
    (occupancy x run length) of the point's target-dimension section over
    the mean of that product across S.
    """
    if source_dim == target_dim:
        raise InternalContractError("source and target dimension must differ")
    sid = space.point_info[source_dim, point]
    members = np.flatnonzero(space.point_info[source_dim] == sid)
    clu_len = section_cluster_lengths(space)[target_dim]
    tgt_ids = space.point_info[target_dim][members].astype(np.int64)
    products = space.section_info[target_dim][tgt_ids - 1] * clu_len[tgt_ids - 1]
    values = (members.shape[0] * products) / products.sum()
    return float(values[np.searchsorted(members, point)])


def run_psd(data, params: DetectorParams) -> ScoreReport:
    """Score every point with the projected-section-density detector.

    Identical orchestration to the k-NS run, with the occupancy-times-run
    product substituted for the dispersion ratio. The small-section gate is
    ``params.dst`` when set (its natural scale is the mean points per
    section, n/scn), else ceil(3k/2). The product is a density-style ratio
    (small for anomalies), so it enters the reciprocal score unsquared by
    its reciprocal, unlike the k-NS dispersion term.
    """
    X = as_data_matrix(data)
    params.validate(m=X.shape[1])
    space = build_section_space(X, params.scn)
    schedule = projection_schedule(
        X.shape[1], params.alpha, params.seed, params.full_sweep
    )
    gate = params.dst if params.dst is not None else small_section_threshold(params.k)
    clu_len = section_cluster_lengths(space)
    products = space.section_info * clu_len  # (m, scn) int64

    def scorer(tgt_ids: np.ndarray, tgt: int) -> np.ndarray:
        vals = products[tgt][tgt_ids - 1]
        return (tgt_ids.shape[0] * vals) / vals.sum()

    report, _ = assemble_scores(
        space, params, schedule, gate, scorer, invert_projected=False, collect=False
    )
    return report


# --------------------------------------------------------------------------
# RPGS


def rpgs_center_value(space: SectionSpace, dimension: int, point: int) -> float:
    """Normalized distance of a point's section from the occupied-range center.

    0 at the center section, 1 at the occupied extremes; 0 when the
    dimension has a single occupied section.
    """
    occupied = np.flatnonzero(space.section_info[dimension] > 0) + 1
    min_sec = int(occupied[0])
    max_sec = int(occupied[-1])
    if max_sec == min_sec:
        return 0.0
    center = math.ceil((min_sec + max_sec) / 2)
    sid = int(space.point_info[dimension, point])
    if sid > center:
        return (sid - center) / (max_sec - center)
    return (center - sid) / (center - min_sec)


def run_rpgs(data, scn: int = 25) -> ScoreReport:
    """Mean center-distance score per point, descending.

    This aggregate (average of the per-dimension center values) is a simple
    non-canonical reduction exposed for experimentation; it flags rim-ward
    points and is known to behave poorly on multi-cluster data.
    """
    X = as_data_matrix(data)
    space = build_section_space(X, scn)
    n, m = space.n, space.m
    acc = np.zeros(n)
    for i in range(m):
        occupied = np.flatnonzero(space.section_info[i] > 0) + 1
        min_sec = int(occupied[0])
        max_sec = int(occupied[-1])
        if max_sec == min_sec:
            continue
        center = math.ceil((min_sec + max_sec) / 2)
        sid = space.point_info[i].astype(np.int64)
        up = (sid - center) / (max_sec - center) if max_sec > center else 0.0
        down = (center - sid) / (center - min_sec)
        acc += np.where(sid > center, up, down)
    return ScoreReport(si=acc / m)


# --------------------------------------------------------------------------
# LOF


def run_lof(data, knn: int) -> ScoreReport:
    """Local outlier factor over Euclidean distance, ranked descending.

    Exact brute-force neighbor search; neighborhoods are the knn nearest
    points by distance (ties at the neighborhood boundary resolve in a
    fixed selection order, deterministic for identical input). Degenerate
    duplicate-point neighborhoods (zero reachability mass all around) take
    the neutral factor 1.
    """
    X = as_data_matrix(data)
    n = X.shape[0]
    if not 1 <= knn < n:
        raise ParameterError(f"knn must satisfy 1 <= knn < n = {n}, got {knn}")

    d = cdist(X, X)
    np.fill_diagonal(d, np.inf)
    # neighbor order within the set is irrelevant to the reachability mean,
    # so a partial selection replaces a full per-row sort
    neighbors = np.argpartition(d, knn - 1, axis=1)[:, :knn]
    rows = np.arange(n)[:, None]
    neighbor_dists = d[rows, neighbors]
    k_dist = neighbor_dists.max(axis=1)

    reach = np.maximum(k_dist[neighbors], neighbor_dists)
    with np.errstate(divide="ignore"):
        lrd = 1.0 / reach.mean(axis=1)
    with np.errstate(invalid="ignore", over="ignore"):
        lof = lrd[neighbors].mean(axis=1) / lrd
    lof = np.where(np.isfinite(lof), lof, 1.0)
    return ScoreReport(si=lof)
