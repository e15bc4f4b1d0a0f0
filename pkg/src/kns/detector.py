"""k-nearest-section outlier scoring over a section space.

The detector combines two per-point signals:

1. a per-dimension density ratio: how crowded the point's section is
   relative to the dimension's average over occupied sections (squared), and
2. a projected dispersion ratio: fix the point's section in a source
   dimension, map the section's members into a target dimension, and compare
   the point's summed squared section distances to its k nearest co-section
   members against the section average of that quantity.

Projection events are scheduled as ``alpha`` passes; each pass draws one
random permutation of the dimensions and projects every dimension onto its
successor in the permutation (wrapping at the end), giving ``alpha * m``
events. The RNG is NumPy's PCG64 seeded from the params, never the platform
default, so a (data, params) pair fully determines the output.

Score assembly (the default "reciprocal" variant) is

    SI = 2 / (mean_i sec_val_i**2  +  mean_e (1 / sec_valp_e)**2)

over the m dimensions i and the executed projection events e. The density
ratio shrinks for outliers while the dispersion ratio grows, so the
dispersion term enters through its reciprocal: both terms then shrink
together for anomalous points and SI ranks outliers at the top. The
"weighted" variant is the plain weighted sum
``w1 * sum(sec_val) + w2 * sum(sec_valp)`` with defaults w1 = 1/m and
w2 = 1/(m*(m-1)); there the raw dispersion already points upward, so no
reciprocal is applied.

Accumulation order is part of the contract (dimensions ascending, then
events in schedule order) so that independent re-implementations can
reproduce scores bit for bit.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterator, Literal

import numpy as np

from kns.errors import InternalContractError, ParameterError
from kns.section_space import SectionSpace, as_data_matrix, build_section_space

SiVariant = Literal["reciprocal", "weighted"]


def small_section_threshold(k: int) -> int:
    """Minimum section occupancy that still gets a projected score.

    Sections with fewer than ceil(3k/2) members take the neutral projected
    value 1 instead; ceil guarantees at least k+1 members when scored, so k
    co-section neighbors always exist.
    """
    return (3 * k + 1) // 2


@dataclass(frozen=True)
class DetectorParams:
    """Knobs shared by the section-based detectors.

    Attributes:
        k: neighbor count for the projected dispersion ratio (>= 2).
        scn: sections per dimension (>= 2).
        alpha: number of projection passes; each contributes m events.
        seed: seed for the PCG64 generator driving the pass permutations.
        si_variant: "reciprocal" (default) or "weighted", see module docs.
        w1, w2: weights for the weighted variant; None resolves to 1/m and
            1/(m*(m-1)) at scoring time.
        dst: minimum section occupancy gate used by the projected-density
            detector (PSD); None falls back to ceil(3k/2). Ignored by k-NS.
        full_sweep: test/oracle mode that replaces the random schedule with
            every ordered dimension pair exactly once (ascending source,
            then target); alpha is ignored when set.
    """

    k: int = 5
    scn: int = 25
    alpha: int = 5
    seed: int = 0
    si_variant: SiVariant = "reciprocal"
    w1: float | None = None
    w2: float | None = None
    dst: int | None = None
    full_sweep: bool = False

    def validate(self, m: int | None = None) -> None:
        if self.k < 2:
            raise ParameterError(f"k must be >= 2, got {self.k}")
        if self.scn < 2:
            raise ParameterError(f"scn must be >= 2, got {self.scn}")
        if not self.full_sweep and self.alpha < 1:
            raise ParameterError(f"alpha must be >= 1, got {self.alpha}")
        if not 0 <= self.seed < 2**64:
            raise ParameterError("seed must fit in an unsigned 64-bit integer")
        if self.si_variant not in ("reciprocal", "weighted"):
            raise ParameterError(f"unknown si_variant {self.si_variant!r}")
        if self.dst is not None and self.dst < 1:
            raise ParameterError(f"dst must be >= 1 when given, got {self.dst}")
        if m is not None and not self.full_sweep and self.alpha > m - 1:
            raise ParameterError(
                f"alpha must be <= m-1 = {m - 1} for m = {m} dimensions, "
                f"got {self.alpha}"
            )


@dataclass(frozen=True)
class ScoreComponents:
    """Intermediate grids kept for inspection and testing.

    ``sec_val[i, j]`` is the squared density ratio of point j in dimension
    i; ``sec_valp[e, j]`` the raw projected ratio of point j in event e
    (1 for members of gated-small sections). ``projection_schedule`` lists
    the executed (source, target) dimension pairs, 0-based, in order.
    """

    sec_val: np.ndarray
    sec_valp: np.ndarray
    projection_schedule: list[tuple[int, int]]

    def __post_init__(self) -> None:
        if not (self.sec_val > 0).all():
            raise InternalContractError("sec_val grid contains non-positive values")
        if not (self.sec_valp > 0).all():
            raise InternalContractError("sec_valp grid contains non-positive values")
        if self.sec_valp.shape[0] != len(self.projection_schedule):
            raise InternalContractError("sec_valp rows do not match the schedule")


@dataclass(frozen=True)
class ScoreReport:
    """Per-point scores with a deterministic descending ranking.

    ``si`` holds one finite score per point; ``ranking`` the 1-based point
    IDs sorted by score descending, ties broken by ascending point ID.
    """

    si: np.ndarray
    ranking: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        si = np.asarray(self.si, dtype=np.float64)
        if not np.all(np.isfinite(si)) or (si < 0).any():
            raise InternalContractError("scores must be finite and non-negative")
        object.__setattr__(self, "si", si)
        if self.ranking is None:
            ranking = np.argsort(-si, kind="stable").astype(np.int64) + 1
            object.__setattr__(self, "ranking", ranking)

    @property
    def n(self) -> int:
        return self.si.shape[0]

    def top_ids(self, top_n: int) -> np.ndarray:
        """The 1-based IDs of the ``top_n`` highest-scored points."""
        if not 0 <= top_n <= self.n:
            raise ParameterError(f"top_n must be in [0, {self.n}], got {top_n}")
        return self.ranking[:top_n]

    def top_n_flags(self, top_n: int) -> np.ndarray:
        """Boolean mask (by point index) of membership in the top ``top_n``."""
        flags = np.zeros(self.n, dtype=bool)
        flags[self.top_ids(top_n) - 1] = True
        return flags


# --------------------------------------------------------------------------
# elementary operations


def sec_val(space: SectionSpace, dimension: int, point: int) -> float:
    """Squared ratio of the point's section occupancy to the dimension average.

    The average is taken over occupied sections only. All points sharing a
    section share this value. Computed as ((occupancy * occupied_sections)
    / n)**2, the exact-integer form of (occupancy / average)**2.
    """
    occ = space.occupancy_of_point(dimension, point)
    ratio = (occ * int(space.nonempty_sections[dimension])) / space.n
    return ratio * ratio


def dists(space: SectionSpace, projected_dimension: int, point_a: int, point_b: int) -> int:
    """Section distance between two points in a projected dimension.

    One plus the absolute difference of their section IDs; the floor of 1
    (rather than 0 for co-section pairs) keeps downstream ratios divisible.
    """
    ids = space.point_info[projected_dimension]
    return int(abs(int(ids[point_a]) - int(ids[point_b]))) + 1


def _kns_section_values(tgt_ids: np.ndarray, k: int, scn: int) -> np.ndarray:
    """Projected dispersion ratios for all members of one source section.

    ``tgt_ids`` holds the members' target-dimension section IDs. Each
    member's D is the sum of squared section distances to its k nearest
    co-section members (self excluded); the returned ratio is
    s * D / sum(D), whose mean over the section is exactly 1.

    Ties among the k nearest are value ties, so the D sums do not depend on
    which tied member is chosen; selection by ascending point ID (the
    documented rule) and this value-based computation agree.
    """
    s = tgt_ids.shape[0]
    gaps = np.abs(tgt_ids[:, None] - tgt_ids[None, :]) + 1
    np.fill_diagonal(gaps, scn + 2)  # self never among the k nearest
    nearest = np.partition(gaps, k - 1, axis=1)[:, :k]
    d_sums = np.sum(nearest * nearest, axis=1)
    return (s * d_sums) / d_sums.sum()


def sec_valp(
    space: SectionSpace, source_dim: int, target_dim: int, point: int, k: int
) -> float:
    """Projected dispersion ratio of one point (members of one source section).

    Requires the point's source-dimension section to hold at least
    ceil(3k/2) members; the orchestrator substitutes 1 below that, so a
    violation here is an internal bug.
    """
    if source_dim == target_dim:
        raise InternalContractError("source and target dimension must differ")
    sid = space.point_info[source_dim, point]
    members = np.flatnonzero(space.point_info[source_dim] == sid)
    if members.shape[0] < small_section_threshold(k):
        raise InternalContractError(
            f"section holds {members.shape[0]} members, below the "
            f"ceil(3k/2) = {small_section_threshold(k)} scoring threshold"
        )
    tgt_ids = space.point_info[target_dim][members].astype(np.int64)
    values = _kns_section_values(tgt_ids, k, space.scn)
    return float(values[np.searchsorted(members, point)])


# --------------------------------------------------------------------------
# orchestration


def projection_schedule(
    m: int, alpha: int, seed: int, full_sweep: bool = False
) -> list[tuple[int, int]]:
    """The ordered (source, target) dimension pairs to execute.

    Default mode: ``alpha`` passes, each a fresh PCG64 permutation of the
    dimensions projected consecutively with wraparound. Full-sweep mode:
    every ordered pair exactly once, ascending.
    """
    if full_sweep:
        return [(i, j) for i in range(m) for j in range(m) if j != i]
    rng = np.random.Generator(np.random.PCG64(seed))
    schedule: list[tuple[int, int]] = []
    for _ in range(alpha):
        perm = rng.permutation(m)
        for pos in range(m):
            schedule.append((int(perm[pos]), int(perm[(pos + 1) % m])))
    return schedule


SectionScorer = Callable[[np.ndarray, int], np.ndarray]


def iter_projected_values(
    space: SectionSpace,
    schedule: list[tuple[int, int]],
    gate: int,
    section_scorer: SectionScorer,
) -> Iterator[np.ndarray]:
    """Yield one per-point projected-value vector per scheduled event.

    For each event, every occupied section of the source dimension is scored
    by ``section_scorer(target_ids_of_members, target_dim)`` when its
    occupancy reaches ``gate``, and takes the neutral value 1 otherwise.
    """
    n = space.n
    for src, tgt in schedule:
        values = np.ones(n, dtype=np.float64)
        src_row = space.point_info[src]
        counts = space.section_info[src]
        tgt_row = space.point_info[tgt]
        for sec in range(1, space.scn + 1):
            if counts[sec - 1] == 0:
                continue
            members = np.flatnonzero(src_row == sec)
            if counts[sec - 1] < gate:
                continue  # small section: members keep the neutral value 1
            tgt_ids = tgt_row[members].astype(np.int64)
            values[members] = section_scorer(tgt_ids, tgt)
        yield values


def _density_ratio_rows(space: SectionSpace) -> Iterator[np.ndarray]:
    """Per-dimension squared density ratios for all points, ascending dims."""
    n = space.n
    for i in range(space.m):
        occ = space.section_info[i][space.point_info[i] - 1]
        ratio = (occ * int(space.nonempty_sections[i])) / n
        yield ratio * ratio


def assemble_scores(
    space: SectionSpace,
    params: DetectorParams,
    schedule: list[tuple[int, int]],
    gate: int,
    section_scorer: SectionScorer,
    invert_projected: bool,
    collect: bool = False,
) -> tuple[ScoreReport, ScoreComponents | None]:
    """Run the shared scoring pipeline for any sectioned detector.

    ``invert_projected`` selects how the projected ratio enters the
    reciprocal variant: True squares its reciprocal (dispersion-style
    ratios), False squares the raw value (density-style ratios). The
    weighted variant always sums raw values.
    """
    n, m = space.n, space.m
    sv_raw = np.zeros(n)
    sv_sq = np.zeros(n)
    sec_val_rows = [] if collect else None
    for row in _density_ratio_rows(space):
        sv_raw += row
        sv_sq += row * row
        if sec_val_rows is not None:
            sec_val_rows.append(row)

    svp_raw = np.zeros(n)
    svp_sq = np.zeros(n)
    sec_valp_rows = [] if collect else None
    for values in iter_projected_values(space, schedule, gate, section_scorer):
        svp_raw += values
        if invert_projected:
            svp_sq += 1.0 / (values * values)
        else:
            svp_sq += values * values
        if sec_valp_rows is not None:
            sec_valp_rows.append(values)

    n_events = len(schedule)
    if params.si_variant == "reciprocal":
        si = 2.0 / (sv_sq / m + svp_sq / n_events)
    else:
        w1 = params.w1 if params.w1 is not None else 1.0 / m
        w2 = params.w2 if params.w2 is not None else 1.0 / (m * (m - 1))
        si = w1 * sv_raw + w2 * svp_raw

    if not np.all(np.isfinite(si)) or (si <= 0).any():
        raise InternalContractError("section-based scores must be finite and positive")

    components = None
    if collect:
        components = ScoreComponents(
            sec_val=np.vstack(sec_val_rows),
            sec_valp=np.vstack(sec_valp_rows) if sec_valp_rows else np.empty((0, n)),
            projection_schedule=list(schedule),
        )
    return ScoreReport(si=si), components


def _prepare(data, params: DetectorParams) -> tuple[SectionSpace, list[tuple[int, int]]]:
    X = as_data_matrix(data)
    params.validate(m=X.shape[1])
    if X.shape[0] <= params.scn:
        warnings.warn(
            f"n = {X.shape[0]} points with scn = {params.scn} sections per "
            f"dimension leaves sections nearly empty; sections-based scores "
            f"degrade below n > scn",
            stacklevel=3,
        )
    space = build_section_space(X, params.scn)
    schedule = projection_schedule(
        X.shape[1], params.alpha, params.seed, params.full_sweep
    )
    return space, schedule


def score_components(data, params: DetectorParams) -> tuple[ScoreReport, ScoreComponents]:
    """Like :func:`run_kns` but also returns the intermediate grids."""
    space, schedule = _prepare(data, params)
    gate = small_section_threshold(params.k)
    scorer: SectionScorer = lambda tgt_ids, _tgt: _kns_section_values(
        tgt_ids, params.k, space.scn
    )
    report, components = assemble_scores(
        space, params, schedule, gate, scorer, invert_projected=True, collect=True
    )
    assert components is not None
    return report, components


def run_kns(data, params: DetectorParams) -> ScoreReport:
    """Score every point of ``data`` with the k-nearest-section detector.

    Pure function of (data, params): the same inputs, including the seed,
    reproduce the report bit for bit.
    """
    space, schedule = _prepare(data, params)
    gate = small_section_threshold(params.k)
    scorer: SectionScorer = lambda tgt_ids, _tgt: _kns_section_values(
        tgt_ids, params.k, space.scn
    )
    report, _ = assemble_scores(
        space, params, schedule, gate, scorer, invert_projected=True, collect=False
    )
    return report
