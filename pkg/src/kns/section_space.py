"""Section-space discretization of dense numeric matrices.

A dataset of n points in m dimensions is turned into a grid structure: each
dimension's value range is slightly enlarged, split into ``scn`` equal-width
sections, and every point is replaced by its per-dimension section ID. All
detectors in this package consume this structure instead of raw coordinates.

Conventions used throughout the package:

* dimension and point indices passed to functions are 0-based (NumPy style),
* section IDs are values in ``1..scn``,
* point IDs in emitted reports/files are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from kns.errors import InvalidDataError, ParameterError

# Fraction of the raw per-dimension length added to EACH end of the range,
# i.e. the total enlargement is 0.1% of the raw length. Keeps extreme raw
# values strictly inside the outermost sections.
RANGE_MARGIN = 0.0005


def as_data_matrix(values) -> np.ndarray:
    """Validate and normalize raw input into the package's matrix contract.

    Returns a C-contiguous float64 array of shape (n points, m dimensions)
    with n >= 1, m >= 2 and all entries finite.

    Raises:
        InvalidDataError: on wrong shape, too few dimensions, or non-finite
            entries.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise InvalidDataError(f"expected a 2-D matrix, got {arr.ndim}-D input")
    n, m = arr.shape
    if n < 1:
        raise InvalidDataError("matrix must contain at least one point")
    if m < 2:
        raise InvalidDataError(
            f"matrix must have at least two dimensions (projection needs a "
            f"source and a target), got {m}"
        )
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise InvalidDataError(
            f"non-finite value at point {bad[0] + 1}, dimension {bad[1] + 1}"
        )
    return np.ascontiguousarray(arr)


@dataclass(frozen=True)
class DimensionRange:
    """Enlarged value range of one dimension.

    ``lo``/``hi`` are the raw min/max pushed outward by ``RANGE_MARGIN`` of
    the raw length on each end; ``width`` is the resulting section width
    ``(hi - lo) / scn``. ``degenerate`` marks constant dimensions (raw
    min == max), which carry ``width == 0`` and map every point to section 1.
    """

    lo: float
    hi: float
    width: float
    degenerate: bool

    @property
    def length(self) -> float:
        return self.hi - self.lo


def compute_range(raw_min: float, raw_max: float, scn: int = 1) -> DimensionRange:
    """Enlarge a raw [min, max] interval by 0.1% of its length, split evenly.

    Half the enlargement goes to each end: lo = min - 0.0005*L and
    hi = max + 0.0005*L for L = max - min. ``scn`` sets the section width
    of the returned range; the default of 1 yields the bare enlarged range.
    """
    if not (np.isfinite(raw_min) and np.isfinite(raw_max)):
        raise InvalidDataError("range endpoints must be finite")
    if raw_min > raw_max:
        raise InvalidDataError(f"raw_min {raw_min} exceeds raw_max {raw_max}")
    if scn < 1:
        raise ParameterError(f"scn must be >= 1, got {scn}")
    length = raw_max - raw_min
    lo = raw_min - RANGE_MARGIN * length
    hi = raw_max + RANGE_MARGIN * length
    return DimensionRange(
        lo=float(lo),
        hi=float(hi),
        width=float((hi - lo) / scn),
        degenerate=length == 0.0,
    )


@dataclass(frozen=True)
class SectionSpace:
    """Immutable grid view of a data matrix.

    Attributes:
        scn: number of sections per dimension (equal across dimensions).
        ranges: per-dimension enlarged ranges.
        point_info: int32 array (m, n); ``point_info[i, j]`` is the section
            ID (1..scn) of point j in dimension i.
        section_info: int64 array (m, scn); ``section_info[i, s-1]`` is the
            number of points in section s of dimension i.
        nonempty_sections: int64 array (m,); count of occupied sections per
            dimension.
        avg_density: float64 array (m,); per-dimension average occupancy
            taken over occupied sections only, i.e. n / nonempty_sections.

    After construction the structure is never mutated; concurrent readers
    need no synchronization.
    """

    scn: int
    ranges: list[DimensionRange]
    point_info: np.ndarray
    section_info: np.ndarray
    nonempty_sections: np.ndarray
    avg_density: np.ndarray

    @property
    def n(self) -> int:
        return self.point_info.shape[1]

    @property
    def m(self) -> int:
        return self.point_info.shape[0]

    def occupancy_of_point(self, dimension: int, point: int) -> int:
        """Number of points sharing ``point``'s section in ``dimension``."""
        sid = self.point_info[dimension, point]
        return int(self.section_info[dimension, sid - 1])


def build_section_space(data, scn: int) -> SectionSpace:
    """Discretize a matrix into ``scn`` equal-width sections per dimension.

    The section of value x in a dimension with range (lo, hi) and width
    w = (hi - lo)/scn is floor((x - lo)/w) + 1, clamped into [1, scn] as a
    guard against floating-point boundary hits. Degenerate dimensions put
    every point in section 1.
    """
    if scn < 2:
        raise ParameterError(f"scn must be >= 2, got {scn}")
    X = as_data_matrix(data)
    n, m = X.shape

    mins = X.min(axis=0)
    maxs = X.max(axis=0)
    lengths = maxs - mins
    lo = mins - RANGE_MARGIN * lengths
    hi = maxs + RANGE_MARGIN * lengths
    width = (hi - lo) / scn
    degenerate = lengths == 0.0

    with np.errstate(divide="ignore", invalid="ignore"):
        raw_ids = np.floor((X - lo) / width) + 1.0
    if degenerate.any():
        raw_ids[:, degenerate] = 1.0
    ids = np.clip(raw_ids, 1, scn).astype(np.int32)

    point_info = np.ascontiguousarray(ids.T)
    section_info = np.empty((m, scn), dtype=np.int64)
    for i in range(m):
        section_info[i] = np.bincount(point_info[i], minlength=scn + 1)[1:]

    nonempty = np.count_nonzero(section_info, axis=1).astype(np.int64)
    avg_density = n / nonempty

    ranges = [
        DimensionRange(
            lo=float(lo[i]),
            hi=float(hi[i]),
            width=float(width[i]),
            degenerate=bool(degenerate[i]),
        )
        for i in range(m)
    ]
    return SectionSpace(
        scn=scn,
        ranges=ranges,
        point_info=point_info,
        section_info=section_info,
        nonempty_sections=nonempty,
        avg_density=avg_density,
    )
