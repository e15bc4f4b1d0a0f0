"""Synthetic benchmark families: Gaussian-mixture normals with hidden outliers.

Normal points are split evenly over a configurable number of clusters; each
cluster draws one (mu, spread) pair per dimension and samples its
coordinates from Normal(mu, sqrt(spread)), i.e. ``sigma_range`` bounds the
per-coordinate variance. On that scale the default (10, 20) keeps per-
dimension cluster blobs a few sections wide, which is what gives the
section detectors their contrast; read as standard deviations the same
numbers smear the per-dimension mixtures so far that no section structure
survives. Outliers sample every coordinate independently and uniformly
from a fixed interval inside the normal points' range, so they are
invisible in any single dimension and only emerge from cross-dimension
structure.

Generation is a pure function of the spec: one PCG64 stream seeded from
``spec.seed`` is consumed in a fixed documented order (per cluster: mu
vector, sigma vector, coordinate block; then the outlier block; then
containment resampling per dimension).
"""

from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from kns.errors import InvalidDataError, ParameterError

OUTLIER_LABEL = -1
_CONTAINMENT_RETRIES = 8


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of one synthetic dataset family instance."""

    n_points: int = 500
    n_dims: int = 100
    n_clusters: int = 5
    n_outliers: int = 10
    mu_range: tuple[float, float] = (20.0, 80.0)
    sigma_range: tuple[float, float] = (10.0, 20.0)  # per-coordinate variance bounds
    outlier_range: tuple[float, float] = (20.0, 100.0)
    seed: int = 0

    def validate(self) -> None:
        if self.n_points < 1 or self.n_dims < 2:
            raise ParameterError("need n_points >= 1 and n_dims >= 2")
        if not 0 <= self.n_outliers < self.n_points:
            raise ParameterError("n_outliers must be in [0, n_points)")
        if self.n_clusters < 1:
            raise ParameterError("n_clusters must be >= 1")
        for name in ("mu_range", "sigma_range", "outlier_range"):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise ParameterError(f"{name} must satisfy lo < hi, got ({lo}, {hi})")
        if not 0 <= self.seed < 2**64:
            raise ParameterError("seed must fit in an unsigned 64-bit integer")


@dataclass(frozen=True)
class LabeledDataset:
    """A generated matrix with ground truth.

    ``labels[j]`` is the cluster index (0-based) for normal points and
    ``OUTLIER_LABEL`` for planted outliers. ``cluster_mus``/``cluster_sigmas``
    expose the drawn per-cluster, per-dimension Gaussian parameters for
    diagnostics. ``escaped_fraction`` is the share of (outlier, dimension)
    coordinates still outside the normal hull after bounded resampling.
    """

    data: np.ndarray
    labels: np.ndarray
    spec: SyntheticSpec
    cluster_mus: np.ndarray
    cluster_sigmas: np.ndarray
    escaped_fraction: float

    @property
    def outlier_ids(self) -> np.ndarray:
        """1-based point IDs of the planted outliers."""
        return np.flatnonzero(self.labels == OUTLIER_LABEL) + 1

    @property
    def n_normal(self) -> int:
        return int(np.count_nonzero(self.labels != OUTLIER_LABEL))


def _cluster_sizes(n_normal: int, n_clusters: int) -> list[int]:
    base, extra = divmod(n_normal, n_clusters)
    return [base + (1 if c < extra else 0) for c in range(n_clusters)]


def generate(spec: SyntheticSpec) -> LabeledDataset:
    """Sample one labeled dataset; identical specs yield identical output.

    Outlier coordinates that escape the per-dimension normal [min, max] hull
    are resampled a bounded number of times; any stragglers are kept with a
    warning rather than failing the run, since a uniform upper range can
    legitimately exceed a low-lying mixture's maximum.
    """
    spec.validate()
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    n, m = spec.n_points, spec.n_dims
    n_normal = n - spec.n_outliers
    sizes = _cluster_sizes(n_normal, spec.n_clusters)

    blocks: list[np.ndarray] = []
    labels = np.empty(n, dtype=np.int64)
    mus = np.empty((spec.n_clusters, m))
    sigmas = np.empty((spec.n_clusters, m))
    start = 0
    for c, size in enumerate(sizes):
        mus[c] = rng.uniform(*spec.mu_range, size=m)
        sigmas[c] = np.sqrt(rng.uniform(*spec.sigma_range, size=m))
        blocks.append(rng.normal(mus[c], sigmas[c], size=(size, m)))
        labels[start : start + size] = c
        start += size

    outliers = rng.uniform(*spec.outlier_range, size=(spec.n_outliers, m))
    labels[start:] = OUTLIER_LABEL

    escaped = 0
    if spec.n_outliers and n_normal:
        normals = np.vstack(blocks)
        lo = normals.min(axis=0)
        hi = normals.max(axis=0)
        for _ in range(_CONTAINMENT_RETRIES):
            bad = (outliers < lo) | (outliers > hi)
            if not bad.any():
                break
            outliers[bad] = rng.uniform(*spec.outlier_range, size=int(bad.sum()))
        bad = (outliers < lo) | (outliers > hi)
        escaped = int(bad.sum())
        if escaped:
            warnings.warn(
                f"{escaped} outlier coordinate(s) remain outside the normal "
                f"hull after {_CONTAINMENT_RETRIES} resampling rounds",
                stacklevel=2,
            )
        data = np.vstack([normals, outliers])
    else:
        blocks.append(outliers)
        data = np.vstack(blocks)

    total_outlier_coords = max(spec.n_outliers * m, 1)
    return LabeledDataset(
        data=np.ascontiguousarray(data),
        labels=labels,
        spec=spec,
        cluster_mus=mus,
        cluster_sigmas=sigmas,
        escaped_fraction=escaped / total_outlier_coords,
    )


def flag_noisy_normals(dataset: LabeledDataset, tail: float = 0.01) -> np.ndarray:
    """Diagnostic mask: normal points extreme in at least one dimension.

    A normal point is flagged when any coordinate falls in the combined
    ``tail`` fraction of its dimension's normal-point distribution (split
    evenly between the two ends). Such points look anomalous in a few
    dimensions yet share the normal generating process, unlike planted
    outliers. Never flags outliers and never affects evaluation.
    """
    if not 0 < tail < 1:
        raise ParameterError(f"tail must be in (0, 1), got {tail}")
    normal_mask = dataset.labels != OUTLIER_LABEL
    normals = dataset.data[normal_mask]
    lo = np.quantile(normals, tail / 2, axis=0)
    hi = np.quantile(normals, 1 - tail / 2, axis=0)
    extreme = (dataset.data < lo) | (dataset.data > hi)
    return extreme.any(axis=1) & normal_mask


# --------------------------------------------------------------------------
# on-disk format: data CSV + labels CSV + spec JSON


def dataset_paths(directory: Path, name: str) -> tuple[Path, Path, Path]:
    d = Path(directory)
    return d / f"{name}.csv", d / f"{name}.labels.csv", d / f"{name}.spec.json"


def write_dataset(dataset: LabeledDataset, directory, name: str = "dataset") -> tuple[Path, Path, Path]:
    """Write the matrix, labels and spec echo; returns the three paths."""
    data_path, labels_path, spec_path = dataset_paths(Path(directory), name)
    data_path.parent.mkdir(parents=True, exist_ok=True)
    with data_path.open("w") as fh:
        for row in dataset.data:
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")
    with labels_path.open("w") as fh:
        fh.write("point_id,label,cluster\n")
        for j, lab in enumerate(dataset.labels, start=1):
            if lab == OUTLIER_LABEL:
                fh.write(f"{j},outlier,-1\n")
            else:
                fh.write(f"{j},normal,{lab}\n")
    payload = asdict(dataset.spec) | {"escaped_fraction": dataset.escaped_fraction}
    spec_path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return data_path, labels_path, spec_path


def read_labels(path) -> np.ndarray:
    """Read a labels CSV back into the per-point label array."""
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].strip() != "point_id,label,cluster":
        raise InvalidDataError(f"{path}: not a labels file (bad header)")
    labels = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise InvalidDataError(f"{path}:{lineno}: expected 3 fields")
        labels.append(int(parts[2]))
    return np.asarray(labels, dtype=np.int64)


def outlier_ids_from_labels(labels: np.ndarray) -> np.ndarray:
    """1-based IDs of points labeled as outliers."""
    return np.flatnonzero(np.asarray(labels) == OUTLIER_LABEL) + 1
