"""Named parameter presets for the eight synthetic benchmark families.

Each row pins the dataset shape (points, dimensions) and the per-algorithm
parameters that work well at that shape: the LOF neighbor count, the
projected-density detector's occupancy gate ``dst`` and grid size, and the
k-NS neighbor count and grid size. The ``full-suite`` sweep runs rows 1-7
by default; row 8 (10000 dimensions) is opt-in because of its runtime.
"""

from __future__ import annotations

from dataclasses import dataclass

from kns.datagen import SyntheticSpec
from kns.detector import DetectorParams
from kns.errors import ParameterError


@dataclass(frozen=True)
class Preset:
    name: str
    n_points: int
    n_dims: int
    lof_knn: int
    psd_dst: int
    psd_scn: int
    kns_k: int
    kns_scn: int

    def synthetic_spec(self, seed: int) -> SyntheticSpec:
        return SyntheticSpec(n_points=self.n_points, n_dims=self.n_dims, seed=seed)

    def kns_params(self, seed: int, alpha: int = 5) -> DetectorParams:
        return DetectorParams(k=self.kns_k, scn=self.kns_scn, alpha=alpha, seed=seed)

    def psd_params(self, seed: int, alpha: int = 5) -> DetectorParams:
        return DetectorParams(
            k=self.kns_k, scn=self.psd_scn, alpha=alpha, seed=seed, dst=self.psd_dst
        )


PRESETS: dict[str, Preset] = {
    p.name: p
    for p in (
        Preset("row1", 500, 10, lof_knn=8, psd_dst=20, psd_scn=25, kns_k=5, kns_scn=25),
        Preset("row2", 500, 100, lof_knn=10, psd_dst=20, psd_scn=25, kns_k=6, kns_scn=25),
        Preset("row3", 1000, 100, lof_knn=10, psd_dst=40, psd_scn=25, kns_k=10, kns_scn=40),
        Preset("row4", 500, 500, lof_knn=10, psd_dst=20, psd_scn=25, kns_k=6, kns_scn=25),
        Preset("row5", 1000, 500, lof_knn=10, psd_dst=30, psd_scn=34, kns_k=10, kns_scn=34),
        Preset("row6", 500, 1000, lof_knn=10, psd_dst=20, psd_scn=25, kns_k=6, kns_scn=25),
        Preset("row7", 1000, 1000, lof_knn=10, psd_dst=30, psd_scn=34, kns_k=10, kns_scn=34),
        Preset("row8", 1000, 10000, lof_knn=10, psd_dst=30, psd_scn=34, kns_k=10, kns_scn=34),
    )
}

SUITE_PRESET = "full-suite"
SUITE_ROWS = tuple(f"row{i}" for i in range(1, 8))
XL_ROW = "row8"


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ParameterError(
            f"unknown preset {name!r}; available: {', '.join(PRESETS)}"
        ) from None


def suite_rows(include_xl: bool = False) -> list[Preset]:
    names = list(SUITE_ROWS) + ([XL_ROW] if include_xl else [])
    return [PRESETS[name] for name in names]


def preset_for_shape(n_points: int, n_dims: int) -> Preset | None:
    """The preset matching an exact (n, m) shape, if any."""
    for preset in PRESETS.values():
        if preset.n_points == n_points and preset.n_dims == n_dims:
            return preset
    return None
