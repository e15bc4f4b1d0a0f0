"""Section-based outlier detection for high-dimensional numeric data."""

from kns.baselines import (
    psd_sec_valp,
    rpgs_center_value,
    run_lof,
    run_psd,
    run_rpgs,
    section_cluster_lengths,
)
from kns.datagen import LabeledDataset, SyntheticSpec, flag_noisy_normals, generate
from kns.detector import (
    DetectorParams,
    ScoreComponents,
    ScoreReport,
    dists,
    projection_schedule,
    run_kns,
    score_components,
    sec_val,
    sec_valp,
    small_section_threshold,
)
from kns.errors import (
    InternalContractError,
    InvalidDataError,
    KnsError,
    ParameterError,
)
from kns.evaluation import (
    EvalReport,
    OverlapReport,
    PRCurve,
    benchmark,
    pr_curve,
    precision_recall_at,
    top_n_overlap,
)
from kns.io import ingest_matrix
from kns.presets import PRESETS, get_preset
from kns.section_space import (
    DimensionRange,
    SectionSpace,
    as_data_matrix,
    build_section_space,
    compute_range,
)

__version__ = "0.1.0"

__all__ = [
    "DetectorParams",
    "DimensionRange",
    "EvalReport",
    "InternalContractError",
    "InvalidDataError",
    "KnsError",
    "LabeledDataset",
    "OverlapReport",
    "PRCurve",
    "ParameterError",
    "PRESETS",
    "ScoreComponents",
    "ScoreReport",
    "SectionSpace",
    "SyntheticSpec",
    "as_data_matrix",
    "benchmark",
    "build_section_space",
    "compute_range",
    "dists",
    "flag_noisy_normals",
    "generate",
    "get_preset",
    "ingest_matrix",
    "pr_curve",
    "precision_recall_at",
    "projection_schedule",
    "psd_sec_valp",
    "rpgs_center_value",
    "run_kns",
    "run_lof",
    "run_psd",
    "run_rpgs",
    "score_components",
    "sec_val",
    "sec_valp",
    "section_cluster_lengths",
    "small_section_threshold",
    "top_n_overlap",
]
