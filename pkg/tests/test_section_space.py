import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kns.errors import InvalidDataError, ParameterError
from kns.section_space import (
    as_data_matrix,
    build_section_space,
    compute_range,
)

import naive_reference as ref


# ---------------------------------------------------------------- ranges


def test_range_enlargement_splits_evenly_upper_example():
    r = compute_range(5, 23)
    assert r.lo == pytest.approx(4.991, abs=1e-12)
    assert r.hi == pytest.approx(23.009, abs=1e-12)
    assert r.length == pytest.approx(18.018, abs=1e-12)
    assert not r.degenerate


def test_range_enlargement_second_example():
    r = compute_range(6, 25)
    assert r.lo == pytest.approx(5.9905, abs=1e-12)
    assert r.hi == pytest.approx(25.0095, abs=1e-12)
    assert r.length == pytest.approx(19.019, abs=1e-12)


def test_zero_length_range_is_degenerate():
    r = compute_range(7, 7)
    assert r.degenerate
    assert r.lo == r.hi == 7
    assert r.width == 0


def test_range_rejects_non_finite_and_reversed():
    with pytest.raises(InvalidDataError):
        compute_range(float("nan"), 1)
    with pytest.raises(InvalidDataError):
        compute_range(3, 2)


def test_section_width_matches_documented_example():
    # x dimension of the 23-point example grid: range (4.991, 23.009), 5 bins
    r = compute_range(5, 23, scn=5)
    assert r.width == pytest.approx(3.6036, abs=1e-12)


# ---------------------------------------------------------------- matrix


def test_matrix_validation_rejects_bad_shapes():
    with pytest.raises(InvalidDataError):
        as_data_matrix([1.0, 2.0])  # 1-D
    with pytest.raises(InvalidDataError):
        as_data_matrix([[1.0], [2.0]])  # single dimension
    with pytest.raises(InvalidDataError):
        as_data_matrix([[1.0, float("inf")]])


def test_build_rejects_small_scn():
    with pytest.raises(ParameterError):
        build_section_space([[1.0, 2.0], [3.0, 4.0]], scn=1)


# ---------------------------------------------------------------- build


def test_min_point_lands_in_first_section():
    data = np.array([[5.0, 0.0], [23.0, 1.0], [14.0, 2.0]])
    space = build_section_space(data, scn=5)
    assert space.point_info[0, 0] == 1  # x = 5 with lo = 4.991
    assert space.point_info[0, 1] == 5  # raw max lands in the last section


def test_average_density_counts_occupied_sections_only():
    # 23 points spread so that dimension 0 fills all 5 sections and
    # dimension 1 leaves exactly one empty
    rng = np.random.default_rng(3)
    col0 = np.linspace(0.0, 10.0, 23)
    col1 = np.concatenate([np.linspace(0.0, 5.9, 18), np.linspace(8.1, 10.0, 5)])
    space = build_section_space(np.column_stack([col0, rng.permutation(col1)]), scn=5)
    assert space.nonempty_sections[0] == 5
    assert space.avg_density[0] == pytest.approx(23 / 5)
    assert space.nonempty_sections[1] == 4
    assert space.avg_density[1] == pytest.approx(5.75)


def test_degenerate_dimension_maps_everything_to_section_one():
    data = np.array([[7.0, 1.0], [7.0, 2.0], [7.0, 3.0]])
    space = build_section_space(data, scn=4)
    assert (space.point_info[0] == 1).all()
    assert space.section_info[0, 0] == 3
    assert space.ranges[0].degenerate


def test_build_ranges_match_scalar_compute_range():
    rng = np.random.default_rng(11)
    data = rng.normal(0, 50, size=(40, 6))
    space = build_section_space(data, scn=7)
    for i in range(6):
        scalar = compute_range(data[:, i].min(), data[:, i].max(), scn=7)
        assert space.ranges[i].lo == scalar.lo
        assert space.ranges[i].hi == scalar.hi
        assert space.ranges[i].width == scalar.width


def test_build_matches_reference_sections():
    rng = np.random.default_rng(5)
    data = rng.uniform(-3, 9, size=(30, 4))
    space = build_section_space(data, scn=6)
    ids, occupancy, nonempty = ref.build_sections(data.tolist(), 6)
    assert space.point_info.T.tolist() == [list(r) for r in zip(*ids)]
    assert space.section_info.tolist() == occupancy
    assert space.nonempty_sections.tolist() == nonempty


# ------------------------------------------------------- property tests

matrices = st.integers(2, 40).flatmap(
    lambda n: st.integers(2, 5).flatmap(
        lambda m: st.lists(
            st.lists(
                st.floats(-1e6, 1e6, allow_nan=False, width=64),
                min_size=m, max_size=m,
            ),
            min_size=n, max_size=n,
        )
    )
)


@given(matrices, st.integers(2, 9))
def test_occupancy_conservation_and_totality(rows, scn):
    space = build_section_space(rows, scn)
    n = len(rows)
    assert (space.section_info.sum(axis=1) == n).all()
    assert ((space.point_info >= 1) & (space.point_info <= scn)).all()


@given(matrices, st.integers(2, 9))
def test_monotonicity_within_dimension(rows, scn):
    space = build_section_space(rows, scn)
    data = np.asarray(rows)
    for i in range(data.shape[1]):
        order = np.argsort(data[:, i], kind="stable")
        sids = space.point_info[i][order]
        assert (np.diff(sids) >= 0).all()


@given(
    matrices,
    st.integers(2, 9),
    st.sampled_from([0.5, 2.0, 4.0, 0.25]),  # powers of two: rounding commutes
)
def test_scaling_keeps_assignments_exactly(rows, scn, a):
    space = build_section_space(rows, scn)
    data = np.asarray(rows)
    scaled = data.copy()
    scaled[:, 0] = a * scaled[:, 0]
    other = build_section_space(scaled, scn)
    assert (space.point_info == other.point_info).all()


def test_generic_affine_rescaling_keeps_assignments():
    rng = np.random.default_rng(21)
    data = rng.normal(10, 4, size=(60, 5))
    a = rng.uniform(0.5, 3.0, size=5)
    b = rng.uniform(-10, 10, size=5)
    space = build_section_space(data, scn=8)
    other = build_section_space(a * data + b, scn=8)
    assert (space.point_info == other.point_info).all()


@given(matrices, st.integers(2, 9))
def test_boundary_safety(rows, scn):
    space = build_section_space(rows, scn)
    data = np.asarray(rows)
    for i, r in enumerate(space.ranges):
        if r.degenerate:
            continue
        assert data[:, i].min() > r.lo
        assert data[:, i].max() < r.hi
