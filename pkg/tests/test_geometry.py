"""Exact geometry: intervals, cubes, bin verification, JSON round-trip."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction as F

import pytest

from cubepack.geometry import (
    Bin,
    CubeClass,
    Interval,
    PlacedCube,
    as_rational,
    bin_from_dict,
    bin_to_dict,
    cube_volume,
    cubes_disjoint,
    find_free_position,
    format_rational,
    intervals_disjoint,
    occupied_volume,
    verify_bin,
)


def test_as_rational_accepts_int_str_fraction():
    assert as_rational(3) == F(3)
    assert as_rational("10/27") == F(10, 27)
    assert as_rational(F(1, 9)) == F(1, 9)


def test_as_rational_rejects_float():
    with pytest.raises(TypeError):
        as_rational(0.1)


def test_format_rational_round_trip():
    for q in [F(0), F(1), F(10, 27), F(-3, 7), F(17, 64)]:
        assert as_rational(format_rational(q)) == q


def test_interval_rejects_empty():
    with pytest.raises(ValueError):
        Interval(F(1, 2), F(1, 2))
    with pytest.raises(ValueError):
        Interval(F(2, 3), F(1, 3))


# Frozen interval endpoints for k=3, eps=1/9, computed by hand from the
# base-coordinate formulas: x(j) = (j-1)(1+eps)/3 for j<3, x(3) = 1-(1+eps)/3.
I3_2 = Interval(F(10, 27), F(20, 27))
I3_3 = Interval(F(17, 27), F(27, 27))
I2_1 = Interval(F(0), F(5, 9))


def test_intervals_disjoint_examples():
    # The two highest same-class intervals overlap on (17/27, 20/27).
    assert not intervals_disjoint(I3_2, I3_3)
    # Low class-2 interval vs top class-3 interval: 15/27 < 17/27.
    assert intervals_disjoint(I2_1, I3_3)
    # Touching endpoints are disjoint for open intervals.
    assert intervals_disjoint(Interval(F(0), F(1, 2)), Interval(F(1, 2), F(1)))


def test_cube_class_side_and_validation():
    assert CubeClass(3, F(1, 9), 2).side == F(10, 27)
    assert CubeClass(2, F(1), 2).side == F(1)  # eps = k-1 boundary
    with pytest.raises(ValueError):
        CubeClass(1, F(0), 2)
    with pytest.raises(ValueError):
        CubeClass(2, F(3, 2), 2)  # side would exceed 1
    with pytest.raises(ValueError):
        CubeClass(2, F(-1, 4), 2)


def test_cube_volume_frozen_values():
    assert cube_volume(CubeClass(2, F(0), 3)) == F(1, 8)
    assert cube_volume(CubeClass(2, F(1, 3), 2)) == F(4, 9)
    assert cube_volume(CubeClass(3, F(1, 9), 2)) == F(100, 729)


def test_placed_cube_intervals_and_containment():
    c = PlacedCube(CubeClass(3, F(1, 9), 2), (F(10, 27), F(17, 27)))
    assert c.interval(0) == Interval(F(10, 27), F(20, 27))
    assert c.interval(1) == Interval(F(17, 27), F(1))
    assert c.fits_unit_bin()
    out = PlacedCube(CubeClass(3, F(1, 9), 2), (F(20, 27), F(0)))
    assert not out.fits_unit_bin()  # 20/27 + 10/27 > 1


def test_placed_cube_dimension_mismatch():
    with pytest.raises(ValueError):
        PlacedCube(CubeClass(3, F(1, 9), 2), (F(0),))


def test_cubes_disjoint_touching_and_overlap():
    cls = CubeClass(2, F(0), 2)
    a = PlacedCube(cls, (F(0), F(0)))
    b = PlacedCube(cls, (F(1, 2), F(0)))  # touches a along dim 0
    c = PlacedCube(cls, (F(1, 4), F(1, 4)))
    assert cubes_disjoint(a, b)
    assert not cubes_disjoint(a, c)
    with pytest.raises(ValueError):
        cubes_disjoint(a, PlacedCube(CubeClass(2, F(0), 3), (F(0),) * 3))


# Base-coordinate helpers local to the tests: an independent rendering of
# the defining formulas, kept separate from the packing module on purpose.
def base_x(k: int, j: int, eps: F) -> F:
    return 1 - (1 + eps) / k if j == k else (j - 1) * (1 + eps) / k


def class_interval(k: int, j: int, eps: F) -> Interval:
    lo = base_x(k, j, eps)
    return Interval(lo, lo + (1 + eps) / k)


def test_gap_inequality_exhaustive_to_class_12():
    """For eps = 1/S^2 every lower-class interval clears the top interval.

    Exhaustive over 2 <= k < k' <= S <= 12: the (k-1)-st upper endpoint
    stays strictly below the k'-th base point, the geometric heart of
    cross-class disjointness.
    """
    for S in range(2, 13):
        eps = F(1, S * S)
        for kp in range(3, S + 1):
            top = base_x(kp, kp, eps)
            for k in range(2, kp):
                y_top = base_x(k, k - 1, eps) + (1 + eps) / k
                assert y_top < top, (S, k, kp)


@pytest.mark.parametrize("k", range(2, 13))
def test_same_class_overlap_only_adjacent_top_pair(k):
    eps = F(1, 144)
    ivals = {j: class_interval(k, j, eps) for j in range(1, k + 1)}
    for j1, j2 in itertools.combinations(range(1, k + 1), 2):
        disjoint = intervals_disjoint(ivals[j1], ivals[j2])
        if (j1, j2) == (k - 1, k):
            assert not disjoint, k
        else:
            assert disjoint, (k, j1, j2)


def _grid_bin(k: int, d: int, eps: F) -> Bin:
    cls = CubeClass(k, eps, d)
    side = cls.side
    cubes = [
        PlacedCube(cls, tuple(i * side for i in idx))
        for idx in itertools.product(range(k - 1), repeat=d)
    ]
    return Bin(d, tuple(cubes))


def test_verify_bin_accepts_grid():
    report = verify_bin(_grid_bin(3, 2, F(1, 9)))
    assert report
    assert report.containment_ok and report.disjoint_ok
    assert report.cube_count == 4


def test_verify_bin_flags_duplicate_pair():
    cls = CubeClass(3, F(1, 9), 2)
    c = PlacedCube(cls, (F(0), F(0)))
    report = verify_bin(Bin(2, (c, c)))
    assert not report
    assert report.offending_pair == (0, 1)


def test_verify_bin_flags_containment():
    cls = CubeClass(3, F(1, 9), 2)
    c = PlacedCube(cls, (F(20, 27), F(0)))
    report = verify_bin(Bin(2, (c,)))
    assert not report.containment_ok
    assert report.bad_cube == 0
    assert report.disjoint_ok


def test_verify_bin_mixed_classes_touching():
    # One class-2 cube and one class-4 cube sharing a facet at d=2.
    eps = F(1, 16)
    c2 = PlacedCube(CubeClass(2, eps, 2), (F(15, 32), F(0)))
    c4 = PlacedCube(CubeClass(4, eps, 2), (F(0), F(47, 64)))
    report = verify_bin(Bin(2, (c2, c4)))
    assert report, (report.offending_pair, report.bad_cube)


def test_verify_bin_finds_cross_class_overlap():
    eps = F(1, 9)
    a = PlacedCube(CubeClass(2, eps, 2), (F(0), F(0)))
    b = PlacedCube(CubeClass(3, eps, 2), (F(1, 2), F(1, 2)))  # pokes into a
    report = verify_bin(Bin(2, (a, b)))
    assert not report.disjoint_ok
    assert report.offending_pair == (0, 1)


def test_verify_bin_randomized_against_pairwise_oracle():
    rng = random.Random(20260815)
    for trial in range(40):
        d = rng.choice([1, 2, 3])
        cubes = []
        for _ in range(rng.randrange(2, 7)):
            k = rng.choice([2, 3, 4])
            eps = F(rng.randrange(0, 3), 9)
            cls = CubeClass(k, eps, d)
            lim = 1 - cls.side
            base = tuple(
                F(rng.randrange(0, 13), 16) * lim if lim > 0 else F(0) for _ in range(d)
            )
            cubes.append(PlacedCube(cls, base))
        report = verify_bin(Bin(d, tuple(cubes)))
        oracle = all(
            cubes_disjoint(a, b) for a, b in itertools.combinations(cubes, 2)
        )
        assert report.disjoint_ok == oracle, (trial, report.offending_pair)


def test_occupied_volume_grid_and_empty():
    assert occupied_volume(Bin(2)) == 0
    assert occupied_volume(_grid_bin(3, 2, F(1, 9))) == F(400, 729)


def test_occupied_volume_never_exceeds_one_on_valid_bins():
    for k, d in [(2, 2), (3, 2), (4, 2), (3, 3), (2, 4)]:
        b = _grid_bin(k, d, F(1, k * k))
        assert verify_bin(b)
        assert occupied_volume(b) <= 1


def test_find_free_position_grid_slot():
    eps = F(1, 9)
    cls = CubeClass(3, eps, 2)
    side = cls.side
    cubes = [
        PlacedCube(cls, (F(0), F(0))),
        PlacedCube(cls, (F(0), side)),
        PlacedCube(cls, (side, F(0))),
    ]
    pos = find_free_position(cubes, side, 2)
    assert pos == (side, side)


def test_find_free_position_full_bin_returns_none():
    b = _grid_bin(3, 2, F(1, 9))
    assert find_free_position(b.cubes, b.cubes[0].cls.side, 2) is None


def test_find_free_position_empty_bin_origin():
    assert find_free_position([], F(1, 2), 3) == (F(0), F(0), F(0))


def test_bin_json_round_trip():
    b = _grid_bin(3, 2, F(1, 9))
    doc = bin_to_dict(b)
    again = bin_from_dict(doc)
    assert again == b
    assert doc["cubes"][0]["epsilon"] == "1/9"
    assert bin_to_dict(again) == doc
