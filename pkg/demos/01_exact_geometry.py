"""Exact cube geometry: place cubes, verify a bin, find a free corner.

Every coordinate is a Fraction, so "touching" and "overlapping" are
decided exactly. Run with: python3 demos/01_exact_geometry.py
"""

from fractions import Fraction as F

from cubepack import (
    Bin,
    CubeClass,
    PlacedCube,
    cubes_disjoint,
    find_free_position,
    occupied_volume,
    verify_bin,
)


def main() -> None:
    cls = CubeClass(3, F(1, 9), 2)
    print(f"class-3 cube in the plane: side {cls.side} (open cube)")

    a = PlacedCube(cls, (F(0), F(0)))
    b = PlacedCube(cls, (cls.side, F(0)))
    print(f"two cubes sharing a face: disjoint? {cubes_disjoint(a, b)}")

    # nudge the second cube left by 1/1000 and the overlap is caught
    bad = PlacedCube(cls, (cls.side - F(1, 1000), F(0)))
    print(f"after a 1/1000 nudge:     disjoint? {cubes_disjoint(a, bad)}")

    bin_ = Bin(2, (a, b))
    report = verify_bin(bin_)
    print(f"verify_bin on the honest bin: ok={bool(report)}")
    print(f"occupied volume: {occupied_volume(bin_)}")

    broken = Bin(2, (a, bad))
    report = verify_bin(broken)
    print(f"verify_bin on the nudged bin: ok={bool(report)}")
    print(f"  offending pair: {report.offending_pair}")

    corner = find_free_position([a, b], cls.side, 2)
    print(f"free corner for a third cube: ({', '.join(map(str, corner))})")


if __name__ == "__main__":
    main()
