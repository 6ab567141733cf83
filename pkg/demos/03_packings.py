"""From a word family to a packed bin, plus the two dense recipes.

Each word becomes a cube base through the per-class interval ladder;
the filled bin is then re-certified cube by cube.
Run with: python3 demos/03_packings.py
"""

from fractions import Fraction as F

from cubepack import (
    build_homogeneous,
    build_packing,
    dense_packing_report,
    occupied_volume,
    power_of_two_packing_report,
    verify_bin,
    warmup_family,
)


def main() -> None:
    packing = build_packing(warmup_family(3), F(1, 9))
    print(f"warmup packing, d={packing.d}: {len(packing.bin.cubes)} cubes, "
          f"classes {packing.classes}")
    print(f"occupied volume {packing.occupied()}, weight {packing.weight()}")
    print(f"re-verified: {bool(verify_bin(packing.bin))}")

    hom = build_homogeneous(4, 2, F(1, 3))
    print(f"\nfull class-4 grid in the plane: {hom.cube_count} cubes, "
          f"occupied {occupied_volume(hom.bin)}")

    # the two constructions behind the dense-packing bounds, at toy scale
    dense = dense_packing_report(3, per_class_cap=50)
    print(f"\ndense recipe at d=3: {dense.s_effective} classes "
          f"({dense.family_mode}), full weight {dense.weight_full}")

    p2 = power_of_two_packing_report(2, s_prime=3)
    print(f"power-of-two recipe at d=2: classes {p2.classes}, "
          f"full weight {p2.weight_full}")


if __name__ == "__main__":
    main()
