"""The adversarial stream and the bounded-space harness.

A packed bin is scaled into a class-segmented stream; counting then
certifies how many bins any bounded-space algorithm must open, and an
offline companion packing shows how few suffice.
Run with: python3 demos/04_online_lower_bound.py
"""

from fractions import Fraction as F

from cubepack import (
    ClassHarmonicBaseline,
    adversarial_instance,
    build_packing,
    offline_certificate,
    run_bounded_space,
    warmup_family,
)


def main() -> None:
    packing = build_packing(warmup_family(3), F(1, 9))
    print(f"source bin: weight {packing.weight()}, classes {packing.classes}")

    adv = adversarial_instance(packing, m=1)
    inst = adv.instance
    print(f"\nstream: {inst.total_items} cubes in {len(inst.segments)} "
          f"class segments, scale {adv.scale}")
    for seg, lb in zip(inst.segments, adv.per_segment_lower_bounds):
        print(f"  class {seg.k}: {seg.count} cubes, "
              f"forces >= {lb} closed bins")
    print(f"certified lower bound: {adv.lower_bound} bins")

    offline = offline_certificate(packing, adv.scale)
    print(f"offline certificate: same cubes in {len(offline)} verified bins")

    run = run_bounded_space(
        ClassHarmonicBaseline(1),
        inst,
        1,
        opt_upper_bound=len(offline),
        certified_lower_bound=adv.lower_bound,
    )
    print(f"\nbaseline with one open bin: {run.bins_used} bins used")
    print(f"ratio against the offline packing: {run.report.ratio}")


if __name__ == "__main__":
    main()
