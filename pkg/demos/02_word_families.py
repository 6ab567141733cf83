"""Word families: the combinatorial layer underneath every packing.

A family assigns each class k a language of position words.  Gapped
languages keep same-class cubes apart; separated language pairs keep
different classes apart.  Run with: python3 demos/02_word_families.py
"""

import random

from cubepack import (
    are_separated,
    build_separated_family,
    count_good_words,
    is_gapped,
    warmup_family,
)


def main() -> None:
    fam = warmup_family(4)
    print(f"hand-built family in dimension {fam.d}: classes {fam.classes}")
    print(f"sizes {fam.sizes()}, weight {fam.weight()}")
    for k in fam.classes:
        print(f"  L_{k} gapped: {bool(is_gapped(fam.languages[k]))}")
    print(f"certificate: {bool(fam.certify())}")

    sampled = build_separated_family(4, (2, 3, 4), seed=7)
    print(f"\nsampled family, classes {sampled.classes}: "
          f"sizes {sampled.sizes()}, weight {sampled.weight()}")
    pair_ok = are_separated(sampled.languages[2], sampled.languages[3])
    print(f"L_2 vs L_3 separated: {bool(pair_ok)}")
    f2 = sorted(sampled.fsets.sets[2])
    print(f"index set F_2 behind L_2: {f2}")

    # counting survivors by inclusion-exclusion instead of enumeration
    n = count_good_words(3, (1, 2, 3), [(1, 2)])
    print(f"\ngood words for k=3 on three coordinates, one blocked pair: {n}")

    rng = random.Random(0)
    w = sampled.languages[4].sample_word(rng)
    print(f"a random class-4 word: {w}")


if __name__ == "__main__":
    main()
