"""From word families to certified cube packings of the unit bin.

A class-k word picks one interval per dimension out of k staggered
candidates of length (1 + eps)/k; separated families therefore land as
pairwise disjoint open cubes in one bin.  The module also builds the
homogeneous grids H_k (all (k-1)^d class-k cubes in one bin) and the
report drivers that chase the asymptotic weight targets.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .geometry import (
    Bin,
    CubeClass,
    Interval,
    PlacedCube,
    as_rational,
    format_rational,
    occupied_volume,
    verify_bin,
)
from .languages import (
    FamilyConstructionError,
    FSetsSamplingError,
    Language,
    SeparatedFamily,
    Word,
    build_separated_family,
    warmup_family,
)


class PackingVerificationError(RuntimeError):
    """A constructed packing failed its own geometric certificate (a bug)."""


def _check_eps_for_base(k: int, epsilon: Fraction) -> Fraction:
    epsilon = as_rational(epsilon)
    if not 0 < epsilon < Fraction(1, k - 1):
        raise ValueError(
            f"need 0 < epsilon < 1/{k - 1} for class {k} base points, got {epsilon}"
        )
    return epsilon


def base_coordinate(k: int, j: int, epsilon) -> Fraction:
    """Base point of the j-th class-k interval.

    The first k-1 intervals sit on the grid (j-1)(1+eps)/k; the k-th is
    right-aligned at 1 - (1+eps)/k, which makes it overlap interval
    k-1 and only that one.
    """
    if k < 2:
        raise ValueError(f"need k >= 2, got {k}")
    if not 1 <= j <= k:
        raise ValueError(f"need 1 <= j <= {k}, got {j}")
    epsilon = _check_eps_for_base(k, epsilon)
    if j == k:
        return 1 - (1 + epsilon) / k
    return (j - 1) * (1 + epsilon) / k


def end_coordinate(k: int, j: int, epsilon) -> Fraction:
    """Upper endpoint of the j-th class-k interval."""
    return base_coordinate(k, j, epsilon) + (1 + as_rational(epsilon)) / k


def interval_for(k: int, j: int, epsilon) -> Interval:
    lo = base_coordinate(k, j, epsilon)
    return Interval(lo, lo + (1 + as_rational(epsilon)) / k)


def gap_inequality_holds(k: int, kp: int, epsilon) -> bool:
    """Exact cross-class clearance: top of interval k-1 of the lower class
    stays strictly below the base of the top interval of the higher class."""
    if not 2 <= k < kp:
        raise ValueError(f"need 2 <= k < k', got {k}, {kp}")
    epsilon = as_rational(epsilon)
    return (k - 1) * (1 + epsilon) / k < 1 - (1 + epsilon) / kp


def place_word(word: Word, epsilon) -> PlacedCube:
    """Cube of class word.k whose dimension-i interval is picked by letter i."""
    epsilon = _check_eps_for_base(word.k, as_rational(epsilon))
    cls = CubeClass(word.k, epsilon, word.d)
    base = tuple(base_coordinate(word.k, j, epsilon) for j in word.letters)
    return PlacedCube(cls, base)


@dataclass
class TypedPacking:
    """A verified single-bin packing plus its per-class bookkeeping."""

    d: int
    epsilon: Fraction
    bin: Bin
    nu: dict[int, int]  # class -> number of cubes placed
    words: dict[int, tuple[tuple[int, ...], ...]]  # class -> placed words
    family_sizes: Optional[dict[int, int]] = None  # full |L_k| when known

    @property
    def classes(self) -> tuple[int, ...]:
        return tuple(sorted(self.nu))

    @property
    def k_max(self) -> int:
        return max(self.nu)

    def weight(self) -> Fraction:
        """Sum of nu_k / (k-1)^d: how many homogeneous bins the cubes regroup into."""
        return sum(
            (Fraction(n, (k - 1) ** self.d) for k, n in self.nu.items()),
            start=Fraction(0),
        )

    def full_weight(self) -> Fraction:
        sizes = self.family_sizes if self.family_sizes is not None else self.nu
        return sum(
            (Fraction(n, (k - 1) ** self.d) for k, n in sizes.items()),
            start=Fraction(0),
        )

    def occupied(self) -> Fraction:
        return occupied_volume(self.bin)

    @classmethod
    def from_bin(cls, b: Bin) -> "TypedPacking":
        """Re-derive per-class counts from a raw bin (e.g. one loaded from JSON)."""
        if not b.cubes:
            raise ValueError("cannot type an empty packing")
        eps = b.cubes[0].cls.epsilon
        nu: dict[int, int] = {}
        for cube in b.cubes:
            if cube.cls.epsilon != eps:
                raise ValueError("mixed epsilon values in one typed packing")
            nu[cube.cls.k] = nu.get(cube.cls.k, 0) + 1
        return cls(b.d, eps, b, nu, {})


def build_packing(
    family: SeparatedFamily,
    epsilon,
    *,
    per_class_cap: Optional[int] = None,
    materialize_cap: int = 100_000,
    verify: bool = True,
) -> TypedPacking:
    """Place a separated family's words as disjoint cubes in one bin.

    Requires 0 < eps <= 1/k_max^2 (the packing hypothesis) and checks
    the exact cross-class gap inequality for every class pair before
    building.  The result is certified by verify_bin; a failure raises,
    it is never silently accepted.  per_class_cap limits how many words
    per class are materialized (mandatory for predicate-core families).
    """
    epsilon = as_rational(epsilon)
    classes = family.classes
    k_max = max(classes)
    if not 0 < epsilon <= Fraction(1, k_max * k_max):
        raise ValueError(
            f"need 0 < epsilon <= 1/{k_max * k_max} for classes up to {k_max}, "
            f"got {epsilon}"
        )
    for k, kp in itertools.combinations(classes, 2):
        if not gap_inequality_holds(k, kp, epsilon):
            raise ValueError(
                f"gap inequality fails for classes ({k}, {kp}) at epsilon {epsilon}"
            )

    nu: dict[int, int] = {}
    words: dict[int, tuple[tuple[int, ...], ...]] = {}
    cubes: list[PlacedCube] = []
    total = 0
    for k in classes:
        lang = family.languages[k]
        selected = tuple(lang.select_words(per_class_cap))
        total += len(selected)
        if total > materialize_cap:
            raise ValueError(
                f"materializing more than {materialize_cap} cubes; "
                f"pass per_class_cap to bound the packing"
            )
        nu[k] = len(selected)
        words[k] = selected
        for letters in selected:
            cubes.append(place_word(Word(letters, k), epsilon))

    b = Bin(family.d, tuple(cubes))
    if verify:
        report = verify_bin(b)
        if not report:
            raise PackingVerificationError(
                f"packing failed verification: bad_cube={report.bad_cube} "
                f"pair={report.offending_pair}"
            )
    sizes = {k: family.languages[k].count() for k in classes}
    return TypedPacking(family.d, epsilon, b, nu, words, sizes)


@dataclass
class HomogeneousBin:
    """All (k-1)^d class-k cubes on the left-aligned grid in one bin."""

    k: int
    d: int
    epsilon: Fraction
    bin: Bin

    @property
    def cube_count(self) -> int:
        return (self.k - 1) ** self.d


def build_homogeneous(k: int, d: int, epsilon, *, verify: bool = True) -> HomogeneousBin:
    """Grid packing with bases i*(1+eps)/k, i in {0..k-2}^d.

    Needs 0 < eps <= 1/(k-1); at the boundary the last cube ends exactly
    at 1 and neighbouring cubes share facets, which open cubes allow.
    """
    if k < 2:
        raise ValueError(f"need k >= 2, got {k}")
    epsilon = as_rational(epsilon)
    if not 0 < epsilon <= Fraction(1, k - 1):
        raise ValueError(f"need 0 < epsilon <= 1/{k - 1}, got {epsilon}")
    cls = CubeClass(k, epsilon, d)
    side = cls.side
    cubes = tuple(
        PlacedCube(cls, tuple(i * side for i in idx))
        for idx in itertools.product(range(k - 1), repeat=d)
    )
    b = Bin(d, cubes)
    if verify:
        report = verify_bin(b)
        if not report:
            raise PackingVerificationError(f"grid packing failed: {report}")
    return HomogeneousBin(k, d, epsilon, b)


# -- report drivers -----------------------------------------------------------


def _log(x: float, log_base: str) -> float:
    if log_base == "natural":
        return math.log(x)
    if log_base == "2":
        return math.log2(x)
    raise ValueError(f"log_base must be 'natural' or '2', got {log_base!r}")


@dataclass
class DensePackingReport:
    """Outcome of the many-classes construction at a given dimension.

    Targets involving log d are irrational, so they are reported as
    floats and asserted only above the configured asymptotic scale d0;
    every packing quantity stays exact.
    """

    d: int
    log_base: str
    s_formula: int
    s_effective: int
    epsilon: Fraction
    family_mode: str  # "randomized" | "warmup-fallback"
    fallback_reason: Optional[str]
    packing: TypedPacking
    weight_full: Fraction
    target_density: float  # d / (5 log d)
    target_fraction: Fraction  # (10/11)(S - 1)
    meets_density: bool
    meets_fraction: bool
    asserted: bool


def dense_packing_report(
    d: int,
    seed: int = 0,
    *,
    log_base: str = "natural",
    d0: int = 1 << 20,
    per_class_cap: int = 200,
    enumerate_cap: int = 1_000_000,
) -> DensePackingReport:
    """Build the densest-available family at dimension d and report.

    S = ceil(2d / (9 log d)) classes when the randomized construction
    is feasible; otherwise the hand-built family over classes 2..d with
    eps = 1/d^2 serves as a labeled fallback (S < 2, sampler failure,
    or an empty class at desk scale all trigger it).
    """
    if d < 2:
        raise ValueError(f"need d >= 2, got {d}")
    s_formula = math.ceil(2 * d / (9 * _log(d, log_base)))
    fallback_reason: Optional[str] = None
    family = None
    s_eff = s_formula
    if s_formula >= 2:
        try:
            core_sizes = max((k - 1) ** (-(-d // 2)) for k in range(2, s_formula + 1))
            mode = "enumerate" if core_sizes <= enumerate_cap else "implicit"
            family = build_separated_family(
                d,
                tuple(range(2, s_formula + 1)),
                seed,
                mode=mode,
                enumerate_cap=enumerate_cap,
            )
        except (FSetsSamplingError, FamilyConstructionError, ValueError) as exc:
            fallback_reason = str(exc)
    else:
        fallback_reason = f"S = {s_formula} < 2 leaves no classes"
    if family is None:
        family = warmup_family(d)
        s_eff = d
        family_mode = "warmup-fallback"
    else:
        family_mode = "randomized"
    epsilon = Fraction(1, s_eff * s_eff)
    packing = build_packing(family, epsilon, per_class_cap=per_class_cap)
    weight_full = family.weight()
    target_density = d / (5 * _log(d, log_base))
    target_fraction = Fraction(10, 11) * (s_eff - 1)
    meets_density = float(weight_full) >= target_density
    meets_fraction = weight_full >= target_fraction
    asserted = d >= d0
    if asserted and not (meets_density and meets_fraction):
        raise RuntimeError(
            f"asymptotic weight target failed at asserted scale d={d}: "
            f"weight {weight_full} vs density {target_density} / fraction {target_fraction}"
        )
    return DensePackingReport(
        d,
        log_base,
        s_formula,
        s_eff,
        epsilon,
        family_mode,
        fallback_reason,
        packing,
        weight_full,
        target_density,
        target_fraction,
        meets_density,
        meets_fraction,
        asserted,
    )


@dataclass
class PowerOfTwoPackingReport:
    """Outcome of the powers-of-two construction at a given dimension."""

    d: int
    log_base: str  # convention for the inner log d
    s_prime: int
    s_prime_overridden: bool
    classes: tuple[int, ...]
    epsilon: Optional[Fraction]
    packing: Optional[TypedPacking]
    weight_full: Optional[Fraction]
    target_log_d: float
    meets_target: Optional[bool]
    class_count_ok: Optional[bool]  # len(classes) == S' - 1
    status: str  # "built" | "degenerate"
    asserted: bool


def power_of_two_s_prime(d: int, log_base: str = "natural") -> int:
    """ceil(log2 d - log2 log d - 3); the inner log base is a recorded choice."""
    if d < 2:
        raise ValueError(f"need d >= 2, got {d}")
    return math.ceil(math.log2(d) - math.log2(_log(d, log_base)) - 3)


def power_of_two_packing_report(
    d: int,
    seed: int = 0,
    *,
    log_base: str = "natural",
    d0: int = 1 << 20,
    s_prime: Optional[int] = None,
    per_class_cap: int = 200,
    enumerate_cap: int = 1_000_000,
) -> PowerOfTwoPackingReport:
    """Build the family over classes {2, 4, ..., 2^(S'-1)} and report.

    With S' from the formula (or an explicit override for desk-scale
    demonstration), eps = 4^-(S'-1).  S' < 2 yields an empty class set;
    that is reported as degenerate rather than repaired.
    """
    formula = power_of_two_s_prime(d, log_base)
    sp = s_prime if s_prime is not None else formula
    overridden = s_prime is not None
    target = _log(d, log_base)
    asserted = d >= d0
    if sp < 2:
        if asserted:
            raise RuntimeError(f"S' = {sp} < 2 at asserted scale d={d}")
        return PowerOfTwoPackingReport(
            d, log_base, sp, overridden, (), None, None, None, target, None, None,
            "degenerate", asserted,
        )
    classes = tuple(2 ** (j - 1) for j in range(2, sp + 1))
    epsilon = Fraction(1, 4 ** (sp - 1))
    core_sizes = max((k - 1) ** (-(-d // 2)) for k in classes)
    mode = "enumerate" if core_sizes <= enumerate_cap else "implicit"
    family = build_separated_family(
        d, classes, seed, mode=mode, enumerate_cap=enumerate_cap
    )
    packing = build_packing(family, epsilon, per_class_cap=per_class_cap)
    weight_full = family.weight()
    meets = float(weight_full) >= target
    class_count_ok = len(classes) == sp - 1
    if asserted and not meets:
        raise RuntimeError(
            f"power-of-two weight target failed at asserted scale d={d}: "
            f"{weight_full} < {target}"
        )
    return PowerOfTwoPackingReport(
        d, log_base, sp, overridden, classes, epsilon, packing, weight_full,
        target, meets, class_count_ok, "built", asserted,
    )


# -- JSON ----------------------------------------------------------------------


def packing_to_dict(packing: TypedPacking) -> dict:
    """Words, not coordinates: the cubes are rebuilt on load and re-verified."""
    doc: dict = {
        "d": packing.d,
        "epsilon": format_rational(packing.epsilon),
        "words": {
            str(k): [list(w) for w in packing.words[k]] for k in packing.classes
        },
    }
    if packing.family_sizes is not None:
        doc["family_sizes"] = {str(k): n for k, n in sorted(packing.family_sizes.items())}
    return doc


def packing_from_dict(data: Mapping, *, verify: bool = True) -> TypedPacking:
    """Inverse of packing_to_dict; unknown keys (manifest, report) are ignored."""
    d = int(data["d"])
    epsilon = as_rational(data["epsilon"])
    nu: dict[int, int] = {}
    words: dict[int, tuple[tuple[int, ...], ...]] = {}
    cubes: list[PlacedCube] = []
    for key in sorted(data["words"], key=int):
        k = int(key)
        selected = tuple(tuple(int(x) for x in w) for w in data["words"][key])
        nu[k] = len(selected)
        words[k] = selected
        for letters in selected:
            cubes.append(place_word(Word(letters, k), epsilon))
    b = Bin(d, tuple(cubes))
    if verify:
        report = verify_bin(b)
        if not report:
            raise PackingVerificationError(
                f"loaded packing fails verification: bad_cube={report.bad_cube} "
                f"pair={report.offending_pair}"
            )
    sizes = data.get("family_sizes")
    family_sizes = {int(k): int(n) for k, n in sizes.items()} if sizes else None
    return TypedPacking(d, epsilon, b, nu, words, family_sizes)


def save_packing(path, packing: TypedPacking, manifest: Optional[Mapping] = None) -> None:
    doc = packing_to_dict(packing)
    if manifest is not None:
        doc["manifest"] = dict(manifest)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_packing(path, *, verify: bool = True) -> TypedPacking:
    with open(path, encoding="utf-8") as fh:
        return packing_from_dict(json.load(fh), verify=verify)
