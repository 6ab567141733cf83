"""Exact rational geometry for open hypercubes inside the unit bin.

Every coordinate, side length and volume is a `fractions.Fraction`, and
every comparison is exact; floats are rejected at the boundary so no
rounding can sneak into a correctness path.  Cubes are open boxes: two
cubes that merely share a boundary facet count as disjoint.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Optional, Sequence, Union

Rational = Union[int, str, Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)


def as_rational(value: Rational) -> Fraction:
    """Coerce an int, a "p/q" string, or a Fraction to an exact Fraction.

    Floats are refused on purpose: silently rounding 0.1 to a nearby
    rational would poison every downstream exactness guarantee.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"expected int, 'p/q' string or Fraction, got {type(value).__name__}")


def format_rational(value: Rational) -> str:
    """Render a rational as the canonical "p/q" string used in JSON files."""
    q = as_rational(value)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Interval:
    """Open interval (lo, hi) with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if not (isinstance(self.lo, Fraction) and isinstance(self.hi, Fraction)):
            object.__setattr__(self, "lo", as_rational(self.lo))
            object.__setattr__(self, "hi", as_rational(self.hi))
        if not self.lo < self.hi:
            raise ValueError(f"empty interval: lo={self.lo} hi={self.hi}")

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo


def intervals_disjoint(a: Interval, b: Interval) -> bool:
    """True iff the two open intervals do not intersect.

    Touching endpoints (a.hi == b.lo) count as disjoint because the
    intervals are open.
    """
    return a.hi <= b.lo or b.hi <= a.lo


@dataclass(frozen=True)
class CubeClass:
    """Cube type: side (1 + epsilon) / k in dimension d.

    k >= 2 is the class index, epsilon >= 0 a rational slack.  The side
    must not exceed 1, i.e. epsilon <= k - 1.  epsilon == 0 is the
    degenerate closed-packing limit, allowed for volume queries but
    rejected by the packing builders (they need strict slack).
    """

    k: int
    epsilon: Fraction
    d: int

    def __post_init__(self) -> None:
        if not isinstance(self.k, int) or self.k < 2:
            raise ValueError(f"class index k must be an int >= 2, got {self.k!r}")
        if not isinstance(self.d, int) or self.d < 1:
            raise ValueError(f"dimension d must be an int >= 1, got {self.d!r}")
        object.__setattr__(self, "epsilon", as_rational(self.epsilon))
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.side > 1:
            raise ValueError(
                f"side (1+{self.epsilon})/{self.k} exceeds 1; need epsilon <= k-1"
            )

    @property
    def side(self) -> Fraction:
        return (1 + self.epsilon) / self.k

    @property
    def volume(self) -> Fraction:
        return self.side ** self.d


def cube_volume(cls: CubeClass) -> Fraction:
    """Volume ((1 + epsilon) / k)^d of a class cube, exactly."""
    return cls.volume


@dataclass(frozen=True)
class PlacedCube:
    """A class cube anchored at an exact base corner.

    Construction validates shape only; containment in the unit bin is
    policed by verify_bin so that ill-formed inputs (e.g. loaded from a
    hostile JSON file) can still be inspected and reported.
    """

    cls: CubeClass
    base: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        base = tuple(as_rational(x) for x in self.base)
        object.__setattr__(self, "base", base)
        if len(base) != self.cls.d:
            raise ValueError(
                f"base has {len(base)} coordinates for a {self.cls.d}-dimensional cube"
            )

    def interval(self, i: int) -> Interval:
        """Open extent of the cube along dimension i (0-based)."""
        lo = self.base[i]
        return Interval(lo, lo + self.cls.side)

    def fits_unit_bin(self) -> bool:
        side = self.cls.side
        return all(x >= 0 and x + side <= 1 for x in self.base)


def cubes_disjoint(a: PlacedCube, b: PlacedCube) -> bool:
    """True iff the two open cubes do not intersect.

    Open boxes intersect exactly when their projections intersect in
    every dimension, so one disjoint dimension certifies disjointness.
    """
    if a.cls.d != b.cls.d:
        raise ValueError(f"dimension mismatch: {a.cls.d} vs {b.cls.d}")
    sa, sb = a.cls.side, b.cls.side
    for xa, xb in zip(a.base, b.base):
        if xa + sa <= xb or xb + sb <= xa:
            return True
    return False


@dataclass(frozen=True)
class Bin:
    """A unit bin holding placed cubes of one dimension.

    The cube tuple is immutable; "adding" a cube builds a new Bin via
    with_cube.  Disjointness is certified by verify_bin, never assumed.
    """

    d: int
    cubes: tuple[PlacedCube, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "cubes", tuple(self.cubes))
        for c in self.cubes:
            if c.cls.d != self.d:
                raise ValueError(
                    f"cube of dimension {c.cls.d} in {self.d}-dimensional bin"
                )

    def with_cube(self, cube: PlacedCube) -> "Bin":
        return Bin(self.d, self.cubes + (cube,))

    def __len__(self) -> int:
        return len(self.cubes)


@dataclass(frozen=True)
class BinVerification:
    """Outcome of an exact bin check; truthy iff the bin is valid."""

    containment_ok: bool
    disjoint_ok: bool
    cube_count: int
    bad_cube: Optional[int] = None
    offending_pair: Optional[tuple[int, int]] = None

    def __bool__(self) -> bool:
        return self.containment_ok and self.disjoint_ok


def _member_masks(groups: Sequence[Sequence[int]], n: int) -> list[int]:
    # One big-int bitmask of cube indices per distinct interval.
    masks = []
    for members in groups:
        buf = bytearray((n + 7) // 8)
        for idx in members:
            buf[idx >> 3] |= 1 << (idx & 7)
        masks.append(int.from_bytes(bytes(buf), "little"))
    return masks


def verify_bin(b: Bin) -> BinVerification:
    """Exact containment and pairwise-disjointness certificate for a bin.

    Pairwise disjointness is decided without enumerating cube pairs:
    per dimension the distinct open intervals are tabulated (packings
    built from class grids reuse a handful of interval values), their
    mutual overlaps are decided exactly once, and each cube then gets a
    big-int mask of the cubes overlapping it in that dimension.  ANDing
    a cube's d masks leaves exactly the cubes that overlap it in every
    dimension, i.e. its open-box intersectors.  The first offending
    pair (lowest indices) is reported for debugging.
    """
    n = len(b.cubes)
    containment_ok = True
    bad_cube: Optional[int] = None
    for idx, cube in enumerate(b.cubes):
        if not cube.fits_unit_bin():
            containment_ok = False
            bad_cube = idx
            break
    if n < 2:
        return BinVerification(containment_ok, True, n, bad_cube, None)

    # Per-dimension overlap masks over distinct intervals.
    per_dim_overlap: list[list[int]] = []
    per_dim_ids: list[list[int]] = []
    for dim in range(b.d):
        key_to_id: dict[tuple[Fraction, Fraction], int] = {}
        ids: list[int] = []
        intervals: list[tuple[Fraction, Fraction]] = []
        groups: list[list[int]] = []
        for idx, cube in enumerate(b.cubes):
            lo = cube.base[dim]
            key = (lo, lo + cube.cls.side)
            t = key_to_id.get(key)
            if t is None:
                t = len(intervals)
                key_to_id[key] = t
                intervals.append(key)
                groups.append([])
            ids.append(t)
            groups[t].append(idx)
        member = _member_masks(groups, n)
        t_count = len(intervals)
        overlap = [0] * t_count
        for i in range(t_count):
            lo_i, hi_i = intervals[i]
            acc = member[i]  # an interval always overlaps itself
            for j in range(t_count):
                if j == i:
                    continue
                lo_j, hi_j = intervals[j]
                if lo_i < hi_j and lo_j < hi_i:
                    acc |= member[j]
            overlap[i] = acc
        per_dim_overlap.append(overlap)
        per_dim_ids.append(ids)

    for idx in range(n):
        acc = per_dim_overlap[0][per_dim_ids[0][idx]]
        for dim in range(1, b.d):
            acc &= per_dim_overlap[dim][per_dim_ids[dim][idx]]
            if acc == 0:
                break
        extra = acc & ~(1 << idx)
        if extra:
            partner = (extra & -extra).bit_length() - 1
            pair = (partner, idx) if partner < idx else (idx, partner)
            return BinVerification(containment_ok, False, n, bad_cube, pair)
    return BinVerification(containment_ok, True, n, bad_cube, None)


def occupied_volume(b: Bin) -> Fraction:
    """Total volume of the cubes in the bin, exactly."""
    counts: dict[CubeClass, int] = {}
    for cube in b.cubes:
        counts[cube.cls] = counts.get(cube.cls, 0) + 1
    return sum((cls.volume * cnt for cls, cnt in counts.items()), start=ZERO)


def find_free_position(
    cubes: Sequence[PlacedCube], side: Fraction, d: int
) -> Optional[tuple[Fraction, ...]]:
    """First base (lexicographically) where a side-length cube fits.

    Candidate coordinates per dimension are 0 plus every existing cube
    boundary, which suffices for grid-structured bins but is heuristic
    in general: a None result means "no candidate position fits", not a
    proof of impossibility (callers that need a proof must argue it).
    """
    side = as_rational(side)
    if side <= 0 or side > 1:
        raise ValueError(f"side must be in (0, 1], got {side}")
    candidates: list[list[Fraction]] = []
    for dim in range(d):
        values = {ZERO}
        for cube in cubes:
            lo = cube.base[dim]
            values.add(lo)
            values.add(lo + cube.cls.side)
        candidates.append(sorted(v for v in values if v >= 0 and v + side <= 1))
        if not candidates[-1]:
            return None

    sides = [c.cls.side for c in cubes]

    def fits(base: tuple[Fraction, ...]) -> bool:
        for cube, s in zip(cubes, sides):
            for dim in range(d):
                lo = cube.base[dim]
                x = base[dim]
                if x + side <= lo or lo + s <= x:
                    break
            else:
                return False
        return True

    def rec(dim: int, prefix: tuple[Fraction, ...]) -> Optional[tuple[Fraction, ...]]:
        if dim == d:
            return prefix if fits(prefix) else None
        for v in candidates[dim]:
            found = rec(dim + 1, prefix + (v,))
            if found is not None:
                return found
        return None

    return rec(0, ())


# -- JSON round-trip -------------------------------------------------------
#
# Packing file format:
#   {"d": int, "cubes": [{"k": int, "epsilon": "p/q", "base": ["p/q", ...]}]}
# Writers may add a "manifest" key; parsers ignore unknown keys.


def cube_to_dict(cube: PlacedCube) -> dict:
    return {
        "k": cube.cls.k,
        "epsilon": format_rational(cube.cls.epsilon),
        "base": [format_rational(x) for x in cube.base],
    }


def cube_from_dict(data: Mapping, d: int) -> PlacedCube:
    cls = CubeClass(int(data["k"]), as_rational(data["epsilon"]), d)
    return PlacedCube(cls, tuple(as_rational(x) for x in data["base"]))


def bin_to_dict(b: Bin) -> dict:
    return {"d": b.d, "cubes": [cube_to_dict(c) for c in b.cubes]}


def bin_from_dict(data: Mapping) -> Bin:
    d = int(data["d"])
    return Bin(d, tuple(cube_from_dict(c, d) for c in data["cubes"]))


def save_bin(path, b: Bin, manifest: Optional[Mapping] = None) -> None:
    doc = bin_to_dict(b)
    if manifest is not None:
        doc["manifest"] = dict(manifest)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_bin(path) -> Bin:
    with open(path, encoding="utf-8") as fh:
        return bin_from_dict(json.load(fh))
