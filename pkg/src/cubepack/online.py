"""Bounded-space online packing: adversarial streams, a strict harness, a baseline.

The adversary rearranges C copies of a typed single-bin packing U into
K class-homogeneous segments.  Any algorithm restricted to M open bins
must then use at least (C/2) * w(U) bins, while the items trivially fit
offline into C bins.  The harness replays a stream against an algorithm
and re-verifies every placement exactly, so a completed run is a
machine-checked certificate rather than a trusted simulation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from types import MappingProxyType
from typing import Dict, Iterator, Mapping, Optional, Sequence, Tuple, Union

from .geometry import (
    Bin,
    CubeClass,
    PlacedCube,
    as_rational,
    format_rational,
    verify_bin,
)
from .packing import TypedPacking


class InvalidScaleError(ValueError):
    """The requested stream scale breaks divisibility or the volume floor."""


class HarnessViolation(RuntimeError):
    """An algorithm broke the online contract; the message names the step."""


# ---------------------------------------------------------------------------
# instances


@dataclass(frozen=True)
class Segment:
    """A run of `count` identical cubes of class k."""

    k: int
    count: int

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ValueError(f"class must be >= 2, got {self.k}")
        if self.count < 0:
            raise ValueError(f"segment count must be >= 0, got {self.count}")


@dataclass(frozen=True)
class Instance:
    """An ordered stream of cubes, grouped into class-homogeneous segments."""

    d: int
    epsilon: Fraction
    segments: Tuple[Segment, ...]

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        eps = as_rational(self.epsilon)
        if eps <= 0:
            # the per-segment counting bound needs strictly oversized cubes
            raise ValueError(f"epsilon must be positive, got {eps}")
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "segments", tuple(self.segments))

    @property
    def total_items(self) -> int:
        return sum(seg.count for seg in self.segments)

    def classes(self) -> Tuple[int, ...]:
        seen: list[int] = []
        for seg in self.segments:
            if seg.k not in seen:
                seen.append(seg.k)
        return tuple(seen)

    def cube_class(self, k: int) -> CubeClass:
        return CubeClass(k, self.epsilon, self.d)

    def item_classes(self) -> Iterator[int]:
        """Yield the class of every item in stream order."""
        for seg in self.segments:
            for _ in range(seg.count):
                yield seg.k


def instance_to_dict(
    instance: Instance, *, extra: Optional[Mapping[str, object]] = None
) -> dict:
    payload: dict = {
        "d": instance.d,
        "epsilon": format_rational(instance.epsilon),
        "segments": [{"k": s.k, "count": s.count} for s in instance.segments],
    }
    if extra:
        for key, value in extra.items():
            if key in payload:
                raise ValueError(f"extra key {key!r} collides with a core field")
            payload[key] = value
    return payload


def instance_from_dict(payload: Mapping[str, object]) -> Instance:
    """Rebuild an instance; keys beyond d/epsilon/segments are ignored."""
    segments = tuple(
        Segment(int(row["k"]), int(row["count"])) for row in payload["segments"]
    )
    return Instance(int(payload["d"]), as_rational(payload["epsilon"]), segments)


def save_instance(
    instance: Instance, path, *, extra: Optional[Mapping[str, object]] = None
) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_dict(instance, extra=extra), fh, indent=2)
        fh.write("\n")


def load_instance(path) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        return instance_from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# adversarial stream generator


def paper_scale(packing: TypedPacking, m: int) -> int:
    """The faithful scale C = 2*M*N with N the product of all (k-1)^d."""
    n = 1
    for k in packing.classes:
        n *= (k - 1) ** packing.d
    return 2 * m * n


def minimal_scale(packing: TypedPacking, m: int) -> int:
    """Smallest even C whose half keeps every per-class bin count integral
    and at least M.

    C/2 must be a multiple of t0 = lcm_k((k-1)^d / gcd(nu_k, (k-1)^d)); the
    floor condition then fixes the smallest admissible multiple.
    """
    t0 = 1
    for k, nu_k in packing.nu.items():
        denom = (k - 1) ** packing.d
        step = denom // gcd(nu_k, denom)
        t0 = t0 * step // gcd(t0, step)
    mult = 1
    for k, nu_k in packing.nu.items():
        denom = (k - 1) ** packing.d
        # smallest mult with mult*t0*nu_k/denom >= m
        need = -(-m * denom // (nu_k * t0))
        mult = max(mult, need)
    return 2 * t0 * mult


def validate_scale(packing: TypedPacking, m: int, scale: int) -> None:
    """Raise InvalidScaleError unless `scale` supports the counting bound."""
    if m < 1:
        raise ValueError(f"open-bin budget must be >= 1, got {m}")
    if scale < 2 or scale % 2 != 0:
        raise InvalidScaleError(f"scale must be a positive even integer, got {scale}")
    half = scale // 2
    for k, nu_k in sorted(packing.nu.items()):
        denom = (k - 1) ** packing.d
        if (half * nu_k) % denom != 0:
            raise InvalidScaleError(
                f"scale {scale}: (scale/2)*nu_{k} = {half * nu_k} is not divisible "
                f"by (k-1)^d = {denom}"
            )
        if half * nu_k // denom < m:
            raise InvalidScaleError(
                f"scale {scale}: class {k} contributes {half * nu_k // denom} "
                f"bins, below the open-bin budget {m}"
            )


@dataclass(frozen=True)
class AdversaryResult:
    """A generated stream plus the certificates that make it interesting."""

    instance: Instance
    m: int
    scale: int
    lower_bound: int
    offline_bin_count: int
    per_segment_lower_bounds: Tuple[int, ...]


def adversarial_instance(
    packing: TypedPacking,
    m: int,
    *,
    scale: Optional[int] = None,
    order: Union[str, Sequence[int]] = "ascending",
) -> AdversaryResult:
    """Rearrange `scale` copies of the packing into class-homogeneous segments.

    With the default scale C = 2*M*N every bounded-space algorithm with at
    most M open bins needs >= (C/2)*w(U) = M*N*w(U) bins, yet the stream
    packs offline into C bins.  A custom even scale is accepted when C/2
    keeps each per-class count (C/2)*nu_k/(k-1)^d integral and >= M.
    """
    if scale is None:
        scale = paper_scale(packing, m)
    validate_scale(packing, m, scale)
    if order == "ascending":
        ks: Tuple[int, ...] = tuple(sorted(packing.nu))
    elif order == "descending":
        ks = tuple(sorted(packing.nu, reverse=True))
    else:
        ks = tuple(order)
        if sorted(ks) != sorted(packing.nu):
            raise ValueError(
                f"segment order {ks} does not enumerate the classes "
                f"{tuple(sorted(packing.nu))} exactly once"
            )
    segments = tuple(Segment(k, scale * packing.nu[k]) for k in ks)
    instance = Instance(packing.d, packing.epsilon, segments)
    half = scale // 2
    per_segment = tuple(
        half * packing.nu[k] // (k - 1) ** packing.d for k in ks
    )
    lower = sum(per_segment)
    assert Fraction(lower) == Fraction(half) * packing.weight()
    return AdversaryResult(instance, m, scale, lower, scale, per_segment)


def lower_bound_certificate(
    packing: TypedPacking, m: int, scale: Optional[int] = None
) -> int:
    """Exact bin floor (scale/2) * w(U), valid for EVERY algorithm that keeps
    at most `m` bins open on the stream generated at this scale.

    Argument: segment ell holds scale*nu_k cubes of class k, which cannot
    share a bin beyond (k-1)^d, so it needs scale*nu_k/(k-1)^d bins; at most
    m of those can predate the segment, leaving at least half that many new
    ones.  Summing over segments gives (scale/2)*w(U).
    """
    if scale is None:
        scale = paper_scale(packing, m)
    validate_scale(packing, m, scale)
    half = scale // 2
    total = 0
    for k, nu_k in packing.nu.items():
        total += half * nu_k // (k - 1) ** packing.d
    return total


def offline_certificate(
    packing: TypedPacking, scale: int, *, max_bins: int = 100_000
) -> Tuple[Bin, ...]:
    """The companion packing: `scale` verbatim copies of the single bin.

    The stream is a rearrangement of exactly these cubes, so the tuple
    witnesses an offline packing into `scale` bins.  The representative is
    re-verified here; the copies are the same immutable value.
    """
    if scale < 1:
        raise ValueError(f"scale must be >= 1, got {scale}")
    if scale > max_bins:
        raise ValueError(
            f"refusing to materialize {scale} bins (cap {max_bins}); "
            "raise max_bins explicitly if this is intended"
        )
    check = verify_bin(packing.bin)
    if not check:
        raise HarnessViolation(f"offline certificate bin failed verification: {check}")
    return (packing.bin,) * scale


# ---------------------------------------------------------------------------
# harness


@dataclass(frozen=True)
class Decision:
    """One step of an online algorithm.

    bin_id None opens a fresh bin.  `close` names open bins to retire after
    the placement; close_target additionally retires the bin just placed
    into (needed when the target is the fresh bin, whose id the algorithm
    cannot know yet).
    """

    bin_id: Optional[int]
    base: Tuple
    close: frozenset = frozenset()
    close_target: bool = False


@dataclass(frozen=True)
class PlacementRecord:
    item_index: int
    k: int
    bin_id: int
    base: Tuple[Fraction, ...]


@dataclass(frozen=True)
class RatioReport:
    """Bins used by the run against the two offline anchors."""

    bins_used: int
    opt_upper_bound: int
    certified_lower_bound: int
    ratio: Fraction

    def __post_init__(self) -> None:
        if self.certified_lower_bound > self.bins_used:
            raise ValueError(
                f"counting bound {self.certified_lower_bound} exceeds the "
                f"observed {self.bins_used} bins: the run or the bound is wrong"
            )
        if self.ratio != Fraction(self.bins_used, self.opt_upper_bound):
            raise ValueError("ratio field disagrees with bins_used/opt_upper_bound")


def ratio_report(
    bins_used: int, opt_upper_bound: int, certified_lower_bound: int
) -> RatioReport:
    return RatioReport(
        bins_used,
        opt_upper_bound,
        certified_lower_bound,
        Fraction(bins_used, opt_upper_bound),
    )


@dataclass(frozen=True)
class RunResult:
    """Full trace of a harness run; every placement was re-verified exactly."""

    bins_used: int
    open_bin_ids: Tuple[int, ...]
    closed_bin_ids: Tuple[int, ...]
    per_segment_new_bins: Tuple[int, ...]
    placements: Tuple[PlacementRecord, ...]
    bins: Mapping[int, Bin]
    report: Optional[RatioReport] = None


def run_bounded_space(
    algorithm,
    instance: Instance,
    m: int,
    *,
    opt_upper_bound: Optional[int] = None,
    certified_lower_bound: Optional[int] = None,
) -> RunResult:
    """Replay the stream against `algorithm` under the M-open-bins rule.

    The algorithm must expose decide(cube_class, open_bins) -> Decision and
    may expose placed(item_index, k, bin_id, base) to learn the id assigned
    to a fresh bin.  Nothing the algorithm claims is trusted: every placement
    is checked by verify_bin, closed bins are sealed forever, and the open
    count is audited after each step.
    """
    if m < 1:
        raise ValueError(f"open-bin budget must be >= 1, got {m}")
    open_bins: Dict[int, Bin] = {}
    all_bins: Dict[int, Bin] = {}
    closed_ids: list[int] = []
    placements: list[PlacementRecord] = []
    per_segment = [0] * len(instance.segments)
    next_id = 0
    item_index = 0
    notify = getattr(algorithm, "placed", None)
    for seg_idx, seg in enumerate(instance.segments):
        cls = instance.cube_class(seg.k)
        for _ in range(seg.count):
            step = f"item {item_index} (class {seg.k})"
            decision = algorithm.decide(cls, MappingProxyType(open_bins))
            if decision.bin_id is None:
                bin_id = next_id
                next_id += 1
                per_segment[seg_idx] += 1
                target = Bin(instance.d)
            else:
                bin_id = decision.bin_id
                if bin_id not in open_bins:
                    raise HarnessViolation(
                        f"{step}: placement into bin {bin_id}, which is not open"
                    )
                target = open_bins[bin_id]
            base = tuple(as_rational(x) for x in decision.base)
            updated = target.with_cube(PlacedCube(cls, base))
            check = verify_bin(updated)
            if not check:
                raise HarnessViolation(f"{step}: invalid placement, {check}")
            open_bins[bin_id] = updated
            all_bins[bin_id] = updated
            to_close = set(decision.close)
            if decision.close_target:
                to_close.add(bin_id)
            for cid in to_close:
                if cid not in open_bins:
                    raise HarnessViolation(
                        f"{step}: close of bin {cid}, which is not open"
                    )
                del open_bins[cid]
                closed_ids.append(cid)
            if len(open_bins) > m:
                raise HarnessViolation(
                    f"{step}: {len(open_bins)} bins left open, budget is {m}"
                )
            placements.append(PlacementRecord(item_index, seg.k, bin_id, base))
            if notify is not None:
                notify(item_index, seg.k, bin_id, base)
            item_index += 1
    report = None
    if opt_upper_bound is not None and certified_lower_bound is not None:
        report = ratio_report(next_id, opt_upper_bound, certified_lower_bound)
    return RunResult(
        bins_used=next_id,
        open_bin_ids=tuple(sorted(open_bins)),
        closed_bin_ids=tuple(closed_ids),
        per_segment_new_bins=tuple(per_segment),
        placements=tuple(placements),
        bins=all_bins,
        report=report,
    )


# ---------------------------------------------------------------------------
# baseline algorithm


@dataclass
class _Slot:
    bin_id: Optional[int]
    count: int = 0
    last_used: int = -1


class ClassHarmonicBaseline:
    """One open bin per recently seen class, filled on the class grid.

    A class-k bin takes cubes at grid bases i*(1+eps)/k until it holds
    (k-1)^d of them, then closes.  Opening a bin for an unseen class beyond
    the budget evicts the least recently used open bin.  Deliberately naive:
    it exists to exercise the harness, not to be competitive.
    """

    def __init__(self, m: int) -> None:
        if m < 1:
            raise ValueError(f"open-bin budget must be >= 1, got {m}")
        self.m = m
        self._slots: Dict[int, _Slot] = {}
        self._step = 0

    @staticmethod
    def capacity(cls: CubeClass) -> int:
        return (cls.k - 1) ** cls.d

    @staticmethod
    def _grid_base(cls: CubeClass, index: int) -> Tuple[Fraction, ...]:
        if cls.epsilon > Fraction(1, cls.k - 1):
            raise ValueError(
                f"grid fill needs epsilon <= 1/(k-1); got {cls.epsilon} at k={cls.k}"
            )
        digits = []
        rest = index
        for _ in range(cls.d):
            digits.append(rest % (cls.k - 1))
            rest //= cls.k - 1
        return tuple(digit * cls.side for digit in digits)

    def decide(self, cls: CubeClass, open_bins: Mapping[int, Bin]) -> Decision:
        cap = self.capacity(cls)
        slot = self._slots.get(cls.k)
        if slot is not None and slot.count < cap:
            return Decision(
                slot.bin_id,
                self._grid_base(cls, slot.count),
                close_target=slot.count + 1 == cap,
            )
        close: frozenset = frozenset()
        if len(self._slots) >= self.m:
            # eviction is committed here; a harness rejection aborts the run
            lru = min(self._slots, key=lambda k: self._slots[k].last_used)
            close = frozenset({self._slots.pop(lru).bin_id})
        return Decision(None, self._grid_base(cls, 0), close, close_target=cap == 1)

    def placed(self, item_index: int, k: int, bin_id: int, base) -> None:
        slot = self._slots.get(k)
        if slot is None or slot.bin_id != bin_id:
            slot = _Slot(bin_id)
            self._slots[k] = slot
        slot.count += 1
        slot.last_used = item_index
        cap = (k - 1) ** len(base)
        if slot.count >= cap:
            del self._slots[k]
        self._step = item_index + 1
