"""Selfish cube packing: costs, improving moves, dynamics, equilibria, anarchy.

Each cube is a player whose cost is its volume divided by the occupied
volume of its bin; the social cost is the number of used bins.  Because
insertion cost depends only on volumes, never on positions, every move
and coalition search runs an exact arithmetic prefilter before touching
geometry, and geometry answers are memoized per bin content.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations, permutations
from math import gcd, lcm
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .geometry import (
    Bin,
    CubeClass,
    PlacedCube,
    as_rational,
    find_free_position,
    format_rational,
    occupied_volume,
    verify_bin,
)
from .packing import TypedPacking, build_homogeneous

FEASIBILITY_NOTE = (
    "candidate bases are combinations of 0 and existing cube boundaries: "
    "sufficient for the grid-structured bins this library produces, "
    "heuristic for arbitrary bins"
)


class RepackSearchError(RuntimeError):
    """Exhaustive re-layout was requested beyond the configured item cap."""


class CoalitionSearchError(RuntimeError):
    """Coalition enumeration exceeded the configured assignment budget."""


# ---------------------------------------------------------------------------
# configurations


@dataclass(frozen=True)
class GameItem:
    item_id: int
    cls: CubeClass

    @property
    def volume(self) -> Fraction:
        return self.cls.volume

    @property
    def side(self) -> Fraction:
        return self.cls.side


@dataclass(frozen=True)
class GameConfig:
    """Items plus who-sits-where; every used bin must pass verify_bin."""

    d: int
    items: Tuple[GameItem, ...]
    assignment: Dict[int, int]
    positions: Dict[int, Tuple[Fraction, ...]]

    def __post_init__(self) -> None:
        object.__setattr__(self, "items", tuple(self.items))
        ids = [it.item_id for it in self.items]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate item ids")
        for it in self.items:
            if it.cls.d != self.d:
                raise ValueError(
                    f"item {it.item_id} has dimension {it.cls.d}, config is {self.d}"
                )
            if it.item_id not in self.assignment:
                raise ValueError(f"item {it.item_id} has no bin")
            if it.item_id not in self.positions:
                raise ValueError(f"item {it.item_id} has no position")
        pos = {i: tuple(as_rational(x) for x in p) for i, p in self.positions.items()}
        object.__setattr__(self, "positions", pos)

    @cached_property
    def _by_id(self) -> Dict[int, GameItem]:
        return {it.item_id: it for it in self.items}

    def item(self, item_id: int) -> GameItem:
        return self._by_id[item_id]

    @cached_property
    def bins_map(self) -> Dict[int, Bin]:
        grouped: Dict[int, List[PlacedCube]] = {}
        for it in self.items:
            b = self.assignment[it.item_id]
            grouped.setdefault(b, []).append(PlacedCube(it.cls, self.positions[it.item_id]))
        return {b: Bin(self.d, tuple(cubes)) for b, cubes in grouped.items()}

    def used_bins(self) -> Tuple[int, ...]:
        return tuple(sorted(self.bins_map))

    @cached_property
    def _occupied(self) -> Dict[int, Fraction]:
        return {b: occupied_volume(bn) for b, bn in self.bins_map.items()}

    def occupied(self, bin_id: int) -> Fraction:
        return self._occupied[bin_id]

    def item_cost(self, item_id: int) -> Fraction:
        it = self.item(item_id)
        return it.volume / self._occupied[self.assignment[item_id]]

    def social_cost(self) -> int:
        """Number of used bins; cross-checked against the exact cost sum."""
        bins = len(self.bins_map)
        total = sum((self.item_cost(it.item_id) for it in self.items), Fraction(0))
        if total != bins:
            raise AssertionError(
                f"cost conservation broken: costs sum to {total}, {bins} bins used"
            )
        return bins

    def validate(self) -> None:
        for b, bn in sorted(self.bins_map.items()):
            check = verify_bin(bn)
            if not check:
                raise ValueError(f"bin {b} is invalid: {check}")

    def with_moves(
        self, updates: Mapping[int, Tuple[int, Tuple[Fraction, ...]]]
    ) -> "GameConfig":
        """New config with the given items reassigned to (bin, base)."""
        assignment = dict(self.assignment)
        positions = dict(self.positions)
        for item_id, (bin_id, base) in updates.items():
            assignment[item_id] = bin_id
            positions[item_id] = tuple(base)
        return GameConfig(self.d, self.items, assignment, positions)


def config_from_bins(bins: Sequence[Bin]) -> GameConfig:
    """Number the cubes of the given bins 0.. and wrap them as a game state."""
    if not bins:
        raise ValueError("need at least one bin")
    d = bins[0].d
    items: List[GameItem] = []
    assignment: Dict[int, int] = {}
    positions: Dict[int, Tuple[Fraction, ...]] = {}
    next_id = 0
    for bin_id, bn in enumerate(bins):
        if bn.d != d:
            raise ValueError("mixed dimensions across bins")
        for cube in bn.cubes:
            items.append(GameItem(next_id, cube.cls))
            assignment[next_id] = bin_id
            positions[next_id] = cube.base
            next_id += 1
    return GameConfig(d, tuple(items), assignment, positions)


def homogeneous_mixture(
    classes: Sequence[int], d: int, epsilon
) -> GameConfig:
    """One full grid bin per class: (k-1)^d class-k cubes each."""
    ks = sorted(set(classes))
    if len(ks) != len(list(classes)):
        raise ValueError("classes must be distinct")
    return config_from_bins([build_homogeneous(k, d, epsilon).bin for k in ks])


def config_to_dict(config: GameConfig) -> dict:
    cubes = []
    for it in sorted(config.items, key=lambda x: x.item_id):
        cubes.append(
            {
                "id": it.item_id,
                "bin": config.assignment[it.item_id],
                "k": it.cls.k,
                "epsilon": format_rational(it.cls.epsilon),
                "base": [format_rational(x) for x in config.positions[it.item_id]],
            }
        )
    return {"d": config.d, "cubes": cubes}


def config_from_dict(payload: Mapping[str, object]) -> GameConfig:
    d = int(payload["d"])
    items: List[GameItem] = []
    assignment: Dict[int, int] = {}
    positions: Dict[int, Tuple[Fraction, ...]] = {}
    for row in payload["cubes"]:
        item_id = int(row["id"])
        cls = CubeClass(int(row["k"]), as_rational(row["epsilon"]), d)
        items.append(GameItem(item_id, cls))
        assignment[item_id] = int(row["bin"])
        positions[item_id] = tuple(as_rational(x) for x in row["base"])
    return GameConfig(d, tuple(items), assignment, positions)


def save_config(config: GameConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config_to_dict(config), fh, indent=2)
        fh.write("\n")


def load_config(path) -> GameConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return config_from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# single-item moves


@dataclass(frozen=True)
class MoveProposal:
    """A strictly cost-decreasing migration of one item."""

    item_id: int
    source_bin: int
    target_bin: int
    mode: str
    cost_before: Fraction
    cost_after: Fraction
    base: Tuple[Fraction, ...]
    relayout: Optional[Tuple[Tuple[int, Tuple[Fraction, ...]], ...]] = None

    def __post_init__(self) -> None:
        if not self.cost_after < self.cost_before:
            raise ValueError(
                f"move must strictly decrease cost: {self.cost_before} -> "
                f"{self.cost_after}"
            )


def _pack_exact(
    classes: Sequence[CubeClass], d: int, *, node_cap: int = 200_000
) -> Optional[Tuple[Tuple[CubeClass, Tuple[Fraction, ...]], ...]]:
    """Decide exactly whether the cubes admit a joint unit-bin layout.

    Any feasible layout can be pushed toward the origin until every
    coordinate is a subset sum of side lengths, so searching bases over
    those sums (in a fixed largest-first cube order) is complete.
    """
    order = sorted(classes, key=lambda c: (-c.side, c.k))
    sums = {Fraction(0)}
    for cls in order:
        sums |= {t + cls.side for t in sums if t + cls.side < 1}
    coords = sorted(sums)
    placed: List[PlacedCube] = []
    out: List[Tuple[CubeClass, Tuple[Fraction, ...]]] = []
    nodes = 0

    def admissible(cls: CubeClass, base: Tuple[Fraction, ...]) -> bool:
        cube = PlacedCube(cls, base)
        if not cube.fits_unit_bin():
            return False
        for other in placed:
            lo, hi = zip(*((b, b + other.cls.side) for b in other.base))
            if all(
                not (base[i] + cls.side <= lo[i] or hi[i] <= base[i])
                for i in range(d)
            ):
                return False
        return True

    def rec(idx: int) -> bool:
        nonlocal nodes
        if idx == len(order):
            return True
        cls = order[idx]
        axis = [c for c in coords if c + cls.side <= 1]
        for base in _cartesian(axis, d):
            nodes += 1
            if nodes > node_cap:
                raise RepackSearchError(
                    f"re-layout search exceeded {node_cap} nodes"
                )
            if admissible(cls, base):
                cube = PlacedCube(cls, base)
                placed.append(cube)
                out.append((cls, base))
                if rec(idx + 1):
                    return True
                placed.pop()
                out.pop()
        return False

    return tuple(out) if rec(0) else None


def _cartesian(axis: Sequence[Fraction], d: int):
    if d == 1:
        for x in axis:
            yield (x,)
        return
    for rest in _cartesian(axis, d - 1):
        for x in axis:
            yield (x,) + rest


def improving_moves(
    config: GameConfig,
    mode: str = "insertion",
    *,
    repack_cap: int = 8,
    first_only: bool = False,
) -> Tuple[MoveProposal, ...]:
    """All strictly improving single-item migrations, deterministically ordered.

    A move to bin t improves the mover iff occupied(t) + volume exceeds the
    occupied volume of its current bin: cost never depends on positions, so
    this arithmetic filter is complete and geometry runs only on survivors.
    Fresh bins are never targets; a lone item's cost of 1 cannot improve.
    """
    if mode not in ("insertion", "repack"):
        raise ValueError(f"unknown feasibility mode {mode!r}")
    occ = config._occupied
    bins_map = config.bins_map
    proposals: List[MoveProposal] = []
    for it in sorted(config.items, key=lambda x: x.item_id):
        src = config.assignment[it.item_id]
        for target in sorted(bins_map):
            if target == src:
                continue
            if not occ[target] + it.volume > occ[src]:
                continue
            cost_before = it.volume / occ[src]
            cost_after = it.volume / (occ[target] + it.volume)
            target_bin = bins_map[target]
            if mode == "insertion":
                base = find_free_position(target_bin.cubes, it.side, config.d)
                if base is None:
                    continue
                proposals.append(
                    MoveProposal(
                        it.item_id, src, target, mode, cost_before, cost_after, base
                    )
                )
            else:
                if len(target_bin) + 1 > repack_cap:
                    raise RepackSearchError(
                        f"bin {target} holds {len(target_bin)} items, repack cap "
                        f"is {repack_cap - 1} plus the mover"
                    )
                residents = [
                    other
                    for other in config.items
                    if config.assignment[other.item_id] == target
                ]
                layout = _pack_exact([o.cls for o in residents] + [it.cls], config.d)
                if layout is None:
                    continue
                assigned = _distribute(layout, residents + [it])
                proposals.append(
                    MoveProposal(
                        it.item_id,
                        src,
                        target,
                        mode,
                        cost_before,
                        cost_after,
                        assigned[it.item_id],
                        relayout=tuple(sorted(assigned.items())),
                    )
                )
            if first_only:
                return tuple(proposals)
    return tuple(proposals)


def _distribute(
    layout: Sequence[Tuple[CubeClass, Tuple[Fraction, ...]]],
    items: Sequence[GameItem],
) -> Dict[int, Tuple[Fraction, ...]]:
    """Hand the found bases back to concrete items, matching by cube class."""
    pool: Dict[CubeClass, List[Tuple[Fraction, ...]]] = {}
    for cls, base in layout:
        pool.setdefault(cls, []).append(base)
    assigned: Dict[int, Tuple[Fraction, ...]] = {}
    for it in sorted(items, key=lambda x: (-x.side, x.item_id)):
        assigned[it.item_id] = pool[it.cls].pop()
    return assigned


def apply_move(config: GameConfig, move: MoveProposal) -> GameConfig:
    updates: Dict[int, Tuple[int, Tuple[Fraction, ...]]] = {
        move.item_id: (move.target_bin, move.base)
    }
    if move.relayout is not None:
        for item_id, base in move.relayout:
            updates[item_id] = (move.target_bin, base)
    return config.with_moves(updates)


@dataclass(frozen=True)
class NashResult:
    is_nash: bool
    mode: str
    moves: Tuple[MoveProposal, ...]
    note: str = FEASIBILITY_NOTE

    def __bool__(self) -> bool:
        return self.is_nash


def is_nash(
    config: GameConfig, mode: str = "insertion", *, repack_cap: int = 8
) -> NashResult:
    """True iff no single item has a strictly improving migration."""
    moves = improving_moves(config, mode, repack_cap=repack_cap)
    return NashResult(not moves, mode, moves)


# ---------------------------------------------------------------------------
# best-response dynamics


def potential(config: GameConfig) -> Tuple[Fraction, ...]:
    """Per-bin occupied volumes, sorted descending.

    Each improving move replaces two entries {occ(src), occ(tgt)} by
    {occ(src)-v, occ(tgt)+v} with occ(tgt)+v above both originals, so this
    vector strictly increases lexicographically; with volumes drawn from a
    finite set, dynamics must terminate.
    """
    return tuple(sorted(config._occupied.values(), reverse=True))


_POLICY_ALIASES = {
    "first": "first",
    "first-improving": "first",
    "best": "best",
    "best-improving": "best",
    "random": "random",
    "random-seeded": "random",
}


@dataclass(frozen=True)
class DynamicsResult:
    config: GameConfig
    steps: int
    applied: Tuple[MoveProposal, ...]
    status: str  # "nash" or "budget-exhausted"
    certificate: Optional[NashResult]


def best_response_dynamics(
    config: GameConfig,
    policy: str = "first",
    *,
    max_steps: int = 10_000,
    seed: int = 0,
    mode: str = "insertion",
    repack_cap: int = 8,
) -> DynamicsResult:
    """Apply improving moves until none remain or the step budget runs out."""
    try:
        policy = _POLICY_ALIASES[policy]
    except KeyError:
        raise ValueError(f"unknown policy {policy!r}") from None
    rng = random.Random(seed)
    applied: List[MoveProposal] = []
    current = config
    last_potential = potential(current)
    for _ in range(max_steps):
        moves = improving_moves(
            current, mode, repack_cap=repack_cap, first_only=policy == "first"
        )
        if not moves:
            current.validate()
            cert = NashResult(True, mode, ())
            return DynamicsResult(current, len(applied), tuple(applied), "nash", cert)
        if policy == "first":
            move = moves[0]
        elif policy == "best":
            move = max(moves, key=lambda m: (m.cost_before - m.cost_after, -m.item_id))
        else:
            move = rng.choice(moves)
        current = apply_move(current, move)
        applied.append(move)
        now = potential(current)
        if not now > last_potential:
            raise AssertionError(
                f"potential did not increase: {last_potential} -> {now}"
            )
        last_potential = now
    current.validate()
    return DynamicsResult(current, len(applied), tuple(applied), "budget-exhausted", None)


# ---------------------------------------------------------------------------
# coalitions


@dataclass(frozen=True)
class CoalitionProposal:
    """A joint deviation in which every member strictly gains."""

    members: Tuple[int, ...]
    targets: Tuple[int, ...]
    bases: Tuple[Tuple[Fraction, ...], ...]
    costs_before: Tuple[Fraction, ...]
    costs_after: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        for before, after in zip(self.costs_before, self.costs_after):
            if not after < before:
                raise ValueError("every coalition member must strictly improve")


@dataclass(frozen=True)
class StrongNashResult:
    is_strong_nash: bool
    max_coalition_size: int
    mode: str
    violation: Optional[CoalitionProposal]
    coalitions_checked: int
    assignments_checked: int
    note: str = FEASIBILITY_NOTE

    def __bool__(self) -> bool:
        return self.is_strong_nash


def apply_coalition(config: GameConfig, proposal: CoalitionProposal) -> GameConfig:
    updates = {
        member: (target, base)
        for member, target, base in zip(
            proposal.members, proposal.targets, proposal.bases
        )
    }
    return config.with_moves(updates)


def is_strong_nash(
    config: GameConfig,
    max_coalition_size: int,
    mode: str = "insertion",
    *,
    assignment_cap: int = 5_000_000,
) -> StrongNashResult:
    """Exhaustive coalition search up to the size cap, smallest first.

    Coalitions in which some member keeps its bin reduce to the sub-coalition
    of actual movers (the outcome configuration is identical and movers are
    members too), so only all-mover coalitions are enumerated; members may
    not swap positions inside their current bins.  Costs depend on the
    assignment alone, so each assignment is screened by integer arithmetic
    and only survivors reach the memoized insertion search.
    """
    if mode != "insertion":
        raise ValueError("coalition search supports insertion mode only")
    if max_coalition_size < 1:
        raise ValueError("coalition size cap must be >= 1")
    items = sorted(config.items, key=lambda x: x.item_id)
    # integer volumes: exact and much faster than Fractions in the hot loop
    scale = lcm(*(it.volume.denominator for it in items)) if items else 1
    ivol = {it.item_id: int(it.volume * scale) for it in items}
    iocc = {b: int(v * scale) for b, v in config._occupied.items()}
    src = config.assignment
    existing = sorted(config.bins_map)
    bins_map = config.bins_map
    fresh_base = (max(existing) + 1) if existing else 0
    insert_memo: Dict[tuple, Optional[Tuple]] = {}

    # per-bin census by (k, eps): disjoint open cubes of one side number at
    # most floor(1/side)^d in a bin (interval-graph coloring per axis), no
    # matter what other classes sit there
    capacity: Dict[tuple, int] = {}
    census: Dict[int, Dict[tuple, int]] = {b: {} for b in existing}
    for it in items:
        key = (it.cls.k, it.cls.epsilon)
        if key not in capacity:
            side = it.cls.side
            capacity[key] = (side.denominator // side.numerator) ** config.d
        here = census[src[it.item_id]]
        here[key] = here.get(key, 0) + 1

    def geometry(target, removed_ids, incoming: Tuple[GameItem, ...]):
        """Positions for the incoming cubes, or None; memoized by content."""
        # all fresh bins are interchangeable empty boxes: one memo entry
        key = (
            target if isinstance(target, int) else "new",
            frozenset(removed_ids),
            tuple(sorted((it.cls.k, it.cls.epsilon) for it in incoming)),
        )
        if key in insert_memo:
            return insert_memo[key]
        if isinstance(target, int) and target in bins_map:
            base_cubes = [
                c
                for c, iid in _bin_cubes_with_ids(config, target)
                if iid not in removed_ids
            ]
        else:
            base_cubes = []
        classes = tuple(it.cls for it in incoming)
        found = None
        for perm in _distinct_permutations(classes):
            cubes = list(base_cubes)
            bases = []
            for cls in perm:
                pos = find_free_position(cubes, cls.side, config.d)
                if pos is None:
                    break
                cubes.append(PlacedCube(cls, pos))
                bases.append((cls, pos))
            else:
                found = tuple(bases)
                break
        insert_memo[key] = found
        return found

    coalitions_checked = 0
    assignments_checked = 0
    for size in range(1, max_coalition_size + 1):
        for coalition in combinations(items, size):
            coalitions_checked += 1
            member_ids = [it.item_id for it in coalition]
            out_vol: Dict[int, int] = {}
            removed_count: Dict[int, Dict[tuple, int]] = {}
            for it in coalition:
                b = src[it.item_id]
                out_vol[b] = out_vol.get(b, 0) + ivol[it.item_id]
                key = (it.cls.k, it.cls.epsilon)
                here = removed_count.setdefault(b, {})
                here[key] = here.get(key, 0) + 1
            total_in = sum(ivol[i] for i in member_ids)
            # optimistic per-member target lists; exact check comes later
            cands: List[List[object]] = []
            for it in coalition:
                best_other = total_in - 0  # every member could join the same bin
                key = (it.cls.k, it.cls.epsilon)
                opts: List[object] = []
                for t in existing:
                    if t == src[it.item_id]:
                        continue
                    kept = census[t].get(key, 0) - removed_count.get(t, {}).get(key, 0)
                    if kept + 1 > capacity[key]:
                        continue
                    if iocc[t] - out_vol.get(t, 0) + best_other > iocc[src[it.item_id]]:
                        opts.append(t)
                for slot in range(size):
                    if total_in > iocc[src[it.item_id]]:
                        opts.append(("new", slot))
                if not opts:
                    cands = []
                    break
                cands.append(opts)
            if not cands:
                continue
            for targets in _canonical_products(cands):
                assignments_checked += 1
                if assignments_checked > assignment_cap:
                    raise CoalitionSearchError(
                        f"coalition search exceeded {assignment_cap} assignments"
                    )
                in_vol: Dict[object, int] = {}
                for it, t in zip(coalition, targets):
                    in_vol[t] = in_vol.get(t, 0) + ivol[it.item_id]
                ok = True
                for it, t in zip(coalition, targets):
                    occ0 = iocc.get(t, 0) if isinstance(t, int) else 0
                    occ_new = occ0 - out_vol.get(t, 0) + in_vol[t]
                    if not occ_new > iocc[src[it.item_id]]:
                        ok = False
                        break
                if not ok:
                    continue
                placements: Dict[int, Tuple[Fraction, ...]] = {}
                for t in sorted(in_vol, key=str):
                    movers = tuple(
                        it for it, tt in zip(coalition, targets) if tt == t
                    )
                    removed = (
                        frozenset(i for i in member_ids if src[i] == t)
                        if isinstance(t, int)
                        else frozenset()
                    )
                    layout = geometry(t, removed, movers)
                    if layout is None:
                        ok = False
                        break
                    placements.update(_distribute(layout, movers))
                if not ok:
                    continue
                real_targets = tuple(
                    t if isinstance(t, int) else fresh_base + t[1] for t in targets
                )
                after_occ: Dict[int, Fraction] = {}
                for t in set(real_targets):
                    leaving = sum(
                        (config.item(i).volume for i in member_ids if src[i] == t),
                        Fraction(0),
                    )
                    after_occ[t] = config._occupied.get(t, Fraction(0)) - leaving
                for it, t in zip(coalition, real_targets):
                    after_occ[t] += it.volume
                proposal = CoalitionProposal(
                    tuple(member_ids),
                    real_targets,
                    tuple(placements[i] for i in member_ids),
                    tuple(config.item_cost(i) for i in member_ids),
                    tuple(
                        config.item(i).volume / after_occ[t]
                        for i, t in zip(member_ids, real_targets)
                    ),
                )
                return StrongNashResult(
                    False,
                    max_coalition_size,
                    mode,
                    proposal,
                    coalitions_checked,
                    assignments_checked,
                )
    return StrongNashResult(
        True, max_coalition_size, mode, None, coalitions_checked, assignments_checked
    )


def _bin_cubes_with_ids(config: GameConfig, bin_id: int):
    for it in config.items:
        if config.assignment[it.item_id] == bin_id:
            yield PlacedCube(it.cls, config.positions[it.item_id]), it.item_id


def _distinct_permutations(classes: Tuple[CubeClass, ...]):
    seen = set()
    for perm in permutations(classes):
        if perm in seen:
            continue
        seen.add(perm)
        yield perm


def _canonical_products(cands: List[List[object]]):
    """Cartesian product over target lists, with fresh-bin slots canonical:
    slot j may appear only after slots below j are in use by earlier members.
    """

    def rec(idx: int, used_new: int, prefix: List[object]):
        if idx == len(cands):
            yield tuple(prefix)
            return
        for t in cands[idx]:
            if isinstance(t, tuple):
                slot = t[1]
                if slot > used_new:
                    continue
                prefix.append(t)
                yield from rec(idx + 1, max(used_new, slot + 1), prefix)
                prefix.pop()
            else:
                prefix.append(t)
                yield from rec(idx + 1, used_new, prefix)
                prefix.pop()

    yield from rec(0, 0, [])


# ---------------------------------------------------------------------------
# inequality checks and anarchy instances


def prop1_check(k: int, ell: int, d: int) -> bool:
    """Exact test of (1-1/k)^d + 1/ell^d < (1-1/ell)^d.

    Cleared of denominators this is ell^d (k-1)^d + k^d < (ell-1)^d k^d,
    so plain integers suffice.
    """
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    if k <= 1:
        raise ValueError(f"k must be > 1, got {k}")
    if ell < k + 1:
        raise ValueError(f"ell must be >= k+1, got ell={ell}, k={k}")
    return ell**d * (k - 1) ** d + k**d < (ell - 1) ** d * k**d


def prop1_sweep(k_max: int = 100, d_max: int = 20) -> Tuple[int, Tuple[Tuple[int, int, int], ...]]:
    """Check every 2 <= k < ell <= k_max, 2 <= d <= d_max; return failures."""
    checked = 0
    failures: List[Tuple[int, int, int]] = []
    for k in range(2, k_max):
        for ell in range(k + 1, k_max + 1):
            for d in range(2, d_max + 1):
                checked += 1
                if not prop1_check(k, ell, d):
                    failures.append((k, ell, d))
    return checked, tuple(failures)


def meir_moser_predicate(volumes: Sequence, ell, d: int) -> bool:
    """Total volume <= ell^d + (1-ell)^d, with ell the largest side:
    sufficient for packing all the cubes into one unit bin."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    ell = as_rational(ell)
    if not 0 < ell <= 1:
        raise ValueError(f"largest side must be in (0, 1], got {ell}")
    total = sum((as_rational(v) for v in volumes), Fraction(0))
    if total < 0:
        raise ValueError("volumes must be nonnegative")
    return total <= ell**d + (1 - ell) ** d


@dataclass(frozen=True)
class AnarchyInstance:
    """A worst-case equilibrium P' next to the optimal regrouping P."""

    p: GameConfig
    p_prime: GameConfig
    ratio: Fraction
    copies: int
    scaled: bool
    nash: Optional[NashResult]
    strong: Optional[StrongNashResult] = None


def _regroup_copies(packing: TypedPacking) -> int:
    """Smallest copy count making every class regroupable into full grids."""
    t = 1
    for k, nu_k in packing.nu.items():
        denom = (k - 1) ** packing.d
        step = denom // gcd(nu_k, denom)
        t = t * step // gcd(t, step)
    return t


def poa_instance(
    packing: TypedPacking,
    *,
    copies_cap: int = 4096,
    certify: bool = True,
    mode: str = "insertion",
) -> AnarchyInstance:
    """P = N copies of the bin; P' regroups each class into full grid bins.

    |P'| / |P| = w(U) exactly, and P' is an equilibrium: moving a large cube
    into a smaller-class bin raises its cost (the grid cost inequality), and
    smaller cubes find no room in the full grids of larger classes.
    """
    eps_cap = Fraction(1, packing.k_max - 1)
    if packing.epsilon > eps_cap:
        raise ValueError(
            f"epsilon {packing.epsilon} exceeds 1/(k_max-1) = {eps_cap}"
        )
    n = 1
    for k in packing.classes:
        n *= (k - 1) ** packing.d
    scaled = False
    if n > copies_cap:
        n = _regroup_copies(packing)
        scaled = True
        if n > copies_cap:
            raise ValueError(
                f"even the minimal regroupable copy count {n} exceeds the cap "
                f"{copies_cap}"
            )
    p = config_from_bins([packing.bin] * n)
    prime_bins: List[Bin] = []
    for k in packing.classes:
        total = n * packing.nu[k]
        per_bin = (k - 1) ** packing.d
        assert total % per_bin == 0
        grid = build_homogeneous(k, packing.d, packing.epsilon).bin
        prime_bins.extend([grid] * (total // per_bin))
    p_prime = config_from_bins(prime_bins)
    p.validate()
    p_prime.validate()
    ratio = Fraction(len(prime_bins), n)
    assert ratio == packing.weight()
    nash = None
    if certify:
        nash = is_nash(p_prime, mode)
        if not nash:
            raise AssertionError(
                f"regrouped config unexpectedly admits moves: {nash.moves[:1]}"
            )
    return AnarchyInstance(p, p_prime, ratio, n, scaled, nash)


def spoa_instance(
    packing: TypedPacking,
    *,
    coalition_cap: int = 3,
    copies_cap: int = 4096,
    certify: bool = True,
) -> AnarchyInstance:
    """As poa_instance, for power-of-two classes; P' is coalition-proof.

    With every side of the form (1+eps)/2^j, any joint deviation could be
    re-expressed in units of its smallest cube, contradicting the fullness
    of that cube's grid bin; the exhaustive search confirms this at desk
    scale up to the coalition cap.
    """
    for k in packing.classes:
        if k & (k - 1):
            raise ValueError(f"class {k} is not a power of two")
    inst = poa_instance(packing, copies_cap=copies_cap, certify=certify)
    strong = None
    if certify:
        strong = is_strong_nash(inst.p_prime, coalition_cap)
        if not strong:
            raise AssertionError(
                f"regrouped config admits a coalition: {strong.violation}"
            )
    return AnarchyInstance(
        inst.p, inst.p_prime, inst.ratio, inst.copies, inst.scaled, inst.nash, strong
    )


# ---------------------------------------------------------------------------
# sparse-bin audit


@dataclass(frozen=True)
class SparseBinReport:
    """Bins below the 2^-d occupancy threshold, for the bin-count bound."""

    sparse_bins: Tuple[int, ...]
    threshold: Fraction
    conditioned: bool  # True when the config came Nash-certified
    used_bins: int
    total_volume: Fraction

    @property
    def sparse_count_ok(self) -> Optional[bool]:
        if not self.conditioned:
            return None
        return len(self.sparse_bins) <= 1

    @property
    def bin_bound_ok(self) -> bool:
        # used <= 2^d * Vol + 1, the anarchy upper-bound arithmetic
        return self.used_bins <= (1 / self.threshold) * self.total_volume + 1


def sparse_bin_report(
    config: GameConfig, *, nash_result: Optional[NashResult] = None
) -> SparseBinReport:
    """Count bins with occupied volume below 2^-d.

    At an equilibrium at most one such bin can exist: two would let an item
    of the emptier one join the other (the joined volume stays packable by
    the largest-side volume criterion), strictly lowering its cost.
    """
    threshold = Fraction(1, 2**config.d)
    sparse = tuple(
        b for b in sorted(config.bins_map) if config.occupied(b) < threshold
    )
    conditioned = bool(nash_result) and nash_result.is_nash
    total = sum((config.occupied(b) for b in config.bins_map), Fraction(0))
    return SparseBinReport(
        sparse, threshold, conditioned, len(config.bins_map), total
    )
