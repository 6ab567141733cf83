"""Word languages whose structure forces geometric disjointness.

A class-k language is a set of words over the alphabet [k] = {1..k},
one letter per dimension.  Two properties drive everything downstream:

* gapped: at every coordinate the language misses letter k-1 or letter
  k, which caps the language at (k-1)^d words;
* separated (for k < k'): every cross pair of words has a coordinate i
  with w_i < k and w'_i = k', which makes the induced cubes disjoint.

Languages come in two shapes.  Explicit languages enumerate their
words.  Product languages factor as (core words on an index set F) x
(all letters below k elsewhere); the warm-up family and the randomized
construction both have this shape, and separation of two product
languages reduces exactly to their cores, so the reduction is a
complete check rather than a heuristic.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Mapping, Optional, Sequence

from .geometry import as_rational, format_rational


class FSetsSamplingError(RuntimeError):
    """Raised when index-set sampling exhausts its attempt budget."""


class FamilyConstructionError(RuntimeError):
    """Raised when a class language comes out empty or uncertifiable."""


@dataclass(frozen=True)
class Word:
    """A word over [k]: letters[i] is the letter at coordinate i+1."""

    letters: tuple[int, ...]
    k: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "letters", tuple(self.letters))
        if self.k < 2:
            raise ValueError(f"class index k must be >= 2, got {self.k}")
        for a in self.letters:
            if not 1 <= a <= self.k:
                raise ValueError(f"letter {a} outside [1..{self.k}]")

    @property
    def d(self) -> int:
        return len(self.letters)


def core_alphabet(k: int) -> tuple[int, ...]:
    """Letters allowed on the core index set: [k] minus k-1, ascending."""
    return tuple(a for a in range(1, k + 1) if a != k - 1)


class Language:
    """Class-k word set, explicit or in core x free product form.

    Product form: `f_coords` is the sorted 1-based index set F, core
    words are tuples aligned with it, and off-F letters range over all
    of [k-1].  The core is either an explicit tuple of words or a
    membership predicate plus an exact count (for scales where
    enumeration is impossible).
    """

    def __init__(
        self,
        k: int,
        d: int,
        *,
        words: Optional[Sequence[tuple[int, ...]]] = None,
        f_coords: Optional[Sequence[int]] = None,
        core_words: Optional[Sequence[tuple[int, ...]]] = None,
        core_predicate: Optional[Callable[[tuple[int, ...]], bool]] = None,
        core_count: Optional[int] = None,
    ) -> None:
        if k < 2 or d < 1:
            raise ValueError(f"need k >= 2 and d >= 1, got k={k} d={d}")
        self.k = k
        self.d = d
        self.words: Optional[tuple[tuple[int, ...], ...]] = None
        self.f_coords: Optional[tuple[int, ...]] = None
        self.core_words: Optional[tuple[tuple[int, ...], ...]] = None
        self.core_predicate = core_predicate
        self._core_count = core_count
        if words is not None:
            if f_coords is not None or core_words is not None or core_predicate:
                raise ValueError("explicit and product forms are mutually exclusive")
            seen = []
            had = set()
            for w in words:
                w = tuple(w)
                if len(w) != d:
                    raise ValueError(f"word {w} has length {len(w)}, expected {d}")
                if any(not 1 <= a <= k for a in w):
                    raise ValueError(f"word {w} uses letters outside [1..{k}]")
                if w not in had:
                    had.add(w)
                    seen.append(w)
            self.words = tuple(sorted(seen))
            self._word_set = had
            return
        if f_coords is None:
            raise ValueError("need either explicit words or product f_coords")
        fc = tuple(sorted(set(int(i) for i in f_coords)))
        if len(fc) != len(tuple(f_coords)):
            raise ValueError(f"duplicate indices in f_coords {f_coords}")
        if fc and (fc[0] < 1 or fc[-1] > d):
            raise ValueError(f"f_coords {fc} outside [1..{d}]")
        self.f_coords = fc
        alpha = set(core_alphabet(k))
        if core_words is not None:
            cores = []
            had_c = set()
            for v in core_words:
                v = tuple(v)
                if len(v) != len(fc):
                    raise ValueError(f"core word {v} does not match |F|={len(fc)}")
                if any(a not in alpha for a in v):
                    raise ValueError(f"core word {v} uses letters outside [k] minus k-1")
                if v not in had_c:
                    had_c.add(v)
                    cores.append(v)
            self.core_words = tuple(sorted(cores))
            self._core_set = had_c
        elif core_predicate is None or core_count is None:
            raise ValueError("product form needs core_words, or predicate plus count")

    # -- sizes -------------------------------------------------------------

    @property
    def is_product(self) -> bool:
        return self.f_coords is not None

    def core_size(self) -> int:
        if self.core_words is not None:
            return len(self.core_words)
        if self._core_count is not None:
            return self._core_count
        raise ValueError("explicit language has no core")

    def count(self) -> int:
        """Exact word count; may exceed what __len__ can report."""
        if self.words is not None:
            return len(self.words)
        free = self.d - len(self.f_coords)
        return self.core_size() * (self.k - 1) ** free

    def __len__(self) -> int:
        return self.count()

    # -- enumeration and membership -----------------------------------------

    def _assemble(self, core: tuple[int, ...], free: tuple[int, ...]) -> tuple[int, ...]:
        out = [0] * self.d
        fit = iter(free)
        fset = set(self.f_coords)
        ci = 0
        for coord in range(1, self.d + 1):
            if coord in fset:
                out[coord - 1] = core[ci]
                ci += 1
            else:
                out[coord - 1] = next(fit)
        return tuple(out)

    def iter_words(self) -> Iterator[tuple[int, ...]]:
        """All words in deterministic (ascending lexicographic) order."""
        if self.words is not None:
            yield from self.words
            return
        if self.core_words is None:
            raise ValueError("cannot enumerate a predicate-core language")
        free_n = self.d - len(self.f_coords)
        for core in self.core_words:
            for free in itertools.product(range(1, self.k), repeat=free_n):
                yield self._assemble(core, free)

    def contains(self, word: Sequence[int]) -> bool:
        w = tuple(word)
        if len(w) != self.d:
            return False
        if self.words is not None:
            return w in self._word_set
        core = tuple(w[i - 1] for i in self.f_coords)
        fset = set(self.f_coords)
        for coord in range(1, self.d + 1):
            if coord not in fset and not 1 <= w[coord - 1] <= self.k - 1:
                return False
        alpha = set(core_alphabet(self.k))
        if any(a not in alpha for a in core):
            return False
        if self.core_words is not None:
            return core in self._core_set
        return bool(self.core_predicate(core))

    def select_words(
        self, limit: Optional[int] = None, max_scan: int = 5_000_000
    ) -> Iterator[tuple[int, ...]]:
        """Deterministic word selection for materializing packings.

        Without a limit, all words in ascending lexicographic order
        (enumerable languages only).  With a limit, enumerable
        languages yield their lexicographic prefix; predicate-core
        languages scan cores in descending lexicographic order instead,
        because good cores concentrate near the all-k corner while the
        ascending prefix is exactly the all-bad corner, and emit one
        word per good core with all free letters set to 1.
        """
        if limit is None:
            yield from self.iter_words()
            return
        if limit < 0:
            raise ValueError(f"limit must be >= 0, got {limit}")
        if self.words is not None or self.core_words is not None:
            yield from itertools.islice(self.iter_words(), limit)
            return
        alpha_desc = tuple(sorted(core_alphabet(self.k), reverse=True))
        free = (1,) * (self.d - len(self.f_coords))
        found = 0
        scanned = 0
        for core in itertools.product(alpha_desc, repeat=len(self.f_coords)):
            if found >= limit:
                return
            scanned += 1
            if scanned > max_scan:
                raise RuntimeError(
                    f"scanned {max_scan} cores and found only {found} good ones; "
                    f"the good-word density is too low for budgeted selection"
                )
            if self.core_predicate(core):
                found += 1
                yield self._assemble(core, free)

    def sample_word(self, rng: random.Random) -> tuple[int, ...]:
        """Uniform-ish word draw, used only for sampled audits."""
        if self.words is not None:
            return self.words[rng.randrange(len(self.words))]
        if self.core_words is not None:
            core = self.core_words[rng.randrange(len(self.core_words))]
        else:
            alpha = core_alphabet(self.k)
            while True:  # good-core density is high by construction
                cand = tuple(rng.choice(alpha) for _ in self.f_coords)
                if self.core_predicate(cand):
                    core = cand
                    break
        free_n = self.d - len(self.f_coords)
        free = tuple(rng.randrange(1, self.k) for _ in range(free_n))
        return self._assemble(core, free)


# -- gapped / separated predicates ------------------------------------------


@dataclass(frozen=True)
class GappedResult:
    ok: bool
    missing: tuple[Optional[int], ...]  # per coordinate, a letter the language misses
    bad_coord: Optional[int] = None  # 1-based, set when not gapped

    def __bool__(self) -> bool:
        return self.ok


def is_gapped(lang: Language) -> GappedResult:
    """Check that every coordinate misses letter k-1 or letter k.

    Product languages are gapped structurally: core coordinates never
    use k-1 (core alphabet excludes it) and free coordinates never use
    k.  Explicit languages are scanned coordinate by coordinate.
    """
    k, d = lang.k, lang.d
    if lang.is_product:
        fset = set(lang.f_coords)
        missing = tuple(k - 1 if c in fset else k for c in range(1, d + 1))
        return GappedResult(True, missing)
    missing: list[Optional[int]] = []
    for i in range(d):
        seen = {w[i] for w in lang.words}
        if k - 1 not in seen:
            missing.append(k - 1)
        elif k not in seen:
            missing.append(k)
        else:
            return GappedResult(False, tuple(missing) + (None,) * (d - i), i + 1)
    return GappedResult(True, tuple(missing))


@dataclass(frozen=True)
class SeparationResult:
    ok: bool
    method: str  # "product-core" | "exhaustive" | "sampled"
    pairs_checked: int
    witness: Optional[tuple[tuple[int, ...], tuple[int, ...]]] = None  # failing pair

    def __bool__(self) -> bool:
        return self.ok


def _pair_separated(w: Sequence[int], wp: Sequence[int], k: int, kp: int) -> bool:
    return any(a < k and b == kp for a, b in zip(w, wp))


def are_separated(
    small: Language,
    big: Language,
    *,
    rng: Optional[random.Random] = None,
    samples: int = 400,
    materialize_cap: int = 200_000,
) -> SeparationResult:
    """Decide separation of a class pair k < k'.

    For two product languages the check runs on core pairs only and is
    complete: a full word pair has a witness coordinate i (w_i < k and
    w'_i = k') iff the cores do, because w'_i = k' forces i into F' and
    off-F letters of the small language are below k by construction.
    Explicit languages within the materialization cap are checked pair
    by pair; predicate-core languages are spot-checked with sampled
    word pairs (the construction's own certificate is structural).
    """
    k, kp = small.k, big.k
    if k >= kp:
        raise ValueError(f"need k < k', got {k} >= {kp}")
    if small.d != big.d:
        raise ValueError("dimension mismatch")

    if (
        small.is_product
        and big.is_product
        and small.core_words is not None
        and big.core_words is not None
    ):
        pairs = 0
        for v in small.core_words:
            # Letter of the small core at each absolute coordinate; off-core
            # coordinates of the small language always carry letters < k.
            at = {c: v[i] for i, c in enumerate(small.f_coords)}
            for vp in big.core_words:
                pairs += 1
                hit = False
                for i, c in enumerate(big.f_coords):
                    if vp[i] == kp and at.get(c, 0) != k:
                        hit = True
                        break
                if not hit:
                    w = _materialize_with_free_ones(small, v)
                    wp = _materialize_with_free_ones(big, vp)
                    return SeparationResult(False, "product-core", pairs, (w, wp))
        return SeparationResult(True, "product-core", pairs)

    small_words = _try_materialize(small, materialize_cap)
    big_words = _try_materialize(big, materialize_cap)
    if small_words is not None and big_words is not None:
        pairs = 0
        for w in small_words:
            for wp in big_words:
                pairs += 1
                if not _pair_separated(w, wp, k, kp):
                    return SeparationResult(False, "exhaustive", pairs, (w, wp))
        return SeparationResult(True, "exhaustive", pairs)

    rng = rng if rng is not None else random.Random(0)
    for trial in range(samples):
        w = small.sample_word(rng)
        wp = big.sample_word(rng)
        if not _pair_separated(w, wp, k, kp):
            return SeparationResult(False, "sampled", trial + 1, (w, wp))
    return SeparationResult(True, "sampled", samples)


def _materialize_with_free_ones(lang: Language, core: tuple[int, ...]) -> tuple[int, ...]:
    free_n = lang.d - len(lang.f_coords)
    return lang._assemble(core, (1,) * free_n)


def _try_materialize(lang: Language, cap: int) -> Optional[tuple[tuple[int, ...], ...]]:
    if lang.words is not None:
        return lang.words
    if lang.core_words is None or lang.count() > cap:
        return None
    return tuple(lang.iter_words())


# -- index-set sampling ------------------------------------------------------


@dataclass
class FSets:
    """Half-size index sets with pairwise-small intersections.

    sets maps an index (a class value) to a ceil(d/2)-subset of [1..d];
    every pair of stored sets intersects in fewer than `threshold`
    elements, which keeps each difference set F_k minus F_l nonempty.
    """

    d: int
    threshold: Fraction
    sets: dict[int, frozenset[int]]
    rejections: int = 0

    def __post_init__(self) -> None:
        size = -(-self.d // 2)
        for idx, s in self.sets.items():
            if len(s) != size:
                raise ValueError(f"F_{idx} has size {len(s)}, expected {size}")
            if any(not 1 <= i <= self.d for i in s):
                raise ValueError(f"F_{idx} leaves [1..{self.d}]")
        for a, b in itertools.combinations(sorted(self.sets), 2):
            inter = len(self.sets[a] & self.sets[b])
            if not inter < self.threshold:
                raise ValueError(
                    f"|F_{a} & F_{b}| = {inter} not below threshold {self.threshold}"
                )


def sample_f_sets(
    d: int,
    seed: int,
    threshold: Optional[Fraction] = None,
    indices: Optional[Sequence[int]] = None,
    max_attempts: int = 200_000,
) -> FSets:
    """Sample index sets F_i (|F_i| = ceil(d/2)) with small pairwise overlap.

    Each set is drawn uniformly and redrawn until it meets the overlap
    threshold against all previously accepted sets; a stuck prefix
    triggers a full restart.  The total number of redraws is recorded
    so callers can see how hard the constraint was.  Default threshold
    is 7d/26, the strict bound the asymptotic argument needs.
    """
    if d < 1:
        raise ValueError(f"need d >= 1, got {d}")
    threshold = as_rational(threshold) if threshold is not None else Fraction(7 * d, 26)
    idx = tuple(indices) if indices is not None else tuple(range(1, d + 1))
    if len(set(idx)) != len(idx):
        raise ValueError(f"duplicate indices {idx}")
    size = -(-d // 2)
    if len(idx) > 1:
        min_overlap = max(0, 2 * size - d)
        if not min_overlap < threshold:
            raise FSetsSamplingError(
                f"threshold {threshold} is infeasible: two {size}-subsets of "
                f"[1..{d}] always share at least {min_overlap} elements"
            )
    rng = random.Random(seed)
    universe = list(range(1, d + 1))
    attempts = 0
    rejections = 0
    per_set_budget = 2_000
    while attempts < max_attempts:
        chosen: dict[int, frozenset[int]] = {}
        stuck = False
        for key in idx:
            ok = False
            for _ in range(per_set_budget):
                attempts += 1
                if attempts > max_attempts:
                    break
                cand = frozenset(rng.sample(universe, size))
                if all(len(cand & prev) < threshold for prev in chosen.values()):
                    chosen[key] = cand
                    ok = True
                    break
                rejections += 1
            if not ok:
                stuck = True
                break
        if not stuck:
            return FSets(d, threshold, chosen, rejections)
    raise FSetsSamplingError(
        f"gave up after {attempts} draws (d={d}, threshold={threshold}, "
        f"{len(idx)} sets); the constraint is too tight at this scale"
    )


# -- bad words and good-word counting ----------------------------------------


def is_bad_word(
    v: Sequence[int],
    k: int,
    j_set: Sequence[int],
    f_coords: Optional[Sequence[int]] = None,
) -> bool:
    """True iff core word v avoids letter k on every index in j_set.

    v is aligned with f_coords (default 1..len(v)); an empty j_set is
    vacuously bad, which is exactly why empty difference sets poison
    the construction.
    """
    v = tuple(v)
    coords = tuple(f_coords) if f_coords is not None else tuple(range(1, len(v) + 1))
    if len(coords) != len(v):
        raise ValueError("f_coords must align with v")
    pos = {c: i for i, c in enumerate(coords)}
    try:
        return all(v[pos[i]] != k for i in j_set)
    except KeyError as exc:
        raise ValueError(f"j_set index {exc.args[0]} not in f_coords") from exc


def count_good_words(
    k: int,
    f_coords: Sequence[int],
    j_sets: Sequence[Sequence[int]],
    max_terms: int = 1 << 20,
) -> int:
    """Exact number of core words that are bad for no difference set.

    Inclusion-exclusion over subsets T of the difference sets: a word
    avoids k on the union U(T) in (k-2)^|U(T)| * (k-1)^(|F|-|U(T)|)
    ways, signed by |T|.  2^len(j_sets) terms; callers beyond
    max_terms should fall back to estimate_good_words.
    """
    f = frozenset(int(i) for i in f_coords)
    js = [frozenset(int(i) for i in j) for j in j_sets]
    for j in js:
        if not j <= f:
            raise ValueError(f"difference set {sorted(j)} leaves F {sorted(f)}")
    m = len(js)
    if 1 << m > max_terms:
        raise ValueError(f"2^{m} inclusion-exclusion terms exceed cap {max_terms}")
    unions: list[frozenset[int]] = [frozenset()] * (1 << m)
    total = 0
    for mask in range(1 << m):
        if mask:
            low = mask & -mask
            unions[mask] = unions[mask ^ low] | js[low.bit_length() - 1]
        u = len(unions[mask])
        term = (k - 2) ** u * (k - 1) ** (len(f) - u)
        total += -term if bin(mask).count("1") % 2 else term
    return total


def estimate_good_words(
    k: int,
    f_coords: Sequence[int],
    j_sets: Sequence[Sequence[int]],
    rng: random.Random,
    samples: int = 10_000,
) -> Fraction:
    """Monte Carlo good-word fraction, for scales past the exact cap."""
    coords = tuple(f_coords)
    pos_sets = [tuple(coords.index(i) for i in j) for j in j_sets]
    alpha = core_alphabet(k)
    hits = 0
    for _ in range(samples):
        v = tuple(rng.choice(alpha) for _ in coords)
        if not any(all(v[p] != k for p in ps) for ps in pos_sets):
            hits += 1
    return Fraction(hits, samples)


# -- families ----------------------------------------------------------------


@dataclass
class ClassStats:
    k: int
    f_size: int
    core_total: int
    core_good: int

    @property
    def bad_fraction(self) -> Fraction:
        return Fraction(self.core_total - self.core_good, self.core_total)


@dataclass
class FamilyCertificate:
    gapped_ok: bool
    separated_ok: bool
    checks: tuple[tuple[int, int, str, bool], ...]  # (k, k', method, ok)

    def __bool__(self) -> bool:
        return self.gapped_ok and self.separated_ok


@dataclass
class SeparatedFamily:
    """A certified collection {L_k} of pairwise separated gapped languages."""

    d: int
    classes: tuple[int, ...]
    languages: dict[int, Language]
    fsets: Optional[FSets] = None
    seed: Optional[int] = None
    mode: str = "enumerate"
    stats: dict[int, ClassStats] = field(default_factory=dict)

    def language(self, k: int) -> Language:
        return self.languages[k]

    def sizes(self) -> dict[int, int]:
        return {k: self.languages[k].count() for k in self.classes}

    def weight(self) -> Fraction:
        """Sum over classes of |L_k| / (k-1)^d, the packing's bin count payoff."""
        return sum(
            (Fraction(self.languages[k].count(), (k - 1) ** self.d) for k in self.classes),
            start=Fraction(0),
        )

    def certify(
        self, *, rng: Optional[random.Random] = None, samples: int = 400
    ) -> FamilyCertificate:
        gapped_ok = all(bool(is_gapped(self.languages[k])) for k in self.classes)
        checks = []
        sep_ok = True
        for k, kp in itertools.combinations(self.classes, 2):
            res = are_separated(
                self.languages[k], self.languages[kp], rng=rng, samples=samples
            )
            checks.append((k, kp, res.method, bool(res)))
            sep_ok = sep_ok and bool(res)
        return FamilyCertificate(gapped_ok, sep_ok, tuple(checks))


def warmup_family(d: int) -> SeparatedFamily:
    """The hand-built family: L_k pins letter k at coordinate k.

    For 2 <= k <= d, L_k = {w in [k]^d : w_k = k, w_i < k otherwise},
    in product form with the singleton core (k) on F = {k}.  Sizes are
    (k-1)^(d-1) and the weight telescopes to sum of 1/(k-1).
    """
    if d < 2:
        raise ValueError(f"need d >= 2, got {d}")
    langs = {
        k: Language(k, d, f_coords=(k,), core_words=((k,),)) for k in range(2, d + 1)
    }
    return SeparatedFamily(d, tuple(range(2, d + 1)), langs, mode="enumerate")


def build_separated_family(
    d: int,
    classes: Sequence[int],
    seed: int,
    mode: str = "enumerate",
    threshold: Optional[Fraction] = None,
    fsets: Optional[FSets] = None,
    enumerate_cap: int = 1_000_000,
    certify: bool = True,
) -> SeparatedFamily:
    """Randomized separated family over the given classes.

    Per class k, core words over [k] minus k-1 live on the sampled
    index set F_k; a core is dropped as bad when it avoids letter k on
    some difference set F_k minus F_l (l a smaller class).  Surviving
    words are separated from every smaller class by construction: a
    good core shows letter k inside F_k minus F_l, where the smaller
    language only has letters below l.

    enumerate mode materializes cores (refusing past enumerate_cap);
    implicit mode keeps a membership predicate plus the exact
    inclusion-exclusion count.  Failures (empty class, empty
    difference set, infeasible sampling) raise rather than repair.
    """
    cls = tuple(sorted(set(int(k) for k in classes)))
    if not cls:
        raise ValueError("need at least one class")
    if cls[0] < 2:
        raise ValueError(f"classes must be >= 2, got {cls[0]}")
    if mode not in ("enumerate", "implicit"):
        raise ValueError(f"unknown mode {mode!r}")
    if fsets is None:
        fsets = sample_f_sets(d, seed, threshold=threshold, indices=cls)
    missing = [k for k in cls if k not in fsets.sets]
    if missing:
        raise ValueError(f"fsets lacks entries for classes {missing}")

    languages: dict[int, Language] = {}
    stats: dict[int, ClassStats] = {}
    for k in cls:
        f_k = fsets.sets[k]
        coords = tuple(sorted(f_k))
        j_sets = []
        for l in cls:
            if l >= k:
                break
            j = f_k - fsets.sets[l]
            if not j:
                raise FamilyConstructionError(
                    f"difference set F_{k} minus F_{l} is empty; every class-{k} "
                    f"core would be bad"
                )
            j_sets.append(frozenset(j))
        pos_sets = [tuple(coords.index(i) for i in j) for j in j_sets]
        total = (k - 1) ** len(coords)

        def good(v: tuple[int, ...], _ps=tuple(pos_sets), _k=k) -> bool:
            return not any(all(v[p] != _k for p in ps) for ps in _ps)

        if mode == "enumerate":
            if total > enumerate_cap:
                raise ValueError(
                    f"class {k}: {total} cores exceed enumerate cap {enumerate_cap}; "
                    f"use implicit mode"
                )
            cores = tuple(
                v
                for v in itertools.product(core_alphabet(k), repeat=len(coords))
                if good(v)
            )
            good_count = len(cores)
            if good_count == 0:
                raise FamilyConstructionError(
                    f"class {k} has no good core words at d={d}; the construction "
                    f"fails at this scale"
                )
            languages[k] = Language(k, d, f_coords=coords, core_words=cores)
        else:
            good_count = count_good_words(k, coords, j_sets)
            if good_count == 0:
                raise FamilyConstructionError(
                    f"class {k} has no good core words at d={d}; the construction "
                    f"fails at this scale"
                )
            languages[k] = Language(
                k, d, f_coords=coords, core_predicate=good, core_count=good_count
            )
        stats[k] = ClassStats(k, len(coords), total, good_count)

    family = SeparatedFamily(d, cls, languages, fsets, seed, mode, stats)
    if certify:
        cert = family.certify(rng=random.Random((seed, "separation-audit").__repr__()))
        if not cert:
            raise FamilyConstructionError(f"family failed certification: {cert.checks}")
    return family


# -- JSON round-trip ---------------------------------------------------------
#
# Family file format:
#   {"d": int, "classes": [...], "seed": int|null, "mode": str,
#    "threshold": "p/q"|null,
#    "fsets": {"k": [indices]}|null,
#    "languages": [{"k": int, "F": [...], "core_words": [[...]]}
#                  or {"k": int, "F": [...], "core_count": int}]}


def family_to_dict(family: SeparatedFamily) -> dict:
    langs = []
    for k in family.classes:
        lang = family.languages[k]
        entry: dict = {"k": k, "F": list(lang.f_coords)}
        if lang.core_words is not None:
            entry["core_words"] = [list(v) for v in lang.core_words]
        else:
            entry["core_count"] = lang.core_size()
        langs.append(entry)
    return {
        "d": family.d,
        "classes": list(family.classes),
        "seed": family.seed,
        "mode": family.mode,
        "threshold": format_rational(family.fsets.threshold) if family.fsets else None,
        "fsets": (
            {str(k): sorted(v) for k, v in family.fsets.sets.items()}
            if family.fsets
            else None
        ),
        "languages": langs,
    }


def family_from_dict(data: Mapping) -> SeparatedFamily:
    d = int(data["d"])
    classes = tuple(int(k) for k in data["classes"])
    seed = data.get("seed")
    mode = data.get("mode", "enumerate")
    fsets = None
    if data.get("fsets"):
        threshold = as_rational(data["threshold"])
        sets = {int(k): frozenset(v) for k, v in data["fsets"].items()}
        fsets = FSets(d, threshold, sets)
    if any("core_count" in entry for entry in data["languages"]):
        if seed is None or fsets is None:
            raise ValueError("implicit families need their seed and fsets to rebuild")
        return build_separated_family(
            d, classes, int(seed), mode="implicit", fsets=fsets, certify=False
        )
    langs = {}
    for entry in data["languages"]:
        k = int(entry["k"])
        langs[k] = Language(
            k,
            d,
            f_coords=tuple(entry["F"]),
            core_words=tuple(tuple(v) for v in entry["core_words"]),
        )
    return SeparatedFamily(d, classes, langs, fsets, seed, mode)


def save_family(path, family: SeparatedFamily, manifest: Optional[Mapping] = None) -> None:
    doc = family_to_dict(family)
    if manifest is not None:
        doc["manifest"] = dict(manifest)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_family(path) -> SeparatedFamily:
    with open(path, encoding="utf-8") as fh:
        return family_from_dict(json.load(fh))
