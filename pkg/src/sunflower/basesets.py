"""Base-set extraction engine and its recursive driver.

The engine consumes a family of m-sets lying on an m-split, organized as a
collection of components each indexed by a rank-m' subsplit, together with
a family of anchor m'-sets ("bases") covering every member's projection.
It scans ranks r = m' down to 0, repeatedly carving out elementary parts:

  * at r = m', whole buckets F''[B] whose size meets the threshold f(m');
  * at r < m', buckets cleaned to spreadness on the strips off B by
    repeated maximal-violator removal, with an epsilon-floor at r = 0;

and returns at the first rank whose extracted union reaches a 3^(r-m'-1)
fraction of the input.  The working family shrinks monotonically across
ranks; per-rank accumulations reset.  The driver iterates the engine,
feeding each output's parts (regrouped by the strips of their base sets)
and base sets back in, until the rank repeats or hits zero.

All comparisons against the threshold f(x) = k^-5 * eps^2m *
(c^h * k * ln k)^-x * famSize go through one Threshold object so the
extraction decisions and the post-run audits can never disagree; f and the
epsilon floor switch to log-space below 1e-300.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable

from .errors import ContractViolationError
from .families import GroundSet, SetFamily, Split, Subsplit, mask_labels
from .gamma import (_max_violator_masks, check_gamma, check_gamma_on_subsplit,
                    exact_base)

LOG_SPACE_SWITCH = 1e-300


def _meets_floor(count: int, direct: float, log_value: float) -> bool:
    """count >= floor, comparing directly or in log-space for tiny floors."""
    if direct >= LOG_SPACE_SWITCH:
        return count >= direct
    if count <= 0:
        return False
    return math.log(count) >= log_value


@dataclass(frozen=True)
class Constants:
    """Numeric regime for the engine.

    mode "surrogate" takes h and c as given; mode "canonical" marks the
    canonical schedule h = exp(1/epsilon), c = exp(h) built by
    :func:`canonical_constants` (feasible only for epsilon above roughly
    0.153, where exp(h) still fits in a float).  b is always c * k.
    famSize is the reference cardinality all thresholds scale with; the
    driver fills it with the input family's size when unset.
    """

    epsilon: float
    h: float
    c: float
    k: int
    m: int
    fam_size: int | None = None
    mode: str = "surrogate"

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if not self.h > 1:
            raise ValueError("h must exceed 1")
        if not self.c > 1:
            raise ValueError("c must exceed 1")
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if self.m < 1:
            raise ValueError("m must be at least 1")
        if self.fam_size is not None and self.fam_size < 1:
            raise ValueError("famSize must be positive")
        if self.mode not in ("surrogate", "canonical"):
            raise ValueError(f"unknown mode {self.mode!r}")

    @property
    def b(self) -> float:
        return self.c * self.k

    def with_fam_size(self, fam_size: int) -> "Constants":
        return Constants(self.epsilon, self.h, self.c, self.k, self.m,
                         fam_size, self.mode)

    def eps_floor_log(self) -> float:
        """ln of the rank-0 size floor epsilon^m * famSize."""
        self._need_fam_size()
        return self.m * math.log(self.epsilon) + math.log(self.fam_size)

    def eps_floor_meets(self, count: int) -> bool:
        """count >= epsilon^m * famSize."""
        self._need_fam_size()
        return _meets_floor(count, self.epsilon ** self.m * self.fam_size,
                            self.eps_floor_log())

    def _need_fam_size(self) -> None:
        if self.fam_size is None:
            raise ValueError("famSize is unset")

    def to_json_obj(self) -> dict:
        return {"mode": self.mode, "epsilon": self.epsilon, "h": self.h,
                "c": self.c, "k": self.k, "m": self.m,
                "famSize": self.fam_size}


def canonical_constants(epsilon: float, k: int, m: int,
                        fam_size: int | None = None) -> Constants:
    """Constants on the canonical schedule h = exp(1/eps), c = exp(h)."""
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    try:
        h = math.exp(1.0 / epsilon)
        c = math.exp(h)
    except OverflowError:
        raise ValueError(
            f"canonical constants overflow at epsilon={epsilon}; "
            "the schedule is feasible only for epsilon above ~0.153") from None
    if math.isinf(c):
        raise ValueError(
            f"canonical constants overflow at epsilon={epsilon}; "
            "the schedule is feasible only for epsilon above ~0.153")
    return Constants(epsilon, h, c, k, m, fam_size, mode="canonical")


def constants_from_dict(obj: dict) -> Constants:
    """Parse the constants file format {mode, epsilon, h, c, k, m[, famSize]}."""
    try:
        mode = obj.get("mode", "surrogate")
        epsilon = float(obj["epsilon"])
        k = int(obj["k"])
        m = int(obj["m"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"bad constants object: {exc}") from None
    fam_size = obj.get("famSize")
    if fam_size is not None:
        fam_size = int(fam_size)
    if mode == "canonical":
        if "h" in obj or "c" in obj:
            raise ValueError("mode 'canonical' derives h and c from epsilon; "
                             "remove the explicit values")
        return canonical_constants(epsilon, k, m, fam_size)
    if mode != "surrogate":
        raise ValueError(f"unknown mode {mode!r}")
    try:
        h = float(obj["h"])
        c = float(obj["c"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"bad constants object: {exc}") from None
    return Constants(epsilon, h, c, k, m, fam_size, mode="surrogate")


class Threshold:
    """The bucket-size floor f(x) = k^-5 * eps^2m * (c^h k ln k)^-x * famSize.

    Strictly decreasing in x since c, h > 1 and k >= 2 make the base
    exceed 1.  ``meets`` is the single comparison point used both to
    accept an extraction and to audit one afterwards.
    """

    __slots__ = ("cfg", "_log_base", "_log_f0")

    def __init__(self, cfg: Constants):
        cfg._need_fam_size()
        self.cfg = cfg
        self._log_base = (cfg.h * math.log(cfg.c) + math.log(cfg.k)
                          + math.log(math.log(cfg.k)))
        self._log_f0 = (-5 * math.log(cfg.k)
                        + 2 * cfg.m * math.log(cfg.epsilon)
                        + math.log(cfg.fam_size))

    def log_value(self, x: int) -> float:
        if x < 0:
            raise ValueError("argument must be nonnegative")
        return self._log_f0 - x * self._log_base

    def value(self, x: int) -> float:
        if x < 0:
            raise ValueError("argument must be nonnegative")
        cfg = self.cfg
        try:
            base = cfg.c ** cfg.h * cfg.k * math.log(cfg.k)
            return (cfg.k ** -5 * cfg.epsilon ** (2 * cfg.m)
                    * base ** -x * cfg.fam_size)
        except OverflowError:
            pass
        try:
            return math.exp(self.log_value(x))
        except OverflowError:
            return math.inf

    def meets(self, count: int, x: int) -> bool:
        """count >= f(x), with the documented 1e-300 log-space switch."""
        return _meets_floor(count, self.value(x), self.log_value(x))


@dataclass(frozen=True)
class ElementaryPart:
    """One extracted piece: base set B, origin component key, members T.

    ``key`` is the strip-index tuple of the component's subsplit;
    ``variant`` is "ii" for threshold buckets taken at r = m' and "i" for
    spreadness-cleaned buckets taken at r < m'.
    """

    B: GroundSet
    key: tuple[int, ...]
    T: SetFamily
    variant: str

    @property
    def r(self) -> int:
        return self.B.cardinality

    def base_strips(self, split: Split) -> tuple[int, ...]:
        """Indices of the strips the base set meets."""
        return tuple(i for i, s in enumerate(split.strips)
                     if s.bits & self.B.bits)


class ComponentCollection:
    """A family partitioned into components indexed by rank-r subsplits.

    Members of every component are full one-per-strip m-sets; the key
    records which strips anchor the component.  Components are pairwise
    disjoint and nonempty.  Anchor containment (every member's projection
    onto its key strips belongs to the declared base family) is checked by
    the engine, which knows the bases.
    """

    __slots__ = ("split", "rank", "components", "_family")

    def __init__(self, split: Split,
                 components: dict[tuple[int, ...], SetFamily]):
        ranks = {len(k) for k in components}
        if not components or len(ranks) != 1:
            raise ValueError("components must share one positive rank")
        rank = ranks.pop()
        if not 1 <= rank <= split.m:
            raise ValueError(f"rank {rank} out of range [1, {split.m}]")
        full = split.full_subsplit()
        seen: set[int] = set()
        for key, fam in components.items():
            if len(set(key)) != len(key) or list(key) != sorted(key) \
                    or not all(0 <= i < split.m for i in key):
                raise ValueError(f"bad component key {key}")
            if len(fam) == 0:
                raise ValueError(f"component {key} is empty")
            if fam.universe.n != split.universe.n:
                raise ValueError("component over a different universe")
            for u in fam:
                if u.cardinality != split.m or not full.carries(u):
                    raise ValueError(
                        f"member {u!r} is not a one-per-strip {split.m}-set")
                if u.bits in seen:
                    raise ValueError(f"member {u!r} appears in two components")
                seen.add(u.bits)
        self.split = split
        self.rank = rank
        self.components = {k: components[k] for k in sorted(components)}
        self._family = None

    @property
    def family(self) -> SetFamily:
        if self._family is None:
            masks = []
            m = 0
            for fam in self.components.values():
                masks.extend(fam.masks())
                m = max(m, fam.m)
            self._family = SetFamily.from_masks(self.split.universe, masks, m=m)
        return self._family

    def subsplit(self, key: tuple[int, ...]) -> Subsplit:
        return self.split.subsplit(key)

    @classmethod
    def initial(cls, family: SetFamily, split: Split) -> "ComponentCollection":
        """The trivial collection: one full-rank component holding everything."""
        return cls(split, {tuple(range(split.m)): family})

    @classmethod
    def regroup(cls, parts: Iterable[ElementaryPart], rank: int,
                split: Split) -> "ComponentCollection":
        """Collection for the next engine call: parts merged by the strips
        their base sets occupy."""
        grouped: dict[tuple[int, ...], list[int]] = {}
        maxcard = 0
        for part in parts:
            if part.B.cardinality != rank:
                raise ValueError(
                    f"part base {part.B!r} has rank {part.B.cardinality}, "
                    f"expected {rank}")
            grouped.setdefault(part.base_strips(split), []).extend(
                part.T.masks())
            maxcard = max(maxcard, part.T.m)
        components = {key: SetFamily.from_masks(split.universe, masks, m=maxcard)
                      for key, masks in grouped.items()}
        return cls(split, components)

    @classmethod
    def derive(cls, family: SetFamily, split: Split, rank: int,
               anchors: SetFamily) -> tuple["ComponentCollection", SetFamily]:
        """Assign each member to the lexicographically first rank-sized
        strip selection whose projection of the member is an anchor.

        Returns the collection and the subfamily of members no selection
        accepts (skipped members are not an error at this level).
        """
        strips = [s.bits for s in split.strips]
        grouped: dict[tuple[int, ...], list[int]] = {}
        skipped = []
        for u in family:
            placed = False
            for key in combinations(range(split.m), rank):
                proj = 0
                for i in key:
                    proj |= u.bits & strips[i]
                if family.universe.from_bits(proj) in anchors:
                    grouped.setdefault(key, []).append(u.bits)
                    placed = True
                    break
            if not placed:
                skipped.append(u.bits)
        if not grouped:
            raise ValueError("no member projects into the anchor family")
        components = {key: SetFamily.from_masks(split.universe, masks,
                                                m=family.m)
                      for key, masks in grouped.items()}
        return (cls(split, components),
                SetFamily.from_masks(family.universe, skipped, m=family.m))


def _on_split_strips(split: Split, s: GroundSet) -> tuple[int, ...] | None:
    """Strip indices the set meets, or None if it meets one twice."""
    out = []
    for i, strip in enumerate(split.strips):
        hit = (s.bits & strip.bits).bit_count()
        if hit > 1:
            return None
        if hit:
            out.append(i)
    return tuple(out)


def is_elementary_part(part: ElementaryPart, collection: ComponentCollection,
                       bases: SetFamily, cfg: Constants) -> bool:
    """Exact check that a candidate part satisfies its variant's conditions.

    Variant "i" (rank below the collection's): base in the bases' shadow,
    members all containing the base, spreadness with base b = c*k on the
    component strips off the base over the bases, and the epsilon floor
    when the base is empty.  Variant "ii" (full rank): base in the bases'
    shadow, and the bucket at the base meets f(rank) whenever rank < m.
    Structural defects (unknown component, base not on the subsplit, part
    not inside the component) raise; condition failures return False.
    """
    if part.key not in collection.components:
        raise ValueError(f"unknown component key {part.key}")
    comp = collection.components[part.key]
    sub = collection.subsplit(part.key)
    if part.B.bits and not sub.carries(part.B):
        raise ValueError(f"base {part.B!r} does not lie on subsplit {part.key}")
    comp_masks = set(comp.masks())
    if not all(u in comp_masks for u in part.T.masks()):
        raise ValueError("part members must come from the keyed component")
    if len(part.T) == 0:
        return False
    r = part.r
    mprime = collection.rank
    if not bases.shadow_contains(part.B):
        return False
    if part.variant == "i":
        if r >= mprime:
            return False
        b_bits = part.B.bits
        if not all(u & b_bits == b_bits for u in part.T.masks()):
            return False
        if not check_gamma_on_subsplit(part.T, sub.minus(part.B), bases,
                                       Fraction(cfg.b)).holds:
            return False
        if r == 0:
            return cfg.eps_floor_meets(len(part.T))
        return True
    if part.variant == "ii":
        if r != mprime:
            return False
        if cfg.m > mprime:
            bucket = sum(1 for u in part.T.masks()
                         if u & part.B.bits == part.B.bits)
            return Threshold(cfg).meets(bucket, mprime)
        return True
    raise ValueError(f"unknown variant {part.variant!r}")


@dataclass(frozen=True)
class BaseSetsOutput:
    """One engine call's result: rank, base sets, family, and its parts.

    ``family`` is the disjoint union of the parts' members and meets
    len(family) * 3^(mprime - r + 1) >= len(input family).  ``trace`` has
    one row per extraction performed during the call, including rounds
    whose accumulation fell short.
    """

    r: int
    base_sets: SetFamily
    family: SetFamily
    parts: tuple[ElementaryPart, ...]
    trace: tuple[dict, ...]


def _candidate_bases(sub: Subsplit, r: int, bases: SetFamily) -> list[int]:
    """Masks of r-sets on the subsplit inside the bases' shadow, in
    lexicographic label order; rank 0 gives the empty set alone."""
    uni = sub.split.universe
    if r == 0:
        return [0] if len(bases) else []
    cands = [b for b in sub.p_set_masks(r)
             if bases.shadow_contains(uni.from_bits(b))]
    cands.sort(key=mask_labels)
    return cands


def _clean_to_spread(bucket: list[int], free: Subsplit, bases: SetFamily,
                     b: Fraction) -> list[int]:
    """Greedy maximal subfamily of the bucket with no spreadness violator
    on the free strips over the bases: repeatedly find a maximal violator
    and drop every member containing it."""
    t = list(bucket)
    while t:
        v = _max_violator_masks(tuple(t), free, bases, 0, b)
        if v is None:
            break
        t = [u for u in t if u & v != v]
    return t


def _find_extraction(r: int, mprime: int, work: dict[tuple[int, ...], list[int]],
                     collection: ComponentCollection, bases: SetFamily,
                     cfg: Constants, thr: Threshold, b: Fraction,
                     used_pairs: set[tuple[int, tuple[int, ...]]],
                     cand_cache: dict) -> tuple[tuple[int, ...], int, list[int], str] | None:
    """One scan for the next extraction at rank r, in canonical order:
    components by key, candidate bases by label.  Returns (key, base mask,
    member masks, variant) or None when no pair qualifies."""
    for key in collection.components:
        comp = work[key]
        if not comp:
            continue
        sub = collection.subsplit(key)
        cache_key = (r, key)
        if cache_key not in cand_cache:
            cand_cache[cache_key] = _candidate_bases(sub, r, bases)
        for bm in cand_cache[cache_key]:
            if (bm, key) in used_pairs:
                continue
            bucket = [u for u in comp if u & bm == bm]
            if r == mprime:
                if thr.meets(len(bucket), mprime):
                    return key, bm, bucket, "ii"
                continue
            if not bucket:
                continue
            t = _clean_to_spread(bucket, sub.minus(
                collection.split.universe.from_bits(bm)), bases, b)
            if not t:
                continue
            if r == 0 and not cfg.eps_floor_meets(len(t)):
                continue
            return key, bm, t, "i"
    return None


def base_sets(mprime: int, bases: SetFamily, collection: ComponentCollection,
              cfg: Constants, p_label: int = 1) -> BaseSetsOutput:
    """Run the extraction scan over ranks m' down to 0 and return at the
    first rank whose extracted union reaches 3^(r - m' - 1) of the input.

    The working family persists across ranks (extractions at a failed rank
    stay removed); the accumulated union and base list reset per rank.
    Each (base, component) pair is extracted at most once per call.
    Raises ContractViolationError with the full extraction trace when no
    rank reaches its bound.
    """
    split = collection.split
    if not 1 <= mprime <= cfg.m:
        raise ValueError(f"rank {mprime} out of range [1, {cfg.m}]")
    if mprime != collection.rank:
        raise ValueError(f"rank {mprime} does not match the collection's "
                         f"rank {collection.rank}")
    if split.m != cfg.m:
        raise ValueError("split strip count must equal the configured m")
    if bases.universe.n != split.universe.n:
        raise ValueError("bases over a different universe")
    cfg._need_fam_size()
    family = collection.family
    strips = [s.bits for s in split.strips]
    for u in bases:
        if u.cardinality != mprime or _on_split_strips(split, u) is None:
            raise ValueError(f"base {u!r} is not an on-split {mprime}-set")
        if not family.shadow_contains(u):
            raise ValueError(f"base {u!r} is not in the family's shadow")
    base_mask_set = set(bases.masks())
    for key, comp in collection.components.items():
        for u in comp.masks():
            proj = 0
            for i in key:
                proj |= u & strips[i]
            if proj not in base_mask_set:
                raise ValueError(
                    f"member projection {mask_labels(proj)} of component "
                    f"{key} is not an anchor base")
    if len(family) * 3 ** (2 * cfg.m) < cfg.fam_size:
        raise ValueError(
            f"input family of size {len(family)} is below the "
            f"3^(-2m) * famSize floor")

    thr = Threshold(cfg)
    b = exact_base(cfg.b)
    work = {key: list(comp.masks())
            for key, comp in collection.components.items()}
    used_pairs: set[tuple[int, tuple[int, ...]]] = set()
    cand_cache: dict = {}
    trace: list[dict] = []
    uni = split.universe

    for r in range(mprime, -1, -1):
        round_parts: list[ElementaryPart] = []
        cumulative = 0
        while True:
            found = _find_extraction(r, mprime, work, collection, bases,
                                     cfg, thr, b, used_pairs, cand_cache)
            if found is None:
                break
            key, bm, t_masks, variant = found
            t_set = set(t_masks)
            work[key] = [u for u in work[key] if u not in t_set]
            used_pairs.add((bm, key))
            part = ElementaryPart(uni.from_bits(bm), key,
                                  SetFamily.from_masks(uni, t_masks, m=cfg.m),
                                  variant)
            round_parts.append(part)
            cumulative += len(t_masks)
            trace.append({"p": p_label, "r": r, "B": list(mask_labels(bm)),
                          "Xprime": list(key), "sizeT": len(t_masks),
                          "cumulative": cumulative})
        if cumulative * 3 ** (mprime - r + 1) >= len(family):
            return _finish(r, mprime, round_parts, trace, collection, bases,
                           cfg, thr, b)
    raise ContractViolationError(
        "no rank produced the guaranteed retained fraction; the constants "
        "are outside the supported regime or the engine has a bug",
        trace=trace)


def _finish(r: int, mprime: int, parts: list[ElementaryPart],
            trace: list[dict], collection: ComponentCollection,
            bases: SetFamily, cfg: Constants, thr: Threshold,
            b: Fraction) -> BaseSetsOutput:
    """Assemble the output and assert the engine's postconditions."""
    uni = collection.split.universe
    all_masks: list[int] = []
    for part in parts:
        all_masks.extend(part.T.masks())
    assert len(set(all_masks)) == len(all_masks), "parts must be disjoint"
    fdagger = SetFamily.from_masks(uni, all_masks, m=cfg.m)
    pair_keys = [(part.B.bits, part.key) for part in parts]
    assert len(set(pair_keys)) == len(pair_keys), "pairs must be unique"
    base_masks = sorted({part.B.bits for part in parts}, key=mask_labels)
    base_family = SetFamily.from_masks(uni, base_masks, m=r)

    by_key: dict[tuple[int, ...], list[int]] = {}
    for part in parts:
        by_key.setdefault(part.key, []).extend(part.T.masks())
    if r < mprime:
        # all full-rank buckets were drained below f(m') before rank fell
        for masks in by_key.values():
            for u in bases.masks():
                bucket = sum(1 for w in masks if w & u == u)
                assert not thr.meets(bucket, mprime), \
                    "threshold property failed for the returned rank"
    if r == 0:
        for key, masks in by_key.items():
            comp = SetFamily.from_masks(uni, masks, m=cfg.m)
            assert cfg.eps_floor_meets(len(comp)), \
                "rank-0 component below the epsilon floor"
            report = check_gamma_on_subsplit(comp, collection.subsplit(key),
                                             bases, b)
            assert report.holds, \
                "rank-0 component fails the spreadness condition"
    return BaseSetsOutput(r, base_family, fdagger, tuple(parts), tuple(trace))


@dataclass(frozen=True)
class ProcessStep:
    """One driver iteration: the rank and bases fed in, and the output."""

    p: int
    r_in: int
    output: BaseSetsOutput


@dataclass(frozen=True)
class ProcessRResult:
    steps: tuple[ProcessStep, ...]
    p_hat: int
    r_hat: int
    bases_hat: SetFamily
    family_hat: SetFamily
    parts_hat: tuple[ElementaryPart, ...]
    trace: tuple[dict, ...]


def process_r(family: SetFamily, split: Split, cfg: Constants) -> ProcessRResult:
    """Iterate the engine from rank m with the family anchoring itself.

    Stops when the output rank repeats the input rank (terminal index p)
    or hits zero (terminal index p+1); non-terminal steps strictly
    decrease the rank, so at most m+1 calls run.  Errors from the engine
    propagate with the completed steps attached as ``partial_steps``.
    """
    if split.universe.n != family.universe.n:
        raise ValueError("split over a different universe")
    if cfg.m != split.m:
        raise ValueError("split strip count must equal the configured m")
    if len(family) == 0:
        raise ValueError("family must be nonempty")
    if cfg.fam_size is None:
        cfg = cfg.with_fam_size(len(family))

    steps: list[ProcessStep] = []
    trace: list[dict] = []
    bases = family
    collection = ComponentCollection.initial(family, split)
    r_p = cfg.m
    p = 1
    while True:
        try:
            out = base_sets(r_p, bases, collection, cfg, p_label=p)
        except (ContractViolationError, ValueError) as exc:
            exc.partial_steps = tuple(steps)
            raise
        steps.append(ProcessStep(p, r_p, out))
        trace.extend(out.trace)
        r_next = out.r
        if r_next == r_p or r_next == 0:
            p_hat = p if r_next == r_p else p + 1
            return ProcessRResult(tuple(steps), p_hat, r_next,
                                  out.base_sets, out.family, out.parts,
                                  tuple(trace))
        assert 0 < r_next < r_p, "rank must strictly decrease"
        if p > cfg.m + 2:
            raise ContractViolationError(
                "driver exceeded the rank-descent iteration bound",
                trace=trace)
        bases = out.base_sets
        collection = ComponentCollection.regroup(out.parts, r_next, split)
        r_p = r_next
        p += 1


def audit_terminal_bases(result: ProcessRResult, family: SetFamily,
                         cfg: Constants) -> dict:
    """Report on the terminal parts: the size sandwich, restriction
    consistency, and the terminal-rank inequality chain.

    For every terminal part with base C: f(r_hat) <= |T| (by the same
    comparison the extraction used) and |T| <= |F[C]| in exact integers.
    Chain lines that depend on hypotheses about the original family (a
    spreadness level of c^c * k * ln k, or m > c^c * ln k) are evaluated
    numerically and marked "hypothesis unmet" when the hypothesis fails
    or cannot be evaluated, never treated as failures.
    """
    if not cfg.c > cfg.h > 1:
        raise ValueError("the audit requires c > h > 1")
    if cfg.fam_size is None:
        cfg = cfg.with_fam_size(len(family))
    thr = Threshold(cfg)
    r_hat = result.r_hat
    k, m, c, h, eps = cfg.k, cfg.m, cfg.c, cfg.h, cfg.epsilon
    fam_size = cfg.fam_size

    part_lines = []
    restriction_totals: dict[int, int] = {}
    for part in result.parts_hat:
        c_set = part.B
        size_t = len(part.T)
        in_family = len(family.restrict(c_set))
        restriction_totals[c_set.bits] = restriction_totals.get(
            c_set.bits, 0) + size_t
        # |F[C]| < (c^c k ln k)^{-|C|} famSize, in logs; needs the
        # original family to be (c^c k ln k)-spread
        log_big_base = c * math.log(c) + math.log(k) + math.log(math.log(k))
        rhs_log = -c_set.cardinality * log_big_base + math.log(fam_size)
        upper_chain = (math.log(in_family) < rhs_log if in_family > 0
                       else True)
        part_lines.append({
            "C": list(c_set.labels()),
            "Xprime": list(part.key),
            "sizeT": size_t,
            "restriction": in_family,
            "lower_ok": thr.meets(size_t, r_hat),
            "upper_ok": size_t <= in_family,
            "chain_restriction_lt_spread_bound": upper_chain,
        })

    consistency_lines = []
    for bits, total in sorted(restriction_totals.items(),
                              key=lambda kv: mask_labels(kv[0])):
        c_set = family.universe.from_bits(bits)
        in_family = len(family.restrict(c_set))
        consistency_lines.append({
            "C": list(c_set.labels()),
            "sum_parts": total,
            "restriction": in_family,
            "discarded": in_family - total,
            "ok": total <= in_family,
        })

    # hypothesis: the original family satisfies the c^c-level spreadness
    big_b = None
    try:
        big_b = math.exp(c * math.log(c)) * k * math.log(k)
    except OverflowError:
        pass
    if big_b is not None and math.isfinite(big_b) and big_b > 1:
        spread_hypothesis = check_gamma(family, Fraction(big_b)).holds
    else:
        spread_hypothesis = None

    rank_bound = (5 * math.log(k) - 2 * m * math.log(eps)) \
        / ((c - h) * math.log(c))
    mid_bound = (m / (2 * c)) * (math.log(k) / m + 1)
    m_hypothesis = None
    try:
        m_hypothesis = m > math.exp(c * math.log(c)) * math.log(k)
    except OverflowError:
        m_hypothesis = False
    # the middle comparison additionally leans on the canonical schedule
    # h = exp(1/eps), c = exp(h); surrogate h, c do not support it
    chain = [
        {"line": "r_hat < (5 ln k - 2m ln eps) / ((c-h) ln c)",
         "lhs": r_hat, "rhs": rank_bound, "ok": r_hat < rank_bound,
         "hypothesis": "met" if spread_hypothesis else "unmet"},
        {"line": "(5 ln k - 2m ln eps) / ((c-h) ln c) < (m/2c)(ln k / m + 1)",
         "lhs": rank_bound, "rhs": mid_bound, "ok": rank_bound < mid_bound,
         "hypothesis": ("met" if spread_hypothesis and m_hypothesis
                        and cfg.mode == "canonical" else "unmet")},
        {"line": "(m/2c)(ln k / m + 1) < m/c",
         "lhs": mid_bound, "rhs": m / c, "ok": mid_bound < m / c,
         "hypothesis": "met" if m_hypothesis else "unmet"},
    ]

    return {
        "p_hat": result.p_hat,
        "r_hat": r_hat,
        "parts": part_lines,
        "consistency": consistency_lines,
        "chain": chain,
        "spread_hypothesis_level": big_b,
        "spread_hypothesis_holds": spread_hypothesis,
        "m_hypothesis_holds": m_hypothesis,
        "all_sandwich_ok": all(row["lower_ok"] and row["upper_ok"]
                               for row in part_lines),
    }
