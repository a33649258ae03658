"""Searching for splits that retain many members of a uniform family.

A member is *retained* by a split when it lies on it: one element in each
strip.  For a family of C(n, m)-many possible m-sets, averaging over all
unordered partitions into m strips of size d = n/m shows some split retains
at least d^m * |F| / C(n, m) members; the searches here find such a split
either exhaustively or by seeded random sampling.

Also provides transversal counting over a split: the number of ordered
tuples of j pairwise disjoint strips-sized sets, weighted by how many
members meet each of them once, has a closed product form that the brute
count validates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb, exp, factorial
from typing import Iterator

from .errors import BudgetExceededError, TrialsExhaustedError
from .families import GroundSet, SetFamily, Split, Universe
from .rng import CounterRng

DEFAULT_SPLIT_ENUM_BUDGET = 1 << 20
DEFAULT_TRANSVERSAL_BUDGET = 1 << 22


def _uniform_cardinality(family: SetFamily) -> int:
    if len(family) == 0:
        raise ValueError("family must be nonempty")
    cards = {s.cardinality for s in family}
    if len(cards) != 1:
        raise ValueError(f"family must have uniform cardinality, got {sorted(cards)}")
    return cards.pop()


def count_splits(n: int, m: int) -> int:
    """Number of unordered partitions of an n-set into m blocks of size n/m."""
    if m < 1 or n % m:
        raise ValueError(f"strip count {m} must divide universe size {n}")
    d = n // m
    return factorial(n) // (factorial(d) ** m * factorial(m))


def enumerate_splits(universe: Universe, m: int) -> Iterator[Split]:
    """All splits of the universe into m strips, each once.

    Canonical form: the smallest label not yet assigned starts the next
    strip, so strips come out ordered by minimum element and every
    unordered partition appears exactly once.
    """
    n = universe.n
    if m < 1 or n % m:
        raise ValueError(f"strip count {m} must divide universe size {n}")
    d = n // m

    def rec(remaining: int, strips: list[int]) -> Iterator[Split]:
        if not remaining:
            yield Split(universe, tuple(GroundSet(universe, b) for b in strips))
            return
        anchor = remaining & -remaining
        rest = remaining ^ anchor
        rest_labels = []
        x = rest
        while x:
            low = x & -x
            rest_labels.append(low)
            x ^= low
        for extra in combinations(rest_labels, d - 1):
            block = anchor
            for bit in extra:
                block |= bit
            strips.append(block)
            yield from rec(remaining ^ block, strips)
            strips.pop()

    yield from rec(universe.full_mask, [])


def retained_on(family: SetFamily, split: Split) -> SetFamily:
    """The subfamily of members lying on the split (one element per strip)."""
    return family.on_subsplit(split.full_subsplit(), split.m)


def retention_bound(family: SetFamily, m: int) -> Fraction:
    """The averaging floor d^m * |F| / C(n, m) for splits into m strips."""
    n = family.universe.n
    if m < 1 or n % m:
        raise ValueError(f"strip count {m} must divide universe size {n}")
    d = n // m
    return Fraction(d ** m * len(family), comb(n, m))


def stirling_floor(family: SetFamily) -> float:
    """Weaker closed-form floor |F| * e^(-m) used for quick sanity checks."""
    m = _uniform_cardinality(family)
    return len(family) * exp(-m)


@dataclass(frozen=True)
class SplitSearchResult:
    split: Split
    retained: SetFamily
    bound: Fraction
    stirling: float


def find_good_split(family: SetFamily, mode: str = "exhaustive",
                    trials: int = 1000, seed: int = 0,
                    enum_budget: int = DEFAULT_SPLIT_ENUM_BUDGET) -> SplitSearchResult:
    """Find a split retaining at least the averaging floor of members.

    ``exhaustive`` enumerates every split and returns the one retaining the
    most members (first in enumeration order on ties) — always at least the
    floor.  ``random`` samples splits uniformly until one meets the floor,
    raising TrialsExhaustedError (carrying the best result seen) if none of
    ``trials`` samples does.
    """
    m = _uniform_cardinality(family)
    n = family.universe.n
    if m < 1 or n % m:
        raise ValueError(f"member cardinality {m} must divide universe size {n}")
    bound = retention_bound(family, m)
    floor = stirling_floor(family)
    if mode == "exhaustive":
        total = count_splits(n, m)
        if total > enum_budget:
            raise BudgetExceededError(
                f"{total} splits exceed enumeration budget {enum_budget}",
                needed=total, budget=enum_budget)
        best = None
        for split in enumerate_splits(family.universe, m):
            kept = retained_on(family, split)
            if best is None or len(kept) > len(best.retained):
                best = SplitSearchResult(split, kept, bound, floor)
        assert best is not None and len(best.retained) >= bound
        return best
    if mode == "random":
        rng = CounterRng(seed)
        d = n // m
        labels = list(range(n))
        best = None
        for _ in range(trials):
            perm = labels[:]
            rng.shuffle(perm)
            blocks = sorted(sorted(perm[i * d:(i + 1) * d]) for i in range(m))
            split = Split.of(n, blocks)
            kept = retained_on(family, split)
            result = SplitSearchResult(split, kept, bound, floor)
            if len(kept) >= bound:
                return result
            if best is None or len(kept) > len(best.retained):
                best = result
        raise TrialsExhaustedError(
            f"no split met the floor {bound} in {trials} random trials",
            best=best)
    raise ValueError(f"unknown mode {mode!r}")


def _disjoint_tuple_count(n: int, d: int, j: int) -> int:
    count = 1
    for i in range(j):
        count *= comb(n - d * i, d)
    return count


def transversal_count_brute(family: SetFamily, j: int,
                            budget: int = DEFAULT_TRANSVERSAL_BUDGET) -> int:
    """Sum over ordered tuples of j pairwise disjoint d-sets of the number
    of members meeting every set in the tuple exactly once.

    d is n/m for the family's uniform member cardinality m.  Pure
    enumeration; the closed form :func:`transversal_formula` must match it.
    An empty family counts 0 for every j in [0, declared m].
    """
    if len(family) == 0:
        if not 0 <= j <= family.m:
            raise ValueError(f"tuple length {j} must lie in [0, {family.m}]")
        return 0
    m = _uniform_cardinality(family)
    if m == 0:
        if j != 0:
            raise ValueError("tuple length must be 0 for cardinality-0 members")
        return len(family)
    n = family.universe.n
    if n % m:
        raise ValueError(f"member cardinality {m} must divide universe size {n}")
    if not 0 <= j <= m:
        raise ValueError(f"tuple length {j} must lie in [0, {m}]")
    d = n // m
    tuples = _disjoint_tuple_count(n, d, j)
    if tuples > budget:
        raise BudgetExceededError(
            f"{tuples} disjoint tuples exceed budget {budget}",
            needed=tuples, budget=budget)
    masks = family.masks()
    all_labels = range(n)
    total = 0

    def rec(depth: int, used: int, picked: list[int]) -> None:
        nonlocal total
        if depth == j:
            total += sum(1 for u in masks
                         if all((u & b).bit_count() == 1 for b in picked))
            return
        for c in combinations([x for x in all_labels if not used >> x & 1], d):
            b = 0
            for x in c:
                b |= 1 << x
            picked.append(b)
            rec(depth + 1, used | b, picked)
            picked.pop()

    rec(0, 0, [])
    return total


def transversal_formula(family: SetFamily, j: int) -> Fraction:
    """Closed form for :func:`transversal_count_brute`:

        d^j * C(n - d*j, m - j) * (|F| / C(n, m)) * prod_{i<j} C(n - d*i, d)

    Exact over the rationals.  Requires d >= 2 and a nonempty family; the
    brute count needs neither but the product form is stated for that range.
    """
    m = _uniform_cardinality(family)
    n = family.universe.n
    if m < 1 or n % m:
        raise ValueError(f"member cardinality {m} must divide universe size {n}")
    if not 0 <= j <= m:
        raise ValueError(f"tuple length {j} must lie in [0, {m}]")
    d = n // m
    if d < 2:
        raise ValueError("closed form requires strip size at least 2")
    density = Fraction(len(family), comb(n, m))
    return (Fraction(d ** j * comb(n - d * j, m - j))
            * density * _disjoint_tuple_count(n, d, j))
