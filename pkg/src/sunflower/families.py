"""Finite sets and set families over a fixed universe, on bit vectors.

A set over the universe {0, .., n-1} is a fixed-width bit vector; a family
keeps its members deduplicated and canonically ordered (lexicographically
by sorted label tuple, empty set first) so that equality, hashing and
serialization are bitwise stable.  Splits partition the universe into
equal-size ordered strips; subsplits select strips in order.

Everything here is immutable and pure, hence safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Iterator, Sequence

from .errors import BudgetExceededError, UniverseMismatchError

# Default cap on generated subsets when materializing a shadow.
DEFAULT_SHADOW_BUDGET = 1 << 22


def mask_labels(mask: int) -> tuple[int, ...]:
    """Ascending labels of the set bits of ``mask``."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def labels_mask(labels: Iterable[int]) -> int:
    mask = 0
    for x in labels:
        mask |= 1 << x
    return mask


@dataclass(frozen=True)
class Universe:
    """The ground set {0, .., n-1}."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("universe size must be positive")

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def set_of(self, labels: Iterable[int]) -> "GroundSet":
        return GroundSet(self, labels_mask(self._check_labels(labels)))

    def from_bits(self, bits: int) -> "GroundSet":
        return GroundSet(self, bits)

    @property
    def empty(self) -> "GroundSet":
        return GroundSet(self, 0)

    def _check_labels(self, labels: Iterable[int]) -> list[int]:
        out = list(labels)
        for x in out:
            if not 0 <= x < self.n:
                raise ValueError(f"label {x} outside universe of size {self.n}")
        return out


class GroundSet:
    """An immutable subset of a universe, stored as a bit mask.

    Ordering compares sorted label tuples, so ``sorted`` over ground sets
    yields the canonical lexicographic order used everywhere else.
    """

    __slots__ = ("universe", "bits", "cardinality")

    def __init__(self, universe: Universe, bits: int):
        if not 0 <= bits <= universe.full_mask:
            raise ValueError("bits outside universe width")
        object.__setattr__(self, "universe", universe)
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "cardinality", bits.bit_count())

    def __setattr__(self, name, value):
        raise AttributeError("GroundSet is immutable")

    def labels(self) -> tuple[int, ...]:
        return mask_labels(self.bits)

    def __contains__(self, label: int) -> bool:
        return bool(self.bits >> label & 1)

    def __len__(self) -> int:
        return self.cardinality

    def __eq__(self, other) -> bool:
        return (isinstance(other, GroundSet)
                and self.universe.n == other.universe.n
                and self.bits == other.bits)

    def __hash__(self) -> int:
        return hash((self.universe.n, self.bits))

    def __lt__(self, other: "GroundSet") -> bool:
        return self.labels() < other.labels()

    def __le__(self, other: "GroundSet") -> bool:
        return self == other or self < other

    def issubset(self, other: "GroundSet") -> bool:
        self._check(other)
        return self.bits & other.bits == self.bits

    def isdisjoint(self, other: "GroundSet") -> bool:
        self._check(other)
        return self.bits & other.bits == 0

    def union(self, other: "GroundSet") -> "GroundSet":
        self._check(other)
        return GroundSet(self.universe, self.bits | other.bits)

    def intersection(self, other: "GroundSet") -> "GroundSet":
        self._check(other)
        return GroundSet(self.universe, self.bits & other.bits)

    def difference(self, other: "GroundSet") -> "GroundSet":
        self._check(other)
        return GroundSet(self.universe, self.bits & ~other.bits)

    def _check(self, other: "GroundSet") -> None:
        if self.universe.n != other.universe.n:
            raise UniverseMismatchError(
                f"universe sizes differ: {self.universe.n} vs {other.universe.n}")

    def __repr__(self) -> str:
        return "{%s}" % ",".join(str(x) for x in self.labels())


class SetFamily:
    """An immutable family of distinct ground sets with a cardinality bound.

    ``m`` is the declared maximum member cardinality; it defaults to the
    largest actual member size and is preserved by serialization.
    """

    __slots__ = ("universe", "members", "m", "_mask_set")

    def __init__(self, universe: Universe, members: Iterable[GroundSet],
                 m: int | None = None):
        seen: dict[int, GroundSet] = {}
        for s in members:
            if s.universe.n != universe.n:
                raise UniverseMismatchError("member from a different universe")
            if s.bits in seen:
                raise ValueError(f"duplicate member {s!r}")
            seen[s.bits] = s
        ordered = tuple(sorted(seen.values()))
        actual = max((s.cardinality for s in ordered), default=0)
        if m is None:
            m = actual
        if m < actual:
            raise ValueError(f"member of cardinality {actual} exceeds bound {m}")
        object.__setattr__(self, "universe", universe)
        object.__setattr__(self, "members", ordered)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "_mask_set", frozenset(seen))

    def __setattr__(self, name, value):
        raise AttributeError("SetFamily is immutable")

    @classmethod
    def of(cls, n: int, sets: Iterable[Iterable[int]],
           m: int | None = None) -> "SetFamily":
        uni = Universe(n)
        return cls(uni, (uni.set_of(s) for s in sets), m=m)

    @classmethod
    def from_masks(cls, universe: Universe, masks: Iterable[int],
                   m: int | None = None) -> "SetFamily":
        return cls(universe, (GroundSet(universe, b) for b in masks), m=m)

    def masks(self) -> tuple[int, ...]:
        return tuple(s.bits for s in self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[GroundSet]:
        return iter(self.members)

    def __contains__(self, s: GroundSet) -> bool:
        return s.universe.n == self.universe.n and s.bits in self._mask_set

    def __eq__(self, other) -> bool:
        return (isinstance(other, SetFamily)
                and self.universe.n == other.universe.n
                and self.m == other.m
                and self._mask_set == other._mask_set)

    def __hash__(self) -> int:
        return hash((self.universe.n, self.m, self._mask_set))

    def __repr__(self) -> str:
        return f"SetFamily(n={self.universe.n}, m={self.m}, size={len(self)})"

    def restrict(self, s: GroundSet) -> "SetFamily":
        """Members that contain ``s`` (the restriction of the family at s)."""
        if s.universe.n != self.universe.n:
            raise UniverseMismatchError("restriction set from a different universe")
        b = s.bits
        return SetFamily(self.universe,
                         (u for u in self.members if u.bits & b == b), m=self.m)

    def shadow(self, budget: int = DEFAULT_SHADOW_BUDGET) -> "SetFamily":
        """All subsets of members, the empty set and members included.

        Materializes up to ``sum(2**|U|)`` subsets; raises
        BudgetExceededError beyond ``budget`` (use :meth:`shadow_contains`
        for membership-only queries on larger families).
        """
        need = sum(1 << s.cardinality for s in self.members)
        if need > budget:
            raise BudgetExceededError(
                f"shadow would generate {need} subsets (budget {budget}); "
                "use shadow_contains for lazy membership", needed=need,
                budget=budget)
        out: set[int] = set()
        for u in self.members:
            labels = u.labels()
            for r in range(len(labels) + 1):
                for c in combinations(labels, r):
                    out.add(labels_mask(c))
        return SetFamily.from_masks(self.universe, out, m=self.m)

    def shadow_contains(self, t: GroundSet) -> bool:
        """True iff ``t`` is a subset of some member (lazy, no materialization)."""
        if t.universe.n != self.universe.n:
            raise UniverseMismatchError("query set from a different universe")
        b = t.bits
        return any(u.bits & b == b for u in self.members)

    def on_subsplit(self, sub: "Subsplit", p: int) -> "SetFamily":
        """Members of cardinality ``p`` lying on the subsplit.

        A set lies on a subsplit when it is contained in the union of the
        selected strips and meets each strip at most once.
        """
        if sub.split.universe.n != self.universe.n:
            raise UniverseMismatchError("subsplit over a different universe")
        if p < 0:
            raise ValueError("cardinality must be nonnegative")
        picked = [u for u in self.members
                  if u.cardinality == p and sub.carries(u)]
        return SetFamily(self.universe, picked, m=self.m)

    def difference(self, other: "SetFamily") -> "SetFamily":
        if other.universe.n != self.universe.n:
            raise UniverseMismatchError("families over different universes")
        drop = other._mask_set
        return SetFamily(self.universe,
                         (u for u in self.members if u.bits not in drop),
                         m=self.m)

    def to_text(self) -> str:
        return family_to_text(self)

    def to_json_obj(self) -> dict:
        return family_to_json_obj(self)


@dataclass(frozen=True)
class Split:
    """An ordered partition of the universe into equal-size strips."""

    universe: Universe
    strips: tuple[GroundSet, ...]

    def __post_init__(self):
        if not self.strips:
            raise ValueError("split needs at least one strip")
        d = self.strips[0].cardinality
        union = 0
        for s in self.strips:
            if s.universe.n != self.universe.n:
                raise UniverseMismatchError("strip from a different universe")
            if s.cardinality != d:
                raise ValueError("strips must have equal size")
            if union & s.bits:
                raise ValueError("strips must be pairwise disjoint")
            union |= s.bits
        if union != self.universe.full_mask:
            raise ValueError("strips must cover the universe")

    @classmethod
    def of(cls, n: int, strips: Iterable[Iterable[int]]) -> "Split":
        uni = Universe(n)
        return cls(uni, tuple(uni.set_of(s) for s in strips))

    @classmethod
    def contiguous(cls, n: int, m: int) -> "Split":
        """The split whose strips are consecutive blocks of size n/m."""
        if m < 1 or n % m:
            raise ValueError(f"strip count {m} must divide universe size {n}")
        d = n // m
        return cls.of(n, (range(i * d, (i + 1) * d) for i in range(m)))

    @property
    def m(self) -> int:
        return len(self.strips)

    @property
    def strip_size(self) -> int:
        return self.strips[0].cardinality

    def subsplit(self, indices: Iterable[int]) -> "Subsplit":
        return Subsplit(self, tuple(indices))

    def full_subsplit(self) -> "Subsplit":
        return Subsplit(self, tuple(range(self.m)))

    def strip_labels(self) -> list[list[int]]:
        return [list(s.labels()) for s in self.strips]


@dataclass(frozen=True)
class Subsplit:
    """An order-preserving selection of strips from a split; rank 0 is legal."""

    split: Split
    indices: tuple[int, ...]

    def __post_init__(self):
        prev = -1
        for i in self.indices:
            if not 0 <= i < self.split.m:
                raise ValueError(f"strip index {i} out of range")
            if i <= prev:
                raise ValueError("strip indices must be strictly increasing")
            prev = i

    @property
    def rank(self) -> int:
        return len(self.indices)

    @property
    def strips(self) -> tuple[GroundSet, ...]:
        return tuple(self.split.strips[i] for i in self.indices)

    @property
    def union_mask(self) -> int:
        mask = 0
        for i in self.indices:
            mask |= self.split.strips[i].bits
        return mask

    def union_set(self) -> GroundSet:
        return GroundSet(self.split.universe, self.union_mask)

    def carries(self, s: GroundSet) -> bool:
        """True iff ``s`` is on this subsplit: within its union, at most one
        element per strip."""
        if s.bits & ~self.union_mask:
            return False
        return all((s.bits & self.split.strips[i].bits).bit_count() <= 1
                   for i in self.indices)

    def minus(self, b: GroundSet) -> "Subsplit":
        """The subsplit of strips disjoint from ``b`` (order preserved)."""
        if b.universe.n != self.split.universe.n:
            raise UniverseMismatchError("set from a different universe")
        return Subsplit(self.split,
                        tuple(i for i in self.indices
                              if not self.split.strips[i].bits & b.bits))

    def p_set_masks(self, p: int) -> Iterator[int]:
        """All masks of p-sets on this subsplit, one element per chosen strip.

        For p = 0 yields the empty mask once, matching the convention that
        a rank-0 selection carries exactly the empty set.
        """
        if p < 0:
            raise ValueError("cardinality must be nonnegative")
        if p == 0:
            yield 0
            return
        if p > self.rank:
            return
        strip_labels = [self.split.strips[i].labels() for i in self.indices]
        for which in combinations(range(self.rank), p):
            for choice in product(*(strip_labels[i] for i in which)):
                yield labels_mask(choice)

    def p_sets(self, p: int) -> Iterator[GroundSet]:
        uni = self.split.universe
        for mask in self.p_set_masks(p):
            yield GroundSet(uni, mask)


def pad_universe(family: SetFamily, n: int) -> SetFamily:
    """Re-embed a family into a larger universe of size ``n``."""
    if n < family.universe.n:
        raise ValueError("cannot shrink the universe")
    uni = Universe(n)
    return SetFamily.from_masks(uni, family.masks(), m=family.m)


# ---------------------------------------------------------------------------
# Serialization.  Text format:
#
#   universe 6 maxcard 2
#   # optional comments
#   0 1
#   2 3
#   -          <- the empty set
#
# Output is canonical: labels ascending within a set, sets in lexicographic
# order, so parse(serialize(F)) == F bit for bit.

def family_to_text(family: SetFamily) -> str:
    lines = [f"universe {family.universe.n} maxcard {family.m}"]
    for s in family.members:
        lines.append(" ".join(str(x) for x in s.labels()) if s.cardinality else "-")
    return "\n".join(lines) + "\n"


def family_from_text(text: str) -> SetFamily:
    header = None
    rows: list[list[int]] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            parts = line.split()
            if len(parts) != 4 or parts[0] != "universe" or parts[2] != "maxcard":
                raise ValueError(f"bad header line: {raw!r}")
            header = (int(parts[1]), int(parts[3]))
            continue
        if line == "-":
            rows.append([])
        else:
            rows.append([int(tok) for tok in line.split()])
    if header is None:
        raise ValueError("missing 'universe <n> maxcard <m>' header")
    n, m = header
    return SetFamily.of(n, rows, m=m)


def family_to_json_obj(family: SetFamily) -> dict:
    return {"n": family.universe.n, "m": family.m,
            "sets": [list(s.labels()) for s in family.members]}


def family_from_json_obj(obj: dict) -> SetFamily:
    try:
        n, m, sets = obj["n"], obj["m"], obj["sets"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"bad family object: {exc}") from None
    return SetFamily.of(n, sets, m=m)
