"""Spreadness checks for set families.

A family F with declared cardinality bound m is *b-spread* when every
nonempty set S in its shadow satisfies

    |F restricted to S| * b^|S|  <  |F|.

All ratios are exact rationals: b is converted to a Fraction (floats embed
exactly), so verdicts never depend on floating-point rounding.  A witness
is a set achieving the maximum ratio; ties break toward the
lexicographically least label tuple.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import GammaPreconditionError
from .families import (DEFAULT_SHADOW_BUDGET, GroundSet, SetFamily, Subsplit,
                       mask_labels)


def exact_base(b) -> Fraction:
    """Convert a spreadness base to an exact Fraction; requires b > 1."""
    frac = Fraction(b)
    if frac <= 1:
        raise ValueError(f"spreadness base must exceed 1, got {b!r}")
    return frac


@dataclass(frozen=True)
class GammaReport:
    """Outcome of a spreadness check.

    ``ratio`` is the maximum of |F[S]| * b^|S| / |F| over the candidate
    sets (0 when there are none); ``witness`` is the maximizer when the
    check fails, None when it holds.
    """

    holds: bool
    witness: GroundSet | None
    ratio: Fraction

    def to_json_obj(self) -> dict:
        return {
            "holds": self.holds,
            "witness": None if self.witness is None else list(self.witness.labels()),
            "ratio": [self.ratio.numerator, self.ratio.denominator],
        }


def _restriction_count(masks: Iterable[int], b_mask: int) -> int:
    return sum(1 for u in masks if u & b_mask == b_mask)


def _max_ratio_masks(masks: tuple[int, ...], candidates: Iterable[int],
                     b: Fraction, total: int) -> tuple[Fraction, int | None]:
    """Max of count(S) * b^|S| / total over candidate masks, with the
    lexicographically least maximizer (by label tuple).  Candidates must
    arrive in canonical order for the tie-break to hold."""
    best = Fraction(0)
    best_mask = None
    for cand in candidates:
        count = _restriction_count(masks, cand)
        if count == 0:
            continue
        ratio = Fraction(count) * b ** cand.bit_count() / total
        if ratio > best:
            best = ratio
            best_mask = cand
    return best, best_mask


def _canonical_masks(masks: Iterable[int]) -> list[int]:
    return sorted(masks, key=mask_labels)


def check_gamma(family: SetFamily, b,
                budget: int = DEFAULT_SHADOW_BUDGET) -> GammaReport:
    """Check b-spreadness against every nonempty set in the family's shadow."""
    base = exact_base(b)
    if len(family) == 0:
        raise ValueError("spreadness is undefined for an empty family")
    masks = family.masks()
    shadow = family.shadow(budget=budget)
    candidates = _canonical_masks(u for u in shadow.masks() if u)
    best, best_mask = _max_ratio_masks(masks, candidates, base, len(family))
    if best >= 1:
        return GammaReport(False, family.universe.from_bits(best_mask), best)
    return GammaReport(True, None, best)


def check_gamma_on_subsplit(family: SetFamily, sub: Subsplit,
                            over: SetFamily, b) -> GammaReport:
    """Check spreadness with candidates confined to a subsplit.

    Candidates are the nonempty sets on ``sub`` (one element per chosen
    strip, any rank up to the subsplit's) that are subsets of some member
    of ``over``.  With rank 0 or an empty ``over`` there are no candidates
    and the check holds vacuously.
    """
    base = exact_base(b)
    if len(family) == 0:
        raise ValueError("spreadness is undefined for an empty family")
    if sub.split.universe.n != family.universe.n:
        raise ValueError("subsplit over a different universe")
    masks = family.masks()
    candidates = []
    for p in range(1, sub.rank + 1):
        candidates.extend(cand for cand in sub.p_set_masks(p)
                          if over.shadow_contains(family.universe.from_bits(cand)))
    candidates = _canonical_masks(candidates)
    best, best_mask = _max_ratio_masks(masks, candidates, base, len(family))
    if best >= 1:
        return GammaReport(False, family.universe.from_bits(best_mask), best)
    return GammaReport(True, None, best)


def _max_violator_masks(masks: tuple[int, ...], sub: Subsplit, over: SetFamily,
                        seed_mask: int, b: Fraction) -> int | None:
    """Maximal extension of ``seed_mask`` by strips of ``sub`` whose weighted
    restriction count stays at or above the seed's.

    Candidates are confined to sets carried by some member of ``over``.
    Returns a mask S containing the seed with |F[S]| * b^|S| >=
    |F[seed]| * b^|seed|, of maximum cardinality (lexicographically least on
    ties); maximum cardinality means no further in-range one-strip extension
    keeps the property.  Returns None when the seed is empty and no proper
    extension qualifies.
    """
    total = len(masks)
    if total == 0:
        raise ValueError("spreadness is undefined for an empty family")
    uni = sub.split.universe
    seed_count = _restriction_count(masks, seed_mask)
    floor = Fraction(seed_count) * b ** seed_mask.bit_count()
    free = sub.minus(uni.from_bits(seed_mask))
    best_mask = None
    for p in range(free.rank, 0, -1):
        for add in free.p_set_masks(p):
            cand = seed_mask | add
            if not over.shadow_contains(uni.from_bits(cand)):
                continue
            count = _restriction_count(masks, cand)
            if count and Fraction(count) * b ** cand.bit_count() >= floor:
                if best_mask is None or mask_labels(cand) < mask_labels(best_mask):
                    best_mask = cand
        if best_mask is not None:
            break
    if best_mask is not None:
        return best_mask
    return seed_mask if seed_mask else None


def maximal_violator(family: SetFamily, sub: Subsplit, over: SetFamily,
                     seed: GroundSet, b) -> GroundSet | None:
    """A maximal set on ``sub`` extending ``seed`` whose weighted restriction
    count does not drop below the seed's own.

    Candidates come from the same range as :func:`check_gamma_on_subsplit`:
    nonempty sets on ``sub``, one element per strip, carried by some member
    of ``over``.  The returned set S contains the seed, satisfies
    |F[S]| * b^|S| >= |F[seed]| * b^|seed|, and admits no in-range
    one-element extension keeping that bound, so removing F[S] from F never
    strands a worse violator above it.  With an empty seed the bound makes
    S a genuine violator; None is returned when there is none.  A nonempty
    seed is always returned at worst unchanged.
    """
    base = exact_base(b)
    if sub.split.universe.n != family.universe.n:
        raise ValueError("subsplit over a different universe")
    if seed.universe.n != family.universe.n:
        raise ValueError("seed from a different universe")
    if seed.bits and not sub.carries(seed):
        raise ValueError("seed must lie on the subsplit")
    mask = _max_violator_masks(family.masks(), sub, over, seed.bits, base)
    return None if mask is None else family.universe.from_bits(mask)


def require_gamma(family: SetFamily, b,
                  budget: int = DEFAULT_SHADOW_BUDGET) -> GammaReport:
    """check_gamma, raising GammaPreconditionError when the check fails."""
    report = check_gamma(family, b, budget=budget)
    if not report.holds:
        raise GammaPreconditionError(
            f"family is not {b}-spread: witness {report.witness!r} "
            f"has ratio {float(report.ratio):.6g}", report=report)
    return report
