"""Largest known k-sunflower-free families of m-sets: size (k-1)^m.

Generation g (1-based) contributes the fresh labels
(g-1)*(k-1) .. g*(k-1)-1; each member picks exactly one label per
generation, so the family is the full one-per-strip product over the
natural split into generations.  No k members can pairwise agree: in the
first generation where a would-be core is absent, k members must take k
distinct values among k-1 labels.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BudgetExceededError
from .families import SetFamily, Split, Universe
from .sunflowers import (DEFAULT_SEARCH_NODE_BUDGET, DEFAULT_SHADOW_BUDGET,
                         find_sunflower_exact)

DEFAULT_EXTREMAL_BUDGET = 1 << 20


@dataclass(frozen=True)
class ExtremalFamily:
    k: int
    m: int
    family: SetFamily

    def natural_split(self) -> Split:
        """Generations as strips: m strips of size k-1."""
        return Split.contiguous((self.k - 1) * self.m, self.m)


def build_extremal(k: int, m: int,
                   budget: int = DEFAULT_EXTREMAL_BUDGET) -> ExtremalFamily:
    """Build the product construction; |family| = (k-1)^m on (k-1)*m labels."""
    if k < 2:
        raise ValueError("sunflower size must be at least 2")
    if m < 1:
        raise ValueError("member cardinality must be at least 1")
    size = (k - 1) ** m
    if size > budget:
        raise BudgetExceededError(
            f"construction of {size} sets exceeds budget {budget}",
            needed=size, budget=budget)
    masks = [0]
    for g in range(m):
        fresh = range(g * (k - 1), (g + 1) * (k - 1))
        masks = [u | 1 << x for u in masks for x in fresh]
    family = SetFamily.from_masks(Universe((k - 1) * m), masks, m=m)
    return ExtremalFamily(k, m, family)


def certify_sunflower_free(ef: ExtremalFamily,
                           node_budget: int = DEFAULT_SEARCH_NODE_BUDGET,
                           shadow_budget: int = DEFAULT_SHADOW_BUDGET) -> bool:
    """True iff complete search finds no k-sunflower in the built family."""
    return find_sunflower_exact(ef.family, ef.k, node_budget=node_budget,
                                shadow_budget=shadow_budget) is None
