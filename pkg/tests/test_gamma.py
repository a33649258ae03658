from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import pytest

from sunflower.errors import GammaPreconditionError
from sunflower.families import SetFamily, Split
from sunflower.gamma import (
    GammaReport,
    check_gamma,
    check_gamma_on_subsplit,
    exact_base,
    maximal_violator,
    require_gamma,
)
from sunflower.rng import CounterRng


def random_family(n: int, m: int, size: int, seed: int) -> SetFamily:
    rng = CounterRng(seed)
    combos = list(combinations(range(n), m))
    picks = rng.sample(range(len(combos)), size)
    return SetFamily.of(n, [combos[i] for i in picks], m=m)


def brute_spread_report(family: SetFamily, b: Fraction) -> tuple[bool, Fraction]:
    """Independent double loop: every nonempty subset of every member."""
    total = len(family)
    best = Fraction(0)
    for member in family:
        labels = member.labels()
        for r in range(1, len(labels) + 1):
            for sub in combinations(labels, r):
                s = family.universe.set_of(sub)
                count = sum(1 for u in family if s.issubset(u))
                best = max(best, Fraction(count) * b ** r / total)
    return best < 1, best


def test_exact_base_accepts_rationals_and_floats():
    assert exact_base(2) == Fraction(2)
    assert exact_base(1.5) == Fraction(3, 2)
    assert exact_base(Fraction(7, 5)) == Fraction(7, 5)
    with pytest.raises(ValueError):
        exact_base(1)
    with pytest.raises(ValueError):
        exact_base(0.3)


def test_check_gamma_all_pairs_threshold():
    fam = SetFamily.of(4, [c for c in combinations(range(4), 2)])
    # each singleton sits in 3 of the 6 pairs: ratio 3*b/6 hits 1 at b=2
    failing = check_gamma(fam, 2)
    assert failing.holds is False
    assert failing.witness.labels() == (0,)
    assert failing.ratio == Fraction(1)
    passing = check_gamma(fam, Fraction(19, 10))
    assert passing.holds is True
    assert passing.witness is None
    assert passing.ratio == Fraction(19, 20)


def test_check_gamma_single_member_witness_is_the_member():
    fam = SetFamily.of(6, [[0, 1, 2]])
    report = check_gamma(fam, 1.5)
    assert report.holds is False
    assert report.witness.labels() == (0, 1, 2)
    assert report.ratio == Fraction(27, 8)


def test_check_gamma_requires_nonempty_family():
    with pytest.raises(ValueError):
        check_gamma(SetFamily.of(4, []), 2)


def test_check_gamma_matches_brute_oracle():
    grid = [Fraction(6, 5), Fraction(3, 2), Fraction(2), Fraction(3)]
    for seed in range(40):
        n = 5 + seed % 4
        m = 2 + seed % 2
        size = 4 + seed % 7
        fam = random_family(n, m, size, seed=seed)
        for b in grid:
            want_holds, want_ratio = brute_spread_report(fam, b)
            got = check_gamma(fam, b)
            assert got.holds == want_holds
            assert got.ratio == want_ratio
            if not got.holds:
                count = len(fam.restrict(got.witness))
                assert (Fraction(count) * b ** got.witness.cardinality
                        / len(fam) == want_ratio)


def test_check_gamma_monotone_in_b():
    grid = [Fraction(11, 10), Fraction(3, 2), Fraction(2), Fraction(3), Fraction(5)]
    for seed in range(20):
        fam = random_family(8, 2, 10, seed=100 + seed)
        reports = [check_gamma(fam, b) for b in grid]
        ratios = [r.ratio for r in reports]
        assert ratios == sorted(ratios)
        # once the check fails it stays failed for larger b
        held = [r.holds for r in reports]
        assert held == sorted(held, reverse=True)


def test_gamma_report_json_shape():
    report = GammaReport(False, SetFamily.of(4, [[0, 1]]).members[0],
                         Fraction(4, 3))
    assert report.to_json_obj() == {
        "holds": False,
        "witness": [0, 1],
        "ratio": [4, 3],
    }
    assert GammaReport(True, None, Fraction(1, 2)).to_json_obj()["witness"] is None


SUBSPLIT_FAMILY = SetFamily.of(8, [[0, 4], [0, 5], [1, 4]])


def test_check_gamma_on_subsplit_small_case():
    sub = Split.contiguous(8, 2).full_subsplit()
    failing = check_gamma_on_subsplit(SUBSPLIT_FAMILY, sub, SUBSPLIT_FAMILY, 2)
    assert failing.holds is False
    assert failing.witness.labels() == (0,)
    assert failing.ratio == Fraction(4, 3)
    passing = check_gamma_on_subsplit(SUBSPLIT_FAMILY, sub, SUBSPLIT_FAMILY,
                                      Fraction(7, 5))
    assert passing.holds is True
    assert passing.ratio == Fraction(14, 15)


def test_check_gamma_on_subsplit_range_filter():
    # confining the candidate range changes the reported witness
    sub = Split.contiguous(8, 2).full_subsplit()
    over = SetFamily.of(8, [[1, 4]])
    report = check_gamma_on_subsplit(SUBSPLIT_FAMILY, sub, over, 2)
    assert report.holds is False
    assert report.witness.labels() == (1, 4)
    assert report.ratio == Fraction(4, 3)


def test_check_gamma_on_subsplit_rank_zero_or_empty_over_is_vacuous():
    sp = Split.contiguous(8, 2)
    empty_sub = sp.subsplit([])
    report = check_gamma_on_subsplit(SUBSPLIT_FAMILY, empty_sub,
                                     SUBSPLIT_FAMILY, 2)
    assert report.holds is True
    assert report.ratio == Fraction(0)
    no_over = check_gamma_on_subsplit(SUBSPLIT_FAMILY, sp.full_subsplit(),
                                      SetFamily.of(8, []), 2)
    assert no_over.holds is True


def test_check_gamma_on_subsplit_requires_nonempty_family():
    sub = Split.contiguous(8, 2).full_subsplit()
    with pytest.raises(ValueError):
        check_gamma_on_subsplit(SetFamily.of(8, []), sub, SUBSPLIT_FAMILY, 2)


VIOLATOR_FAMILY = SetFamily.of(
    8, [[0, 4], [0, 5], [0, 7], [1, 4], [1, 5], [2, 6]])


def test_maximal_violator_from_empty_seed():
    sub = Split.contiguous(8, 2).full_subsplit()
    uni = VIOLATOR_FAMILY.universe
    got = maximal_violator(VIOLATOR_FAMILY, sub, VIOLATOR_FAMILY, uni.empty, 2)
    # pairs reach 1*2^2 = 4 < 6, so the search settles at the singleton level
    assert got.labels() == (0,)
    none = maximal_violator(VIOLATOR_FAMILY, sub, VIOLATOR_FAMILY, uni.empty,
                            Fraction(6, 5))
    assert none is None


def test_maximal_violator_extends_nonempty_seed():
    sub = Split.contiguous(8, 2).full_subsplit()
    uni = VIOLATOR_FAMILY.universe
    got = maximal_violator(VIOLATOR_FAMILY, sub, VIOLATOR_FAMILY,
                           uni.set_of([4]), 2)
    # |F[{0,4}]| * 4 = 4 matches the seed's |F[{4}]| * 2 = 4; lex-least wins
    assert got.labels() == (0, 4)
    lone = maximal_violator(VIOLATOR_FAMILY, sub, VIOLATOR_FAMILY,
                            uni.set_of([2]), 2)
    assert lone.labels() == (2, 6)


def test_maximal_violator_returns_seed_when_nothing_extends():
    sub = Split.contiguous(8, 2).full_subsplit()
    uni = VIOLATOR_FAMILY.universe
    seed = uni.set_of([3])
    assert maximal_violator(VIOLATOR_FAMILY, sub, VIOLATOR_FAMILY,
                            seed, 2) == seed


def test_maximal_violator_result_properties():
    # returned set contains the seed, keeps the weighted count, and admits
    # no one-element in-range extension that keeps it
    sub = Split.contiguous(8, 2).full_subsplit()
    b = Fraction(2)
    for seed_idx in range(12):
        fam = random_family(8, 2, 8, seed=200 + seed_idx)
        uni = fam.universe
        for seed_labels in [[], [0], [4]]:
            seed = uni.set_of(seed_labels)
            if seed.bits and not sub.carries(seed):
                continue
            got = maximal_violator(fam, sub, fam, seed, b)
            if got is None:
                assert seed.bits == 0
                continue
            if got == seed:
                continue
            assert seed.issubset(got)
            floor = (len(fam.restrict(seed))
                     * b ** seed.cardinality)
            weight = len(fam.restrict(got)) * b ** got.cardinality
            assert weight >= floor
            free = sub.minus(got)
            for strip in free.strips:
                for label in strip.labels():
                    ext = got.union(uni.set_of([label]))
                    if not fam.shadow_contains(ext):
                        continue
                    ext_weight = (len(fam.restrict(ext))
                                  * b ** ext.cardinality)
                    assert ext_weight < floor


def test_maximal_violator_rejects_off_split_seed():
    sub = Split.contiguous(8, 2).subsplit([1])
    uni = VIOLATOR_FAMILY.universe
    with pytest.raises(ValueError):
        maximal_violator(VIOLATOR_FAMILY, sub, VIOLATOR_FAMILY,
                         uni.set_of([0]), 2)


def test_require_gamma_raises_with_report():
    fam = SetFamily.of(4, [c for c in combinations(range(4), 2)])
    with pytest.raises(GammaPreconditionError) as info:
        require_gamma(fam, 2)
    assert info.value.report.witness.labels() == (0,)
    ok = require_gamma(fam, Fraction(19, 10))
    assert ok.holds is True
