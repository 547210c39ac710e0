import itertools
import random
from fractions import Fraction

import pytest

from groupbench.crbuild import build_toy_g2
from groupbench.groups import Element, ElementaryAbelian2, SymmetricGroup
from groupbench.measure import (
    CoverReport,
    CylinderSet,
    ProductTruncation,
    ProfileParams,
    Slalom,
    Tower,
    build_witness_cbar,
    cylinder_measure,
    pair_count_enumerated,
    parse_profile,
    parse_tower,
    slalom_cover_bounds,
    tail_cover_measure,
    tower_cmp,
    validate_profile,
    x_cbar,
)
from groupbench.reports import CONDITIONAL, FAIL, PASS, SKIPPED
from groupbench.verify import DISTINGUISHED_WORD

GOOD_PROFILE = """
0 2 1 18 17
1 3 2 2^2^20 2^2^19
2 4 3 2^2^2^2^22 2^2^2^2^21
"""


# ---------------------------------------------------------------------------
# Cylinders.
# ---------------------------------------------------------------------------


def two_level_truncation():
    return ProductTruncation.create([ElementaryAbelian2(1), SymmetricGroup(3)])


def test_cylinder_full_is_one():
    t = two_level_truncation()
    assert cylinder_measure(CylinderSet.create(t, [None, None])) == 1


def test_cylinder_singleton_level():
    t = two_level_truncation()
    cyl = CylinderSet.create(t, [{0}, None])
    assert cylinder_measure(cyl) == Fraction(1, 2)


def test_cylinder_complement_splits_sum_to_one():
    t = two_level_truncation()
    level0 = list(t.levels[0].iter_payloads())
    for cut in range(len(level0) + 1):
        left = CylinderSet.create(t, [set(level0[:cut]), None])
        right = CylinderSet.create(t, [set(level0[cut:]), None])
        assert cylinder_measure(left) + cylinder_measure(right) == 1


def test_cylinder_membership_and_measure_agree_with_counting():
    t = two_level_truncation()
    cyl = CylinderSet.create(t, [{1}, {(1, 0, 2), (0, 2, 1)}])
    hits = sum(1 for x in t.product.elements() if cyl.contains(x))
    assert Fraction(hits, t.product.size()) == cylinder_measure(cyl)


def test_truncation_projections_are_homomorphisms():
    t = two_level_truncation()
    rng = random.Random(1)
    payloads = list(t.product.iter_payloads())
    for _ in range(100):
        a = Element(t.product, rng.choice(payloads))
        b = Element(t.product, rng.choice(payloads))
        for i in range(len(t)):
            assert t.project(a * b, i) == t.project(a, i) * t.project(b, i)


# ---------------------------------------------------------------------------
# Tail cover measures.
# ---------------------------------------------------------------------------


def test_tail_spec_example():
    rep = tail_cover_measure([2, 4], [1, 1], 0)
    assert rep.measure == Fraction(5, 8)
    assert rep.bound == Fraction(3, 4)


def test_tail_empty_disjunction():
    assert tail_cover_measure([2, 4], [1, 1], 2).measure == 0


def test_tail_matches_enumeration_oracle():
    rng = random.Random(5)
    for _ in range(25):
        sizes = [rng.randrange(1, 5) for _ in range(rng.randrange(1, 4))]
        widths = [rng.randrange(0, s + 1) for s in sizes]
        start = rng.randrange(0, len(sizes) + 1)
        slalom = Slalom.create(
            [set(range(w)) for w in widths], sizes
        )
        hits = sum(
            1
            for eta in itertools.product(*(range(s) for s in sizes))
            if slalom.admits(eta, start)
        )
        space = 1
        for s in sizes:
            space *= s
        expected = Fraction(hits, space)
        rep = tail_cover_measure(sizes, slalom, start)
        assert rep.measure == expected
        assert rep.measure <= rep.bound


def test_tail_monotone_in_start():
    sizes = [2, 3, 4, 5]
    widths = [1, 1, 2, 1]
    measures = [tail_cover_measure(sizes, widths, s).measure for s in range(5)]
    assert all(a >= b for a, b in zip(measures, measures[1:]))


def test_tail_width_overflow_rejected():
    with pytest.raises(ValueError):
        tail_cover_measure([2], [3], 0)


# ---------------------------------------------------------------------------
# Slalom covering bounds.
# ---------------------------------------------------------------------------


def test_cover_spec_examples():
    assert slalom_cover_bounds([4, 4], [2, 2]) == CoverReport(4, 4, 4)
    assert slalom_cover_bounds([2], [2]) == CoverReport(1, 1, 1)
    rep = slalom_cover_bounds([3, 3], [2, 2])
    assert (rep.lower, rep.upper) == (3, 4)
    assert rep.exact == 3


def test_cover_exact_is_a_real_cover():
    # re-verify the exact value by brute force over all slalom subsets
    sizes, widths = [3, 3], [2, 2]
    rep = slalom_cover_bounds(sizes, widths)
    points = list(itertools.product(*(range(n) for n in sizes)))
    candidates = [
        combo
        for combo in itertools.product(
            *(itertools.combinations(range(n), k) for n, k in zip(sizes, widths))
        )
    ]

    def covers(subset):
        return all(
            any(all(p[i] in nu[i] for i in range(len(sizes))) for nu in subset)
            for p in points
        )

    sizes_found = [
        s
        for s in range(1, rep.exact + 1)
        if any(covers(c) for c in itertools.combinations(candidates, s))
    ]
    assert sizes_found and sizes_found[0] == rep.exact


def test_cover_too_large_reports_bounds_only():
    rep = slalom_cover_bounds([10, 10], [2, 2])
    assert rep.exact is None
    assert rep.lower == 25 and rep.upper == 25 or rep.lower <= rep.upper


# ---------------------------------------------------------------------------
# Towers.
# ---------------------------------------------------------------------------


def test_tower_parse_and_str():
    assert parse_tower("17") == Tower(0, 17)
    assert parse_tower("2^10") == Tower(1, 10)
    assert parse_tower("2^2^19") == Tower(2, 19)
    assert str(Tower(2, 19)) == "2^2^19"
    with pytest.raises(ValueError):
        parse_tower("3^4")


def test_tower_cmp_agrees_with_direct_small():
    # every pair with materializable values up to f = 20
    samples = [
        Tower(0, 0),
        Tower(0, 1),
        Tower(0, 5),
        Tower(0, 16),
        Tower(0, 2**20),
        Tower(1, 4),
        Tower(1, 20),
        Tower(2, 2),
        Tower(2, 4),
        Tower(2, 20),
        Tower(3, 2),
    ]
    for a in samples:
        for b in samples:
            va = a.materialize(1 << 22)
            vb = b.materialize(1 << 22)
            assert va is not None and vb is not None
            expected = (va > vb) - (va < vb)
            assert tower_cmp(a, b) == expected, (a, b)


def test_tower_cmp_value_equality_across_forms():
    assert tower_cmp(Tower(2, 2), Tower(0, 16)) == 0
    assert tower_cmp(Tower(1, 100), Tower(0, 2**100)) == 0
    assert tower_cmp(Tower(1, 100), Tower(0, 2**100 + 1)) == -1


def test_tower_cmp_never_materializes_huge():
    big_a = Tower(2, 10**6)
    big_b = Tower(2, 10**6 + 1)
    assert tower_cmp(big_a, big_b) == -1
    assert tower_cmp(big_a, big_a) == 0
    assert tower_cmp(Tower(4, 20), Tower(3, 21)) == 1


# ---------------------------------------------------------------------------
# Profiles.
# ---------------------------------------------------------------------------


def test_profile_parse_roundtrip():
    prof = parse_profile(GOOD_PROFILE)
    assert len(prof) == 3
    assert prof.f2[1] == Tower(2, 20)
    assert prof.mstar == prof.g2 and prof.mstarstar == prof.f2


def test_profile_good_passes():
    report = validate_profile(parse_profile(GOOD_PROFILE), ratio=Fraction(1, 2))
    by = {c.name: c for c in report.checks}
    assert by["a-strictly-increasing"].status == PASS
    assert by["b-f-above-g"].status == PASS
    assert by["c-growth-separation"].status == PASS
    assert by["d-stage-sizes"].status == SKIPPED
    assert by["e-series"].status == PASS
    assert not report.failed


MUTATIONS = [
    # (row index, column, replacement, violated clause, expected index tag)
    (1, "f1", "2", "a-strictly-increasing", "f1@0"),
    (1, "g1", "3", "b-f-above-g", "f1>g1@1"),
    (0, "g2", "16", "c-growth-separation", "2^2^f1<g2@0"),
    (0, "f2", "2^2^25", "c-growth-separation", "2^2^f2<g2'@0"),
    (2, "g2", "2^2^2^21", "c-growth-separation", "2^2^f2<g2'@1"),
]


@pytest.mark.parametrize("row,col,value,clause,tag", MUTATIONS)
def test_profile_single_clause_mutations(row, col, value, clause, tag):
    prof = parse_profile(GOOD_PROFILE)
    getattr(prof, col)[row] = parse_tower(value)
    report = validate_profile(prof)
    by = {c.name: c for c in report.checks}
    assert by[clause].status == FAIL
    assert by[clause].details["first_violation"] == tag
    # the untouched clauses keep passing
    for name, check in by.items():
        if name not in (clause, "d-stage-sizes", "e-series"):
            assert check.status == PASS, name


def test_profile_stage_sizes_supplied():
    prof = parse_profile(GOOD_PROFILE)
    good = validate_profile(prof, stage_sizes=[Tower(0, 2), Tower(0, 3), Tower(0, 4)])
    assert {c.name: c for c in good.checks}["d-stage-sizes"].status == PASS
    bad = validate_profile(prof, stage_sizes=[Tower(0, 2), Tower(0, 5), Tower(0, 4)])
    assert {c.name: c for c in bad.checks}["d-stage-sizes"].status == FAIL


def test_profile_ratio_violation():
    text = """
0 2 1 10 5
1 3 2 11 10
"""
    # g2/f2 goes 1/2 -> 10/11: not within ratio 1/2
    report = validate_profile(parse_profile(text), ratio=Fraction(1, 2))
    by = {c.name: c for c in report.checks}
    assert by["e-series"].status == FAIL
    assert by["e-series"].details["ratio_violation_index"] == 1


# ---------------------------------------------------------------------------
# The witness family over truncations.
# ---------------------------------------------------------------------------


def test_build_witness_cbar_two_levels():
    levels = [build_toy_g2(2, 2), build_toy_g2(2, 2)]
    t = ProductTruncation.create(levels)
    rng = random.Random(23)
    nu = []
    for level in levels:
        payloads = list(level.iter_payloads())
        nu.append([Element(level, rng.choice(payloads))])
    (c1, c2), report = build_witness_cbar(t, nu)
    assert not report.failed
    by = {c.name: c for c in report.checks}
    assert by["product-density-factorizes"].status == PASS
    # every eta threading the slalom admits every y: exact, on the product
    e = t.product.identity_payload()
    eta = t.assemble([nu[0][0], nu[1][0]])
    inner = t.product.commutator_payload(
        t.product.commutator_payload(eta.payload, c1.payload), c2.payload
    )
    assert inner == e
    hits = sum(
        1
        for y in t.product.iter_payloads()
        if t.product.commutator_payload(inner, y) == e
    )
    assert hits == t.product.size()


def test_pair_count_enumerated_matches_levelwise():
    levels = [build_toy_g2(1, 1), build_toy_g2(1, 1)]
    t = ProductTruncation.create(levels)
    c1 = t.assemble([levels[0].y3_set(1), levels[1].y3_set(1)])
    c2 = t.assemble([levels[0].z_element(1), levels[1].z_element(1)])
    direct = pair_count_enumerated(
        t.product, DISTINGUISHED_WORD, [c1.payload, c2.payload]
    )
    per_level = 1
    for i, level in enumerate(levels):
        per_level *= pair_count_enumerated(
            level, DISTINGUISHED_WORD, [c1.payload[i], c2.payload[i]]
        )
    assert direct == per_level


def test_x_cbar_levelwise_vs_naive_tiny():
    levels = [build_toy_g2(1, 1), build_toy_g2(1, 2)]
    t = ProductTruncation.create(levels)
    c1 = t.assemble([lv.y3_set(1) for lv in levels])
    c2 = t.assemble([lv.z_element(1) for lv in levels])
    rep = x_cbar(t, (c1, c2), threshold=Fraction(1, 1))
    # naive product-level pair density
    e = t.product.identity_payload()
    hits = 0
    members = set()
    for x in t.product.iter_payloads():
        inner = t.product.commutator_payload(
            t.product.commutator_payload(x, c1.payload), c2.payload
        )
        cnt = sum(
            1
            for y in t.product.iter_payloads()
            if t.product.commutator_payload(inner, y) == e
        )
        hits += cnt
        if cnt:
            members.add(x)
    assert rep.pair_density == Fraction(hits, t.product.size() ** 2)
    assert rep.member_count == len(members)
    assert rep.below_threshold is True
