import itertools
import random

import pytest

from groupbench.crbuild import build_g1, build_toy_g2, toy_witness
from groupbench.groups import Element, SymmetricGroup
from groupbench.reports import CONDITIONAL, FAIL, PASS, SKIPPED
from groupbench.verify import (
    DISTINGUISHED_WORD,
    check_b_partition,
    check_cr_axioms,
    check_equation_star,
    count_x_naive,
    count_x_structured,
    crucial_witness,
    find_partition_istar,
    popcount,
    submasks,
)
from groupbench.words import solution_count


def checks_by_name(report):
    return {c.name: c for c in report.checks}


def test_cr_axioms_on_built_stage1():
    report = check_cr_axioms(build_g1(3, 1, cap=10**5))
    by = checks_by_name(report)
    assert by["b-involutions"].status == PASS
    assert by["c-tagged-shape"].status == PASS
    assert by["d-commutation-criterion"].status == PASS
    assert by["e-small-centralizers"].status == SKIPPED


def test_cr_axioms_toy_negative_control():
    # everything commutes, so the commutation criterion must fail
    report = check_cr_axioms(toy_witness(2, 2))
    by = checks_by_name(report)
    assert by["d-commutation-criterion"].status == FAIL


def test_cr_axioms_symmetric_analytic_path():
    # a symmetric carrier with n^2 < N uses the cycle-type maximum; with
    # n = 1 the bound |C(s)| < |G| holds for every nonabelian Sym
    from groupbench.crbuild import CRWitness
    from groupbench.groups import CommutingInvolutionSequence

    g = SymmetricGroup(5)
    ybar = CommutingInvolutionSequence(g, ((1, 0, 2, 3, 4),))
    w = CRWitness(g, ybar, {0b1: (1, 0, 2, 3, 4)}, n=1, m=1)
    report = check_cr_axioms(w)
    by = checks_by_name(report)
    assert by["e-small-centralizers"].status == PASS
    assert by["e-small-centralizers"].details["method"] == "cycle-type-analytic"
    assert by["e-small-centralizers"].details["max_centralizer"] == 12


# ---------------------------------------------------------------------------
# The index-set partition.
# ---------------------------------------------------------------------------


def test_partition_all_identity_tuple():
    g2 = build_toy_g2(2, 2)
    istar = find_partition_istar(g2, [g2.identity], 1)
    assert istar == 0b1  # first n/2 indices


def test_partition_traced_example():
    # k = 1, U2(x0) = first half: the all-zero pattern class is the second
    # half, and the lexicographically least admissible pattern is eta = 0
    n = 4
    g2 = build_toy_g2(n, n)
    x0 = g2.y2_set(0b0011)
    istar = find_partition_istar(g2, [x0], 1)
    assert popcount(istar) == 2
    assert istar == 0b1100


def test_partition_divisibility_error():
    g2 = build_toy_g2(3, 3)
    with pytest.raises(ValueError):
        find_partition_istar(g2, [g2.identity], 1)  # 2 does not divide 3


def test_partition_clauses_random():
    rng = random.Random(9)
    for n, k, g1_dim in [(2, 1, 2), (4, 1, 3), (4, 2, 4)]:
        g2 = build_toy_g2(n, g1_dim)
        payloads = list(g2.iter_payloads())
        for _ in range(300):
            xs = [Element(g2, rng.choice(payloads)) for _ in range(k)]
            istar = find_partition_istar(g2, xs, k)
            assert popcount(istar) == n >> k
            for x in xs:
                assert g2.u2_of(x) & istar in (0, istar)


# ---------------------------------------------------------------------------
# The commutator identity.
# ---------------------------------------------------------------------------


def test_equation_star_exhaustive_all_istar():
    for n, dim in [(2, 2), (3, 3)]:
        g2 = build_toy_g2(n, dim)
        for istar in range(1 << n):
            report = check_equation_star(g2, istar)
            assert not report.failed, (n, istar)


def test_equation_star_specific_value():
    g2 = build_toy_g2(2, 2)
    a = g2.element((0, 0b10, g2.inner.identity_payload()))  # U2 = {1}
    c = g2.y3_set(0b11)
    got = g2.commutator_payload(a.payload, c.payload)
    assert got == (0, 0, g2.ybar.elements[1])  # y1_{U2(a) & I*} = y1_1


def test_equation_star_sampled_path():
    g2 = build_toy_g2(6, 18)  # 2^40 elements: above the enumeration cap
    report = check_equation_star(g2, 0b1, samples=500, seed=4)
    assert not report.failed
    assert report.checks[0].details["method"] == "sampled"


# ---------------------------------------------------------------------------
# The class partition.
# ---------------------------------------------------------------------------


def test_b_partition_toy64():
    g2 = build_toy_g2(2, 2)
    rep = check_b_partition(g2, 0b11)
    assert set(rep.sizes) == {0b00, 0b01, 0b10, 0b11}
    assert all(v == 16 for v in rep.sizes.values())
    assert rep.covers and rep.equal_sizes and rep.anomalies == 0
    assert sum(rep.sizes.values()) == g2.size()
    assert rep.expected_class_size == 16
    # a toy violates the stage-1 criterion: must be conditional, not pass
    assert rep.status == CONDITIONAL
    assert rep.hypothesis == "stage-1-clause-d"
    # on a toy everything commutes downstairs, so the commute set is all of G2
    assert rep.commute_set_size == g2.size()


def test_b_partition_singleton_istar_passes():
    # |I_*| = 1 has no strictly-between classes: the iff is unconditional
    g2 = build_toy_g2(2, 2)
    rep = check_b_partition(g2, 0b01)
    assert rep.status == PASS
    assert all(v == 32 for v in rep.sizes.values())


def test_b_partition_closed_form_sizes():
    for n, dim, istar in [(2, 3, 0b11), (3, 3, 0b101), (3, 3, 0b111)]:
        g2 = build_toy_g2(n, dim)
        rep = check_b_partition(g2, istar)
        expected = (1 << n) * (1 << (n - popcount(istar))) * g2.inner.size()
        assert rep.expected_class_size == expected
        assert all(v == expected for v in rep.sizes.values())


# ---------------------------------------------------------------------------
# Counting the pair set, two routes.
# ---------------------------------------------------------------------------


def test_count_x_naive_equals_literal_double_loop():
    g2 = build_toy_g2(2, 2)
    c = g2.y3_set(0b11)
    c_star = g2.z_element(0b11)
    rep = count_x_naive(g2, c, c_star)
    e = g2.identity_payload()
    literal = 0
    for x in g2.iter_payloads():
        for y in g2.iter_payloads():
            w = g2.commutator_payload(
                g2.commutator_payload(g2.commutator_payload(x, c.payload), c_star.payload), y
            )
            if w == e:
                literal += 1
    assert rep.x_count == literal


def test_count_x_c_identity_gives_full_square():
    g2 = build_toy_g2(2, 2)
    rep = count_x_naive(g2, g2.identity, g2.z_element(0b11))
    assert rep.x_count == g2.size() ** 2


def test_count_x_cross_oracle_and_split():
    for n, dim in [(2, 2), (2, 3), (3, 3)]:
        g2 = build_toy_g2(n, dim)
        for istar in range(1 << n):
            naive = count_x_naive(g2, g2.y3_set(istar), g2.z_element(istar))
            structured = count_x_structured(g2, istar)
            assert naive.x_count == structured.x_count, (n, dim, istar)
            assert naive.x1_count == structured.x1_count
            assert naive.x2_count == structured.x2_count
            assert naive.x1_count + naive.x2_count == naive.x_count
            # the toy violates the stage-1 criterion whenever middle classes exist
            middles = [u for u in submasks(istar) if u not in (0, istar)]
            assert sorted(structured.cr_d_violations) == sorted(middles)
            assert structured.status == (CONDITIONAL if middles else PASS)


def test_count_x_registered_structured_counter():
    g2 = build_toy_g2(2, 2)
    c = g2.y3_set(0b11)
    c_star = g2.z_element(0b11)
    rep = solution_count(DISTINGUISHED_WORD, g2, [c, c_star])
    assert rep.method == "structured"
    assert rep.count == count_x_structured(g2, 0b11).x_count


def test_count_x_bound_field():
    g2 = build_toy_g2(2, 2)
    rep = count_x_structured(g2, 0b11)
    assert rep.bound == g2.size() ** 2 // 2
    assert count_x_structured(g2, 0).bound is None


# ---------------------------------------------------------------------------
# The assembled witness.
# ---------------------------------------------------------------------------


def test_crucial_witness_clauses():
    g2 = build_toy_g2(2, 2)
    rng = random.Random(13)
    payloads = list(g2.iter_payloads())
    for _ in range(25):
        xs = [Element(g2, rng.choice(payloads))]
        witness, report = crucial_witness(g2, xs)
        by = {c.name: c for c in report.checks}
        assert by["a-double-commutator-kills-tuple"].status == PASS
        assert by["b-solution-set-is-everything"].status == PASS
        assert witness.c.payload == (witness.istar, 0, g2.inner.identity_payload())
        assert witness.c_star.payload[0] == 0 and witness.c_star.payload[1] == 0


def test_crucial_witness_identity_tuple():
    g2 = build_toy_g2(2, 2)
    witness, report = crucial_witness(g2, [g2.identity])
    assert witness.istar == 0b1
    assert not report.failed


def test_crucial_witness_k2():
    g2 = build_toy_g2(4, 4)
    rng = random.Random(21)
    payloads = list(g2.iter_payloads())
    xs = [Element(g2, rng.choice(payloads)) for _ in range(2)]
    witness, report = crucial_witness(g2, xs)
    assert popcount(witness.istar) == 1
    assert not report.failed
