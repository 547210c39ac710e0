import random

import pytest

from groupbench.crbuild import (
    build_g1,
    build_g2,
    build_pi,
    build_toy_g2,
    check_params,
    relation_check,
    smallest_params,
    subset_masks,
    toy_witness,
    verify_pi,
)
from groupbench.gf2 import ClosureCapExceeded, Gf2Automorphism, mat_identity, vec_apply
from groupbench.groups import G2Group, associativity_report


def test_check_params_named_clauses():
    assert check_params(2, 3, 12) == []
    violated = check_params(1, 2, 4)
    assert "b" in violated  # 4m = 8 > 4
    assert check_params(3, 2, 16) != []  # k >= m
    # arithmetic clause (d) alone: shape fine for (2, 3, 12); perturb n
    assert "d" in check_params(1, 2, 4)


def test_smallest_params_admissible_scan():
    found = smallest_params(64)
    assert found[0].k == 2 and found[0].m == 3 and found[0].n == 12
    # independent re-check of every returned triple against the raw inequalities
    from fractions import Fraction

    for p in found:
        assert 0 < p.k < p.m < p.n
        assert 2 <= 4 * p.m <= p.n
        assert (1 << p.k) * p.m == p.n
        assert Fraction(2, 2**p.m) + Fraction(1, p.n**2) < Fraction(1, p.m)
    assert all(p.n <= 64 for p in found)
    assert [p.n for p in found] == sorted(p.n for p in found)


def test_spec_arithmetic_for_2_3_12():
    from fractions import Fraction

    assert Fraction(2, 8) + Fraction(1, 144) < Fraction(1, 3)


def test_build_pi_vacuous_n1():
    pi = build_pi(1, 0b1)
    assert verify_pi(pi, 1, 0b1).ok


def test_build_pi_empty_set_swaps_blocks():
    n = 3
    pi = build_pi(n, 0)
    assert verify_pi(pi, n, 0).ok
    for i in range(n):
        assert pi.apply(1 << i) == 1 << (n + i)


def test_verify_pi_identity_fails():
    ident = Gf2Automorphism(4, mat_identity(4))
    rep = verify_pi(ident, 2, 0b01)
    assert not rep.ok
    assert 0b10 in rep.violations


def test_build_pi_explicit_n3():
    pi = build_pi(3, 0b011)
    assert pi.apply(0b011) == 0b011
    for j in range(1, 8):
        if j != 0b011:
            assert pi.apply(j) != j


def test_build_pi_sweep_small():
    for n in range(1, 8):
        for m in {1, n // 4} - {0}:
            for mask in subset_masks(n, m):
                assert verify_pi(build_pi(n, mask), n, mask).ok


def test_build_g1_structure():
    w = build_g1(3, 1, cap=10**5)
    g = w.group
    assert g.h_size() == 360
    assert g.size() == (1 << 6) * 360
    # conjugation by a tagged element acts as its automorphism
    for mask in w.z_masks():
        z = w.z_element(mask)
        m = g.h_mats[w.z_payloads[mask][1]]
        for i in range(3):
            y = w.y_element(i)
            assert (z.inverse() * y * z).payload == (vec_apply(m, 1 << i), g.identity_payload()[1])


def test_build_g1_commutation_criterion():
    w = build_g1(3, 1, cap=10**5)
    g = w.group
    e = g.identity_payload()
    for j_mask in w.z_masks():
        z = w.z_payloads[j_mask]
        for i_mask in range(1 << 3):
            y = w.ybar.subset_product_payload(i_mask)
            assert (g.commutator_payload(y, z) == e) == (i_mask in (0, j_mask))


def test_build_g1_cap_exceeded():
    with pytest.raises(ClosureCapExceeded) as err:
        build_g1(4, 1, cap=100)
    assert err.value.partial_size > 100


def test_toy_witness_shape():
    w = toy_witness(2, 2)
    assert w.group.size() == 4
    assert w.z_element(0b11).payload == 0b11


def test_build_g2_sizes():
    g2 = build_toy_g2(2, 2)
    assert g2.size() == 64
    assert build_toy_g2(3, 3).size() == 512


def test_build_g2_rejects_noncentral_stage1():
    w = build_g1(3, 1, cap=10**5)
    with pytest.raises(ValueError, match="central"):
        build_g2(w)


def test_relation_check_passes_on_toys():
    for n, dim in [(1, 1), (2, 2), (2, 3)]:
        report = relation_check(build_toy_g2(n, dim))
        assert report.status == "pass", report.render_text()


class _DroppedCorrection(G2Group):
    """Negative control: the multiplication law without the correction term."""

    def mul_payload(self, a, b):
        u3, u2, g = a
        v3, v2, h = b
        return (u3 ^ v3, u2 ^ v2, self.inner.mul_payload(g, h))


def test_relation_check_negative_control():
    base = build_toy_g2(2, 2)
    broken = _DroppedCorrection(base.inner, base.ybar, check=False)
    report = relation_check(broken)
    by_name = {c.name: c.status for c in report.checks}
    assert by_name["epsilon-cross-commutator"] == "fail"


def test_inverse_law_toy():
    g2 = build_toy_g2(2, 2)
    e = g2.identity_payload()
    for p in g2.iter_payloads():
        q = g2.inv_payload(p)
        assert g2.mul_payload(p, q) == e
        assert g2.mul_payload(q, p) == e


def test_associativity_toy_4096_generator_reduction():
    g2 = build_toy_g2(4, 4)
    assert g2.size() == 4096
    rep = associativity_report(g2)
    assert rep["failures"] == 0
    assert rep["method"] == "generators"


def test_associativity_random_large_toy():
    g2 = build_toy_g2(4, 6)  # 16384 elements: sampled path
    rep = associativity_report(g2, samples=4000, seed=3)
    assert rep["method"] == "sampled"
    assert rep["failures"] == 0
