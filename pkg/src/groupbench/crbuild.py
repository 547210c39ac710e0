"""Construction of the staged groups: parameter scan, the automorphisms
pi_I, the finite stage-1 realization, and the two-stage normal-form group.

The stage-1 group is realized as G0 x| H: G0 elementary abelian of
dimension 2n, H the closure of the chosen automorphisms under composition
(the literal free-except-for presentation would be infinite; this is the
canonical finite quotient in which each tagged generator has the order of
its automorphism).  The commutation criterion [y_I, z_J] = e iff
I in {J, empty} is preserved, which is what the stage-2 lemmas consume.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .gf2 import (
    ClosureCapExceeded,
    Gf2Automorphism,
    complete_to_basis,
    mat_identity,
    mat_inverse,
    mat_mul,
    matrix_closure,
    vec_apply,
)
from .groups import (
    CommutingInvolutionSequence,
    Element,
    ElementaryAbelian2,
    FiniteGroup,
    G2Group,
    Gf2SemidirectGroup,
)
from .reports import CONDITIONAL, FAIL, PASS, CheckRecord, RunReport, mask_str

PI_RETRIES = 32


# ---------------------------------------------------------------------------
# Parameter shapes.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CRParams:
    k: int
    m: int
    n: int


PARAM_CLAUSES = {
    "a": "0 < k < m < n",
    "b": "2 <= 4m <= n",
    "c": "2^k * m = n",
    "d": "2/2^m + 1/n^2 < 1/m",
}


def check_params(k: int, m: int, n: int) -> list[str]:
    """Names of the violated shape clauses (empty list = admissible)."""
    violated = []
    if not (0 < k < m < n):
        violated.append("a")
    if not (2 <= 4 * m <= n):
        violated.append("b")
    if (1 << k) * m != n:
        violated.append("c")
    if not (Fraction(2, 2**m) + Fraction(1, n * n) < Fraction(1, m)):
        violated.append("d")
    return violated


def smallest_params(n_max: int) -> list[CRParams]:
    """All admissible (k, m, n) with n <= n_max, sorted by (n, k, m)."""
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    out = []
    for n in range(2, n_max + 1):
        for m in range(1, n):
            for k in range(1, m):
                if not check_params(k, m, n):
                    out.append(CRParams(k, m, n))
    out.sort(key=lambda p: (p.n, p.k, p.m))
    return out


# ---------------------------------------------------------------------------
# The automorphisms pi_I of G0 = (Z/2)^(2n).
# ---------------------------------------------------------------------------


@dataclass
class PiReport:
    invertible: bool
    fixes_target: bool
    violations: list[int]  # masks J with pi(y_J) = y_J, J not in {0, I}

    @property
    def ok(self) -> bool:
        return self.invertible and self.fixes_target and not self.violations


def verify_pi(pi: Gf2Automorphism, n: int, i_mask: int) -> PiReport:
    """Scan all 2^n first-block subsets J for unwanted fixed points."""
    if pi.dim != 2 * n:
        raise ValueError(f"expected dimension {2 * n}, got {pi.dim}")
    fixes = pi.apply(i_mask) == i_mask
    violations = []
    for j_mask in range(1 << n):
        if j_mask in (0, i_mask):
            continue
        if pi.apply(j_mask) == j_mask:
            violations.append(j_mask)
    return PiReport(True, fixes, violations)


def _solve_images(domain_basis: Sequence[int], images: Sequence[int], dim: int):
    """Matrix M with b . M = image(b) for each domain basis vector."""
    b_inv = mat_inverse(tuple(domain_basis), dim)
    if b_inv is None:
        return None
    return mat_mul(b_inv, tuple(images))


def build_pi(n: int, i_mask: int, seed: int = 0) -> Gf2Automorphism:
    """An automorphism of (Z/2)^(2n) fixing y_I and moving every other y_J.

    y_I is the sum of first-block basis vectors over I.  For nonempty I the
    map fixes y_I, sends the rest of a first-block basis through I into the
    second block (so every first-block vector outside {0, y_I} picks up a
    second-block component and moves), and completes greedily to an
    invertible matrix.  For I = empty the two blocks are swapped.  The
    result is always re-checked with verify_pi; a bounded randomized retry
    guards the greedy completion (not expected to trigger).
    """
    dim = 2 * n
    if not 0 <= i_mask < (1 << n):
        raise ValueError("I must be a subset of [0, n)")
    if i_mask == 0:
        rows = tuple((1 << (n + i)) for i in range(n)) + tuple(
            (1 << i) for i in range(n)
        )
        pi = Gf2Automorphism(dim, rows)
        report = verify_pi(pi, n, i_mask)
        if not report.ok:
            raise RuntimeError("block swap failed verification (unexpected)")
        return pi

    rng = random.Random(seed)
    candidates: Optional[list[int]] = None  # standard vectors on first try
    for attempt in range(PI_RETRIES):
        first_block = complete_to_basis([i_mask], n, candidates)
        domain = list(first_block) + [1 << (n + j) for j in range(n)]
        images = [i_mask] + [1 << (n + ell) for ell in range(1, n)]
        completion = complete_to_basis(list(images), dim)
        images = images + completion[n:]
        rows = _solve_images(domain, images, dim)
        if rows is not None:
            pi = Gf2Automorphism(dim, rows)
            report = verify_pi(pi, n, i_mask)
            if report.ok:
                return pi
        # randomize the first-block completion and retry
        candidates = [rng.randrange(1, 1 << n) for _ in range(8 * n)] + [
            1 << i for i in range(n)
        ]
    raise RuntimeError(
        f"pi construction failed after {PI_RETRIES} attempts for n={n}, I={mask_str(i_mask)}"
    )


# ---------------------------------------------------------------------------
# Stage 1: the finite semidirect realization with tagged elements.
# ---------------------------------------------------------------------------


@dataclass
class CRWitness:
    """Candidate (G, ybar, zbar): verification lives in the verify module."""

    group: FiniteGroup
    ybar: CommutingInvolutionSequence
    z_payloads: dict  # subset mask -> group payload
    n: int
    m: int

    def y_element(self, i: int) -> Element:
        return self.ybar.element(i)

    def y_set(self, mask: int) -> Element:
        return Element(self.group, self.ybar.subset_product_payload(mask))

    def z_element(self, mask: int) -> Element:
        if mask not in self.z_payloads:
            raise KeyError(f"no tagged element for {mask_str(mask)}")
        return Element(self.group, self.z_payloads[mask])

    def z_masks(self) -> list[int]:
        return sorted(self.z_payloads)


def subset_masks(n: int, m: int) -> list[int]:
    """Masks of the m-element subsets of [0, n), in lexicographic order."""
    out = []
    for combo in itertools.combinations(range(n), m):
        mask = 0
        for i in combo:
            mask |= 1 << i
        out.append(mask)
    return out


def build_g1(n: int, m: int, cap: int = 10**6, seed: int = 0) -> CRWitness:
    """The finite stage-1 realization G0 x| H with tagged z_I = (0, pi_I).

    Raises ClosureCapExceeded (with the partial size) when H outgrows cap.
    """
    if not (1 <= m <= n):
        raise ValueError("need 1 <= m <= n")
    dim = 2 * n
    masks = subset_masks(n, m)
    pis = {mask: build_pi(n, mask, seed=seed) for mask in masks}
    h_gens = [pis[mask].rows for mask in masks]
    h_mats = matrix_closure(h_gens, dim, cap)
    named = {f"z{mask_str(mask)}": pis[mask].rows for mask in masks}
    group = Gf2SemidirectGroup(dim, h_mats, named_h=named)
    ybar = CommutingInvolutionSequence(
        group, tuple((1 << i, group.h_index[mat_identity(dim)]) for i in range(n))
    )
    ybar.validate()
    z_payloads = {mask: (0, group.h_index[pis[mask].rows]) for mask in masks}
    return CRWitness(group, ybar, z_payloads, n, m)


def toy_witness(n: int, g1_dim: Optional[int] = None) -> CRWitness:
    """Toy stand-in over an elementary abelian stage 1 with z_I = y_I.

    Deliberately violates the stage-1 commutation criterion (everything
    commutes); stage-2 verifiers must report dependent checks conditional.
    """
    if g1_dim is None:
        g1_dim = n
    group = ElementaryAbelian2(g1_dim)
    ybar = CommutingInvolutionSequence(group, tuple(1 << i for i in range(n)))
    z_payloads = {mask: mask for mask in range(1 << n)}
    return CRWitness(group, ybar, z_payloads, n, m=max(1, n // 2))


# ---------------------------------------------------------------------------
# Stage 2: the normal-form group.
# ---------------------------------------------------------------------------


def build_g2(witness: CRWitness) -> G2Group:
    """Normal-form group over the witness's stage 1.

    Requires the designated involutions to be central in stage 1 (the
    presentation's relations force the correction terms central; without
    that the triple law is not associative).  Toy witnesses qualify; the
    semidirect stage-1 realizations do not, by design.
    """
    z_map = None
    if witness.z_payloads:
        payloads = dict(witness.z_payloads)
        z_map = payloads.get
    return G2Group(witness.group, witness.ybar, z_map=z_map)


def build_toy_g2(n: int, g1_dim: Optional[int] = None) -> G2Group:
    return build_g2(toy_witness(n, g1_dim))


def relation_check(g2: G2Group, inner_pair_cap: int = 1 << 16) -> RunReport:
    """Verify the five defining relation families on the realized generators.

    (alpha) the inner group embeds multiplicatively;
    (beta)  each adjoined generator has order 2;
    (gamma) same-level generators commute;
    (delta) adjoined generators commute with every embedded inner element;
    (epsilon) cross-level commutators realize the diagonal function;
    plus: the normal-form decomposition is the identity on triples.
    """
    report = RunReport("relations")
    inner = g2.inner
    inner.require_enumerable()
    n = g2.n
    e2 = g2.identity_payload()

    # (alpha): embedding is a homomorphism
    inner_payloads = list(inner.iter_payloads())
    bad = 0
    if len(inner_payloads) ** 2 <= inner_pair_cap:
        pairs = itertools.product(inner_payloads, repeat=2)
    else:
        gens = list(inner.generator_payloads().values())
        pairs = itertools.product(gens, inner_payloads)
    checked = 0
    for g, h in pairs:
        lhs = g2.mul_payload((0, 0, g), (0, 0, h))
        if lhs != (0, 0, inner.mul_payload(g, h)):
            bad += 1
        checked += 1
    report.check("alpha-inner-equations", bad == 0, {"checked": checked, "failures": bad})

    # (beta): order 2
    bad = []
    for name, gen in (("y2", g2.y2), ("y3", g2.y3)):
        for i in range(n):
            p = gen(i).payload
            if g2.mul_payload(p, p) != e2:
                bad.append(f"{name}_{i}")
    report.check("beta-order-2", not bad, {"failures": len(bad)}, witnesses=bad)

    # (gamma): same-level commuting
    bad = []
    for name, gen in (("y2", g2.y2), ("y3", g2.y3)):
        for i in range(n):
            for j in range(n):
                a, b = gen(i).payload, gen(j).payload
                if g2.commutator_payload(a, b) != e2:
                    bad.append(f"[{name}_{i},{name}_{j}]")
    report.check("gamma-level-commute", not bad, {"failures": len(bad)}, witnesses=bad)

    # (delta): adjoined generators commute with the embedded inner group
    bad = []
    for name, gen in (("y2", g2.y2), ("y3", g2.y3)):
        for i in range(n):
            p = gen(i).payload
            for g in inner_payloads:
                if g2.commutator_payload(p, (0, 0, g)) != e2:
                    bad.append(f"[{name}_{i},{inner.payload_to_str(g)}]")
                    break
    report.check("delta-inner-commute", not bad, {"failures": len(bad)}, witnesses=bad)

    # (epsilon): cross-level commutators hit the diagonal function
    bad = []
    for i in range(n):
        for j in range(n):
            got = g2.commutator_payload(g2.y2(i).payload, g2.y3(j).payload)
            want = g2.c_func(i, j).payload
            if got != want:
                bad.append(f"[y2_{i},y3_{j}]")
    report.check("epsilon-cross-commutator", not bad, {"failures": len(bad)}, witnesses=bad)

    # normal form: y3_U3 * y2_U2 * g reassembles to the triple (U3, U2, g)
    bad = 0
    checked = 0
    for u3 in range(1 << n):
        for u2 in range(1 << n):
            for g in inner_payloads:
                prod = g2.mul_payload(
                    g2.mul_payload((u3, 0, inner.identity_payload()), (0, u2, inner.identity_payload())),
                    (0, 0, g),
                )
                if prod != (u3, u2, g):
                    bad += 1
                checked += 1
    report.check("normal-form-identity", bad == 0, {"checked": checked, "failures": bad})
    return report
