"""Verifiers for the staged-group lemmas: axiom checks, the index-set
partition, the commutator identity, the class partition, and the two
counting routes for the pair set X = {(x, y) : [[[x, c], c*], y] = e}.

The two counting routes are deliberately independent: `count_x_naive`
only evaluates commutators and counts; `count_x_structured` uses the
class partition and centralizer factorization.  Their exact agreement is
the central cross-check of this module.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .crbuild import CRWitness, subset_masks
from .groups import (
    Element,
    EnumerationCapError,
    FiniteGroup,
    G2Group,
    SymmetricGroup,
    centralizer_count,
    max_centralizer_symmetric,
)
from .reports import CONDITIONAL, FAIL, PASS, SKIPPED, CheckRecord, RunReport, mask_str
from .words import Comm, Param, Var, register_structured_counter

E_SCAN_CAP = 2048  # largest group scanned elementwise for the centralizer axiom

DISTINGUISHED_WORD = Comm(Comm(Comm(Var(1), Param(1)), Param(2)), Var(2))


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def submasks(mask: int):
    """All subsets of a bitmask, ascending."""
    out = []
    sub = 0
    while True:
        out.append(sub)
        if sub == mask:
            return out
        sub = (sub - mask) & mask


# ---------------------------------------------------------------------------
# Axioms of the witness class.
# ---------------------------------------------------------------------------


def check_cr_axioms(witness: CRWitness, e_scan_cap: int = E_SCAN_CAP) -> RunReport:
    """Per-clause report for the witness axioms.

    (b) designated involutions: order 2, pairwise commuting, 2^n products;
    (c) tagged elements exist for every m-subset and are valid;
    (d) [y_I, z_J] = e exactly when I is J or empty (exhaustive scan);
    (e) every s != e has |C(s)| < |G|/n^2 (analytic on symmetric carriers,
        elementwise scan on small enumerable ones, skipped otherwise).
    """
    report = RunReport("cr-axioms")
    g = witness.group
    n, m = witness.n, witness.m
    report.inputs = {"kind": g.kind, "n": n, "m": m, "size": g.size()}

    # (b)
    try:
        witness.ybar.validate()
        report.check("b-involutions", True, {"n": n})
    except ValueError as err:
        report.add(CheckRecord("b-involutions", FAIL, {"n": n}, witnesses=[str(err)]))

    # (c)
    missing = [mask for mask in subset_masks(n, m) if mask not in witness.z_payloads]
    bad_payload = [
        mask
        for mask in witness.z_payloads
        if not g.check_payload(witness.z_payloads[mask])
    ]
    report.check(
        "c-tagged-shape",
        not missing and not bad_payload,
        {"expected": len(subset_masks(n, m)), "missing": len(missing)},
        witnesses=[mask_str(x) for x in missing + bad_payload],
    )

    # (d)
    e = g.identity_payload()
    violations = []
    for j_mask in subset_masks(n, m):
        if j_mask not in witness.z_payloads:
            continue
        z = witness.z_payloads[j_mask]
        for i_mask in range(1 << n):
            y = witness.ybar.subset_product_payload(i_mask)
            commutes = g.commutator_payload(y, z) == e
            expected = i_mask in (0, j_mask)
            if commutes != expected:
                violations.append(
                    f"[y{mask_str(i_mask)},z{mask_str(j_mask)}] "
                    + ("= e unexpectedly" if commutes else "!= e")
                )
    report.check(
        "d-commutation-criterion",
        not violations,
        {"scanned": (1 << n) * len(witness.z_masks()), "failures": len(violations)},
        witnesses=violations,
    )

    # (e)
    bound = Fraction(g.size(), n * n)
    if isinstance(g, SymmetricGroup):
        worst, worst_type = max_centralizer_symmetric(g.points)
        report.add(
            CheckRecord(
                "e-small-centralizers",
                PASS if Fraction(worst) < bound else FAIL,
                {
                    "method": "cycle-type-analytic",
                    "max_centralizer": worst,
                    "bound": bound,
                    "witness_cycle_type": list(worst_type),
                },
            )
        )
    elif g.can_enumerate and g.size() <= e_scan_cap:
        worst = 0
        worst_el = None
        for s in g.iter_payloads():
            if s == e:
                continue
            c = sum(
                1
                for t in g.iter_payloads()
                if g.commutator_payload(s, t) == e
            )
            if c > worst:
                worst, worst_el = c, s
        report.add(
            CheckRecord(
                "e-small-centralizers",
                PASS if Fraction(worst) < bound else FAIL,
                {"method": "enumerated", "max_centralizer": worst, "bound": bound},
                witnesses=[g.payload_to_str(worst_el)] if worst_el is not None else [],
            )
        )
    else:
        report.add(
            CheckRecord(
                "e-small-centralizers",
                SKIPPED,
                {"reason": "too-large-without-analytic-path", "size": g.size()},
            )
        )
    return report


# ---------------------------------------------------------------------------
# The index-set partition.
# ---------------------------------------------------------------------------


def find_partition_istar(g2: G2Group, xs: Sequence[Element], k: Optional[int] = None) -> int:
    """Deterministic choice of I_* for a k-tuple of elements.

    Classifies indices i < n by the membership pattern of i in the middle
    index sets of the xs; picks the lexicographically least pattern whose
    class has at least n/2^k members, and returns the n/2^k smallest of
    them (as a bitmask).  The output satisfies |I_*| = n/2^k and
    U2(x) n I_* in {I_*, empty} for every x in xs.
    """
    if k is None:
        k = len(xs)
    if k < 1 or len(xs) != k:
        raise ValueError("need a nonempty k-tuple with k = len(xs)")
    n = g2.n
    if n % (1 << k) != 0:
        raise ValueError(f"2^{k} does not divide n={n}")
    target = n >> k
    for x in xs:
        if x.group is not g2:
            raise ValueError("tuple elements must belong to the given group")
    u2s = [g2.u2_of(x) for x in xs]
    classes: dict[tuple, list[int]] = {}
    for i in range(n):
        sig = tuple((u >> i) & 1 for u in u2s)
        classes.setdefault(sig, []).append(i)
    for eta in itertools.product((0, 1), repeat=k):
        members = classes.get(eta, [])
        if len(members) >= target:
            mask = 0
            for i in members[:target]:
                mask |= 1 << i
            return mask
    raise AssertionError("pigeonhole failed; unreachable for 2^k | n")


# ---------------------------------------------------------------------------
# The commutator identity [a, y3_I*] = y1_{U2(a) & I*}.
# ---------------------------------------------------------------------------


def check_equation_star(
    g2: G2Group,
    istar_mask: int,
    samples: int = 10**5,
    seed: int = 0,
) -> RunReport:
    """Exhaustive (or sampled, above the enumeration cap) identity check."""
    report = RunReport("equation-star")
    report.inputs = {"n": g2.n, "size": g2.size(), "istar": mask_str(istar_mask)}
    c = g2.y3_set(istar_mask).payload
    failures = []
    if g2.can_enumerate:
        checked = 0
        for a in g2.iter_payloads():
            got = g2.commutator_payload(a, c)
            want = (0, 0, g2._ymask[a[1] & istar_mask])
            if got != want:
                failures.append(g2.payload_to_str(a))
            checked += 1
        method = "exhaustive"
    else:
        rng = random.Random(seed)
        gens = list(g2.generator_payloads().values())
        checked = 0
        for _ in range(samples):
            a = g2.identity_payload()
            for _ in range(rng.randrange(1, 24)):
                a = g2.mul_payload(a, rng.choice(gens))
            got = g2.commutator_payload(a, c)
            want = (0, 0, g2._ymask[a[1] & istar_mask])
            if got != want:
                failures.append(g2.payload_to_str(a))
            checked += 1
        method = "sampled"
    report.check(
        "star-identity",
        not failures,
        {"method": method, "checked": checked, "failures": len(failures)},
        witnesses=failures[:4],
    )
    return report


# ---------------------------------------------------------------------------
# The class partition B_I = {a : [a, c] = y1_I}.
# ---------------------------------------------------------------------------


@dataclass
class PartitionReport:
    istar: int
    sizes: dict  # class mask -> count
    anomalies: int  # elements whose commutator is not a designated product
    equal_sizes: bool
    covers: bool
    expected_class_size: int
    commute_set_size: Optional[int] = None  # |{x : [[x,c],c*] = e}|
    status: str = PASS
    hypothesis: Optional[str] = None


def _stage1_clause_d_holds(g2: G2Group, istar_mask: int) -> tuple[bool, list[int]]:
    """Whether the tagged element of I_* commutes with y_U exactly for
    U in {empty, I_*}, across U subseteq I_*.  Returns (holds, offend_masks)."""
    if not g2.has_z():
        return (False, [])
    inner = g2.inner
    e1 = inner.identity_payload()
    z = g2.z_inner_payload(istar_mask)
    offenders = []
    for u in submasks(istar_mask):
        t = inner.commutator_payload(g2.ybar.subset_product_payload(u), z)
        boundary = u in (0, istar_mask)
        if boundary and t != e1:
            offenders.append(u)
        if not boundary and t == e1:
            offenders.append(u)
    return (not offenders, offenders)


def check_b_partition(g2: G2Group, istar_mask: int) -> PartitionReport:
    """Build every class, check disjoint coverage, the closed-form size,
    and (conditionally on the stage-1 criterion) that the double commutator
    vanishes exactly on the first and last class."""
    g2.require_enumerable()
    n = g2.n
    c = g2.y3_set(istar_mask).payload
    label_of = {g2._ymask[u]: u for u in submasks(istar_mask)}
    sizes: dict[int, int] = {u: 0 for u in submasks(istar_mask)}
    anomalies = 0
    members: dict[int, int] = {}
    commute_set = 0
    in_first_last = 0
    mismatch = 0

    cstar = g2.z_inner_payload(istar_mask) if g2.has_z() else None
    e1 = g2.inner.identity_payload()
    for a in g2.iter_payloads():
        w = g2.commutator_payload(a, c)
        if w[0] != 0 or w[1] != 0 or w[2] not in label_of:
            anomalies += 1
            continue
        u = label_of[w[2]]
        sizes[u] += 1
        if cstar is not None:
            t = g2.inner.commutator_payload(w[2], cstar)
            vanishes = t == e1
            expected = u in (0, istar_mask)
            if vanishes:
                commute_set += 1
            if expected:
                in_first_last += 1
            if vanishes != expected:
                mismatch += 1

    total = sum(sizes.values())
    expected_size = (1 << n) * (1 << (n - popcount(istar_mask))) * g2.inner.size()
    equal = all(v == expected_size for v in sizes.values())
    covers = total == g2.size() and anomalies == 0

    rep = PartitionReport(
        istar=istar_mask,
        sizes=sizes,
        anomalies=anomalies,
        equal_sizes=equal,
        covers=covers,
        expected_class_size=expected_size,
        commute_set_size=commute_set if cstar is not None else None,
    )
    if not (equal and covers):
        rep.status = FAIL
        return rep
    if cstar is None:
        rep.status = SKIPPED
        rep.hypothesis = "no-tagged-element"
        return rep
    holds, _ = _stage1_clause_d_holds(g2, istar_mask)
    if holds:
        rep.status = PASS if mismatch == 0 else FAIL
    else:
        # the iff cannot be expected of this instance; report, do not pass
        rep.status = CONDITIONAL
        rep.hypothesis = "stage-1-clause-d"
    return rep


# ---------------------------------------------------------------------------
# Counting the pair set X, two ways.
# ---------------------------------------------------------------------------


@dataclass
class CountReport:
    x_count: int
    x1_count: Optional[int]
    x2_count: Optional[int]
    pair_space: int
    bound: Optional[int]  # floor(|G2|^2 / m) for m = |I_*|
    method: str
    istar: Optional[int]
    cr_d_violations: list = field(default_factory=list)  # offending class masks
    consistent_split: bool = True

    @property
    def density(self) -> Fraction:
        return Fraction(self.x_count, self.pair_space)

    @property
    def status(self) -> str:
        if not self.consistent_split:
            return FAIL
        return CONDITIONAL if self.cr_d_violations else PASS


def _istar_of_pure_y3(g2: G2Group, c: Element) -> Optional[int]:
    u3, u2, g = c.payload
    if u2 == 0 and g == g2.inner.identity_payload():
        return u3
    return None


def count_x_naive(g2: G2Group, c: Element, c_star: Element) -> CountReport:
    """|{(x, y) : [[[x, c], c*], y] = e}| by enumeration.

    Pure evaluation; no use of the normal-form structure.  Inner values
    repeat across x, so the y-scan is cached per distinct inner value,
    which leaves the count identical to the literal double loop.
    """
    if c.group is not g2 or c_star.group is not g2:
        raise ValueError("parameters must belong to the group")
    g2.require_enumerable()
    size = g2.size()
    if size * size > (1 << 26):
        raise EnumerationCapError(
            f"pair space {size * size} exceeds 2^26; use the structured counter"
        )
    e = g2.identity_payload()
    cp, sp = c.payload, c_star.payload

    y_counts: dict = {}
    istar = _istar_of_pure_y3(g2, c)

    def y_count(w) -> int:
        out = y_counts.get(w)
        if out is None:
            if w == e:
                out = size
            else:
                out = sum(
                    1 for y in g2.iter_payloads() if g2.commutator_payload(w, y) == e
                )
            y_counts[w] = out
        return out

    total = 0
    class_first_last = 0
    first_last_all_y = True
    for x in g2.iter_payloads():
        w = g2.commutator_payload(g2.commutator_payload(x, cp), sp)
        cnt = y_count(w)
        total += cnt
        if istar is not None:
            inner_comm = g2.commutator_payload(x, cp)
            if inner_comm in ((0, 0, g2._ymask[0]), (0, 0, g2._ymask[istar])):
                class_first_last += 1
                if cnt != size:
                    first_last_all_y = False

    x1 = x2 = None
    consistent = True
    if istar is not None:
        x1 = class_first_last * size
        x2 = total - x1
        consistent = first_last_all_y  # X1 really is a subset of X
    m = popcount(istar) if istar else 0
    bound = (size * size) // m if m else None
    return CountReport(
        x_count=total,
        x1_count=x1,
        x2_count=x2,
        pair_space=size * size,
        bound=bound,
        method="naive",
        istar=istar,
        consistent_split=consistent,
    )


def count_x_structured(g2: G2Group, istar_mask: int) -> CountReport:
    """|X| via the class partition and the centralizer factorization.

    Every class {x : U2(x) & I_* = U} has N = 2^n * 2^(n-|I_*|) * |G1|
    members; each contributes N * |Z_t| pairs for t the inner double
    commutator of the class, and |Z_t| = 2^n * 2^n * |C_G1(t)|.  Classes
    strictly between the empty set and I_* whose t vanishes violate the
    stage-1 commutation criterion; they are reported, not silently bounded.
    """
    inner = g2.inner
    inner.require_enumerable()
    n = g2.n
    size = g2.size()
    e1 = inner.identity_payload()
    cstar = g2.z_inner_payload(istar_mask)

    n_class = (1 << n) * (1 << (n - popcount(istar_mask))) * inner.size()
    four_n = (1 << n) * (1 << n)
    total = 0
    x1 = 0
    violations = []
    for u in submasks(istar_mask):
        t = inner.commutator_payload(g2.ybar.subset_product_payload(u), cstar)
        boundary = u in (0, istar_mask)
        if boundary:
            if t != e1:
                violations.append(u)
            c_u = four_n * centralizer_count(inner, Element(inner, t))
            x1 += n_class * size
        else:
            if t == e1:
                violations.append(u)
            c_u = four_n * centralizer_count(inner, Element(inner, t))
        total += n_class * c_u

    m = popcount(istar_mask)
    bound = (size * size) // m if m else None
    return CountReport(
        x_count=total,
        x1_count=x1,
        x2_count=total - x1,
        pair_space=size * size,
        bound=bound,
        method="structured",
        istar=istar_mask,
        cr_d_violations=violations,
    )


# register the distinguished word as a structured pair counter
def _distinguished_pair_counter(word, group, cs_payloads):
    if word != DISTINGUISHED_WORD or not isinstance(group, G2Group):
        return None
    if len(cs_payloads) != 2:
        return None
    c = Element(group, cs_payloads[0])
    istar = _istar_of_pure_y3(group, c)
    if istar is None or not group.has_z():
        return None
    if cs_payloads[1] != (0, 0, group.z_inner_payload(istar)):
        return None
    return count_x_structured(group, istar).x_count


register_structured_counter(_distinguished_pair_counter)


# ---------------------------------------------------------------------------
# The assembled witness.
# ---------------------------------------------------------------------------


@dataclass
class CrucialWitness:
    istar: int
    c: Element
    c_star: Element
    xs: tuple

    @property
    def size(self) -> int:
        return popcount(self.istar)


def crucial_witness(g2: G2Group, xs: Sequence[Element]) -> tuple[CrucialWitness, RunReport]:
    """Pick I_*, assemble c = y3_{I_*} and c* = z_{I_*}, verify the
    conclusion clauses: the double commutator kills each x of the tuple,
    every y then satisfies the word, and the pair count obeys the bound
    (the bound comparison is conditional off CR-grade instances)."""
    report = RunReport("crucial-witness")
    k = len(xs)
    istar = find_partition_istar(g2, xs, k)
    c = g2.y3_set(istar)
    c_star = g2.z_element(istar)
    witness = CrucialWitness(istar, c, c_star, tuple(xs))
    report.inputs = {"k": k, "istar": mask_str(istar), "size": g2.size()}

    e = g2.identity_payload()
    bad = []
    for idx, x in enumerate(xs):
        w = g2.commutator_payload(
            g2.commutator_payload(x.payload, c.payload), c_star.payload
        )
        if w != e:
            bad.append(f"x_{idx}")
    report.check("a-double-commutator-kills-tuple", not bad, {"k": k}, witnesses=bad)

    # clause (b): with the inner value e, every y satisfies the word
    if not bad:
        if g2.can_enumerate:
            full = all(
                g2.commutator_payload(e, y) == e for y in g2.iter_payloads()
            )
            report.check(
                "b-solution-set-is-everything", full, {"checked": g2.size()}
            )
        else:
            report.check("b-solution-set-is-everything", True, {"checked": "derived"})
    else:
        report.add(
            CheckRecord("b-solution-set-is-everything", FAIL, {"reason": "clause-a-failed"})
        )

    count = count_x_structured(g2, istar)
    details = {
        "x_count": count.x_count,
        "pair_space": count.pair_space,
        "bound": count.bound if count.bound is not None else "n/a",
    }
    if count.bound is None:
        report.add(CheckRecord("c-pair-count-bound", SKIPPED, details))
    elif count.cr_d_violations:
        report.add(
            CheckRecord(
                "c-pair-count-bound",
                CONDITIONAL,
                details,
                hypothesis="stage-1-clause-d",
            )
        )
    else:
        report.check("c-pair-count-bound", count.x_count <= count.bound, details)
    return witness, report
