"""Finite-truncation measure arithmetic: cylinder measures over product
groups, the witness family for the slalom-prediction lemma, tail cover
measures, growth-profile validation and slalom covering bounds.

Normalized counting measure on a finite level stands in for the limit
measure; all values are exact `fractions.Fraction`.  Very large profile
entries are handled symbolically as towers 2^2^...^base and compared
exactly without materialization.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, Optional, Sequence

from .groups import DirectProductGroup, Element, FiniteGroup, G2Group
from .reports import CONDITIONAL, FAIL, PASS, SKIPPED, CheckRecord, RunReport, mask_str
from .verify import DISTINGUISHED_WORD, count_x_structured, crucial_witness, popcount
from .words import WordTerm, evaluate_payload, solution_count

COVER_POINT_CAP = 16
COVER_CANDIDATE_CAP = 10**4


# ---------------------------------------------------------------------------
# Product truncations and cylinder sets.
# ---------------------------------------------------------------------------


@dataclass
class ProductTruncation:
    """Finitely many levels of a product of finite groups."""

    levels: list
    product: DirectProductGroup

    @staticmethod
    def create(levels: Sequence[FiniteGroup]) -> "ProductTruncation":
        return ProductTruncation(list(levels), DirectProductGroup(levels))

    def __len__(self) -> int:
        return len(self.levels)

    def project(self, x: Element, i: int) -> Element:
        if x.group is not self.product:
            raise ValueError("element is not in the product")
        return Element(self.levels[i], x.payload[i])

    def assemble(self, parts: Sequence[Element]) -> Element:
        if len(parts) != len(self.levels):
            raise ValueError("level count mismatch")
        for part, level in zip(parts, self.levels):
            if part.group is not level:
                raise ValueError("component from the wrong level")
        return Element(self.product, tuple(p.payload for p in parts))


@dataclass
class CylinderSet:
    """Coordinatewise constraints: None means the full level."""

    truncation: ProductTruncation
    constraints: list  # per level: Optional[frozenset of payloads]

    @staticmethod
    def create(truncation: ProductTruncation, constraints) -> "CylinderSet":
        if len(constraints) != len(truncation):
            raise ValueError("level count mismatch")
        normalized = []
        for level, b in zip(truncation.levels, constraints):
            if b is None:
                normalized.append(None)
                continue
            payloads = frozenset(
                x.payload if isinstance(x, Element) else x for x in b
            )
            for p in payloads:
                if not level.check_payload(p):
                    raise ValueError(f"constraint payload {p!r} not in level")
            normalized.append(payloads)
        return CylinderSet(truncation, normalized)

    def contains(self, x: Element) -> bool:
        if x.group is not self.truncation.product:
            raise ValueError("element is not in the product")
        return all(
            b is None or p in b for p, b in zip(x.payload, self.constraints)
        )


def cylinder_measure(cyl: CylinderSet) -> Fraction:
    """Exact product of level ratios |B_i| / |G_i|."""
    out = Fraction(1)
    for level, b in zip(cyl.truncation.levels, cyl.constraints):
        if b is not None:
            out *= Fraction(len(b), level.size())
    return out


# ---------------------------------------------------------------------------
# Slaloms.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Slalom:
    """Per-level subsets of fixed widths over integer domains.

    Over group levels the members are element indexes in enumeration
    order; over plain ranges they are the integers themselves.
    """

    levels: tuple
    domain_sizes: tuple

    @staticmethod
    def create(levels: Sequence, domain_sizes: Sequence[int]) -> "Slalom":
        lv = tuple(frozenset(x) for x in levels)
        ds = tuple(int(s) for s in domain_sizes)
        if len(lv) != len(ds):
            raise ValueError("level count mismatch")
        for members, size in zip(lv, ds):
            for x in members:
                if not 0 <= x < size:
                    raise ValueError(f"slalom member {x} outside domain of size {size}")
        return Slalom(lv, ds)

    @property
    def widths(self) -> tuple:
        return tuple(len(x) for x in self.levels)

    def admits(self, eta: Sequence[int], from_level: int = 0) -> bool:
        """Whether eta(i) lands in the slalom at some level >= from_level."""
        return any(
            eta[i] in self.levels[i] for i in range(from_level, len(self.levels))
        )

    def resolve_elements(self, truncation: ProductTruncation) -> list:
        """Members as Elements, per level, for group-backed domains."""
        out = []
        for level, members in zip(truncation.levels, self.levels):
            payloads = list(level.iter_payloads())
            out.append([Element(level, payloads[i]) for i in sorted(members)])
        return out


# ---------------------------------------------------------------------------
# Tail cover measure.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TailReport:
    measure: Fraction
    bound: Fraction  # the union bound: sum of level ratios
    from_level: int


def tail_cover_measure(
    mstarstar: Sequence[int], slalom_widths, from_level: int
) -> TailReport:
    """Measure of {eta : eta(i) in nu(i) for some i >= from_level}.

    Exact inclusion-exclusion over independent levels:
    1 - prod (1 - m*_i / m**_i); always at most the union bound
    sum m*_i / m**_i.
    """
    if isinstance(slalom_widths, Slalom):
        widths = slalom_widths.widths
        if tuple(slalom_widths.domain_sizes) != tuple(mstarstar):
            raise ValueError("slalom domains disagree with the stated sizes")
    else:
        widths = tuple(int(w) for w in slalom_widths)
    if len(widths) != len(mstarstar):
        raise ValueError("length mismatch")
    if not 0 <= from_level <= len(widths):
        raise ValueError("from_level out of range")
    miss = Fraction(1)
    bound = Fraction(0)
    for i in range(from_level, len(widths)):
        m1, m2 = widths[i], mstarstar[i]
        if m1 > m2:
            raise ValueError(f"width {m1} exceeds domain size {m2} at level {i}")
        miss *= 1 - Fraction(m1, m2)
        bound += Fraction(m1, m2)
    measure = 1 - miss
    assert measure <= bound
    return TailReport(measure, bound, from_level)


# ---------------------------------------------------------------------------
# The pair set machinery over product truncations.
# ---------------------------------------------------------------------------


def pair_count_enumerated(
    group: FiniteGroup, word: WordTerm, c_payloads: Sequence
) -> int:
    """|{(x, y) : w(x, y, cbar) = e}| by direct evaluation.

    The y-scan is cached per distinct value of the inner part of the word
    when the word is the distinguished one, which leaves the count equal to
    the literal double loop; other words fall back to the full loop.
    """
    group.require_enumerable()
    e = group.identity_payload()
    if word == DISTINGUISHED_WORD:
        cache: dict = {}
        total = 0
        c, cstar = c_payloads
        for x in group.iter_payloads():
            w = group.commutator_payload(group.commutator_payload(x, c), cstar)
            cnt = cache.get(w)
            if cnt is None:
                cnt = (
                    group.size()
                    if w == e
                    else sum(
                        1
                        for y in group.iter_payloads()
                        if group.commutator_payload(w, y) == e
                    )
                )
                cache[w] = cnt
            total += cnt
        return total
    total = 0
    for x in group.iter_payloads():
        for y in group.iter_payloads():
            if evaluate_payload(word, group, (x, y), c_payloads) == e:
                total += 1
    return total


@dataclass
class XCbarReport:
    """Finite-level positive-part set of a parameterized pair equation."""

    level_member_counts: list  # per level: |{x : some y works}|
    member_count: int  # product of the level counts
    level_pair_densities: list
    pair_density: Fraction
    threshold: Optional[Fraction]
    below_threshold: Optional[bool]


def x_cbar(
    truncation: ProductTruncation,
    cbar: tuple,
    word: WordTerm = DISTINGUISHED_WORD,
    threshold: Optional[Fraction] = None,
) -> XCbarReport:
    """Per-level positive parts and pair densities, combined levelwise.

    cbar is a pair of product elements.  Any word evaluates componentwise
    on a direct product, so x belongs to the positive part iff each of its
    components does, and the pair density is the product of the level pair
    densities.
    """
    c1, c2 = cbar
    for c in (c1, c2):
        if c.group is not truncation.product:
            raise ValueError("parameters must be product elements")
    level_members = []
    level_densities = []
    for i, level in enumerate(truncation.levels):
        level.require_enumerable()
        cs = [c1.payload[i], c2.payload[i]]
        e = level.identity_payload()
        members = 0
        pair_hits = 0
        cache: dict = {}
        for x in level.iter_payloads():
            hits = 0
            if word == DISTINGUISHED_WORD:
                w = level.commutator_payload(
                    level.commutator_payload(x, cs[0]), cs[1]
                )
                hits = cache.get(w)
                if hits is None:
                    hits = (
                        level.size()
                        if w == e
                        else sum(
                            1
                            for y in level.iter_payloads()
                            if level.commutator_payload(w, y) == e
                        )
                    )
                    cache[w] = hits
            else:
                hits = sum(
                    1
                    for y in level.iter_payloads()
                    if evaluate_payload(word, level, (x, y), cs) == e
                )
            if hits > 0:
                members += 1
            pair_hits += hits
        level_members.append(members)
        level_densities.append(Fraction(pair_hits, level.size() ** 2))
    member_count = 1
    for v in level_members:
        member_count *= v
    density = Fraction(1)
    for d in level_densities:
        density *= d
    below = None if threshold is None else density <= threshold
    return XCbarReport(
        level_members, member_count, level_densities, density, threshold, below
    )


def build_witness_cbar(
    truncation: ProductTruncation, nu_elements: Sequence[Sequence[Element]]
) -> tuple[tuple, RunReport]:
    """Per level, run the witness assembly on the slalom slot and combine.

    Returns the parameter pair (two product elements) and a report: the
    double commutator kills every slot member at its level (hence every
    eta threading the slalom has full y-solution density), per-level pair
    densities with the conditional width comparison, and the product pair
    density with its levelwise factorization cross-checked against direct
    enumeration on the product.
    """
    report = RunReport("witness-cbar")
    if len(nu_elements) != len(truncation):
        raise ValueError("need one slot per level")
    c1_parts = []
    c2_parts = []
    level_densities = []
    for i, (level, slot) in enumerate(zip(truncation.levels, nu_elements)):
        if not isinstance(level, G2Group):
            raise ValueError("witness levels must be normal-form groups")
        witness, wreport = crucial_witness(level, list(slot))
        ok = not wreport.failed
        report.check(
            f"level{i}-witness",
            ok,
            {"istar": mask_str(witness.istar), "k": len(slot)},
        )
        c1_parts.append(witness.c)
        c2_parts.append(witness.c_star)

        # clause (a) at this level: every slot member's double commutator dies,
        # so each admits every y; verified exactly
        e = level.identity_payload()
        full = level.size()
        bad = []
        for x in slot:
            w = level.commutator_payload(
                level.commutator_payload(x.payload, witness.c.payload),
                witness.c_star.payload,
            )
            hits = (
                full
                if w == e
                else sum(
                    1
                    for y in level.iter_payloads()
                    if level.commutator_payload(w, y) == e
                )
            )
            if hits != full:
                bad.append(level.payload_to_str(x.payload))
        report.check(
            f"level{i}-slot-full-density",
            not bad,
            {"slot": len(slot), "space": full},
            witnesses=bad,
        )

        count = count_x_structured(level, witness.istar)
        d_i = count.density
        level_densities.append(d_i)
        m_i = popcount(witness.istar)
        detail = {
            "pair_density": d_i,
            "width_bound": Fraction(1, m_i) if m_i else "n/a",
        }
        if count.cr_d_violations or not m_i:
            report.add(
                CheckRecord(
                    f"level{i}-pair-density-bound",
                    CONDITIONAL,
                    detail,
                    hypothesis="stage-1-clause-d",
                )
            )
        else:
            report.check(
                f"level{i}-pair-density-bound", d_i <= Fraction(1, m_i), detail
            )

    c1 = truncation.assemble(c1_parts)
    c2 = truncation.assemble(c2_parts)

    product_density = Fraction(1)
    for d in level_densities:
        product_density *= d
    direct = pair_count_enumerated(
        truncation.product, DISTINGUISHED_WORD, [c1.payload, c2.payload]
    )
    direct_density = Fraction(direct, truncation.product.size() ** 2)
    report.check(
        "product-density-factorizes",
        direct_density == product_density,
        {"levelwise": product_density, "enumerated": direct_density},
    )
    report.value("pair_density", product_density)
    return (c1, c2), report


# ---------------------------------------------------------------------------
# Growth profiles with tower-valued entries.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Tower:
    """2^2^...^base with `height` twos; exact comparisons, no materializing."""

    height: int
    base: int

    def __post_init__(self):
        if self.height < 0:
            raise ValueError("height must be >= 0")

    @staticmethod
    def of(value: int) -> "Tower":
        return Tower(0, value)

    def pow2(self) -> "Tower":
        return Tower(self.height + 1, self.base)

    def materialize(self, bit_cap: int = 1 << 22) -> Optional[int]:
        v = self.base
        for _ in range(self.height):
            if v > bit_cap:
                return None
            if v < 0:
                raise ValueError("negative exponent in tower")
            v = 1 << v
        return v

    def __str__(self) -> str:
        return "2^" * self.height + str(self.base)


def tower_cmp(a: Tower, b: Tower) -> int:
    """-1, 0 or 1 comparing exact values."""
    if a.height > 0 and b.height > 0:
        return tower_cmp(Tower(a.height - 1, a.base), Tower(b.height - 1, b.base))
    if a.height == 0 and b.height == 0:
        return (a.base > b.base) - (a.base < b.base)
    if a.height == 0:
        return -tower_cmp(b, a)
    # a = 2^x vs plain integer k
    k = b.base
    if k <= 0:
        return 1
    floor_log = k.bit_length() - 1
    r = tower_cmp(Tower(a.height - 1, a.base), Tower(0, floor_log))
    if r != 0:
        return r
    return 0 if k == (1 << floor_log) else -1


def parse_tower(text: str) -> Tower:
    """Parse decimal integers or 2^...^a tower notation."""
    parts = text.strip().split("^")
    if len(parts) == 1:
        return Tower(0, int(parts[0]))
    if any(p != "2" for p in parts[:-1]):
        raise ValueError(f"unsupported tower notation {text!r}")
    return Tower(len(parts) - 1, int(parts[-1]))


@dataclass
class ProfileParams:
    """Four growth sequences at finitely many indices."""

    f1: list
    g1: list
    f2: list
    g2: list

    def __post_init__(self):
        lens = {len(self.f1), len(self.g1), len(self.f2), len(self.g2)}
        if len(lens) != 1:
            raise ValueError("sequences must share a length")

    def __len__(self) -> int:
        return len(self.f1)

    @property
    def mstar(self) -> list:
        return list(self.g2)

    @property
    def mstarstar(self) -> list:
        return list(self.f2)


def parse_profile(text: str) -> ProfileParams:
    """Rows `i f1 g1 f2 g2`; entries decimal or tower notation; # comments."""
    rows = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 5:
            raise ValueError(f"line {lineno}: expected `i f1 g1 f2 g2`")
        i = int(parts[0])
        rows[i] = tuple(parse_tower(p) for p in parts[1:])
    if sorted(rows) != list(range(len(rows))):
        raise ValueError("row indices must be 0..L-1")
    ordered = [rows[i] for i in range(len(rows))]
    return ProfileParams(
        [r[0] for r in ordered],
        [r[1] for r in ordered],
        [r[2] for r in ordered],
        [r[3] for r in ordered],
    )


def validate_profile(
    profile: ProfileParams,
    ratio: Optional[Fraction] = None,
    stage_sizes: Optional[Sequence[Tower]] = None,
    bit_cap: int = 1 << 22,
) -> RunReport:
    """Per-clause report on the growth requirements.

    (a) each sequence strictly increasing; (b) f above g at every index;
    (c) the double-exponential separations 2^2^f1(i) < g2(i) and
    2^2^f2(i) < g2(i+1); (d) stage sizes, only against user-supplied
    values; (e) partial sums of g2/f2 where materializable, plus the
    sufficient ratio test when a ratio is supplied.  Tower comparisons are
    exact; clause (e) entries too large to materialize are reported
    skipped, never guessed.
    """
    report = RunReport("profile")
    length = len(profile)
    report.inputs = {"indices": length}

    first_violation = None
    for name, seq in (("f1", profile.f1), ("g1", profile.g1), ("f2", profile.f2), ("g2", profile.g2)):
        for i in range(length - 1):
            if tower_cmp(seq[i], seq[i + 1]) >= 0:
                first_violation = f"{name}@{i}"
                break
        if first_violation:
            break
    report.check(
        "a-strictly-increasing",
        first_violation is None,
        {"first_violation": first_violation or "none"},
    )

    first_violation = None
    for name, fs, gs in (("1", profile.f1, profile.g1), ("2", profile.f2, profile.g2)):
        for i in range(length):
            if tower_cmp(fs[i], gs[i]) <= 0:
                first_violation = f"f{name}>g{name}@{i}"
                break
        if first_violation:
            break
    report.check(
        "b-f-above-g",
        first_violation is None,
        {"first_violation": first_violation or "none"},
    )

    first_violation = None
    for i in range(length):
        if tower_cmp(profile.f1[i].pow2().pow2(), profile.g2[i]) >= 0:
            first_violation = f"2^2^f1<g2@{i}"
            break
        if i + 1 < length and tower_cmp(profile.f2[i].pow2().pow2(), profile.g2[i + 1]) >= 0:
            first_violation = f"2^2^f2<g2'@{i}"
            break
    report.check(
        "c-growth-separation",
        first_violation is None,
        {"first_violation": first_violation or "none"},
    )

    if stage_sizes is None:
        report.add(
            CheckRecord(
                "d-stage-sizes",
                SKIPPED,
                {"reason": "no-supplied-sizes"},
            )
        )
    else:
        bad = [
            i
            for i in range(min(length, len(stage_sizes)))
            if tower_cmp(profile.f1[i], stage_sizes[i]) != 0
        ]
        report.check(
            "d-stage-sizes", not bad, {"compared": min(length, len(stage_sizes))},
            witnesses=[f"index {i}" for i in bad],
        )

    # (e): partial sums where materializable; ratio test on request.  The
    # sum is reported, so its terms are capped well below the comparison
    # cap (a multi-thousand-digit fraction is not a usable report line).
    sum_bit_cap = min(bit_cap, 4096)
    partial = Fraction(0)
    materialized = 0
    for i in range(length):
        num = profile.g2[i].materialize(sum_bit_cap)
        den = profile.f2[i].materialize(sum_bit_cap)
        if num is None or den is None:
            break
        partial += Fraction(num, den)
        materialized += 1
    details = {
        "partial_sum_terms": materialized,
        "partial_sum": partial,
    }
    if ratio is None:
        report.add(CheckRecord("e-series", SKIPPED, {**details, "reason": "no-ratio-requested"}))
    else:
        if not 0 < ratio < 1:
            raise ValueError("ratio must be in (0, 1)")
        ok = True
        skipped = 0
        for i in range(1, length):
            vals = [
                profile.g2[i].materialize(bit_cap),
                profile.f2[i - 1].materialize(bit_cap),
                profile.g2[i - 1].materialize(bit_cap),
                profile.f2[i].materialize(bit_cap),
            ]
            if any(v is None for v in vals):
                skipped += 1
                continue
            lhs = vals[0] * vals[1] * ratio.denominator
            rhs = ratio.numerator * vals[2] * vals[3]
            if lhs > rhs:
                ok = False
                details["ratio_violation_index"] = i
                break
        details["ratio_skipped"] = skipped
        report.check("e-series", ok, details)
    return report


# ---------------------------------------------------------------------------
# Slalom covering bounds.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoverReport:
    lower: int
    upper: int
    exact: Optional[int]


def slalom_cover_bounds(sizes: Sequence[int], widths: Sequence[int]) -> CoverReport:
    """Bounds on the least number of slaloms admitting every sequence.

    Counting gives the lower bound ceil(prod N / prod k); aligned blocks
    give the upper bound prod ceil(N_i / k_i).  When the point space is at
    most 16 and at most 10^4 candidate slaloms exist, the exact minimum is
    found by branch-and-bound set cover.
    """
    if len(sizes) != len(widths):
        raise ValueError("length mismatch")
    for n, k in zip(sizes, widths):
        if not 1 <= k <= n:
            raise ValueError("need 1 <= width <= size at every level")
    prod_n = 1
    prod_k = 1
    upper = 1
    for n, k in zip(sizes, widths):
        prod_n *= n
        prod_k *= k
        upper *= -(-n // k)
    lower = -(-prod_n // prod_k)
    if lower == upper:
        return CoverReport(lower, upper, lower)

    n_candidates = 1
    for n, k in zip(sizes, widths):
        n_candidates *= comb(n, k)
    if prod_n > COVER_POINT_CAP or n_candidates > COVER_CANDIDATE_CAP:
        return CoverReport(lower, upper, None)

    points = list(itertools.product(*(range(n) for n in sizes)))
    point_index = {p: i for i, p in enumerate(points)}
    full = (1 << len(points)) - 1
    masks = set()
    for combo in itertools.product(
        *(itertools.combinations(range(n), k) for n, k in zip(sizes, widths))
    ):
        mask = 0
        for p in itertools.product(*combo):
            mask |= 1 << point_index[p]
        masks.add(mask)
    mask_list = sorted(masks, key=lambda m: (-bin(m).count("1"), m))

    best = upper

    def search(covered: int, used: int) -> None:
        nonlocal best
        if covered == full:
            best = min(best, used)
            return
        if used + 1 >= best:
            return
        lowest = (~covered & full)
        lowest = (lowest & -lowest).bit_length() - 1
        for m in mask_list:
            if (m >> lowest) & 1:
                search(covered | m, used + 1)

    search(0, 0)
    return CoverReport(lower, upper, best)
