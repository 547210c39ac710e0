"""Uniform finite-group abstraction with several concrete realizations.

Groups expose payload-level operations (``mul_payload`` etc.) used by the
hot verification loops, and a thin canonical :class:`Element` wrapper for
the public API.  Two elements are equal iff they belong to the same group
object and their payloads are identical.

Realizations:

- :class:`ElementaryAbelian2` -- bit vectors of length ``dim`` (int bitmask).
- :class:`SymmetricGroup` -- one-line permutation tuples.
- :class:`Gf2SemidirectGroup` -- pairs ``(vector, automorphism index)`` for
  an elementary abelian 2-group extended by a finite matrix group over GF(2).
- :class:`G2Group` -- normal-form triples ``(U3, U2, g)`` over an inner
  group carrying a designated sequence of commuting involutions.
- :class:`DirectProductGroup` -- tuples of factor payloads.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from .gf2 import Matrix, mat_identity, mat_inverse, mat_mul, vec_apply

ENUMERATION_CAP = 1 << 24
CARRIER_CAP = 5000  # default point cap for regular representations


class GroupMismatchError(ValueError):
    """Operands belong to different groups."""


class CapExceededError(RuntimeError):
    """A size cap refused an operation."""


class EnumerationCapError(CapExceededError):
    pass


class CarrierCapError(CapExceededError):
    pass


@dataclass(frozen=True)
class Element:
    """A group element: group handle plus canonical hashable payload."""

    group: "FiniteGroup"
    payload: object

    def __mul__(self, other: "Element") -> "Element":
        if other.group is not self.group:
            raise GroupMismatchError("elements belong to different groups")
        return Element(self.group, self.group.mul_payload(self.payload, other.payload))

    def inverse(self) -> "Element":
        return Element(self.group, self.group.inv_payload(self.payload))

    def is_identity(self) -> bool:
        return self.payload == self.group.identity_payload()

    def __repr__(self) -> str:
        return f"<{self.group.kind}:{self.group.payload_to_str(self.payload)}>"


class FiniteGroup:
    """Base capability: identity, multiply, invert, enumerate, size."""

    kind: str = "abstract"

    # -- payload-level interface -------------------------------------------
    def size(self) -> int:
        raise NotImplementedError

    def identity_payload(self):
        raise NotImplementedError

    def mul_payload(self, a, b):
        raise NotImplementedError

    def inv_payload(self, a):
        raise NotImplementedError

    def iter_payloads(self) -> Iterator:
        raise NotImplementedError

    def check_payload(self, p) -> bool:
        raise NotImplementedError

    def payload_to_str(self, p) -> str:
        raise NotImplementedError

    def payload_from_str(self, s: str):
        raise NotImplementedError

    # -- shared conveniences -----------------------------------------------
    @property
    def can_enumerate(self) -> bool:
        return self.size() <= ENUMERATION_CAP

    def require_enumerable(self) -> None:
        if not self.can_enumerate:
            raise EnumerationCapError(
                f"group of size {self.size()} exceeds the enumeration cap {ENUMERATION_CAP}"
            )

    @property
    def identity(self) -> Element:
        return Element(self, self.identity_payload())

    def element(self, payload) -> Element:
        if not self.check_payload(payload):
            raise ValueError(f"invalid payload for {self.kind}: {payload!r}")
        return Element(self, payload)

    def elements(self) -> Iterator[Element]:
        self.require_enumerable()
        for p in self.iter_payloads():
            yield Element(self, p)

    def generator_payloads(self) -> "dict[str, object]":
        """Named generating set (used by associativity and centrality checks)."""
        return {}

    def commutator_payload(self, a, b):
        """a^-1 b^-1 a b (the convention fixed throughout this package)."""
        inv_a = self.inv_payload(a)
        inv_b = self.inv_payload(b)
        return self.mul_payload(self.mul_payload(self.mul_payload(inv_a, inv_b), a), b)


# ---------------------------------------------------------------------------
# Module-level element operations (the public operation surface).
# ---------------------------------------------------------------------------


def multiply(a: Element, b: Element) -> Element:
    return a * b


def invert(a: Element) -> Element:
    return a.inverse()


def commutator(a: Element, b: Element) -> Element:
    """[a, b] = a^-1 b^-1 a b."""
    if a.group is not b.group:
        raise GroupMismatchError("elements belong to different groups")
    return Element(a.group, a.group.commutator_payload(a.payload, b.payload))


def product_over(ys: Sequence[Element], index_set) -> Element:
    """Product of ys[i] for i in the index set, in increasing index order.

    The empty index set yields the identity.
    """
    ys = list(ys)
    if not ys:
        raise ValueError("product_over needs at least one element to locate the group")
    group = ys[0].group
    indices = sorted(set(index_set))
    if indices and (indices[0] < 0 or indices[-1] >= len(ys)):
        raise IndexError(f"index set {indices} out of range [0, {len(ys)})")
    acc = group.identity_payload()
    for i in indices:
        if ys[i].group is not group:
            raise GroupMismatchError("mixed groups in sequence")
        acc = group.mul_payload(acc, ys[i].payload)
    return Element(group, acc)


def centralizer_count(group: FiniteGroup, s: Element) -> int:
    """|{t in G : [s, t] = e}|.

    Symmetric groups use the cycle-type formula (prod_j j^c_j * c_j!) and are
    never enumerated here; other groups must be enumerable.
    """
    if s.group is not group:
        raise GroupMismatchError("element does not belong to the group")
    if isinstance(group, SymmetricGroup):
        return centralizer_order_from_cycle_type(cycle_type(s.payload))
    group.require_enumerable()
    e = group.identity_payload()
    sp = s.payload
    return sum(1 for t in group.iter_payloads() if group.commutator_payload(sp, t) == e)


# ---------------------------------------------------------------------------
# Elementary abelian 2-groups.
# ---------------------------------------------------------------------------


class ElementaryAbelian2(FiniteGroup):
    """(Z/2)^dim with int-bitmask payloads; the group law is XOR."""

    kind = "elementary-abelian-2"

    def __init__(self, dim: int):
        if dim < 0:
            raise ValueError("dimension must be >= 0")
        self.dim = dim

    def size(self) -> int:
        return 1 << self.dim

    def identity_payload(self) -> int:
        return 0

    def mul_payload(self, a: int, b: int) -> int:
        return a ^ b

    def inv_payload(self, a: int) -> int:
        return a

    def iter_payloads(self) -> Iterator[int]:
        return iter(range(1 << self.dim))

    def check_payload(self, p) -> bool:
        return isinstance(p, int) and 0 <= p < (1 << self.dim)

    def payload_to_str(self, p: int) -> str:
        return f"0x{p:x}"

    def payload_from_str(self, s: str) -> int:
        v = int(s, 16)
        if not self.check_payload(v):
            raise ValueError(f"payload {s} out of range for dimension {self.dim}")
        return v

    def basis(self) -> list[Element]:
        return [Element(self, 1 << i) for i in range(self.dim)]

    def generator_payloads(self) -> dict[str, object]:
        return {f"e{i}": 1 << i for i in range(self.dim)}


# ---------------------------------------------------------------------------
# Symmetric groups.
# ---------------------------------------------------------------------------


def cycle_type(perm: Sequence[int]) -> dict[int, int]:
    """Map cycle length j -> number of j-cycles (fixed points included)."""
    n = len(perm)
    seen = [False] * n
    counts: dict[int, int] = {}
    for start in range(n):
        if seen[start]:
            continue
        length = 0
        cur = start
        while not seen[cur]:
            seen[cur] = True
            cur = perm[cur]
            length += 1
        counts[length] = counts.get(length, 0) + 1
    return counts


def centralizer_order_from_cycle_type(counts: dict[int, int]) -> int:
    out = 1
    for j, c in counts.items():
        out *= (j**c) * math.factorial(c)
    return out


def _partitions(n: int, largest: Optional[int] = None) -> Iterator[tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    if largest is None:
        largest = n
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions(n - first, first):
            yield (first,) + rest


def max_centralizer_symmetric(n_points: int) -> tuple[int, tuple[int, ...]]:
    """Analytic max of |C(s)| over s != e in Sym(n_points), with a witness type.

    Runs over cycle types (integer partitions), never over elements.
    """
    best = 0
    best_type: tuple[int, ...] = ()
    for part in _partitions(n_points):
        if all(p == 1 for p in part):
            continue  # identity
        counts: dict[int, int] = {}
        for p in part:
            counts[p] = counts.get(p, 0) + 1
        c = centralizer_order_from_cycle_type(counts)
        if c > best:
            best = c
            best_type = part
    return best, best_type


class SymmetricGroup(FiniteGroup):
    """Sym(points) on {0, ..., points-1}; payloads are one-line tuples."""

    kind = "symmetric"

    def __init__(self, points: int):
        if points < 1:
            raise ValueError("need at least one point")
        self.points = points

    def size(self) -> int:
        return math.factorial(self.points)

    def identity_payload(self) -> tuple:
        return tuple(range(self.points))

    def mul_payload(self, a: tuple, b: tuple) -> tuple:
        # (a.b)(x) = a(b(x)): the right factor acts first
        return tuple(a[b[i]] for i in range(self.points))

    def inv_payload(self, a: tuple) -> tuple:
        out = [0] * self.points
        for i, v in enumerate(a):
            out[v] = i
        return tuple(out)

    def iter_payloads(self) -> Iterator[tuple]:
        return itertools.permutations(range(self.points))

    def check_payload(self, p) -> bool:
        return (
            isinstance(p, tuple)
            and len(p) == self.points
            and sorted(p) == list(range(self.points))
        )

    def payload_to_str(self, p: tuple) -> str:
        cycles = []
        seen = [False] * self.points
        for start in range(self.points):
            if seen[start] or p[start] == start:
                seen[start] = True
                continue
            cyc = [start]
            seen[start] = True
            cur = p[start]
            while cur != start:
                cyc.append(cur)
                seen[cur] = True
                cur = p[cur]
            cycles.append("(" + " ".join(str(x) for x in cyc) + ")")
        return "".join(cycles) if cycles else "()"

    def payload_from_str(self, s: str) -> tuple:
        s = s.strip()
        perm = list(range(self.points))
        if s in ("()", ""):
            return tuple(perm)
        if not (s.startswith("(") and s.endswith(")")):
            raise ValueError(f"bad cycle notation: {s!r}")
        for chunk in s[1:-1].split(")("):
            pts = [int(x) for x in chunk.split()]
            if len(pts) < 2 or len(set(pts)) != len(pts):
                raise ValueError(f"bad cycle {chunk!r}")
            for a, b in zip(pts, pts[1:] + pts[:1]):
                if not 0 <= a < self.points:
                    raise ValueError(f"point {a} out of range")
                perm[a] = b
        return tuple(perm)

    def generator_payloads(self) -> dict[str, object]:
        if self.points == 1:
            return {}
        swap = list(range(self.points))
        swap[0], swap[1] = 1, 0
        gens = {"t01": tuple(swap)}
        if self.points > 2:
            gens["cycle"] = tuple(list(range(1, self.points)) + [0])
        return gens


# ---------------------------------------------------------------------------
# GF(2) semidirect products: vectors extended by a matrix group.
# ---------------------------------------------------------------------------


class Gf2SemidirectGroup(FiniteGroup):
    """(Z/2)^dim x| H for a finite H <= GL(dim, 2), given by its element list.

    Payloads are ``(vector, h)`` with ``h`` an index into the canonical
    (sorted) element list of H.  The law follows the row-vector convention:
    ``(v1, M1) (v2, M2) = (v1 . M2 + v2, M1 M2)``, so conjugating an
    embedded vector x by ``(0, M)`` yields ``x . M``.
    """

    kind = "semidirect"

    def __init__(
        self,
        dim: int,
        h_matrices: Sequence[Matrix],
        named_h: Optional[dict[str, Matrix]] = None,
    ):
        self.dim = dim
        self.h_mats: list[Matrix] = sorted(set(tuple(m) for m in h_matrices))
        if mat_identity(dim) not in self.h_mats:
            raise ValueError("H must contain the identity matrix")
        self.h_index: dict[Matrix, int] = {m: i for i, m in enumerate(self.h_mats)}
        self._hmul_cache: dict[tuple[int, int], int] = {}
        self._hinv_cache: dict[int, int] = {}
        self._named_h = dict(named_h or {})

    def h_size(self) -> int:
        return len(self.h_mats)

    def size(self) -> int:
        return (1 << self.dim) * len(self.h_mats)

    def identity_payload(self) -> tuple:
        return (0, self.h_index[mat_identity(self.dim)])

    def _hmul(self, h1: int, h2: int) -> int:
        key = (h1, h2)
        out = self._hmul_cache.get(key)
        if out is None:
            prod = mat_mul(self.h_mats[h1], self.h_mats[h2])
            out = self.h_index.get(prod)
            if out is None:
                raise ValueError("H is not closed under composition")
            self._hmul_cache[key] = out
        return out

    def _hinv(self, h: int) -> int:
        out = self._hinv_cache.get(h)
        if out is None:
            inv = mat_inverse(self.h_mats[h], self.dim)
            assert inv is not None
            out = self.h_index[inv]
            self._hinv_cache[h] = out
        return out

    def mul_payload(self, a: tuple, b: tuple) -> tuple:
        v1, h1 = a
        v2, h2 = b
        return (vec_apply(self.h_mats[h2], v1) ^ v2, self._hmul(h1, h2))

    def inv_payload(self, a: tuple) -> tuple:
        v, h = a
        hinv = self._hinv(h)
        return (vec_apply(self.h_mats[hinv], v), hinv)

    def iter_payloads(self) -> Iterator[tuple]:
        for v in range(1 << self.dim):
            for h in range(len(self.h_mats)):
                yield (v, h)

    def check_payload(self, p) -> bool:
        return (
            isinstance(p, tuple)
            and len(p) == 2
            and isinstance(p[0], int)
            and 0 <= p[0] < (1 << self.dim)
            and isinstance(p[1], int)
            and 0 <= p[1] < len(self.h_mats)
        )

    def payload_to_str(self, p: tuple) -> str:
        return f"0x{p[0]:x}|h{p[1]}"

    def payload_from_str(self, s: str) -> tuple:
        vec_s, _, h_s = s.partition("|h")
        p = (int(vec_s, 16), int(h_s))
        if not self.check_payload(p):
            raise ValueError(f"bad semidirect payload {s!r}")
        return p

    def vector_element(self, v: int) -> Element:
        return self.element((v, self.h_index[mat_identity(self.dim)]))

    def automorphism_element(self, m: Matrix) -> Element:
        return self.element((0, self.h_index[tuple(m)]))

    def generator_payloads(self) -> dict[str, object]:
        gens: dict[str, object] = {
            f"e{i}": (1 << i, self.h_index[mat_identity(self.dim)])
            for i in range(self.dim)
        }
        for name, m in self._named_h.items():
            gens[name] = (0, self.h_index[tuple(m)])
        if not self._named_h:
            for h in range(len(self.h_mats)):
                gens[f"h{h}"] = (0, h)
        return gens


# ---------------------------------------------------------------------------
# Direct products.
# ---------------------------------------------------------------------------


class DirectProductGroup(FiniteGroup):
    """Componentwise product; payloads are tuples of factor payloads."""

    kind = "direct-product"

    def __init__(self, factors: Sequence[FiniteGroup]):
        if not factors:
            raise ValueError("need at least one factor")
        self.factors = list(factors)

    def size(self) -> int:
        out = 1
        for f in self.factors:
            out *= f.size()
        return out

    def identity_payload(self) -> tuple:
        return tuple(f.identity_payload() for f in self.factors)

    def mul_payload(self, a: tuple, b: tuple) -> tuple:
        return tuple(
            f.mul_payload(x, y) for f, x, y in zip(self.factors, a, b)
        )

    def inv_payload(self, a: tuple) -> tuple:
        return tuple(f.inv_payload(x) for f, x in zip(self.factors, a))

    def iter_payloads(self) -> Iterator[tuple]:
        return itertools.product(*(f.iter_payloads() for f in self.factors))

    def check_payload(self, p) -> bool:
        return (
            isinstance(p, tuple)
            and len(p) == len(self.factors)
            and all(f.check_payload(x) for f, x in zip(self.factors, p))
        )

    def payload_to_str(self, p: tuple) -> str:
        return " ~ ".join(f.payload_to_str(x) for f, x in zip(self.factors, p))

    def payload_from_str(self, s: str) -> tuple:
        parts = s.split(" ~ ")
        if len(parts) != len(self.factors):
            raise ValueError("factor count mismatch")
        return tuple(f.payload_from_str(x) for f, x in zip(self.factors, parts))

    def generator_payloads(self) -> dict[str, object]:
        gens: dict[str, object] = {}
        for i, f in enumerate(self.factors):
            for name, g in f.generator_payloads().items():
                payload = list(self.identity_payload())
                payload[i] = g
                gens[f"f{i}.{name}"] = tuple(payload)
        return gens


# ---------------------------------------------------------------------------
# Commuting involution sequences.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CommutingInvolutionSequence:
    """y_0, ..., y_{n-1}: order 2, pairwise commuting, generating 2^n elements."""

    group: FiniteGroup
    elements: tuple

    @staticmethod
    def create(group: FiniteGroup, elements: Sequence[Element]) -> "CommutingInvolutionSequence":
        seq = CommutingInvolutionSequence(group, tuple(e.payload for e in elements))
        seq.validate()
        return seq

    def __len__(self) -> int:
        return len(self.elements)

    def element(self, i: int) -> Element:
        return Element(self.group, self.elements[i])

    def subset_product_payload(self, mask: int):
        """Product over the bit positions of mask, in increasing index order."""
        acc = self.group.identity_payload()
        i = 0
        m = mask
        while m:
            if m & 1:
                acc = self.group.mul_payload(acc, self.elements[i])
            m >>= 1
            i += 1
        return acc

    def validate(self) -> None:
        g = self.group
        e = g.identity_payload()
        n = len(self.elements)
        for i, y in enumerate(self.elements):
            if y == e:
                raise ValueError(f"y_{i} is the identity")
            if g.mul_payload(y, y) != e:
                raise ValueError(f"y_{i} does not have order 2")
        for i in range(n):
            for j in range(i + 1, n):
                if g.commutator_payload(self.elements[i], self.elements[j]) != e:
                    raise ValueError(f"y_{i} and y_{j} do not commute")
        if n > 20:
            raise ValueError("involution sequence too long to validate 2^n products")
        products = {self.subset_product_payload(m) for m in range(1 << n)}
        if len(products) != (1 << n):
            raise ValueError("generated subgroup has fewer than 2^n elements")

    def is_central(self) -> bool:
        """Whether every y_i commutes with the whole group.

        Checked against a generating set when one is available, otherwise by
        full enumeration.
        """
        g = self.group
        e = g.identity_payload()
        gens = list(g.generator_payloads().values())
        if not gens:
            g.require_enumerable()
            gens = list(g.iter_payloads())
        return all(
            g.commutator_payload(y, t) == e for y in self.elements for t in gens
        )


# ---------------------------------------------------------------------------
# Two-stage normal-form groups.
# ---------------------------------------------------------------------------


class G2Group(FiniteGroup):
    """Normal-form triples (U3, U2, g) over an inner group G1.

    U3 and U2 are subsets of [0, n) stored as int bitmasks, g is a payload
    of ``inner``.  The law is

        (U3, U2, g) . (V3, V2, h) = (U3 ^ V3, U2 ^ V2, y[U2 & V3] * g * h)

    where ``y[M]`` is the product of the designated involutions over the
    bits of M.  The closed-form inverse is (U3, U2, g^-1 * y[U2 & U3]).

    The law is a group law exactly when the designated involutions are
    central in the inner group (the defining relations force the correction
    terms to commute with everything); the constructor enforces this unless
    ``check=False``.
    """

    kind = "normal-form-g2"

    def __init__(
        self,
        inner: FiniteGroup,
        ybar: CommutingInvolutionSequence,
        z_map: Optional[Callable[[int], object]] = None,
        check: bool = True,
    ):
        if ybar.group is not inner:
            raise GroupMismatchError("ybar must live in the inner group")
        self.inner = inner
        self.n = len(ybar)
        self.ybar = ybar
        self._z_map = z_map
        if check:
            ybar.validate()
            if not ybar.is_central():
                raise ValueError(
                    "designated involutions are not central in the inner group; "
                    "the normal-form law would not be associative"
                )
        # product of involutions for every mask, precomputed
        self._ymask = [ybar.subset_product_payload(m) for m in range(1 << self.n)]

    def size(self) -> int:
        return (1 << self.n) * (1 << self.n) * self.inner.size()

    def identity_payload(self) -> tuple:
        return (0, 0, self.inner.identity_payload())

    def mul_payload(self, a: tuple, b: tuple) -> tuple:
        u3, u2, g = a
        v3, v2, h = b
        corr = self._ymask[u2 & v3]
        return (
            u3 ^ v3,
            u2 ^ v2,
            self.inner.mul_payload(corr, self.inner.mul_payload(g, h)),
        )

    def inv_payload(self, a: tuple) -> tuple:
        u3, u2, g = a
        return (
            u3,
            u2,
            self.inner.mul_payload(self.inner.inv_payload(g), self._ymask[u2 & u3]),
        )

    def iter_payloads(self) -> Iterator[tuple]:
        full = 1 << self.n
        for u3 in range(full):
            for u2 in range(full):
                for g in self.inner.iter_payloads():
                    yield (u3, u2, g)

    def check_payload(self, p) -> bool:
        if not (isinstance(p, tuple) and len(p) == 3):
            return False
        u3, u2, g = p
        full = 1 << self.n
        return (
            isinstance(u3, int)
            and isinstance(u2, int)
            and 0 <= u3 < full
            and 0 <= u2 < full
            and self.inner.check_payload(g)
        )

    @staticmethod
    def _mask_to_str(mask: int) -> str:
        bits = [str(i) for i in range(mask.bit_length()) if (mask >> i) & 1]
        return ",".join(bits)

    @staticmethod
    def _mask_from_str(s: str) -> int:
        s = s.strip()
        if not s:
            return 0
        mask = 0
        for part in s.split(","):
            mask |= 1 << int(part)
        return mask

    def payload_to_str(self, p: tuple) -> str:
        u3, u2, g = p
        return f"{self._mask_to_str(u3)};{self._mask_to_str(u2)};{self.inner.payload_to_str(g)}"

    def payload_from_str(self, s: str) -> tuple:
        u3_s, u2_s, g_s = s.split(";", 2)
        p = (
            self._mask_from_str(u3_s),
            self._mask_from_str(u2_s),
            self.inner.payload_from_str(g_s),
        )
        if not self.check_payload(p):
            raise ValueError(f"bad normal-form payload {s!r}")
        return p

    # -- designated generators and normal-form accessors --------------------

    def y2(self, i: int) -> Element:
        return Element(self, (0, 1 << i, self.inner.identity_payload()))

    def y3(self, i: int) -> Element:
        return Element(self, (1 << i, 0, self.inner.identity_payload()))

    def y2_set(self, mask: int) -> Element:
        return Element(self, (0, mask, self.inner.identity_payload()))

    def y3_set(self, mask: int) -> Element:
        return Element(self, (mask, 0, self.inner.identity_payload()))

    def y1_set(self, mask: int) -> Element:
        """The embedded product of designated inner involutions over mask."""
        return Element(self, (0, 0, self._ymask[mask]))

    def embed(self, g: Element) -> Element:
        if g.group is not self.inner:
            raise GroupMismatchError("can only embed inner-group elements")
        return Element(self, (0, 0, g.payload))

    def u3_of(self, x: Element) -> int:
        return x.payload[0]

    def u2_of(self, x: Element) -> int:
        return x.payload[1]

    def inner_part(self, x: Element) -> Element:
        return Element(self.inner, x.payload[2])

    def c_func(self, i: int, j: int) -> Element:
        """c(i, j): identity off the diagonal, the i-th involution on it."""
        if i == j:
            return self.y1_set(1 << i)
        return self.embed(Element(self.inner, self.inner.identity_payload()))

    def has_z(self) -> bool:
        return self._z_map is not None

    def z_element(self, mask: int) -> Element:
        """The tagged inner element for an index subset, embedded in this group."""
        if self._z_map is None:
            raise ValueError("this instance carries no tagged z elements")
        payload = self._z_map(mask)
        if payload is None:
            raise ValueError(f"no tagged element for subset mask {mask:#x}")
        return Element(self, (0, 0, payload))

    def z_inner_payload(self, mask: int):
        if self._z_map is None:
            raise ValueError("this instance carries no tagged z elements")
        payload = self._z_map(mask)
        if payload is None:
            raise ValueError(f"no tagged element for subset mask {mask:#x}")
        return payload

    def generator_payloads(self) -> dict[str, object]:
        e1 = self.inner.identity_payload()
        gens: dict[str, object] = {}
        for i in range(self.n):
            gens[f"y2_{i}"] = (0, 1 << i, e1)
            gens[f"y3_{i}"] = (1 << i, 0, e1)
        for name, g in self.inner.generator_payloads().items():
            gens[f"g1.{name}"] = (0, 0, g)
        return gens

    @staticmethod
    def toy(n: int, g1_dim: Optional[int] = None) -> "G2Group":
        """Toy instance over an elementary abelian inner group.

        The designated involutions are the first n basis vectors and the
        tagged elements are z_I = y_I (subset sums), which deliberately
        violates the stage-1 commutation criterion: verifiers must report
        the dependent checks as conditional rather than passing them.
        """
        if g1_dim is None:
            g1_dim = n
        if g1_dim < n:
            raise ValueError("inner dimension must be at least n")
        g1 = ElementaryAbelian2(g1_dim)
        ybar = CommutingInvolutionSequence(g1, tuple(1 << i for i in range(n)))
        return G2Group(g1, ybar, z_map=lambda mask: mask)


# ---------------------------------------------------------------------------
# Regular representations.
# ---------------------------------------------------------------------------


@dataclass
class RegularRepresentation:
    """Left-translation embedding of a group into Sym(|G|)."""

    source: FiniteGroup
    sym: SymmetricGroup
    _order: list
    _index: dict

    def embed(self, g: Element) -> Element:
        if g.group is not self.source:
            raise GroupMismatchError("element is not in the represented group")
        perm = tuple(
            self._index[self.source.mul_payload(g.payload, x)] for x in self._order
        )
        return Element(self.sym, perm)


def regular_representation(
    group: FiniteGroup, cap: int = CARRIER_CAP
) -> RegularRepresentation:
    """Sym(|G|) plus the left-translation image of each element of G.

    The ambient symmetric group is never enumerated; only the embedding map
    is materialized, which requires |G| <= cap points.
    """
    if group.size() > cap:
        raise CarrierCapError(
            f"carrier of size {group.size()} exceeds the representation cap {cap}"
        )
    order = list(group.iter_payloads())
    index = {p: i for i, p in enumerate(order)}
    return RegularRepresentation(group, SymmetricGroup(len(order)), order, index)


# ---------------------------------------------------------------------------
# Associativity verification.
# ---------------------------------------------------------------------------


def _fast_mul_table(group: FiniteGroup):
    """Vectorized index-law table for the dense realizations, or None.

    Exact-type gated so that subclasses with modified laws (negative
    controls) never bypass their own mul_payload.
    """
    if type(group) is ElementaryAbelian2:
        idx = np.arange(group.size(), dtype=np.int32)
        return idx[:, None] ^ idx[None, :]
    if type(group) is G2Group and type(group.inner) is ElementaryAbelian2:
        n, d = group.n, group.inner.dim
        idx = np.arange(group.size(), dtype=np.int32)
        u3 = idx >> (n + d)
        u2 = (idx >> d) & ((1 << n) - 1)
        g = idx & ((1 << d) - 1)
        ymask = np.array(group._ymask, dtype=np.int32)
        corr = ymask[u2[:, None] & u3[None, :]]
        return (
            ((u3[:, None] ^ u3[None, :]) << (n + d))
            | ((u2[:, None] ^ u2[None, :]) << d)
            | (corr ^ g[:, None] ^ g[None, :])
        )
    return None


def _index_table(group: FiniteGroup):
    order = list(group.iter_payloads())
    index = {p: i for i, p in enumerate(order)}
    n = len(order)
    table = _fast_mul_table(group)
    if table is not None:
        return order, index, table
    table = np.empty((n, n), dtype=np.int32)
    for i, a in enumerate(order):
        row = [index[group.mul_payload(a, b)] for b in order]
        table[i] = row
    return order, index, table


def associativity_report(
    group: FiniteGroup,
    full_cap: int = 512,
    generator_cap: int = 1 << 13,
    samples: int = 10**6,
    seed: int = 0,
) -> dict:
    """Verify (a b) c = a (b c).

    - |G| <= full_cap: literally every triple, via the index table.
    - |G| <= generator_cap: every (a, t, b) with t in a generating set that
      is confirmed to generate G (complete by the generator reduction for
      associativity on closed tables).
    - otherwise: `samples` pseudo-random triples with the given seed.

    Returns a dict with keys method, checked, failures.
    """
    size = group.size()
    if size <= generator_cap:
        order, index, table = _index_table(group)
        n = len(order)
        if size <= full_cap:
            failures = 0
            for a in range(n):
                lhs = table[table[a], :]
                rhs = table[a][table]
                failures += int(np.count_nonzero(lhs != rhs))
            return {"method": "exhaustive", "checked": n * n * n, "failures": failures}
        gen_idx = sorted({index[p] for p in group.generator_payloads().values()})
        if not gen_idx:
            raise ValueError("generator-based check needs a generating set")
        # confirm the named generators really generate
        reached = set(gen_idx) | {index[group.identity_payload()]}
        frontier = list(reached)
        while frontier:
            nxt = []
            for x in frontier:
                for g in gen_idx:
                    y = int(table[x, g])
                    if y not in reached:
                        reached.add(y)
                        nxt.append(y)
            frontier = nxt
        if len(reached) != n:
            raise ValueError("named generators do not generate the group")
        failures = 0
        checked = 0
        for t in gen_idx:
            lhs = table[table[:, t], :]          # (a t) b
            rhs = table[:, table[t, :]]          # a (t b)
            failures += int(np.count_nonzero(lhs != rhs))
            checked += n * n
        return {"method": "generators", "checked": checked, "failures": failures}

    rng = random.Random(seed)
    failures = 0

    # sample payloads without materializing the group
    def sample_payload():
        # generic rejection-free sampler: walk from identity by random generators
        gens = list(group.generator_payloads().values())
        p = group.identity_payload()
        for _ in range(rng.randrange(1, 24)):
            p = group.mul_payload(p, rng.choice(gens))
        return p

    for _ in range(samples):
        a, b, c = sample_payload(), sample_payload(), sample_payload()
        lhs = group.mul_payload(group.mul_payload(a, b), c)
        rhs = group.mul_payload(a, group.mul_payload(b, c))
        if lhs != rhs:
            failures += 1
    return {"method": "sampled", "checked": samples, "failures": failures}
