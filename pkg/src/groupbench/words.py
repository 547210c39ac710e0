"""Group words: parsing, evaluation, solution sets and exact densities.

Grammar (ASCII, case-sensitive, whitespace ignored):

    word    := atom+                      juxtaposition is the product
    atom    := primary ('^-1')*           postfix inverse binds tightest
    primary := 'e' | 'x' digits | 'z' digits | '[' word ',' word ']'

``x<i>`` are variables, ``z<j>`` parameters, both 1-based and contiguous.
``[a,b]`` is commutator sugar for ``a^-1 b^-1 a b``.  Densities are exact
`fractions.Fraction` values; no floating point touches any measure path.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .groups import (
    DirectProductGroup,
    Element,
    FiniteGroup,
    GroupMismatchError,
    SymmetricGroup,
    centralizer_order_from_cycle_type,
    cycle_type,
)

PAIR_SPACE_CAP = 1 << 26


class WordSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ArityMismatchError(ValueError):
    pass


class CapError(RuntimeError):
    """Assignment space too large and no structured path applies."""


# ---------------------------------------------------------------------------
# Terms.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WordTerm:
    def print(self) -> str:
        return print_word(self)

    @property
    def n_vars(self) -> int:
        return _arity(self)[0]

    @property
    def n_params(self) -> int:
        return _arity(self)[1]


@dataclass(frozen=True)
class Ident(WordTerm):
    pass


@dataclass(frozen=True)
class Var(WordTerm):
    index: int


@dataclass(frozen=True)
class Param(WordTerm):
    index: int


@dataclass(frozen=True)
class Inv(WordTerm):
    term: WordTerm


@dataclass(frozen=True)
class Prod(WordTerm):
    left: WordTerm
    right: WordTerm


@dataclass(frozen=True)
class Comm(WordTerm):
    left: WordTerm
    right: WordTerm


def _collect_indices(term: WordTerm, vars_out: set, params_out: set) -> None:
    if isinstance(term, Var):
        vars_out.add(term.index)
    elif isinstance(term, Param):
        params_out.add(term.index)
    elif isinstance(term, Inv):
        _collect_indices(term.term, vars_out, params_out)
    elif isinstance(term, (Prod, Comm)):
        _collect_indices(term.left, vars_out, params_out)
        _collect_indices(term.right, vars_out, params_out)


def _arity(term: WordTerm) -> tuple[int, int]:
    vs: set[int] = set()
    ps: set[int] = set()
    _collect_indices(term, vs, ps)
    return (max(vs, default=0), max(ps, default=0))


def validate_arity(term: WordTerm) -> tuple[int, int]:
    """Check that variable/parameter indices are contiguous from 1."""
    vs: set[int] = set()
    ps: set[int] = set()
    _collect_indices(term, vs, ps)
    for name, idx in (("variable", vs), ("parameter", ps)):
        if idx and idx != set(range(1, max(idx) + 1)):
            raise ArityMismatchError(
                f"{name} indices {sorted(idx)} are not contiguous from 1"
            )
    return (max(vs, default=0), max(ps, default=0))


# ---------------------------------------------------------------------------
# Parser and printer.
# ---------------------------------------------------------------------------


def parse_word(text: str) -> WordTerm:
    """Parse a word; raises WordSyntaxError with the offending position."""
    pos = 0
    n = len(text)

    def skip_ws():
        nonlocal pos
        while pos < n and text[pos].isspace():
            pos += 1

    def parse_index(kind: str) -> int:
        nonlocal pos
        start = pos
        while pos < n and text[pos].isdigit():
            pos += 1
        if start == pos:
            raise WordSyntaxError(f"expected digits after '{kind}'", start)
        value = int(text[start:pos])
        if value == 0:
            raise WordSyntaxError(f"{kind}0 is not a valid index (1-based)", start)
        return value

    def parse_primary() -> WordTerm:
        nonlocal pos
        skip_ws()
        if pos >= n:
            raise WordSyntaxError("unexpected end of input", pos)
        ch = text[pos]
        if ch == "e":
            pos += 1
            return Ident()
        if ch == "x":
            pos += 1
            return Var(parse_index("x"))
        if ch == "z":
            pos += 1
            return Param(parse_index("z"))
        if ch == "[":
            pos += 1
            left = parse_word_inner()
            skip_ws()
            if pos >= n or text[pos] != ",":
                raise WordSyntaxError("expected ',' in commutator", pos)
            pos += 1
            right = parse_word_inner()
            skip_ws()
            if pos >= n or text[pos] != "]":
                raise WordSyntaxError("expected ']' to close commutator", pos)
            pos += 1
            return Comm(left, right)
        raise WordSyntaxError(f"unexpected character {ch!r}", pos)

    def parse_atom() -> WordTerm:
        nonlocal pos
        term = parse_primary()
        while True:
            skip_ws()
            if text.startswith("^-1", pos):
                pos += 3
                term = Inv(term)
            else:
                return term

    def parse_word_inner() -> WordTerm:
        nonlocal pos
        term = parse_atom()
        while True:
            skip_ws()
            if pos >= n or text[pos] in ",]":
                return term
            right = parse_atom()
            term = Prod(term, right)

    result = parse_word_inner()
    skip_ws()
    if pos != n:
        raise WordSyntaxError("trailing input", pos)
    validate_arity(result)
    return result


def print_word(term: WordTerm) -> str:
    """Canonical printer; round-trips every parser-produced tree."""
    if isinstance(term, Ident):
        return "e"
    if isinstance(term, Var):
        return f"x{term.index}"
    if isinstance(term, Param):
        return f"z{term.index}"
    if isinstance(term, Inv):
        if isinstance(term.term, Prod):
            raise ValueError("inverse of a bare product is not expressible; expand it")
        return print_word(term.term) + "^-1"
    if isinstance(term, Prod):
        return print_word(term.left) + " " + print_word(term.right)
    if isinstance(term, Comm):
        return f"[{print_word(term.left)},{print_word(term.right)}]"
    raise TypeError(f"not a word term: {term!r}")


def expand_commutators(term: WordTerm) -> WordTerm:
    """Rewrite [a,b] as a^-1 b^-1 a b, recursively."""
    if isinstance(term, (Ident, Var, Param)):
        return term
    if isinstance(term, Inv):
        return Inv(expand_commutators(term.term))
    if isinstance(term, Prod):
        return Prod(expand_commutators(term.left), expand_commutators(term.right))
    if isinstance(term, Comm):
        a = expand_commutators(term.left)
        b = expand_commutators(term.right)
        return Prod(Prod(Prod(Inv(a), Inv(b)), a), b)
    raise TypeError(f"not a word term: {term!r}")


# ---------------------------------------------------------------------------
# Evaluation.
# ---------------------------------------------------------------------------


def evaluate_payload(term: WordTerm, group: FiniteGroup, xs: Sequence, cs: Sequence):
    if isinstance(term, Ident):
        return group.identity_payload()
    if isinstance(term, Var):
        return xs[term.index - 1]
    if isinstance(term, Param):
        return cs[term.index - 1]
    if isinstance(term, Inv):
        return group.inv_payload(evaluate_payload(term.term, group, xs, cs))
    if isinstance(term, Prod):
        return group.mul_payload(
            evaluate_payload(term.left, group, xs, cs),
            evaluate_payload(term.right, group, xs, cs),
        )
    if isinstance(term, Comm):
        return group.commutator_payload(
            evaluate_payload(term.left, group, xs, cs),
            evaluate_payload(term.right, group, xs, cs),
        )
    raise TypeError(f"not a word term: {term!r}")


def evaluate(
    term: WordTerm,
    group: FiniteGroup,
    xs: Sequence[Element],
    cs: Sequence[Element] = (),
) -> Element:
    """Group value of the word under the given assignment."""
    n_vars, n_params = validate_arity(term)
    if len(xs) != n_vars:
        raise ArityMismatchError(f"word needs {n_vars} variables, got {len(xs)}")
    if len(cs) != n_params:
        raise ArityMismatchError(f"word needs {n_params} parameters, got {len(cs)}")
    for el in itertools.chain(xs, cs):
        if el.group is not group:
            raise GroupMismatchError("assignment element from a different group")
    payload = evaluate_payload(
        term, group, [x.payload for x in xs], [c.payload for c in cs]
    )
    return Element(group, payload)


# ---------------------------------------------------------------------------
# Solution counting and densities.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DensityReport:
    count: int
    space: int
    density: Fraction
    method: str


# registered structured counters: f(word, group, cs_payloads) -> count | None
_STRUCTURED_COUNTERS: list[Callable] = []


def register_structured_counter(fn: Callable) -> None:
    _STRUCTURED_COUNTERS.append(fn)


def _commuting_pairs_symmetric(word: WordTerm, group: FiniteGroup, cs) -> Optional[int]:
    """Count of {(a, b) : [a, b] = e} in Sym(N) via cycle types: sum |C(s)|."""
    if not isinstance(group, SymmetricGroup):
        return None
    if word != Comm(Var(1), Var(2)) or cs:
        return None
    total = 0
    for part in _sym_partitions(group.points):
        counts: dict[int, int] = {}
        for p in part:
            counts[p] = counts.get(p, 0) + 1
        z = centralizer_order_from_cycle_type(counts)
        n_elements = _factorial(group.points) // z
        total += n_elements * z
    return total


def _factorial(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def _sym_partitions(n: int, largest: Optional[int] = None):
    if n == 0:
        yield ()
        return
    if largest is None:
        largest = n
    for first in range(min(n, largest), 0, -1):
        for rest in _sym_partitions(n - first, first):
            yield (first,) + rest


register_structured_counter(_commuting_pairs_symmetric)


def _chunk_ranges(total: int, jobs: int) -> list[range]:
    jobs = max(1, jobs)
    step = (total + jobs - 1) // jobs if total else 1
    return [range(lo, min(lo + step, total)) for lo in range(0, total, step)]


def solution_count(
    word: WordTerm,
    group: FiniteGroup,
    cs: Sequence[Element] = (),
    jobs: int = 1,
    method: str = "auto",
) -> DensityReport:
    """Exact |{xbar : w(xbar, cbar) = e}| over G^arity, with the space size.

    Enumerates when |G|^arity fits under the pair-space cap; otherwise a
    registered structured counter or the levelwise factorization over direct
    products must apply.  ``method`` may pin one route ("enumerate",
    "structured", "levelwise") for cross-oracle comparisons.
    """
    if method not in ("auto", "enumerate", "structured", "levelwise"):
        raise ValueError(f"unknown method {method!r}")
    n_vars, n_params = validate_arity(word)
    if len(cs) != n_params:
        raise ArityMismatchError(f"word needs {n_params} parameters, got {len(cs)}")
    for c in cs:
        if c.group is not group:
            raise GroupMismatchError("parameter from a different group")
    cs_payloads = [c.payload for c in cs]

    if n_vars == 0:
        value = evaluate_payload(word, group, [], cs_payloads)
        hit = 1 if value == group.identity_payload() else 0
        return DensityReport(hit, 1, Fraction(hit, 1), "direct")

    # any word evaluates componentwise on a direct product
    if isinstance(group, DirectProductGroup) and method in ("auto", "levelwise"):
        count = 1
        space = 1
        for i, factor in enumerate(group.factors):
            sub = solution_count(
                word,
                factor,
                [Element(factor, c.payload[i]) for c in cs],
                jobs=jobs,
            )
            count *= sub.count
            space *= sub.space
        return DensityReport(count, space, Fraction(count, space), "levelwise")

    if method in ("auto", "structured"):
        for counter in _STRUCTURED_COUNTERS:
            out = counter(word, group, cs_payloads)
            if out is not None:
                space = group.size() ** n_vars
                return DensityReport(out, space, Fraction(out, space), "structured")
        if method == "structured":
            raise CapError("no structured counter applies to this word and group")

    size = group.size()
    space = size**n_vars
    if space > PAIR_SPACE_CAP:
        raise CapError(
            f"|G|^{n_vars} = {space} exceeds the cap {PAIR_SPACE_CAP} "
            "and no structured counter applies"
        )
    payloads = list(group.iter_payloads())
    e = group.identity_payload()

    def count_chunk(rng: range) -> int:
        total = 0
        for i in rng:
            first = payloads[i]
            for rest in itertools.product(payloads, repeat=n_vars - 1):
                if (
                    evaluate_payload(word, group, (first,) + rest, cs_payloads)
                    == e
                ):
                    total += 1
        return total

    # partition by first-coordinate ranges; merge by addition (the result is
    # independent of the chunking)
    total = sum(count_chunk(rng) for rng in _chunk_ranges(len(payloads), jobs))
    return DensityReport(total, space, Fraction(total, space), "enumerated")


def solution_density(
    word: WordTerm, group: FiniteGroup, cs: Sequence[Element] = (), jobs: int = 1
) -> Fraction:
    return solution_count(word, group, cs, jobs=jobs).density


# ---------------------------------------------------------------------------
# Algebraic sets and sections.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AlgebraicSet:
    """Solution set of one word equation with fixed parameters."""

    group: FiniteGroup
    word: WordTerm
    params: tuple

    @staticmethod
    def create(
        group: FiniteGroup, word: WordTerm, params: Sequence[Element] = ()
    ) -> "AlgebraicSet":
        n_vars, n_params = validate_arity(word)
        if len(params) != n_params:
            raise ArityMismatchError(
                f"word needs {n_params} parameters, got {len(params)}"
            )
        for c in params:
            if c.group is not group:
                raise GroupMismatchError("parameter from a different group")
        return AlgebraicSet(group, word, tuple(params))

    @property
    def arity(self) -> int:
        return self.word.n_vars

    def contains(self, xs: Sequence[Element]) -> bool:
        return evaluate(self.word, self.group, xs, self.params).is_identity()

    def density(self, jobs: int = 1) -> Fraction:
        return solution_density(self.word, self.group, self.params, jobs=jobs)

    def report(self, jobs: int = 1) -> DensityReport:
        return solution_count(self.word, self.group, self.params, jobs=jobs)


@dataclass(frozen=True)
class SectionSet:
    """Fix the last coordinate of an algebraic set of arity n > 1."""

    parent: AlgebraicSet
    last: Element

    def contains(self, xs: Sequence[Element]) -> bool:
        return self.parent.contains(tuple(xs) + (self.last,))

    def count(self) -> int:
        group = self.parent.group
        group.require_enumerable()
        n = self.parent.arity
        space = group.size() ** (n - 1)
        if space * group.size() > PAIR_SPACE_CAP:
            raise CapError("section space too large")
        cs = [c.payload for c in self.parent.params]
        e = group.identity_payload()
        word = self.parent.word
        total = 0
        for rest in itertools.product(group.iter_payloads(), repeat=n - 1):
            if evaluate_payload(word, group, rest + (self.last.payload,), cs) == e:
                total += 1
        return total

    def density(self) -> Fraction:
        n = self.parent.arity
        return Fraction(self.count(), self.parent.group.size() ** (n - 1))


def section(a: AlgebraicSet, g: Element) -> SectionSet:
    if a.arity <= 1:
        raise ArityMismatchError("sections need arity > 1")
    if g.group is not a.group:
        raise GroupMismatchError("section coordinate from a different group")
    return SectionSet(a, g)


def fubini_markov_positive_part(a: AlgebraicSet) -> list[Element]:
    """{g : the section at g has positive density}, in enumeration order."""
    if a.arity <= 1:
        raise ArityMismatchError("positive part needs arity > 1")
    a.group.require_enumerable()
    out = []
    for g in a.group.elements():
        if section(a, g).count() > 0:
            out.append(g)
    return out
