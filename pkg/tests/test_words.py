import itertools
import random
from fractions import Fraction

import pytest

from groupbench.gf2 import matrix_closure
from groupbench.groups import (
    DirectProductGroup,
    Element,
    ElementaryAbelian2,
    G2Group,
    Gf2SemidirectGroup,
    SymmetricGroup,
    commutator,
)
from groupbench.words import (
    AlgebraicSet,
    ArityMismatchError,
    CapError,
    Comm,
    Ident,
    Inv,
    Param,
    Prod,
    Var,
    WordSyntaxError,
    evaluate,
    expand_commutators,
    fubini_markov_positive_part,
    parse_word,
    print_word,
    section,
    solution_count,
    solution_density,
)

WORDS = [
    "e",
    "x1",
    "x1 x2",
    "x1^-1",
    "[x1,x2]",
    "[[x1,z1],x2]",
    "[[[x1,z1],z2],x2]",
    "[x1,x2]^-1 z1",
    "x1 x2 x1^-1 x2^-1",
    "e e",
    "[x1,x1]",
]


@pytest.mark.parametrize("text", WORDS)
def test_parse_print_roundtrip(text):
    tree = parse_word(text)
    assert parse_word(print_word(tree)) == tree


def test_parse_rejects():
    with pytest.raises(WordSyntaxError):
        parse_word("[[[x1,z1],z2],y]")  # y is not in the grammar
    with pytest.raises(WordSyntaxError):
        parse_word("x0")
    with pytest.raises(WordSyntaxError):
        parse_word("z0")
    with pytest.raises(WordSyntaxError):
        parse_word("[x1,x2")
    with pytest.raises(WordSyntaxError):
        parse_word("x1]")
    with pytest.raises(WordSyntaxError):
        parse_word("")
    with pytest.raises(ArityMismatchError):
        parse_word("x1 x3")  # indices must be contiguous


def test_parse_shapes():
    assert parse_word("e") == Ident()
    w = parse_word("[[[x1,z1],z2],x2]")
    assert w == Comm(Comm(Comm(Var(1), Param(1)), Param(2)), Var(2))
    assert (w.n_vars, w.n_params) == (2, 2)
    # juxtaposition is left-associative, postfix inverse binds to the atom
    assert parse_word("x1 x2 x1") == Prod(Prod(Var(1), Var(2)), Var(1))
    assert parse_word("x1 x2^-1") == Prod(Var(1), Inv(Var(2)))


def test_expand_commutators_equivalent():
    w = parse_word("[[x1,z1],x2]")
    expanded = expand_commutators(w)

    def has_comm(t):
        if isinstance(t, Comm):
            return True
        children = (getattr(t, "left", None), getattr(t, "right", None), getattr(t, "term", None))
        return any(has_comm(c) for c in children if c is not None)

    assert not has_comm(expanded)
    g = SymmetricGroup(4)
    rng = random.Random(2)
    payloads = list(g.iter_payloads())
    for _ in range(50):
        xs = [Element(g, rng.choice(payloads)) for _ in range(2)]
        cs = [Element(g, rng.choice(payloads))]
        assert evaluate(w, g, xs, cs) == evaluate(expanded, g, xs, cs)


def test_evaluate_basics():
    g = SymmetricGroup(3)
    w = parse_word("[x1,x2]")
    assert evaluate(w, g, [g.identity, g.identity]).is_identity()
    abel = ElementaryAbelian2(3)
    for a in abel.elements():
        for b in abel.elements():
            assert evaluate(w, abel, [a, b]).is_identity()
    always = parse_word("[x1,x1]")
    for a in g.elements():
        assert evaluate(always, g, [a]).is_identity()


def test_evaluate_arity_errors():
    g = SymmetricGroup(3)
    with pytest.raises(ArityMismatchError):
        evaluate(parse_word("x1 x2"), g, [g.identity])
    with pytest.raises(ArityMismatchError):
        evaluate(parse_word("z1"), g, [], [])


def test_distinguished_word_matches_direct_composition():
    g2 = G2Group.toy(2, 2)
    w = parse_word("[[[x1,z1],z2],x2]")
    z1 = g2.y3_set(0b11)
    z2 = g2.z_element(0b11)
    rng = random.Random(5)
    payloads = list(g2.iter_payloads())
    for _ in range(60):
        x = Element(g2, rng.choice(payloads))
        y = Element(g2, rng.choice(payloads))
        via_word = evaluate(w, g2, [x, y], [z1, z2])
        via_ops = commutator(commutator(commutator(x, z1), z2), y)
        assert via_word == via_ops


def test_density_identity_word():
    g = SymmetricGroup(3)
    assert solution_density(parse_word("e"), g) == 1


def test_density_commuting_pairs_sym3():
    g = SymmetricGroup(3)
    w = parse_word("[x1,x2]")
    structured = solution_count(w, g, method="structured")
    enumerated = solution_count(w, g, method="enumerate")
    assert structured.density == Fraction(1, 2)
    assert structured.count == enumerated.count == 18
    # independent oracle: sum of centralizer orders
    from groupbench.groups import centralizer_count

    assert enumerated.count == sum(centralizer_count(g, s) for s in g.elements())


def test_density_squares():
    # x^2 = e solutions, enumerated and frozen from hand counts
    w = parse_word("x1 x1")
    assert solution_density(w, ElementaryAbelian2(1)) == 1
    assert solution_density(w, SymmetricGroup(3)) == Fraction(4, 6)
    gl2 = Gf2SemidirectGroup(2, matrix_closure([(3, 2)], 2, cap=10))
    assert gl2.size() == 8
    assert solution_density(w, gl2) == Fraction(6, 8)


def test_density_translation_invariance():
    # solution counts are invariant under simultaneous conjugation of the
    # parameters (the solution set maps bijectively by conjugation)
    g = SymmetricGroup(4)
    w = parse_word("[[x1,z1],x2]")
    rng = random.Random(11)
    payloads = list(g.iter_payloads())
    for _ in range(8):
        c = Element(g, rng.choice(payloads))
        h = Element(g, rng.choice(payloads))
        conj = h.inverse() * c * h
        assert solution_count(w, g, [c]).count == solution_count(w, g, [conj]).count


def test_density_cap():
    big = SymmetricGroup(9)
    with pytest.raises(CapError):
        solution_count(parse_word("x1 x2 x1 x2"), big)


def test_jobs_independence():
    g = SymmetricGroup(4)
    w = parse_word("[x1,x2]")
    counts = {solution_count(w, g, method="enumerate", jobs=j).count for j in (1, 2, 5)}
    assert len(counts) == 1


def test_direct_product_factorization():
    lv = [ElementaryAbelian2(2), SymmetricGroup(3)]
    prod = DirectProductGroup(lv)
    w = parse_word("[x1,x2]")
    fact = solution_count(w, prod)  # levelwise route
    assert fact.method == "levelwise"
    direct = solution_count(w, prod, method="enumerate")
    assert fact.count == direct.count
    assert fact.density == direct.density


def test_sections_and_fubini():
    g = SymmetricGroup(3)
    a = AlgebraicSet.create(g, parse_word("[x1,x2]"))
    assert section(a, g.identity).density() == 1
    transposition = g.element((1, 0, 2))
    assert section(a, transposition).density() == Fraction(1, 3)
    total = sum(section(a, x).density() for x in g.elements())
    assert a.density() == total / g.size()


def test_fubini_random_sets():
    rng = random.Random(17)
    groups = [ElementaryAbelian2(2), SymmetricGroup(3), G2Group.toy(1, 1)]

    def random_word(depth):
        roll = rng.random()
        if depth == 0 or roll < 0.25:
            return rng.choice([Var(1), Var(2), Param(1), Ident()])
        if roll < 0.5:
            return Inv(random_word(depth - 1))
        if roll < 0.75:
            return Prod(random_word(depth - 1), random_word(depth - 1))
        return Comm(random_word(depth - 1), random_word(depth - 1))

    done = 0
    while done < 30:
        w = Prod(random_word(2), Prod(Var(1), Var(2)))  # forces arity 2
        g = rng.choice(groups)
        payloads = list(g.iter_payloads())
        params = [Element(g, rng.choice(payloads))] if w.n_params else []
        a = AlgebraicSet.create(g, w, params)
        lhs = a.density()
        rhs = sum(section(a, x).density() for x in g.elements()) / g.size()
        assert lhs == rhs
        done += 1


def test_positive_part():
    g = SymmetricGroup(3)
    everything = AlgebraicSet.create(g, parse_word("e x1 x1^-1 x2 x2^-1"))
    assert len(fubini_markov_positive_part(everything)) == g.size()
    commuting = AlgebraicSet.create(g, parse_word("[x1,x2]"))
    assert len(fubini_markov_positive_part(commuting)) == g.size()
    c = g.element((1, 0, 2))
    empty = AlgebraicSet.create(g, parse_word("x1 x1^-1 x2 x2^-1 z1"), [c])
    assert fubini_markov_positive_part(empty) == []
    with pytest.raises(ArityMismatchError):
        fubini_markov_positive_part(AlgebraicSet.create(g, parse_word("x1")))
