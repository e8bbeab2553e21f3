import pytest

from pgtower import oracles, structure
from pgtower.descend import (
    AutSet,
    CapExceededError,
    count_allowable,
    identify,
    immediate_descendants,
    is_terminal,
    root_automorphisms,
)
from pgtower.pcover import p_covering_group
from pgtower.pcp import PresentationError, parse_presentation
from pgtower.tower import automorphism_group

V4 = "p=2 n=2"
C24 = "p=2 n=3\nx1^2 = x3"
D4 = "p=2 n=3\n[x2,x1] = x3"
Q8 = "p=2 n=3\nx1^2 = x3; x2^2 = x3; [x2,x1] = x3"
H4 = "p=2 n=4\nx1^2 = x4; [x2,x1] = x3"
H6 = "p=2 n=5\nx1^2 = x4; x2^2 = x5; [x2,x1] = x3"


def G(text):
    return parse_presentation(text)


def children(text, **kw):
    P = G(text)
    return immediate_descendants(P, automorphism_group(P), max_order=None, max_class=None, **kw)


def test_descendants_of_cyclic_two():
    out = children("p=2 n=1")
    assert len(out) == 1
    Q = out[0].presentation
    assert Q.order == 4
    assert str(structure.abelian_quotient_invariants(Q)) == "[4]"


def test_order_eight_descendants_of_four_group():
    out = children(V4, steps=[1])
    assert len(out) == 3
    targets = [G(C24), G(D4), G(Q8)]
    for T in targets:
        assert sum(structure.is_isomorphic(x.presentation, T) for x in out) == 1


@pytest.mark.parametrize("text,counts", [(V4, [3, 3, 1]), (C24, [2]), (D4, [3]), (Q8, [])])
def test_descendant_counts_by_step(text, counts):
    out = children(text)
    got = [sum(1 for x in out if x.step == s) for s in range(1, len(counts) + 1)]
    assert got == counts
    assert len(out) == sum(counts)


@pytest.mark.parametrize("name", ["[2,2]", "[2,4]", "D4", "Q8"])
def test_census_matches_brute(name):
    text, steps = oracles.SMALL_PARENTS[name]
    P = G(text)
    for s in steps:
        fast, brute = oracles.descendant_census(P, s)
        assert fast == brute, (name, s)


def test_descendants_are_pairwise_distinct_and_project():
    out = children(V4)
    for a in out:
        Q = a.presentation
        assert Q.is_consistent()
        assert structure.p_class(Q) == 2
        f = a.projection()
        assert f.check()
        assert structure.image(f, structure.whole_group(Q)).order == 4
        assert structure.is_isomorphic(structure.quotient_presentation(Q, structure.kernel(f))[0], G(V4))
    for i, a in enumerate(out):
        for b in out[i + 1:]:
            assert not structure.is_isomorphic(a.presentation, b.presentation)


@pytest.mark.parametrize("text", [C24, D4, H4])
def test_quotient_by_last_class_term_is_parent(text):
    P = G(text)
    c = structure.p_class(P)
    for x in children(text):
        Q = x.presentation
        S = structure.lower_p_central_series(Q)
        R, _ = structure.quotient_presentation(Q, S[c])
        assert structure.is_isomorphic(R, P)


@pytest.mark.parametrize("text,size", [(V4, 6), (C24, 8), (D4, 8), (Q8, 24)])
def test_automorphism_group_orders(text, size):
    assert len(automorphism_group(G(text)).closure()) == size


@pytest.mark.parametrize("text", [V4, C24, D4])
def test_inherited_automorphisms_are_full_group(text):
    # the stabilizer lift must generate all of Aut of each child
    for x in children(text):
        if is_terminal(x.presentation):
            continue
        own = x.automorphisms.closure()
        brute = automorphism_group(x.presentation).closure()
        assert len(own) == len(brute)


def test_root_automorphisms_generate_gl():
    P = G("p=2 n=3")
    assert len(root_automorphisms(P).closure()) == 168


def test_automorphism_algebra():
    P = G(Q8)
    auts = automorphism_group(P).closure()
    assert len(auts) == 24
    for a in auts:
        assert a.is_homomorphism()
        assert (a * a.inverse()).is_identity()
        assert (a.inverse() * a).is_identity()
        assert a.power(24).is_identity()
    # a * b applies a first
    for a in auts[:6]:
        for b in auts[:6]:
            assert all((a * b)(g) == b(a(g)) for g in structure.whole_group(P).elements())


def test_autset_rejects_non_automorphism():
    P = G(D4)
    with pytest.raises(ValueError):
        AutSet.from_images(P, [[P.gen(0), P.gen(0)]])


def test_count_allowable_elementary():
    # for (C2)^2 the nucleus is the whole multiplicator: every subspace is allowable
    D = p_covering_group(G(V4))
    assert [count_allowable(D, s) for s in (1, 2, 3)] == [7, 7, 1]


def test_terminal():
    assert is_terminal(G(Q8))
    assert not is_terminal(G(D4))
    assert children(Q8) == []


def test_caps():
    P = G(V4)
    A = automorphism_group(P)
    with pytest.raises(CapExceededError):
        immediate_descendants(P, A, max_order=16, max_class=None)
    with pytest.raises(CapExceededError):
        immediate_descendants(P, A, max_order=None, max_class=1)


@pytest.mark.parametrize("text", [C24, D4, Q8, H4, H6])
def test_identify_gives_isomorphism(text):
    X = G(text)
    ident = identify(X)
    assert ident.presentation.order == X.order
    assert structure.is_isomorphic(ident.presentation, X)


def test_identify_path_is_invariant():
    # the same group written on different generators reaches the same node
    a = identify(G(H4))
    b = identify(G("p=2 n=4\nx2^2 = x4; [x2,x1] = x3"))
    assert a.path == b.path
    assert identify(G(D4)).path != identify(G(Q8)).path


def test_identify_matches_enumeration():
    # the node found by identify is one of the enumerated descendants
    out = children(V4)
    keys = {x.presentation.key() for x in out}
    for x in out:
        assert identify(x.presentation).presentation.key() in keys


def test_identify_needs_minimal_generators_first():
    with pytest.raises(PresentationError):
        identify(G("p=2 n=3\nx1^2 = x2"))
