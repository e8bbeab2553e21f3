import itertools

import pytest

from pgtower import structure
from pgtower.descend import count_allowable, iter_allowable
from pgtower.pcover import p_covering_group
from pgtower.pcp import PresentationError, parse_presentation

C2 = "p=2 n=1"
V4 = "p=2 n=2"
V8 = "p=2 n=3"
C24 = "p=2 n=3\nx1^2 = x3"
D4 = "p=2 n=3\n[x2,x1] = x3"
Q8 = "p=2 n=3\nx1^2 = x3; x2^2 = x3; [x2,x1] = x3"


@pytest.mark.parametrize("d", [1, 2, 3])
def test_elementary_abelian_multiplicator(d):
    # p-cover of (C2)^d is free of exponent 4 and class 2: rank d + d(d-1)/2
    D = p_covering_group(parse_presentation(f"p=2 n={d}"))
    assert D.m == d + d * (d - 1) // 2
    assert D.nucleus_rank == D.m


@pytest.mark.parametrize("text,nu", [(C24, 1), (D4, 1), (Q8, 0)])
def test_nucleus_ranks(text, nu):
    assert p_covering_group(parse_presentation(text)).nucleus_rank == nu


@pytest.mark.parametrize("text", [C2, V4, C24, D4, Q8])
def test_cover_is_consistent_extension(text):
    G = parse_presentation(text)
    D = p_covering_group(G)
    C = D.cover
    assert C.is_consistent()
    assert C.order == G.order * 2**D.m
    M = D.multiplicator()
    assert M.order == 2**D.m
    # the multiplicator is central and the quotient is G
    for g in M.gens:
        for k in range(C.n):
            assert C.commutator(g, C.gen(k)) == C.identity
    Q, _ = structure.quotient_presentation(C, M)
    assert Q.key() == G.key()
    # same number of minimal generators
    assert structure.abelian_quotient_invariants(C).rank == structure.abelian_quotient_invariants(G).rank


@pytest.mark.parametrize("text", [V4, C24, D4])
def test_nucleus_is_last_class_term(text):
    G = parse_presentation(text)
    D = p_covering_group(G)
    series = structure.lower_p_central_series(D.cover)
    c = structure.p_class(G)
    assert D.nucleus_subgroup().gens == series[c].gens


def brute_allowable(D, step):
    """Codimension-step subspaces U of M with U + N = M, by listing all subspaces."""
    sp = D.space
    vecs = list(sp.all_vectors([sp.unit(i) for i in range(D.m)]))
    dim = D.m - step
    seen = set()
    for rows in itertools.combinations(vecs, dim):
        U = sp.echelon(rows)
        if len(U) != dim or U in seen:
            continue
        if len(sp.echelon(list(U) + list(D.nucleus))) == D.m:
            seen.add(U)
    return seen


@pytest.mark.parametrize("text,step", [(V4, 1), (V4, 2), (C24, 1), (D4, 1)])
def test_allowable_enumeration_matches_brute(text, step):
    D = p_covering_group(parse_presentation(text))
    ours = list(iter_allowable(D, step))
    assert len(ours) == len(set(ours)) == count_allowable(D, step)
    assert set(ours) == brute_allowable(D, step)


def test_cover_needs_minimal_generators_first():
    # x2 is defined by x1^2 but x3 is a minimal generator listed after it
    G = parse_presentation("p=2 n=3\nx1^2 = x2")
    with pytest.raises(PresentationError):
        p_covering_group(G)


def test_cover_rejects_inconsistent():
    G = parse_presentation("p=2 n=3\nx1^2 = x2; [x2,x1] = x3", check=False)
    with pytest.raises(PresentationError):
        p_covering_group(G)
