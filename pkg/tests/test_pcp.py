import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pgtower import oracles
from pgtower.pcp import (
    PresentationError,
    format_word,
    from_relations,
    parse_presentation,
    relation_order,
    serialize,
)

D4 = "p=2 n=3\n[x2,x1] = x3"
Q8 = "p=2 n=3\nx1^2 = x3; x2^2 = x3; [x2,x1] = x3"
H6 = "p=2 n=5\nx1^2 = x4; x2^2 = x5; [x2,x1] = x3"


def consistent_presentations():
    return st.builds(
        lambda seed, n: oracles.random_consistent(random.Random(seed), n),
        st.integers(0, 10**6),
        st.integers(1, 5),
    )


def test_parse_basic():
    P = parse_presentation(D4)
    assert P.n == 3 and P.order == 8
    assert P.comm[(1, 0)] == (0, 0, 1)
    assert P.d == 2
    assert P.defs == {2: ("comm", 1, 0)}


def test_parse_parameters():
    text = "p=2 n=3\nx1^2 = x3^r; x2^2 = x3^{1-r}"
    assert parse_presentation(text, {"r": 0}).power[0] == (0, 0, 0)
    assert parse_presentation(text, {"r": 1}).power[0] == (0, 0, 1)
    assert parse_presentation(text, {"r": 1}).power[1] == (0, 0, 0)
    with pytest.raises(PresentationError):
        parse_presentation(text)


@pytest.mark.parametrize(
    "text",
    [
        "x1^2 = x2",  # no header
        "p=2 n=2\n[x1,x2] = x2",  # j < i
        "p=2 n=2\nx1^3 = x2",  # wrong exponent
        "p=2 n=2\nx3^2 = x1",  # undeclared generator
        "p=2 n=2\nx2^2 = x1",  # tail below the generator
        "p=2 n=2\nx1^2 = x2; x1^2 = x2",  # duplicate
        "p=2 n=3\nx1 x2",  # garbage
        "p=2 n=3 d=3\n[x2,x1] = x3",  # wrong d
    ],
)
def test_parse_errors(text):
    with pytest.raises(PresentationError):
        parse_presentation(text)


def test_inconsistent_rejected():
    # x1^2 = x2 with x2 noncentral against x1 is impossible
    text = "p=2 n=3\nx1^2 = x2; [x2,x1] = x3"
    with pytest.raises(PresentationError):
        parse_presentation(text)
    P = parse_presentation(text, check=False)
    assert not P.is_consistent()


@pytest.mark.parametrize("text", [D4, Q8, H6])
def test_serialize_roundtrip(text):
    P = parse_presentation(text)
    Q = parse_presentation(serialize(P))
    assert Q == P
    assert Q.gen_weights() == P.gen_weights()


@settings(max_examples=40, deadline=None)
@given(consistent_presentations())
def test_serialize_roundtrip_random(P):
    assert parse_presentation(serialize(P)) == P


def test_format_word():
    assert format_word((1, 0, 2)) == "x1 x3^2"
    assert format_word((0, 0)) == "1"


def test_relation_order():
    assert relation_order(3) == [
        ("pow", 0), ("pow", 1), ("pow", 2), ("comm", 1, 0), ("comm", 2, 0), ("comm", 2, 1)
    ]


@settings(max_examples=40, deadline=None)
@given(consistent_presentations(), st.data())
def test_group_axioms(P, data):
    elem = st.tuples(*[st.integers(0, 1)] * P.n)
    a, b, c = data.draw(elem), data.draw(elem), data.draw(elem)
    assert P.multiply(P.multiply(a, b), c) == P.multiply(a, P.multiply(b, c))
    assert P.multiply(a, P.inverse(a)) == P.identity
    assert P.multiply(P.inverse(a), a) == P.identity
    comm = P.commutator(a, b)
    assert P.multiply(P.multiply(b, a), comm) == P.multiply(a, b)
    assert P.solve(a, P.multiply(a, b)) == b


@settings(max_examples=30, deadline=None)
@given(consistent_presentations())
def test_collection_matches_rewriting(P):
    assert oracles.compare_collection(P) is None


@pytest.mark.parametrize("text", [D4, Q8, H6])
def test_collection_matches_rewriting_named(text):
    assert oracles.compare_collection(parse_presentation(text)) is None


def test_element_orders_q8():
    P = parse_presentation(Q8)
    assert P.element_order(P.gen(0)) == 4
    assert P.element_order(P.gen(2)) == 2
    assert P.element_order(P.identity) == 1


def test_consistency_agrees_with_associativity():
    res = oracles.suite_consistency(count=40, seed=11, max_n=3)
    assert res.ok, res.failures


def test_evaluate_follows_definitions():
    P = parse_presentation(D4)
    Q = parse_presentation(Q8)
    imgs = P.evaluate([Q.gen(0), Q.gen(1)], Q)
    assert imgs[2] == Q.commutator(Q.gen(1), Q.gen(0))


def test_weights_and_class():
    P = parse_presentation(H6)
    assert P.gen_weights() == (1, 1, 2, 2, 2)
    assert P.p_class == 2


def test_from_relations_builds_same_group():
    P = parse_presentation(Q8)
    rels = {k: P.relation_rhs(k) for k in relation_order(3)}
    assert from_relations(2, 3, rels) == P
