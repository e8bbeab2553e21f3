import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pgtower import oracles
from pgtower.linalg import (
    AbelianInvariants,
    InfiniteCokernelError,
    MatGFp,
    enumerate_subspaces,
    gaussian_binomial,
    is_quotient,
    iter_subspaces_bits,
    nullspace,
    rank,
    rref,
    rref_bits,
    smith_diagonal,
    smith_invariants,
    vector_space,
)


def small_matrix(p):
    return st.integers(1, 4).flatmap(
        lambda ncols: st.lists(st.lists(st.integers(0, p - 1), min_size=ncols, max_size=ncols), max_size=5).map(
            lambda rows: MatGFp.from_rows(p, rows, ncols)
        )
    )


@given(small_matrix(3))
def test_nullspace_is_kernel(M):
    K = nullspace(M)
    for v in K.rows:
        for r in M.rows:
            assert sum(a * b for a, b in zip(r, v)) % 3 == 0
    assert rank(M) + K.nrows == M.ncols


@given(small_matrix(2))
def test_rref_idempotent(M):
    R, piv, rk = rref(M)
    R2, piv2, rk2 = rref(R)
    assert (R2, piv2, rk2) == (R, piv, rk)


def test_rref_bits_matches_generic():
    rows = [0b1011, 0b0110, 0b1101, 0b0011]
    basis = rref_bits(rows)
    M = MatGFp.from_rows(2, [[(r >> c) & 1 for c in range(4)] for r in rows], 4)
    assert len(basis) == rank(M)


@pytest.mark.parametrize("n,k,p", [(3, 1, 2), (4, 2, 2), (3, 1, 3), (5, 2, 2)])
def test_subspace_count_is_gaussian_binomial(n, k, p):
    subs = enumerate_subspaces(n, k, p)
    assert len(subs) == gaussian_binomial(n, k, p)
    assert len({s.rows for s in subs}) == len(subs)


def test_subspace_enumeration_by_brute_force():
    # every 2-dim subspace of GF(2)^4 as a set of vectors
    vecs = list(itertools.product(range(2), repeat=4))
    brute = set()
    for a, b in itertools.combinations(vecs, 2):
        span = frozenset(tuple((x * u + y * v) % 2 for u, v in zip(a, b)) for x in range(2) for y in range(2))
        if len(span) == 4:
            brute.add(span)
    ours = set()
    for S in enumerate_subspaces(4, 2, 2):
        a, b = S.rows
        ours.add(frozenset(tuple((x * u + y * v) % 2 for u, v in zip(a, b)) for x in range(2) for y in range(2)))
    assert ours == brute
    assert sum(1 for _ in iter_subspaces_bits(4, 2)) == len(brute)


def test_gaussian_binomial_values():
    assert gaussian_binomial(3, 1, 2) == 7
    assert gaussian_binomial(4, 2, 2) == 35
    assert gaussian_binomial(2, 3, 2) == 0


def test_smith_diagonal_simple():
    assert smith_diagonal([[2, 0], [0, 4]], 2) == [2, 4]
    assert smith_diagonal([[2, 4], [6, 8]], 2) == [2, 4]


def test_smith_invariants_examples():
    assert str(smith_invariants([[4, 0], [0, 4]], 2, 2)) == "[4,4]"
    assert str(smith_invariants([[2, 0, 0], [0, 8, 0], [0, 0, 1]], 3, 2)) == "[2,8]"
    with pytest.raises(InfiniteCokernelError):
        smith_invariants([[1, 0]], 2, 2)


@st.composite
def two_power_matrices(draw):
    """D with 2-power diagonal, scrambled by integer row and column operations."""
    n = draw(st.integers(1, 3))
    exps = draw(st.lists(st.integers(0, 3), min_size=n, max_size=n).filter(lambda e: sum(e) <= 6))
    m = [[(2**exps[i] if i == j else 0) for j in range(n)] for i in range(n)]
    ops = draw(st.lists(st.tuples(st.booleans(), st.integers(0, n - 1), st.integers(0, n - 1), st.integers(-2, 2)), max_size=6))
    for is_row, i, j, k in ops:
        if i == j:
            continue
        if is_row:
            m[i] = [a + k * b for a, b in zip(m[i], m[j])]
        else:
            for r in m:
                r[i] += k * r[j]
    return m


@settings(max_examples=80, deadline=None)
@given(two_power_matrices())
def test_smith_matches_cokernel_enumeration(m):
    assert smith_invariants(m, len(m), 2) == oracles.cokernel_invariants(m, len(m), 2)


def test_abelian_invariants_parse_roundtrip():
    a = AbelianInvariants.parse("[2, 4,16]")
    assert a.orders == (2, 4, 16)
    assert str(a) == "[2,4,16]"
    assert a.order == 128
    assert AbelianInvariants.parse("[]").order == 1
    with pytest.raises(ValueError):
        AbelianInvariants((4, 2))


@pytest.mark.parametrize(
    "a,b,expected",
    [("[2,4]", "[4,4]", True), ("[2,8]", "[4,4]", False), ("[2,2,2]", "[2,4]", False), ("[4,4]", "[4,4,8]", True)],
)
def test_is_quotient_examples(a, b, expected):
    assert is_quotient(AbelianInvariants.parse(a), AbelianInvariants.parse(b)) is expected


def test_is_quotient_matches_surjection_search_small():
    groups = oracles.partitions_of_order(2, 4)
    for src in groups:
        for dst in groups:
            if dst.order <= src.order:
                assert is_quotient(dst, src) == oracles.surjection_exists(src, dst), (src, dst)


@pytest.mark.parametrize("p", [2, 3])
def test_vector_space_roundtrip(p):
    V = vector_space(4, p)
    v = V.from_list([1, 0, p - 1, 1])
    assert V.to_list(v) == [1, 0, p - 1, 1]
    assert V.add(v, V.scale(v, p - 1)) == V.zero
    basis = V.echelon([v, V.unit(0), V.add(v, V.unit(0))])
    assert len(basis) == 2
