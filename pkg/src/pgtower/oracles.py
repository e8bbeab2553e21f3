"""Brute-force reference computations used to cross-check the fast code.

Everything here is deliberately naive and only meant for small inputs.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from math import prod

from . import structure
from .descend import immediate_descendants
from .linalg import AbelianInvariants, is_quotient, smith_invariants
from .pcp import PcPresentation, PresentationError, from_relations, relation_order
from .tower import automorphism_group

# --- multiplication by naive rewriting -----------------------------------------------


class RewriteLimitError(RuntimeError):
    pass


def _word(P: PcPresentation, e) -> list[int]:
    return [i for i, x in enumerate(e) for _ in range(x)]


def rewrite(P: PcPresentation, word: list[int], limit: int = 10**6) -> tuple:
    """Normal form of a positive word, fixing the leftmost violation each time.

    Uses ``x_j x_i -> x_i x_j [x_j,x_i]`` and ``x_i^p -> rhs``. This is a
    different strategy from collection, so agreement is a real check.
    """
    p, w = P.p, list(word)
    steps = 0
    while True:
        steps += 1
        if steps > limit:
            raise RewriteLimitError("rewriting did not terminate")
        for k in range(len(w) - 1):
            if w[k] > w[k + 1]:
                j, i = w[k], w[k + 1]
                w[k : k + 2] = [i, j] + _word(P, P.comm.get((j, i), P.identity))
                break
            if w[k] == w[k + 1] and w[k : k + p] == [w[k]] * p:
                w[k : k + p] = _word(P, P.power[w[k]])
                break
        else:
            out = [0] * P.n
            for g in w:
                out[g] += 1
            return tuple(out)


def brute_table(P: PcPresentation) -> dict:
    """Full multiplication table by rewriting; only for tiny groups."""
    elems = list(itertools.product(range(P.p), repeat=P.n))
    return {(a, b): rewrite(P, _word(P, a) + _word(P, b)) for a in elems for b in elems}


def table_is_associative(P: PcPresentation, table: dict) -> bool:
    elems = list(itertools.product(range(P.p), repeat=P.n))
    for a in elems:
        for b in elems:
            ab = table[a, b]
            for c in elems:
                if table[ab, c] != table[a, table[b, c]]:
                    return False
    return True


def compare_collection(P: PcPresentation) -> tuple | None:
    """First (a, b) where collection and rewriting disagree, or None."""
    table = brute_table(P)
    for (a, b), v in table.items():
        if P.multiply(a, b) != v:
            return (a, b)
    return None


def random_presentation(rng: random.Random, n: int, p: int = 2, density: float = 0.5) -> PcPresentation:
    """Random pc presentation, consistent or not."""
    rels = {}
    for key in relation_order(n):
        e = [0] * n
        for k in range(key[1] + 1, n):
            if rng.random() < density:
                e[k] = rng.randrange(1, p)
        rels[key] = tuple(e)
    return from_relations(p, n, rels)


def random_consistent(rng: random.Random, n: int, p: int = 2, tries: int = 10**4) -> PcPresentation:
    for _ in range(tries):
        P = random_presentation(rng, n, p, density=rng.choice([0.2, 0.35, 0.5]))
        if P.is_consistent():
            return P
    raise PresentationError("no consistent presentation found")


# --- cokernels by counting homomorphisms ---------------------------------------------


def _hom_counts(rows, ncols: int, p: int, kmax: int) -> list[int]:
    """|{y in (Z/p^k)^ncols : rows . y = 0 mod p^k}| for k = 0..kmax, by lifting."""
    sols = [(0,) * ncols]
    counts = [1]
    for k in range(1, kmax + 1):
        mod, step = p**k, p ** (k - 1)
        nxt = []
        for y in sols:
            for z in itertools.product(range(p), repeat=ncols):
                v = tuple(a + step * b for a, b in zip(y, z))
                if all(sum(r * x for r, x in zip(row, v)) % mod == 0 for row in rows):
                    nxt.append(v)
        sols = nxt
        counts.append(len(sols))
    return counts


def cokernel_invariants(rows, ncols: int, p: int) -> AbelianInvariants:
    """p-part of Z^ncols / rows via |Hom(-, Z/p^k)| = prod min(a_i, p^k).

    The rows must have full rank ``ncols``.
    """
    kmax = 1
    counts = _hom_counts(rows, ncols, p, kmax)
    while counts[-1] != counts[-2]:
        kmax += 1
        counts = _hom_counts(rows, ncols, p, kmax)
    # number of cyclic factors of order >= p^k
    ge = []
    for k in range(1, len(counts)):
        r, c = 0, counts[k] // counts[k - 1]
        while c > 1:
            c //= p
            r += 1
        ge.append(r)
    orders = []
    for k in range(1, len(ge) + 1):
        exactly = ge[k - 1] - (ge[k] if k < len(ge) else 0)
        orders += [p**k] * exactly
    return AbelianInvariants.of(orders)


def _det(m) -> int:
    if len(m) == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * _det([r[:j] + r[j + 1 :] for r in m[1:]]) for j in range(len(m)))


def random_two_power_matrix(rng: random.Random, max_det: int = 256, max_n: int = 4):
    while True:
        n = rng.randint(1, max_n)
        m = [[rng.randint(-6, 6) for _ in range(n)] for _ in range(n)]
        d = abs(_det(m))
        if 0 < d <= max_det and d & (d - 1) == 0:
            return m


# --- surjections between abelian groups ----------------------------------------------


def partitions_of_order(p: int, max_exp: int) -> list[AbelianInvariants]:
    out = []

    def rec(left, maxpart, acc):
        out.append(AbelianInvariants.of(p**e for e in acc))
        for e in range(min(left, maxpart), 0, -1):
            rec(left - e, e, acc + [e])

    rec(max_exp, max_exp, [])
    uniq = {a.orders: a for a in out}
    return sorted(uniq.values(), key=lambda a: (a.order, a.orders))


def surjection_exists(src: AbelianInvariants, dst: AbelianInvariants) -> bool:
    """Search all generator images src -> dst for one that generates dst.

    Images of a generator of order a range over elements of order dividing a.
    The search runs generator by generator and memoizes on the subgroup
    spanned so far, which keeps it exhaustive but small.
    """
    bs = dst.orders
    if not bs:
        return True
    elems = list(itertools.product(*(range(b) for b in bs)))
    choices = [[x for x in elems if all((a * xi) % b == 0 for xi, b in zip(x, bs))] for a in src.orders]
    target = prod(bs)
    expo = max(bs)
    # |<S, h_i, ...>| <= |S| * prod(order of h_j), which bounds the search
    room = [prod(min(a, expo) for a in src.orders[i:]) for i in range(len(src.orders) + 1)]

    def add(S: frozenset, g) -> frozenset:
        if g in S:
            return S
        out = set(S)
        shift = g
        while shift not in S:
            out.update(tuple((x + y) % b for x, y, b in zip(v, shift, bs)) for v in S)
            shift = tuple((x + y) % b for x, y, b in zip(shift, g, bs))
        return frozenset(out)

    memo: dict = {}

    def search(i: int, S: frozenset) -> bool:
        if len(S) == target:
            return True
        if i == len(choices) or len(S) * room[i] < target:
            return False
        key = (i, S)
        if key not in memo:
            memo[key] = any(search(i + 1, add(S, g)) for g in choices[i])
        return memo[key]

    return search(0, frozenset([tuple(0 for _ in bs)]))


# --- small descendant census ---------------------------------------------------------


def _class_quotient_ok(H: PcPresentation, P: PcPresentation, s: int) -> bool:
    series = structure.lower_p_central_series(H)
    c = structure.p_class(P)
    if len(series) != c + 2:  # p-class exactly c + 1
        return False
    return series[c].order == P.p**s


def brute_descendants(P: PcPresentation, s: int) -> list[PcPresentation]:
    """Iso-class representatives of immediate descendants of order |P| p^s.

    Enumerates every tail choice in s new central generators of order p and
    keeps the consistent ones of p-class c+1 whose P_c is the new part.
    """
    n, p = P.n, P.p
    keys = relation_order(n)
    reps: list[PcPresentation] = []
    vecs = list(itertools.product(range(p), repeat=s))
    for tails in itertools.product(vecs, repeat=len(keys)):
        rels = {}
        for key, t in zip(keys, tails):
            rels[key] = tuple(P.relation_rhs(key)) + tuple(t)
        try:
            H = from_relations(p, n + s, rels)
        except PresentationError:
            continue
        if not H.is_consistent() or not _class_quotient_ok(H, P, s):
            continue
        if structure.abelian_quotient_invariants(H).rank != structure.abelian_quotient_invariants(P).rank:
            continue
        if not any(structure.is_isomorphic(H, R) for R in reps):
            reps.append(H)
    return reps


def descendant_census(P: PcPresentation, s: int) -> tuple[int, int]:
    """(algorithm count, brute count) of step-s immediate descendants of P."""
    auts = automorphism_group(P)
    fast = immediate_descendants(P, auts, steps=[s], max_class=None, max_order=None)
    return len(fast), len(brute_descendants(P, s))


# --- suites ---------------------------------------------------------------------------


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    failures: list = field(default_factory=list)
    skipped: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures

    def line(self) -> str:
        s = f"{'PASS' if self.ok else 'FAIL'} {self.name}: {self.checked} checked"
        if self.skipped:
            s += f", {self.skipped} skipped"
        if self.failures:
            s += f"; first failure: {self.failures[0]}"
        return s


def case_groups_small(max_order: int = 2**7) -> list[tuple[str, PcPresentation]]:
    from .cases import case_ids, load_case

    out = []
    seen = set()

    def add(name, G):
        if G.order <= max_order and G.key() not in seen:
            seen.add(G.key())
            out.append((name, G))

    for cid in case_ids():
        case = load_case(cid)
        for nm in sorted(case.groups):
            add(f"{cid}:{nm}", case.group(nm))
        for ch, G in case.final_groups():
            series = structure.lower_p_central_series(G)
            for c in range(1, len(series) - 1):
                Q, _ = structure.quotient_presentation(G, series[c])
                add(f"{cid}:{ch}/P{c}", Q)
    return out


def suite_collection(count: int = 200, seed: int = 1, max_n: int = 6) -> SuiteResult:
    res = SuiteResult("collection vs rewriting")
    for name, G in case_groups_small():
        res.checked += 1
        bad = compare_collection(G)
        if bad is not None:
            res.failures.append(f"{name} at {bad}")
    rng = random.Random(seed)
    for _ in range(count):
        P = random_consistent(rng, rng.randint(1, max_n))
        res.checked += 1
        bad = compare_collection(P)
        if bad is not None:
            res.failures.append(f"{P.key()} at {bad}")
    return res


def suite_consistency(count: int = 100, seed: int = 2, max_n: int = 4) -> SuiteResult:
    """is_consistent agrees with associativity of the rewriting table."""
    res = SuiteResult("consistency vs associativity")
    rng = random.Random(seed)
    for _ in range(count):
        P = random_presentation(rng, rng.randint(1, max_n), density=0.4)
        try:
            table = brute_table(P)
            assoc = table_is_associative(P, table) and all(
                table[a, b] == P.multiply(a, b) for a, b in table
            )
        except RewriteLimitError:
            res.skipped += 1
            continue
        res.checked += 1
        if P.is_consistent() and not assoc:
            res.failures.append(f"consistent but not associative: {P.key()}")
        if not P.is_consistent() and table_is_associative(P, table):
            res.failures.append(f"inconsistent but associative: {P.key()}")
    return res


def suite_smith(count: int = 500, seed: int = 3) -> SuiteResult:
    res = SuiteResult("smith_invariants vs cokernel enumeration")
    rng = random.Random(seed)
    for _ in range(count):
        m = random_two_power_matrix(rng)
        res.checked += 1
        a = smith_invariants(m, len(m), 2)
        b = cokernel_invariants(m, len(m), 2)
        if a != b:
            res.failures.append(f"{m}: {a} vs {b}")
    return res


def suite_quotient(max_exp: int = 6) -> SuiteResult:
    res = SuiteResult("is_quotient vs surjection search")
    groups = partitions_of_order(2, max_exp)
    for src in groups:
        for dst in groups:
            if dst.order > src.order:
                continue
            brute = surjection_exists(src, dst)
            res.checked += 1
            if brute != is_quotient(dst, src):
                res.failures.append(f"{dst} image of {src}: brute {brute}")
    return res


SMALL_PARENTS = {
    "[2]": ("p=2 n=1", [1]),
    "[2,2]": ("p=2 n=2", [1, 2]),
    "[2,4]": ("p=2 n=3\nx1^2 = x3", [1, 2]),
    "D4": ("p=2 n=3\n[x2,x1] = x3", [1, 2]),
    "Q8": ("p=2 n=3\nx1^2 = x3; x2^2 = x3; [x2,x1] = x3", [1]),
    "[2,2,2]": ("p=2 n=3", [1]),
}


def suite_descendants() -> SuiteResult:
    from .pcp import parse_presentation

    res = SuiteResult("immediate descendants vs brute census")
    for name, (text, steps) in SMALL_PARENTS.items():
        P = parse_presentation(text)
        for s in steps:
            fast, brute = descendant_census(P, s)
            res.checked += 1
            if fast != brute:
                res.failures.append(f"{name} step {s}: {fast} vs {brute}")
    return res


SUITES = {
    "collection": suite_collection,
    "consistency": suite_consistency,
    "smith": suite_smith,
    "quotient": suite_quotient,
    "descendants": suite_descendants,
}
