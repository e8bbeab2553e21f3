"""Subgroups, series, quotients and homomorphisms inside a fixed pc group."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .linalg import AbelianInvariants, enumerate_subspaces, smith_invariants
from .pcp import Element, PcPresentation, PresentationError, infer_definitions

ISO_ORDER_LIMIT = 2**8


class NotNormalError(ValueError):
    pass


class NotAHomomorphismError(ValueError):
    pass


class SizeLimitError(ValueError):
    pass


def _lead(e: Element) -> int:
    for k, x in enumerate(e):
        if x:
            return k
    return -1


class _Table:
    """Echelon table of an induced generating sequence, keyed by leading index."""

    def __init__(self, P: PcPresentation):
        self.P = P
        self.rows: dict[int, Element] = {}
        self.invs: dict[int, Element] = {}

    def sift(self, g: Element) -> Element:
        P = self.P
        while True:
            k = _lead(g)
            if k < 0 or k not in self.rows:
                return g
            a = g[k]
            inv = self.invs[k]
            for _ in range(a):
                g = P.multiply(inv, g)

    def add(self, g: Element) -> Element | None:
        """Sift ``g``; if a nontrivial residue is left, normalize and insert it."""
        g = self.sift(g)
        k = _lead(g)
        if k < 0:
            return None
        a = g[k]
        if a != 1:
            g = self.P.power_of(g, pow(a, -1, self.P.p))
        self.rows[k] = g
        self.invs[k] = self.P.inverse(g)
        return g

    def close(self, gens: Iterable[Element], conjugators: Sequence[Element] = ()) -> None:
        """Close under p-th powers, commutators and conjugation by ``conjugators``."""
        P = self.P
        queue = list(gens)
        while queue:
            g = self.add(queue.pop())
            if g is None:
                continue
            queue.append(P.power_of(g, P.p))
            for k, h in list(self.rows.items()):
                if h is not g:
                    queue.append(P.commutator(g, h))
            for x in conjugators:
                queue.append(P.commutator(g, x))

    def canonical(self) -> tuple[Element, ...]:
        P = self.P
        leads = sorted(self.rows)
        out = []
        for idx, k in enumerate(leads):
            g = self.rows[k]
            for l in leads[idx + 1 :]:
                c = g[l]
                if c:
                    g = P.multiply(g, P.power_of(self.invs[l], c))
            out.append(g)
        return tuple(out)


@dataclass(frozen=True, eq=False)
class Subgroup:
    """A subgroup given by its canonical induced generating sequence."""

    P: PcPresentation
    gens: tuple[Element, ...]

    @property
    def leads(self) -> tuple[int, ...]:
        return tuple(_lead(g) for g in self.gens)

    @property
    def order(self) -> int:
        return self.P.p ** len(self.gens)

    def index(self) -> int:
        return self.P.order // self.order

    def __eq__(self, other):
        if not isinstance(other, Subgroup):
            return NotImplemented
        return self.P is other.P and self.gens == other.gens

    def __hash__(self):
        return hash(self.gens)

    def __lt__(self, other: "Subgroup"):
        return (self.index(), self.gens) < (other.index(), other.gens)

    def exponents(self, g: Element) -> list[int] | None:
        """Exponents of ``g`` in the sequence, or None if ``g`` is not a member."""
        P = self.P
        out = []
        for s in self.gens:
            k = _lead(s)
            a = g[k]
            out.append(a)
            if a:
                g = P.multiply(P.power_of(P.inverse(s), a), g)
        return out if not any(g) else None

    def contains(self, g: Element) -> bool:
        return self.exponents(g) is not None

    def elements(self) -> list[Element]:
        P = self.P
        out = [P.identity]
        for s in reversed(self.gens):
            powers = [P.identity]
            for _ in range(P.p - 1):
                powers.append(P.multiply(powers[-1], s))
            out = [P.multiply(a, b) for a in powers for b in out]
        return out

    def is_subgroup_of(self, other: "Subgroup") -> bool:
        return all(other.contains(g) for g in self.gens)

    def __repr__(self):
        from .pcp import format_word

        return "<" + ", ".join(format_word(g) for g in self.gens) + ">"


def _from_table(t: _Table) -> Subgroup:
    return Subgroup(t.P, t.canonical())


def subgroup_closure(P: PcPresentation, gens: Iterable[Element]) -> Subgroup:
    t = _Table(P)
    t.close(gens)
    return _from_table(t)


def whole_group(P: PcPresentation) -> Subgroup:
    return Subgroup(P, tuple(P.gen(k) for k in range(P.n)))


def trivial_subgroup(P: PcPresentation) -> Subgroup:
    return Subgroup(P, ())


def contains(S: Subgroup, g: Element) -> bool:
    return S.contains(g)


def index(S: Subgroup) -> int:
    return S.index()


def _minimal_gens(P: PcPresentation) -> list[Element]:
    return [P.gen(k) for k in range(P.n) if k not in P.defs]


def normal_closure(P: PcPresentation, gens: Iterable[Element], within: Subgroup | None = None) -> Subgroup:
    """Smallest subgroup containing ``gens`` normalized by ``within`` (default: all of P)."""
    conj = list(within.gens) if within is not None else [P.gen(k) for k in range(P.n)]
    t = _Table(P)
    t.close(gens, conj)
    return _from_table(t)


def is_normal(N: Subgroup, within: Subgroup | None = None) -> bool:
    P = N.P
    conj = within.gens if within is not None else [P.gen(k) for k in range(P.n)]
    return all(N.contains(P.conjugate(g, x)) for g in N.gens for x in conj)


def derived_subgroup(S: PcPresentation | Subgroup) -> Subgroup:
    if isinstance(S, PcPresentation):
        S = whole_group(S)
    P = S.P
    comms = [P.commutator(a, b) for a, b in itertools.combinations(S.gens, 2)]
    return normal_closure(P, comms, within=S)


def derived_series(P: PcPresentation) -> list[Subgroup]:
    out = [whole_group(P)]
    while out[-1].gens:
        out.append(derived_subgroup(out[-1]))
    return out


def frattini_subgroup(S: Subgroup) -> Subgroup:
    P = S.P
    gens = [P.power_of(g, P.p) for g in S.gens]
    gens += [P.commutator(a, b) for a, b in itertools.combinations(S.gens, 2)]
    return normal_closure(P, gens, within=S)


def lower_p_central_series(P: PcPresentation) -> list[Subgroup]:
    """``P_0 = G > P_1 > ... > P_c = 1``."""
    if "lpcs" in P._cache:
        return P._cache["lpcs"]
    G = whole_group(P)
    allgens = G.gens
    series = [G]
    while series[-1].gens:
        prev = series[-1]
        gens = [P.power_of(g, P.p) for g in prev.gens]
        gens += [P.commutator(g, x) for g in prev.gens for x in allgens]
        nxt = normal_closure(P, gens)
        if nxt.order == prev.order:
            raise PresentationError("lower exponent-p central series stalls; not a p-group presentation")
        series.append(nxt)
    P._cache["lpcs"] = series
    return series


def p_class(P: PcPresentation) -> int:
    return len(lower_p_central_series(P)) - 1


def weights_from_series(P: PcPresentation) -> tuple[int, ...]:
    series = lower_p_central_series(P)
    w = []
    for k in range(P.n):
        g = P.gen(k)
        wt = 0
        while wt < len(series) and series[wt].contains(g):
            wt += 1
        w.append(wt)
    return tuple(w)


def is_weighted(P: PcPresentation) -> bool:
    """True when every series term is spanned by the generators of high enough weight."""
    series = lower_p_central_series(P)
    w = weights_from_series(P)
    if list(w) != sorted(w):
        return False
    return all(
        set(S.leads) == {k for k in range(P.n) if w[k] > i} for i, S in enumerate(series)
    )


# --- quotients -----------------------------------------------------------------


def _reduce_mod(P: PcPresentation, N: Subgroup, g: Element) -> Element:
    for s in N.gens:
        k = _lead(s)
        c = g[k]
        if c:
            g = P.multiply(g, P.power_of(P.inverse(s), c))
    return g


@dataclass(eq=False)
class Homomorphism:
    source: PcPresentation
    target: PcPresentation
    images: tuple[Element, ...]  # images of the minimal generators of source

    def __post_init__(self):
        self.images = tuple(tuple(x) for x in self.images)
        self.full = self.source.evaluate(self.images, self.target)

    def __call__(self, g: Element) -> Element:
        T = self.target
        out = T.identity
        for k, e in enumerate(g):
            for _ in range(e):
                out = T.multiply(out, self.full[k])
        return out

    def check(self) -> bool:
        S, T = self.source, self.target
        im = self.full
        for k in range(S.n):
            if T.power_of(im[k], S.p) != self(S.power[k]):
                return False
        for j in range(S.n):
            for i in range(j):
                if T.commutator(im[j], im[i]) != self(S.comm.get((j, i), S.identity)):
                    return False
        return True

    def key(self):
        return self.images


def make_homomorphism(source: PcPresentation, target: PcPresentation, images: Sequence[Element]) -> Homomorphism:
    f = Homomorphism(source, target, tuple(images))
    if not f.check():
        raise NotAHomomorphismError("images do not satisfy the source relations")
    return f


def quotient_presentation(P: PcPresentation, N: Subgroup) -> tuple[PcPresentation, Homomorphism]:
    if not is_normal(N):
        raise NotNormalError("quotient by a non-normal subgroup")
    drop = set(N.leads)
    keep = [k for k in range(P.n) if k not in drop]
    pos = {k: i for i, k in enumerate(keep)}
    m = len(keep)

    def project(g):
        g = _reduce_mod(P, N, g)
        out = [0] * m
        for k in keep:
            out[pos[k]] = g[k]
        return tuple(out)

    power = tuple(project(P.power[k]) for k in keep)
    comm = {}
    for a in range(m):
        for b in range(a):
            w = project(P.comm.get((keep[a], keep[b]), P.identity))
            if any(w):
                comm[(a, b)] = w
    Q = PcPresentation(P.p, m, power, comm)
    if not Q.is_consistent():
        raise PresentationError("quotient presentation came out inconsistent")
    images = [project(P.gen(k)) for k in range(P.n) if k not in P.defs]
    f = Homomorphism(P, Q, tuple(images))
    return Q, f


# --- abelian invariants ----------------------------------------------------------


def abelian_quotient_invariants(S: Subgroup | PcPresentation) -> AbelianInvariants:
    """Invariants of S/S' from the induced pc presentation of S."""
    if isinstance(S, PcPresentation):
        S = whole_group(S)
    P = S.P
    k = len(S.gens)
    if k == 0:
        return AbelianInvariants(())
    rows = []
    for i, s in enumerate(S.gens):
        ex = S.exponents(P.power_of(s, P.p))
        row = [-x for x in ex]
        row[i] += P.p
        rows.append(row)
    for i in range(k):
        for j in range(i + 1, k):
            ex = S.exponents(P.commutator(S.gens[j], S.gens[i]))
            if any(ex):
                rows.append(ex)
    return smith_invariants(rows, k, P.p)


def derived_series_factors(P: PcPresentation) -> list[AbelianInvariants]:
    return [abelian_quotient_invariants(D) for D in derived_series(P)[:-1]]


# --- subgroup enumeration ----------------------------------------------------------


def maximal_subgroups(S: Subgroup) -> list[Subgroup]:
    P = S.P
    F = frattini_subgroup(S)
    flead = set(F.leads)
    basis = [g for g in S.gens if _lead(g) not in flead]
    r = len(basis)
    out = []
    for H in enumerate_subspaces(r, 1, P.p):
        gens = list(F.gens)
        for row in H.rows:
            g = P.identity
            for b, x in zip(basis, row):
                if x:
                    g = P.multiply(g, P.power_of(b, x))
            gens.append(g)
        out.append(subgroup_closure(P, gens))
    return sorted(out)


def low_index_subgroups(P: PcPresentation, max_index: int) -> list[Subgroup]:
    G = whole_group(P)
    seen = {G.gens: G}
    layer = [G]
    while layer:
        nxt = []
        for S in layer:
            if S.index() * P.p > max_index:
                continue
            for M in maximal_subgroups(S):
                if M.gens not in seen:
                    seen[M.gens] = M
                    nxt.append(M)
        layer = nxt
    return sorted(seen.values())


def iter_subgroups_of_index(P: PcPresentation, idx: int):
    """Lazy version of ``subgroups_of_index`` (order of output not sorted)."""
    seen = set()

    def walk(S):
        if S.index() == idx:
            yield S
            return
        if S.index() > idx:
            return
        for M in maximal_subgroups(S):
            if M.gens not in seen:
                seen.add(M.gens)
                yield from walk(M)

    yield from walk(whole_group(P))


def subgroups_of_index(P: PcPresentation, idx: int) -> list[Subgroup]:
    return [S for S in low_index_subgroups(P, idx) if S.index() == idx]


# --- homomorphisms -------------------------------------------------------------------


def image(f: Homomorphism, S: Subgroup) -> Subgroup:
    return subgroup_closure(f.target, [f(g) for g in S.gens])


def _pair_table(f: Homomorphism):
    """Echelon table on (image, preimage) pairs, closed under powers and commutators.

    Returns the table keyed by the image's leading index, and the preimages
    that sifted to the identity (they generate the kernel as a normal subgroup).
    """
    S, T = f.source, f.target
    rows: dict[int, tuple[Element, Element]] = {}
    kern: list[Element] = []

    def sift(a, b):
        while True:
            k = _lead(a)
            if k < 0 or k not in rows:
                return a, b
            ra, rb = rows[k]
            c = a[k]
            ia, ib = T.inverse(ra), S.inverse(rb)
            for _ in range(c):
                a = T.multiply(ia, a)
                b = S.multiply(ib, b)

    queue = [(f.full[k], S.gen(k)) for k in range(S.n)]
    while queue:
        a, b = sift(*queue.pop())
        k = _lead(a)
        if k < 0:
            if any(b):
                kern.append(b)
            continue
        c = a[k]
        if c != 1:
            e = pow(c, -1, T.p)
            a, b = T.power_of(a, e), S.power_of(b, e)
        queue.append((T.power_of(a, T.p), S.power_of(b, S.p)))
        for ra, rb in list(rows.values()):
            queue.append((T.commutator(a, ra), S.commutator(b, rb)))
        rows[k] = (a, b)
    return rows, kern


def kernel(f: Homomorphism) -> Subgroup:
    S = f.source
    rows, kern = _pair_table(f)
    K = normal_closure(S, kern)
    assert K.order * f.target.p ** len(rows) == S.order, "kernel computation lost elements"
    return K


def preimage(f: Homomorphism, T: Subgroup) -> Subgroup:
    """``{q : f(q) in T}`` as the closure of the kernel and lifts of ``T`` ∩ im f."""
    S, Tg = f.source, f.target
    rows, kern = _pair_table(f)
    K = normal_closure(S, kern)

    def lift(t: Element) -> Element | None:
        out = S.identity
        while any(t):
            l = _lead(t)
            if l not in rows:
                return None
            ra, rb = rows[l]
            c = t[l]
            t = Tg.multiply(Tg.power_of(Tg.inverse(ra), c), t)
            out = S.multiply(out, S.power_of(rb, c))
        return out

    gens = list(K.gens)
    for t in T.elements():
        u = lift(t)
        if u is not None:
            gens.append(u)
    return subgroup_closure(S, gens)


def _frattini_coords(P: PcPresentation):
    """Linear map P -> P/Phi(P) as a function on elements."""
    F = frattini_subgroup(whole_group(P))
    flead = set(F.leads)
    free = [k for k in range(P.n) if k not in flead]

    def coords(g: Element) -> tuple[int, ...]:
        g = _reduce_mod(P, F, g)
        return tuple(g[k] for k in free)

    return coords, len(free)


def _rank_mod_p(vectors: Sequence[Sequence[int]], p: int) -> int:
    from .linalg import MatGFp, rank

    if not vectors:
        return 0
    return rank(MatGFp.from_rows(p, vectors))


def iter_surjections(Q: PcPresentation, P: PcPresentation, *, element_orders: bool = False):
    """Yield the surjective homomorphisms Q -> P in a deterministic order."""
    if Q.p != P.p:
        return
    free_q = [k for k in range(Q.n) if k not in Q.defs]
    coords, dP = _frattini_coords(P)
    if len(free_q) < dP:
        return
    elems = whole_group(P).elements()
    elems.sort()
    cands = []
    for k in free_q:
        pool = elems
        if element_orders:
            o = Q.element_order(Q.gen(k))
            pool = [g for g in elems if P.element_order(g) == o]
        cands.append(pool)
    cvec = {g: coords(g) for g in elems}
    for choice in itertools.product(*cands):
        if _rank_mod_p([cvec[g] for g in choice], P.p) < dP:
            continue
        f = Homomorphism(Q, P, choice)
        if f.check():
            yield f


def all_surjections(Q: PcPresentation, P: PcPresentation) -> list[Homomorphism]:
    return list(iter_surjections(Q, P))


def has_quotient(Q: PcPresentation, P: PcPresentation) -> bool:
    if P.order > Q.order:
        return False
    if P.order == Q.order:
        return is_isomorphic(Q, P)
    return next(iter_surjections(Q, P), None) is not None


def fingerprint(P: PcPresentation) -> tuple:
    """Cheap isomorphism invariants."""
    return (
        P.p,
        P.n,
        p_class(P),
        tuple(S.order for S in lower_p_central_series(P)),
        tuple(derived_series_factors(P)),
    )


def is_isomorphic(Q: PcPresentation, P: PcPresentation) -> bool:
    if Q.order != P.order or Q.p != P.p:
        return False
    if Q.order > ISO_ORDER_LIMIT:
        raise SizeLimitError(f"brute-force isomorphism limited to order <= {ISO_ORDER_LIMIT}")
    if fingerprint(Q) != fingerprint(P):
        return False
    return next(iter_surjections(Q, P, element_orders=True), None) is not None
