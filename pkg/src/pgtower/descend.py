"""Immediate descendants via orbits of allowable subgroups of the p-multiplicator."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from . import structure
from .linalg import MatGFp, rank, vector_space
from .pcover import CoverData, p_covering_group
from .pcp import Element, PcPresentation, PresentationError, from_relations, relation_order

DEFAULT_MAX_ORDER = 2**14
DEFAULT_MAX_CLASS = 8


class CapExceededError(RuntimeError):
    pass


class NotElementaryAbelianError(ValueError):
    pass


# --- automorphisms -----------------------------------------------------------


def _apply(G: PcPresentation, full: Sequence[Element], e: Element) -> Element:
    out = G.identity
    for k, x in enumerate(e):
        if x:
            out = G.multiply(out, full[k] if x == 1 else G.power_of(full[k], x))
    return out


class Automorphism:
    """Automorphism stored by the images of all generators.

    Composition is left-to-right: ``a * b`` applies ``a`` first.
    """

    __slots__ = ("G", "full")

    def __init__(self, G: PcPresentation, full: Sequence[Element]):
        self.G = G
        self.full = tuple(full)

    @classmethod
    def from_images(cls, G: PcPresentation, images: Sequence[Element]) -> "Automorphism":
        return cls(G, G.evaluate([tuple(x) for x in images], G))

    @classmethod
    def identity(cls, G: PcPresentation) -> "Automorphism":
        return cls(G, [G.gen(k) for k in range(G.n)])

    @property
    def images(self) -> tuple[Element, ...]:
        return tuple(self.full[k] for k in range(self.G.n) if k not in self.G.defs)

    def __call__(self, e: Element) -> Element:
        return _apply(self.G, self.full, e)

    def __mul__(self, other: "Automorphism") -> "Automorphism":
        return Automorphism(self.G, [other(x) for x in self.full])

    def __eq__(self, other):
        return isinstance(other, Automorphism) and self.full == other.full

    def __hash__(self):
        return hash(self.full)

    def is_identity(self) -> bool:
        G = self.G
        return all(x == G.gen(k) for k, x in enumerate(self.full))

    def inverse(self) -> "Automorphism":
        """Solve layer by layer in the weight filtration."""
        G = self.G
        layers = _layers(G)
        inv_full = []
        for k in range(G.n):
            inv_full.append(_preimage_under(self, layers, G.gen(k)))
        return Automorphism(G, inv_full)

    def power(self, k: int) -> "Automorphism":
        out = Automorphism.identity(self.G)
        for _ in range(k):
            out = out * self
        return out

    def is_homomorphism(self) -> bool:
        f = structure.Homomorphism(self.G, self.G, self.images)
        return f.check()

    def frattini_matrix(self) -> tuple:
        G = self.G
        d = G.d
        return tuple(tuple(self.full[i][:d]) for i in range(d))


def _layers(G: PcPresentation) -> list[list[int]]:
    w = G.gen_weights()
    c = max(w) if w else 0
    return [[k for k in range(G.n) if w[k] == j] for j in range(1, c + 1)]


def _solve_mod_p(rows: list[list[int]], target: list[int], p: int) -> list[int]:
    """x with sum x_i rows[i] = target (rows square invertible)."""
    k = len(rows)
    # augmented transpose: columns are rows
    A = [[rows[i][j] % p for i in range(k)] + [target[j] % p] for j in range(k)]
    r = 0
    for col in range(k):
        piv = next((i for i in range(r, k) if A[i][col]), None)
        if piv is None:
            raise ValueError("singular layer action")
        A[r], A[piv] = A[piv], A[r]
        inv = pow(A[r][col], -1, p)
        A[r] = [x * inv % p for x in A[r]]
        for i in range(k):
            if i != r and A[i][col]:
                c = A[i][col]
                A[i] = [(x - c * y) % p for x, y in zip(A[i], A[r])]
        r += 1
    return [A[i][k] for i in range(k)]


def _preimage_under(a: Automorphism, layers, g: Element) -> Element:
    G = a.G
    p = G.p
    e = [0] * G.n
    for layer in layers:
        if not layer:
            continue
        rows = [[a.full[k][t] for t in layer] for k in layer]
        x = _solve_mod_p(rows, [g[t] for t in layer], p)
        part = G.identity
        for k, xk in zip(layer, x):
            if xk:
                e[k] = xk
                part = G.multiply(part, G.power_of(a.full[k], xk))
        g = G.multiply(G.inverse(part), g)
    if any(g):
        raise ValueError("map is not bijective")
    return tuple(e)


@dataclass(eq=False)
class AutSet:
    """Generating automorphisms of a group, each given by minimal-generator images."""

    group: PcPresentation
    gens: list  # list of Automorphism
    verified: bool = False

    @classmethod
    def from_images(cls, G: PcPresentation, images: Iterable[Sequence[Element]], *, check: bool = True) -> "AutSet":
        auts = [Automorphism.from_images(G, im) for im in images]
        s = cls(G, auts)
        if check:
            s.verify()
        return s

    def verify(self) -> None:
        for a in self.gens:
            if not a.is_homomorphism():
                raise ValueError("generator is not a homomorphism")
            a.inverse()  # raises if not bijective
        self.verified = True

    def images(self) -> list[tuple[Element, ...]]:
        return [a.images for a in self.gens]

    def closure(self, limit: int = 100_000) -> list[Automorphism]:
        """All elements of the generated group (small groups only)."""
        one = Automorphism.identity(self.group)
        seen = {one}
        frontier = [one]
        while frontier:
            nxt = []
            for x in frontier:
                for g in self.gens:
                    y = x * g
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
                        if len(seen) > limit:
                            raise CapExceededError("automorphism closure too large")
            frontier = nxt
        return sorted(seen, key=lambda a: a.full)

    def __len__(self):
        return len(self.gens)


def _is_elementary_abelian(P: PcPresentation) -> bool:
    return not any(any(w) for w in P.power) and not P.comm


def root_automorphisms(P: PcPresentation) -> AutSet:
    """Standard generators of GL(d,p) acting on an elementary abelian group."""
    if not _is_elementary_abelian(P):
        raise NotElementaryAbelianError("root must be elementary abelian")
    d, p = P.n, P.p
    gens = []
    if d == 1:
        if p > 2:
            gens.append([(_primitive_root(p),)])
        return AutSet.from_images(P, gens)
    # diagonal by a primitive root (trivial for p=2)
    if p > 2:
        a = _primitive_root(p)
        gens.append([tuple(a if j == 0 else 0 for j in range(d))] + [P.gen(i) for i in range(1, d)])
    # cyclic shift x_i -> x_{i+1}, x_d -> x_1^-1, and the transvection x_1 -> x_1 x_2
    im = [P.gen(i + 1) for i in range(d - 1)]
    im.append(tuple(p - 1 if j == 0 else 0 for j in range(d)))
    t = [P.gen(i) for i in range(d)]
    t[0] = tuple(1 if j < 2 else 0 for j in range(d))
    gens.append(im)
    gens.append(t)
    return AutSet.from_images(P, gens)


def _primitive_root(p: int) -> int:
    for a in range(2, p):
        if all(pow(a, (p - 1) // q, p) != 1 for q in _prime_factors(p - 1)):
            return a
    return 1


def _prime_factors(n: int) -> list[int]:
    out, q = [], 2
    while q * q <= n:
        while n % q == 0:
            out.append(q)
            n //= q
        q += 1
    if n > 1:
        out.append(n)
    return sorted(set(out))


# --- action on the multiplicator -----------------------------------------------


def cover_images(D: CoverData, images: Sequence[Element], target: PcPresentation) -> list[Element]:
    """Images of all cover generators under the hom G* -> target given on minimal generators."""
    G = D.group
    parent = G.evaluate(list(images), target)
    out = list(parent)
    p = G.p
    for key in D.tail_keys:
        if key[0] == "pow":
            lhs = target.power_of(parent[key[1]], p)
        else:
            lhs = target.commutator(parent[key[1]], parent[key[2]])
        rhs = _apply(target, parent, G.relation_rhs(key))
        out.append(target.multiply(target.inverse(rhs), lhs))
    return out


def extend_to_multiplicator(aut: Automorphism, D: CoverData) -> list:
    """Matrix (rows = images of the multiplicator basis) of the extension of ``aut``."""
    C = D.cover
    n = D.group.n
    lifts = [tuple(x) + (0,) * D.m for x in aut.images]
    imgs = cover_images(D, lifts, C)
    rows = []
    for a in range(D.m):
        e = imgs[n + a]
        if any(e[:n]):
            raise PresentationError("tail image left the multiplicator")
        rows.append(D.space.from_list(e[n:]))
    return rows


def _act(space, mat, U: tuple) -> tuple:
    return space.echelon(space.matvec(v, mat) for v in U)


# --- allowable subgroups -------------------------------------------------------


def _complement_positions(space, basis) -> list[int]:
    piv = {space.pivot(b) for b in basis}
    return [i for i in range(space.dim) if i not in piv]


def iter_allowable(D: CoverData, step: int):
    """Allowable subspaces of a given step, canonical echelon tuples."""
    space = D.space
    N = D.nucleus
    nu = len(N)
    if not 1 <= step <= nu:
        return
    comp = [space.unit(i) for i in _complement_positions(space, N)]
    nspace = vector_space(nu, space.p)
    for wdim_basis in _subspaces(nspace, nu - step):
        W = [_combine(space, N, nspace.to_list(w)) for w in wdim_basis]
        Wech = space.echelon(W)
        K = [space.reduce(b, Wech) for b in N]
        K = [k for k in space.echelon(K) if k]
        Kvecs = list(space.all_vectors(K))
        for shifts in itertools.product(Kvecs, repeat=len(comp)):
            rows = list(Wech) + [space.add(c, s) for c, s in zip(comp, shifts)]
            yield space.echelon(rows)


def _combine(space, basis, coeffs):
    v = space.zero
    for c, b in zip(coeffs, basis):
        if c:
            v = space.add(v, space.scale(b, c))
    return v


def _subspaces(space, dim: int):
    from .linalg import enumerate_subspaces

    n = space.dim
    for M in enumerate_subspaces(n, n - dim, space.p):
        yield space.echelon(space.from_list(r) for r in M.rows)


def count_allowable(D: CoverData, step: int) -> int:
    from .linalg import gaussian_binomial

    nu = len(D.nucleus)
    if not 1 <= step <= nu:
        return 0
    return gaussian_binomial(nu, step, D.space.p) * D.space.p ** (step * (D.m - nu))


def allowable_subgroups(D: CoverData) -> list[tuple]:
    out = []
    for s in range(1, len(D.nucleus) + 1):
        out.extend(sorted(iter_allowable(D, s)))
    return out


# --- automorphism group reduction ------------------------------------------------


class _Sifter:
    """Drops generators already in the group generated by the kept ones.

    The top part is the image in GL(d,p); the kernel is a p-group handled
    layer by layer through the additive invariants z_i = x_i^-1 a(x_i).
    """

    def __init__(self, G: PcPresentation):
        self.G = G
        self.d = G.d
        self.layers = _layers(G)
        self.top: dict = {}  # frattini matrix -> (aut, inverse)
        self.top_gens: list = []
        self.basis: list[dict] = [dict() for _ in self.layers]  # layer -> pivot -> (vec, aut, inv)
        self.kept: list = []
        one = Automorphism.identity(G)
        self.top[one.frattini_matrix()] = (one, one)

    def _layer_vec(self, a: Automorphism, j: int):
        G = self.G
        cols = self.layers[j]
        v = []
        for i in range(self.d):
            z = G.multiply(G.inverse(G.gen(i)), a.full[i])
            v.extend(z[t] for t in cols)
        return v

    def _top_closure(self):
        one = Automorphism.identity(self.G)
        top = {one.frattini_matrix(): (one, one)}
        frontier = [one]
        while frontier:
            nxt = []
            for x in frontier:
                for g, ginv in self.top_gens:
                    y = x * g
                    key = y.frattini_matrix()
                    if key not in top:
                        top[key] = (y, ginv * top[x.frattini_matrix()][1])
                        nxt.append(y)
            frontier = nxt
        self.top = top

    def add(self, a: Automorphism) -> None:
        key = a.frattini_matrix()
        if key not in self.top:
            inv = a.inverse()
            self.top_gens.append((a, inv))
            self.kept.append(a)
            self._top_closure()
            return
        rep, rep_inv = self.top[key]
        self._sift_kernel(a * rep_inv)

    def _sift_kernel(self, a: Automorphism) -> None:
        p = self.G.p
        for j in range(1, len(self.layers)):
            while True:
                v = self._layer_vec(a, j)
                if not any(v):
                    break
                piv = next(i for i, x in enumerate(v) if x)
                if piv in self.basis[j]:
                    bv, b, binv = self.basis[j][piv]
                    c = v[piv] * pow(bv[piv], -1, p) % p
                    for _ in range(c):
                        a = a * binv
                    continue
                self.basis[j][piv] = (v, a, a.inverse())
                self.kept.append(a)
                return
        # a acts trivially on every layer: identity


def reduce_generators(G: PcPresentation, auts: Iterable[Automorphism]) -> list[Automorphism]:
    s = _Sifter(G)
    for a in auts:
        if not a.is_identity():
            s.add(a)
    return s.kept


# --- descendants -----------------------------------------------------------------


@dataclass(eq=False)
class Descendant:
    presentation: PcPresentation
    parent: PcPresentation
    U: tuple
    step: int
    cover: CoverData
    new_defs: list  # relation keys defining the new generators
    _orbit: object = field(default=None, repr=False)
    _auts: AutSet | None = field(default=None, repr=False)

    @property
    def automorphisms(self) -> AutSet:
        if self._auts is None:
            self._auts = self._orbit.descendant_auts(self)
        return self._auts

    def projection(self) -> structure.Homomorphism:
        P = self.parent
        Q = self.presentation
        images = [Q.gen(k)[: P.n] for k in range(Q.n) if k not in Q.defs]
        return structure.Homomorphism(Q, P, tuple(images))

    def project(self, e: Element) -> Element:
        return tuple(e[: self.parent.n])


def descendant_presentation(D: CoverData, U: tuple) -> tuple[PcPresentation, list, Callable]:
    """Quotient G*/U; new generators defined by the first independent nucleus relations."""
    G = D.group
    space = D.space
    p = G.p
    n = G.n
    Uech = space.echelon(U)
    chosen = []  # (key, reduced value)
    span: tuple = ()
    for key, v in D.nucleus_relations:
        r = space.reduce(v, Uech)
        if space.reduce(r, span) != space.zero:
            chosen.append((key, r))
            span = space.echelon(list(span) + [r])
    s = len(chosen)
    # coordinates of vectors mod U in the chosen basis
    aug_space = vector_space(space.dim + s, p)

    aug = []
    for a, (_, r) in enumerate(chosen):
        aug.append(aug_space.from_list(space.to_list(r) + [int(b == a) for b in range(s)]))
    aug_ech = _echelon_first(aug_space, aug, space.dim)

    def coords(v) -> tuple:
        r = space.reduce(v, Uech)
        x = aug_space.from_list(space.to_list(r) + [0] * s)
        for row in aug_ech:
            piv = aug_space.pivot(row)
            c = aug_space.coord(x, piv)
            if c:
                x = aug_space.add(x, aug_space.scale(row, (p - c) % p))
        lst = aug_space.to_list(x)
        if any(lst[: space.dim]):
            raise PresentationError("vector outside span mod U")
        return tuple((-y) % p for y in lst[space.dim :])

    rels = {}
    for key in relation_order(n):
        rels[key] = tuple(G.relation_rhs(key)) + coords(D.values[key])
    defs = dict(G.defs)
    for a, (key, _) in enumerate(chosen):
        defs[n + a] = key
    w = tuple(G.gen_weights()) + (D.p_class + 1,) * s
    Q = from_relations(p, n + s, rels, weights=w, defs=defs)
    return Q, [k for k, _ in chosen], coords


def _echelon_first(space, rows, ncols: int):
    """Echelonize ``rows`` with pivots restricted to the first ``ncols`` coordinates."""
    out = []
    for v in rows:
        for b in out:
            piv = space.pivot(b)
            c = space.coord(v, piv)
            if c:
                v = space.add(v, space.scale(b, (space.p - c) % space.p))
        piv = space.pivot(v)
        if piv < 0 or piv >= ncols:
            continue
        inv = pow(space.coord(v, piv), -1, space.p)
        v = space.scale(v, inv)
        out = [space.add(b, space.scale(v, (space.p - space.coord(b, piv)) % space.p)) if space.coord(b, piv) else b for b in out]
        out.append(v)
    return out


class _Orbit:
    """Orbit of one allowable subspace with a Schreier tree for its stabilizer."""

    def __init__(self, action: "_Action", rep: tuple, elements: dict):
        self.action = action
        self.rep = rep
        self.tree = elements  # U -> (parent U, generator index) ; rep -> None

    def __len__(self):
        return len(self.tree)

    def transversal(self) -> dict:
        """Automorphism t_U with U = rep . t_U, and its inverse, for every orbit element."""
        gens = self.action.gens
        invs = self.action.inverses()
        G = self.action.D.group
        one = Automorphism.identity(G)
        out = {self.rep: (one, one)}
        order = sorted(self.tree, key=lambda u: self.action.depth[u])
        for u in order:
            if u == self.rep:
                continue
            par, g = self.tree[u]
            t, tinv = out[par]
            out[u] = (t * gens[g], invs[g] * tinv)
        return out

    def stabilizer(self) -> list[Automorphism]:
        A = self.action
        gens = A.gens
        tr = self.transversal()
        schreier = []
        for u, (t, _) in tr.items():
            for gi, g in enumerate(gens):
                v = A.image(u, gi)
                if self.tree.get(v) == (u, gi):
                    continue
                s = t * g * tr[v][1]
                if not s.is_identity():
                    schreier.append(s)
        return reduce_generators(A.D.group, schreier)

    def descendant_auts(self, desc: Descendant) -> AutSet:
        Q = desc.presentation
        P = desc.parent
        d = P.d
        pad = (0,) * (Q.n - P.n)
        auts = []
        for a in self.stabilizer():
            auts.append(Automorphism.from_images(Q, [tuple(x) + pad for x in a.images]))
        for i in range(d):
            for b in range(P.n, Q.n):
                im = [Q.gen(k) for k in range(d)]
                im[i] = Q.multiply(Q.gen(i), Q.gen(b))
                auts.append(Automorphism.from_images(Q, im))
        return AutSet(Q, reduce_generators(Q, auts))


class _Action:
    def __init__(self, D: CoverData, auts: AutSet):
        self.D = D
        self.gens = list(auts.gens)
        self.mats = [extend_to_multiplicator(a, D) for a in self.gens]
        self._invs = None
        self.depth: dict = {}

    def inverses(self):
        if self._invs is None:
            self._invs = [a.inverse() for a in self.gens]
        return self._invs

    def image(self, U: tuple, gi: int) -> tuple:
        return _act(self.D.space, self.mats[gi], U)

    def orbits(self, subspaces: Iterable[tuple], accept: Callable | None = None) -> list[_Orbit]:
        """Partition ``subspaces`` (a union of orbits) into orbits with minimal representatives."""
        pool = sorted(set(subspaces))
        seen: set = set()
        out = []
        for U in pool:
            if U in seen:
                continue
            tree = {U: None}
            self.depth[U] = 0
            frontier = [U]
            while frontier:
                nxt = []
                for u in frontier:
                    for gi in range(len(self.gens)):
                        v = self.image(u, gi)
                        if v not in tree:
                            tree[v] = (u, gi)
                            self.depth[v] = self.depth[u] + 1
                            nxt.append(v)
                frontier = nxt
            seen.update(tree)
            # pool is sorted, so U is the orbit minimum
            out.append(_Orbit(self, U, tree))
        return out


def check_caps(P: PcPresentation, max_order: int | None, max_class: int | None) -> None:
    if max_order is not None and P.order > max_order:
        raise CapExceededError(f"order {P.order} exceeds cap {max_order}")
    if max_class is not None and P.p_class > max_class:
        raise CapExceededError(f"class {P.p_class} exceeds cap {max_class}")


def immediate_descendants(
    P: PcPresentation,
    auts: AutSet,
    *,
    steps: Iterable[int] | None = None,
    max_order: int | None = DEFAULT_MAX_ORDER,
    max_class: int | None = DEFAULT_MAX_CLASS,
    cover: CoverData | None = None,
) -> list[Descendant]:
    """One descendant per Aut-orbit of allowable subgroups, ordered by (step, orbit minimum)."""
    D = cover if cover is not None else p_covering_group(P)
    nu = len(D.nucleus)
    if nu == 0:
        return []
    if max_class is not None and D.p_class + 1 > max_class:
        raise CapExceededError(f"descendants would have class {D.p_class + 1} > cap {max_class}")
    action = _Action(D, auts)
    out = []
    for s in sorted(steps) if steps is not None else range(1, nu + 1):
        if not 1 <= s <= nu:
            continue
        if max_order is not None and P.order * P.p**s > max_order:
            raise CapExceededError(f"step-{s} descendants would exceed order cap {max_order}")
        for orb in action.orbits(iter_allowable(D, s)):
            Q, new_defs, _ = descendant_presentation(D, orb.rep)
            out.append(Descendant(Q, P, orb.rep, s, D, new_defs, _orbit=orb))
    return out


def is_terminal(P: PcPresentation) -> bool:
    return len(p_covering_group(P).nucleus) == 0


# --- locating a given group in the descendant tree ------------------------------------


@dataclass
class Identification:
    """Canonical path of a group: the orbit minimum chosen at each class."""

    path: list  # (step, U) per level below the root
    presentation: PcPresentation  # the tree's presentation of the group
    automorphisms: AutSet
    iso_images: tuple  # images in the input group of the tree group's minimal generators


def _truncate(X: PcPresentation, e: Element, w: int) -> Element:
    wt = X.gen_weights()
    return tuple(x if wt[k] <= w else 0 for k, x in enumerate(e))


def identify(X: PcPresentation, *, check: bool = True) -> Identification:
    """Walk the tree from the elementary abelian root down to ``X``.

    At each class the cover of the current tree group is mapped onto the next
    quotient of ``X``; the kernel is an allowable subgroup whose orbit
    minimum names the child. The composed map is an explicit isomorphism.
    """
    X = X.with_weights()
    if not structure.is_weighted(X):
        raise PresentationError("identification needs a weighted presentation")
    d = X.d
    if any(k in X.defs for k in range(d)):
        raise PresentationError("minimal generators must come first")
    wt = X.gen_weights()
    c = max(wt)
    N = from_relations(X.p, d, {}, weights=(1,) * d, defs={})
    auts = root_automorphisms(N)
    phi = [X.gen(i) for i in range(d)]
    path = []
    for j in range(1, c):
        D = p_covering_group(N)
        img = cover_images(D, phi, X)
        layer = [k for k in range(X.n) if wt[k] == j + 1]
        rows = []
        for a in range(D.m):
            e = _truncate(X, img[N.n + a], j + 1)
            if any(x for k, x in enumerate(e) if wt[k] <= j):
                raise PresentationError("multiplicator image outside the last layer")
            rows.append([e[k] for k in layer])
        # kernel of the row map M -> layer
        Mt = MatGFp.from_rows(X.p, [list(col) for col in zip(*rows)], D.m) if layer else MatGFp.zero(X.p, 0, D.m)
        from .linalg import nullspace

        K = nullspace(Mt)
        U = D.space.echelon(D.space.from_list(r) for r in K.rows)
        step = D.m - len(U)
        if step != len(layer):
            raise PresentationError("quotient is not an immediate descendant of the tree group")
        action = _Action(D, auts)
        tree = {U: None}
        frontier = [U]
        while frontier:
            nxt = []
            for u in frontier:
                for gi in range(len(action.gens)):
                    v = action.image(u, gi)
                    if v not in tree:
                        tree[v] = (u, gi)
                        nxt.append(v)
            frontier = nxt
        U0 = min(tree)
        # transversal element t with U . t = U0
        t = Automorphism.identity(N)
        chain = []
        v = U0
        while tree[v] is not None:
            u, gi = tree[v]
            chain.append(gi)
            v = u
        for gi in reversed(chain):
            t = t * action.gens[gi]
        tinv = t.inverse()
        parent_img = img[: N.n]
        phi = [_apply(X, parent_img, tinv.images[i]) for i in range(d)]
        orb = action.orbits(tree.keys())[0]
        Q, new_defs, _ = descendant_presentation(D, orb.rep)
        desc = Descendant(Q, N, orb.rep, step, D, new_defs, _orbit=orb)
        path.append((step, orb.rep))
        N = Q
        auts = desc.automorphisms
    iso = structure.Homomorphism(N, X, tuple(phi))
    if check:
        if N.order != X.order or not iso.check():
            raise PresentationError("identification did not produce an isomorphism")
        if structure.image(iso, structure.whole_group(N)).order != X.order:
            raise PresentationError("identification map is not surjective")
    return Identification(path, N, auts, tuple(phi))
