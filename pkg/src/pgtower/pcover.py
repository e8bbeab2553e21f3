"""p-covering group, p-multiplicator and nucleus of a weighted pc group."""

from __future__ import annotations

from dataclasses import dataclass

from . import structure
from .linalg import vector_space
from .pcp import PcPresentation, PresentationError, from_relations, relation_order


@dataclass(eq=False)
class CoverData:
    """The p-cover ``G*`` with multiplicator coordinates.

    ``cover`` has the parent generators first, then one generator per
    surviving tail. Multiplicator vectors live in ``space`` (GF(p)^m, one
    coordinate per surviving tail). ``values[key]`` is the multiplicator part
    of the right-hand side of relation ``key`` in the cover.
    """

    group: PcPresentation
    cover: PcPresentation
    m: int
    space: object
    values: dict
    tail_keys: list  # relation key each surviving tail was attached to
    nucleus: tuple  # echelon basis
    nucleus_relations: list  # (key, value) for relations whose values span the nucleus
    p_class: int

    @property
    def multiplicator_rank(self) -> int:
        return self.m

    @property
    def nucleus_rank(self) -> int:
        return len(self.nucleus)

    def multiplicator(self) -> structure.Subgroup:
        C = self.cover
        n = self.group.n
        return structure.subgroup_closure(C, [C.gen(n + a) for a in range(self.m)])

    def nucleus_subgroup(self) -> structure.Subgroup:
        C = self.cover
        n = self.group.n
        gens = []
        for v in self.nucleus:
            e = [0] * C.n
            for a, x in enumerate(self.space.to_list(v)):
                e[n + a] = x
            gens.append(tuple(e))
        return structure.subgroup_closure(C, gens)

    def split(self, e) -> tuple[tuple, object]:
        """Split a cover element into (parent part, multiplicator vector)."""
        n = self.group.n
        return tuple(e[:n]), self.space.from_list(e[n:])


def p_covering_group(G: PcPresentation) -> CoverData:
    if not G.is_consistent():
        raise PresentationError("p-cover of an inconsistent presentation")
    n, p = G.n, G.p
    free = [k for k in range(n) if k not in G.defs]
    if free != list(range(len(free))):
        raise PresentationError("minimal generators must come first")
    for k, key in G.defs.items():
        ops = key[1:]
        if any(o >= k for o in ops):
            raise PresentationError(f"definition of x{k + 1} uses a later generator")
    weights = G.gen_weights()
    c = max(weights) if weights else 0
    d = len(free)

    defining = set(G.defs.values())
    keys = [k for k in relation_order(n) if k not in defining]
    T = len(keys)
    # tailed presentation: one central generator of order p per non-defining relation
    rels = {}
    for key in relation_order(n):
        rhs = list(G.relation_rhs(key)) + [0] * T
        if key not in defining:
            rhs[n + keys.index(key)] = 1
        rels[key] = tuple(rhs)
    big = from_relations(p, n + T, rels, weights=(), defs={})
    tspace = vector_space(T, p)
    diffs = []
    for label, left, right in big.consistency_pairs():
        if left[:n] != right[:n]:
            raise PresentationError(f"parent presentation inconsistent at {label}")
        if left[n:] != right[n:]:
            diffs.append(tspace.add(tspace.from_list(left[n:]), tspace.scale(tspace.from_list(right[n:]), p - 1)))
    relns = tspace.echelon(diffs)
    pivots = {tspace.pivot(r): r for r in relns}
    survivors = [a for a in range(T) if a not in pivots]
    m = len(survivors)
    space = vector_space(m, p)
    spos = {a: i for i, a in enumerate(survivors)}

    def tail_value(a: int):
        if a in spos:
            return space.unit(spos[a])
        row = tspace.to_list(pivots[a])
        out = [0] * m
        for b, x in enumerate(row):
            if b != a and x:
                out[spos[b]] = (-x) % p
        return space.from_list(out)

    values = {}
    crels = {}
    for key in relation_order(n):
        v = tail_value(keys.index(key)) if key not in defining else space.zero
        values[key] = v
        crels[key] = tuple(G.relation_rhs(key)) + tuple(space.to_list(v))
    cover = from_relations(p, n + m, crels, weights=tuple(weights) + (c + 1,) * m)

    nuc_rel = []
    for key in relation_order(n):
        if key in defining:
            continue
        if key[0] == "pow" and weights[key[1]] == c:
            nuc_rel.append((key, values[key]))
        elif key[0] == "comm" and weights[key[1]] == c and key[2] < d:
            nuc_rel.append((key, values[key]))
    nucleus = space.echelon(v for _, v in nuc_rel)
    return CoverData(
        group=G,
        cover=cover,
        m=m,
        space=space,
        values=values,
        tail_keys=[keys[a] for a in survivors],
        nucleus=nucleus,
        nucleus_relations=nuc_rel,
        p_class=c,
    )
