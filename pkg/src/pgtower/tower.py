"""Constrained descendant search: lists of pairs, AQI pruning, candidates."""

from __future__ import annotations

import itertools
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import structure
from .descend import (
    DEFAULT_MAX_CLASS,
    DEFAULT_MAX_ORDER,
    AutSet,
    Automorphism,
    immediate_descendants,
    reduce_generators,
    root_automorphisms,
)
from .linalg import AbelianInvariants, is_quotient
from .pcover import p_covering_group
from .pcp import Element, PcPresentation, parse_presentation, serialize


class ConfigError(ValueError):
    pass


# --- constraint data -----------------------------------------------------------


@dataclass(frozen=True)
class Slot:
    """One constrained subgroup of a reference quotient.

    ``gens`` fixes the subgroup; without it the slot is matched to a subgroup
    of the given ``index`` by assignment. ``target`` None means unknown.
    """

    label: str
    target: AbelianInvariants | None
    index: int | None = None
    gens: tuple[str, ...] | None = None


@dataclass
class ConstraintLattice:
    label: str
    reference: PcPresentation
    slots: list

    def assignments(self) -> list[tuple]:
        """Distinct (subgroup, target) families over all slot assignments.

        Each family is a tuple of (target, Subgroup), sorted canonically.
        Assignments that differ only by swapping equal-target slots coincide.
        """
        R = self.reference
        fixed = {}
        for i, s in enumerate(self.slots):
            if s.gens is not None:
                fixed[i] = _subgroup_from_words(R, s.gens)
        free_by_index: dict[int, list[int]] = {}
        for i, s in enumerate(self.slots):
            if s.gens is None:
                if s.index is None:
                    raise ConfigError(f"slot {s.label!r} needs gens or index")
                free_by_index.setdefault(s.index, []).append(i)
        used = set(fixed.values())
        options = []
        for idx, slot_ids in sorted(free_by_index.items()):
            pool = [S for S in structure.subgroups_of_index(R, idx) if S not in used]
            if len(pool) != len(slot_ids):
                raise ConfigError(
                    f"lattice {self.label}: {len(slot_ids)} slots of index {idx} but {len(pool)} free subgroups"
                )
            options.append([(slot_ids, perm) for perm in itertools.permutations(pool)])
        out = []
        seen = set()
        for combo in itertools.product(*options):
            chosen = dict(fixed)
            for slot_ids, perm in combo:
                for i, S in zip(slot_ids, perm):
                    chosen[i] = S
            fam = make_family((self.slots[i].target, chosen[i]) for i in range(len(self.slots)))
            if family_key(fam) not in seen:
                seen.add(family_key(fam))
                out.append(fam)
        return out


def _subgroup_from_words(P: PcPresentation, words: Sequence[str]) -> structure.Subgroup:
    from .pcp import _parse_word

    gens = [P.collect(_parse_word(w, P.n, {})) for w in words]
    return structure.subgroup_closure(P, gens)


def _tkey(t: AbelianInvariants | None):
    return (1, ()) if t is None else (0, t.orders)


def make_family(entries: Iterable[tuple]) -> tuple:
    return tuple(sorted(entries, key=lambda e: (_tkey(e[0]), e[1].index(), e[1].gens)))


def family_key(fam: tuple) -> tuple:
    return tuple((_tkey(t), S.gens) for t, S in fam)


# --- search state ----------------------------------------------------------------


@dataclass
class Node:
    id: int
    level: int
    parent: int | None
    orbit: int  # index among the parent's descendants
    step: int
    presentation: PcPresentation
    families: list  # per lattice: list of families
    candidate: bool
    terminal: bool | None = None
    unfinished: bool = False
    auts: AutSet | None = field(default=None, repr=False)
    children: list = field(default_factory=list)
    U: tuple = ()

    @property
    def order(self) -> int:
        return self.presentation.order

    @property
    def pairs(self) -> int:
        out = 1
        for fams in self.families:
            out *= len(fams)
        return out


@dataclass
class SearchResult:
    stage: str
    nodes: list  # all Nodes that occurred in some list, by id
    levels: dict  # level -> list of node ids
    candidates: list  # node ids
    status: str  # "terminated", "cap" or "level-limit"
    roots: list
    notes: list = field(default_factory=list)
    survivors: list = field(default_factory=list)  # narrowed root-child node ids
    filtered_survivors: list = field(default_factory=list)
    filtered_candidates: list = field(default_factory=list)

    def node(self, i: int) -> Node:
        return self.nodes[i]

    @property
    def terminated(self) -> bool:
        return self.status == "terminated"

    def subtree(self, i: int) -> list[int]:
        out, stack = [], [i]
        while stack:
            j = stack.pop()
            out.append(j)
            stack.extend(self.nodes[j].children)
        return out

    def listed(self, level: int) -> list[int]:
        """Non-terminal groups listed at ``level``."""
        return [i for i in self.levels.get(level, []) if not self.nodes[i].terminal or self.nodes[i].candidate]

    def narrowed(self, level: int) -> list[int]:
        """Groups at ``level`` whose subtree holds a candidate or was cut by a cap."""
        out = []
        for i in self.levels.get(level, []):
            sub = self.subtree(i)
            if any(self.nodes[j].candidate or self.nodes[j].unfinished for j in sub):
                out.append(i)
        return out


# --- pair construction ---------------------------------------------------------------


def automorphism_group(P: PcPresentation) -> AutSet:
    """Generators of Aut(P) by brute force over generator images (small P only)."""
    if not P.comm and not any(any(w) for w in P.power):
        return root_automorphisms(P)
    auts = []
    for f in structure.iter_surjections(P, P, element_orders=True):
        auts.append(Automorphism(P, f.full))
    return AutSet(P, reduce_generators(P, auts))


def _apply_to_family(a: Automorphism, fam: tuple) -> tuple:
    P = a.G
    return make_family((t, structure.subgroup_closure(P, [a(g) for g in S.gens])) for t, S in fam)


def close_families(auts: AutSet, fams: Iterable[tuple]) -> list[tuple]:
    """Orbit closure of a set of families under the automorphism generators."""
    seen = {}
    queue = list(fams)
    for f in queue:
        seen.setdefault(family_key(f), f)
    queue = list(seen.values())
    while queue:
        nxt = []
        for f in queue:
            for a in auts.gens:
                g = _apply_to_family(a, f)
                k = family_key(g)
                if k not in seen:
                    seen[k] = g
                    nxt.append(g)
        queue = nxt
    return sorted(seen.values(), key=family_key)


def init_pairs(
    root: PcPresentation,
    lattices: Sequence[ConstraintLattice],
    auts: AutSet,
    *,
    attach: str = "auto",
    assignment: int | None = None,
) -> list[list[tuple]]:
    """Families per lattice for the root group.

    ``direct`` attaches the lattice subgroups to the root itself (which must
    be the reference quotient); ``surjections`` pulls them back along every
    surjection root -> reference. Direct families are closed under the root's
    automorphisms, which is what every later surjection step does anyway.
    """
    out = []
    for L in lattices:
        fams = L.assignments()
        if assignment is not None:
            if not 0 <= assignment < len(fams):
                raise ConfigError(f"assignment {assignment} out of range (lattice {L.label} has {len(fams)})")
            fams = [fams[assignment]]
        mode = attach
        if mode == "auto":
            mode = "direct" if root.key() == L.reference.key() else "surjections"
        if mode == "direct":
            if root.key() != L.reference.key():
                raise ConfigError("direct attachment needs the root to be the reference quotient")
            rebased = [make_family((t, structure.Subgroup(root, S.gens)) for t, S in f) for f in fams]
            out.append(close_families(auts, rebased))
        elif mode == "surjections":
            surj = structure.all_surjections(root, L.reference)
            if not surj:
                raise ConfigError(f"root has no surjection onto the reference of lattice {L.label}")
            seen = {}
            for f in surj:
                for fam in fams:
                    g = make_family((t, structure.preimage(f, S)) for t, S in fam)
                    seen.setdefault(family_key(g), g)
            out.append(sorted(seen.values(), key=family_key))
        else:
            raise ConfigError(f"unknown attach mode {attach!r}")
    return out


# --- one expansion step ----------------------------------------------------------------


@dataclass
class ChildRecord:
    orbit: int
    step: int
    presentation: PcPresentation
    families: list
    candidate: bool
    terminal: bool | None
    aut_images: list | None
    U: tuple = ()


def _lift_subgroup(Q: PcPresentation, n_parent: int, S: structure.Subgroup) -> structure.Subgroup:
    pad = (0,) * (Q.n - n_parent)
    gens = [tuple(g) + pad for g in S.gens] + [Q.gen(k) for k in range(n_parent, Q.n)]
    return structure.subgroup_closure(Q, gens)


def _check_families(fams_per_lattice, pull, aqi_cache):
    """Pull back every family, prune by the quotient test, flag exact matches."""
    new = []
    exact_all = True
    for fams in fams_per_lattice:
        kept = []
        exact_here = False
        for fam in fams:
            entries = []
            ok = True
            exact = True
            for t, S in fam:
                T = pull(S)
                if t is not None:
                    key = T.gens
                    if key not in aqi_cache:
                        aqi_cache[key] = structure.abelian_quotient_invariants(T)
                    a = aqi_cache[key]
                    if not is_quotient(a, t):
                        ok = False
                        break
                    if a != t:
                        exact = False
                entries.append((t, T))
            if ok:
                kept.append(make_family(entries))
                exact_here = exact_here or exact
        if not kept:
            return None, False
        uniq = {}
        for f in kept:
            uniq.setdefault(family_key(f), f)
        new.append(sorted(uniq.values(), key=family_key))
        exact_all = exact_all and exact_here
    return new, exact_all


def expand(
    P: PcPresentation,
    auts: AutSet,
    families: list,
    *,
    max_order: int | None,
    max_class: int | None,
    surjections: str = "lifted",
) -> tuple[list[ChildRecord], bool]:
    """Children of one node that survive pruning; second value flags a cap cut."""
    D = p_covering_group(P)
    nu = len(D.nucleus)
    if nu == 0:
        return [], False
    cut = False
    if max_class is not None and D.p_class + 1 > max_class:
        return [], True
    steps = list(range(1, nu + 1))
    if max_order is not None:
        ok = [s for s in steps if P.order * P.p**s <= max_order]
        cut = len(ok) < len(steps)
        steps = ok
    descs = immediate_descendants(P, auts, steps=steps, max_order=None, max_class=None, cover=D)
    out = []
    for i, x in enumerate(descs):
        Q = x.presentation
        aqi_cache: dict = {}
        if surjections == "lifted":
            lift_cache: dict = {}

            def pull(S, Q=Q, lift_cache=lift_cache):
                if S.gens not in lift_cache:
                    lift_cache[S.gens] = _lift_subgroup(Q, P.n, S)
                return lift_cache[S.gens]

            fams, cand = _check_families(families, pull, aqi_cache)
        elif surjections == "exhaustive":
            fams, cand = _exhaustive_families(Q, P, families, aqi_cache)
        else:
            raise ConfigError(f"unknown surjection mode {surjections!r}")
        if fams is None:
            continue
        terminal = len(p_covering_group(Q).nucleus) == 0
        images = None if terminal else [a.images for a in x.automorphisms.gens]
        out.append(ChildRecord(i, x.step, Q, fams, cand, terminal, images, x.U))
    return out, cut


def _exhaustive_families(Q, P, families, aqi_cache):
    """Same as the lifted route, but over every surjection Q -> P."""
    merged = [dict() for _ in families]
    cand_lattice = [False] * len(families)
    any_f = False
    for f in structure.iter_surjections(Q, P):
        any_f = True
        cache: dict = {}

        def pull(S, f=f, cache=cache):
            if S.gens not in cache:
                cache[S.gens] = structure.preimage(f, S)
            return cache[S.gens]

        for j, fams in enumerate(families):
            got, cand = _check_families([fams], pull, aqi_cache)
            if got is None:
                continue
            for fam in got[0]:
                merged[j].setdefault(family_key(fam), fam)
            # exactness must hold within one family; recheck per family
            for fam in got[0]:
                if all(t is None or aqi_cache[S.gens] == t for t, S in fam):
                    cand_lattice[j] = True
    if not any_f or any(not m for m in merged):
        return None, False
    return [sorted(m.values(), key=family_key) for m in merged], all(cand_lattice)


def _expand_job(args):
    P, aut_images, families, kw = args
    auts = AutSet(P, [Automorphism.from_images(P, im) for im in aut_images])
    return expand(P, auts, families, **kw)


# --- the search loop --------------------------------------------------------------------


@dataclass
class StageSpec:
    name: str
    lattices: list
    roots: object = "previous-survivors"  # or list of presentation texts
    attach: str = "auto"
    required_quotients: list = field(default_factory=list)
    subgroup_aqi: list = field(default_factory=list)  # (index, AbelianInvariants)
    narrowing: str = "subtree"  # or "list": every non-terminal group of the next level survives
    max_level: int | None = None  # planned stop, not a cap


@dataclass
class SearchConfig:
    name: str
    prime: int
    root: str
    stages: list
    max_order: int | None = DEFAULT_MAX_ORDER
    max_class: int | None = DEFAULT_MAX_CLASS
    surjections: str = "lifted"
    outputs: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "SearchConfig":
        try:
            stages = [_stage_from_dict(s) for s in data["stages"]]
            caps = data.get("caps", {})
            return cls(
                name=data.get("name", "search"),
                prime=int(data.get("prime", 2)),
                root=data.get("root", "p=2 n=2"),
                stages=stages,
                max_order=caps.get("max_order", DEFAULT_MAX_ORDER),
                max_class=caps.get("max_class", DEFAULT_MAX_CLASS),
                surjections=_choice(data.get("surjections", "lifted"), ("lifted", "exhaustive"), "surjections"),
                outputs=data.get("outputs", {}),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed config: {exc}") from exc

    @classmethod
    def load(cls, path: str | Path) -> "SearchConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data)


def _parse_target(t):
    if t is None or t == "unknown":
        return None
    return AbelianInvariants.parse(t) if isinstance(t, str) else AbelianInvariants.of(t)


def _stage_from_dict(s: dict) -> StageSpec:
    lattices = []
    for L in s.get("lattices", []):
        ref = parse_presentation(L["reference"])
        slots = [
            Slot(
                label=x.get("label", f"s{i}"),
                target=_parse_target(x.get("target")),
                index=x.get("index"),
                gens=tuple(x["gens"]) if "gens" in x else None,
            )
            for i, x in enumerate(L["slots"])
        ]
        lattices.append(ConstraintLattice(L.get("label", "L"), ref, slots))
    filt = s.get("post_filters", {})
    return StageSpec(
        name=s.get("name", "stage"),
        lattices=lattices,
        roots=s.get("roots", "previous-survivors"),
        attach=s.get("attach", "auto"),
        required_quotients=[parse_presentation(t) for t in filt.get("required_quotients", [])],
        subgroup_aqi=[(int(x["index"]), _parse_target(x["aqi"])) for x in filt.get("subgroup_aqi", [])],
        narrowing=_choice(s.get("narrowing", "subtree"), ("subtree", "list"), "narrowing"),
        max_level=s.get("max_level"),
    )


def _choice(v, allowed, what):
    if v not in allowed:
        raise ConfigError(f"{what} must be one of {', '.join(allowed)}, not {v!r}")
    return v


def run_stage(
    roots: Sequence[tuple[PcPresentation, AutSet]],
    lattices: Sequence[ConstraintLattice],
    *,
    name: str = "stage",
    attach: str = "auto",
    assignment: int | None = None,
    max_order: int | None = DEFAULT_MAX_ORDER,
    max_class: int | None = DEFAULT_MAX_CLASS,
    surjections: str = "lifted",
    max_level: int | None = None,
    jobs: int = 1,
    progress=None,
) -> SearchResult:
    nodes: list[Node] = []
    levels: dict[int, list[int]] = {}
    root_ids = []
    for P, auts in roots:
        fams = init_pairs(P, lattices, auts, attach=attach, assignment=assignment)
        lev = P.p_class
        cand = _root_candidate(P, fams)
        nd = Node(len(nodes), lev, None, len(root_ids), 0, P, fams, cand, auts=auts)
        nd.terminal = len(p_covering_group(P).nucleus) == 0
        nodes.append(nd)
        levels.setdefault(lev, []).append(nd.id)
        root_ids.append(nd.id)
    frontier = list(root_ids)
    status = "terminated"
    kw = dict(max_order=max_order, max_class=max_class, surjections=surjections)
    pool = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        while frontier:
            todo = [nodes[i] for i in frontier if not nodes[i].terminal]
            if max_level is not None and todo and todo[0].level >= max_level:
                if status == "terminated":
                    status = "level-limit"
                break
            if pool is not None:
                args = [(nd.presentation, [a.images for a in nd.auts.gens], nd.families, kw) for nd in todo]
                results = list(pool.map(_expand_job, args, chunksize=1))
            else:
                results = [expand(nd.presentation, nd.auts, nd.families, **kw) for nd in todo]
            nxt = []
            for nd, (children, cut) in zip(todo, results):
                if cut:
                    nd.unfinished = True
                    status = "cap"
                for c in children:
                    Q = c.presentation
                    child = Node(len(nodes), nd.level + 1, nd.id, c.orbit, c.step, Q, c.families, c.candidate)
                    child.terminal = c.terminal
                    child.U = c.U
                    if c.aut_images is not None:
                        child.auts = AutSet(Q, [Automorphism.from_images(Q, im) for im in c.aut_images])
                    nodes.append(child)
                    nd.children.append(child.id)
                    levels.setdefault(child.level, []).append(child.id)
                    nxt.append(child.id)
            if progress is not None and nxt:
                lev = nodes[nxt[0]].level
                progress(f"{name}: level {lev}: {len(nxt)} groups, {sum(nodes[i].pairs for i in nxt)} pairs, "
                         f"{sum(nodes[i].candidate for i in nxt)} candidates")
            frontier = nxt
    finally:
        if pool is not None:
            pool.shutdown()
    cands = [nd.id for nd in nodes if nd.candidate]
    return SearchResult(name, nodes, levels, cands, status, root_ids)


def _root_candidate(P, fams) -> bool:
    cache: dict = {}
    _, cand = _check_families(fams, lambda S: S, cache)
    return cand


# --- filters -----------------------------------------------------------------------------


def filter_required_quotients(groups: Sequence[PcPresentation], required: Sequence[PcPresentation]) -> list:
    return [H for H in groups if all(structure.has_quotient(H, K) for K in required)]


def has_subgroup_aqi(P: PcPresentation, index: int, aqi: AbelianInvariants) -> bool:
    return any(structure.abelian_quotient_invariants(S) == aqi for S in structure.iter_subgroups_of_index(P, index))


def filter_subgroup_aqi(groups: Sequence[PcPresentation], index: int, aqi: AbelianInvariants) -> list:
    return [H for H in groups if has_subgroup_aqi(H, index, aqi)]


# --- multi-stage driver ------------------------------------------------------------------


@dataclass
class RunResult:
    config: SearchConfig
    stages: list  # list of (StageSpec, per-assignment list of SearchResult)

    @property
    def status(self) -> str:
        return "cap" if any(r.status == "cap" for _, rs in self.stages for r in rs) else "terminated"


def run(
    config: SearchConfig,
    *,
    stages: Sequence[int] | None = None,
    assignment: int | None = None,
    jobs: int = 1,
    progress=None,
) -> RunResult:
    """Run the configured stages in order; survivors of one stage root the next."""
    root = parse_presentation(config.root)
    prev_roots = [(root, automorphism_group(root))]
    out = []
    wanted = set(stages) if stages is not None else None
    for si, spec in enumerate(config.stages, start=1):
        if spec.roots == "previous-survivors":
            roots = prev_roots
        else:
            roots = []
            for text in spec.roots:
                P = parse_presentation(text)
                roots.append((P, automorphism_group(P)))
        per_assign = []
        n_assign = _assignment_count(spec.lattices)
        choices = [assignment] if assignment is not None else (list(range(n_assign)) if n_assign > 1 else [None])
        cache: dict = {}
        for a in choices:
            fams_key = _closed_key(roots, spec, a)
            if fams_key in cache:
                res = cache[fams_key]
                note = f"assignment {a}: same closed families as assignment {res.assignment}"
                per_assign.append(_alias(res, a, note))
                continue
            res = run_stage(
                roots,
                spec.lattices,
                name=spec.name,
                attach=spec.attach,
                assignment=a,
                max_order=config.max_order,
                max_class=config.max_class,
                surjections=config.surjections,
                max_level=spec.max_level,
                jobs=jobs,
                progress=progress,
            )
            res.assignment = a
            _apply_filters(res, spec)
            cache[fams_key] = res
            per_assign.append(res)
        out.append((spec, per_assign))
        if wanted is not None and si >= max(wanted):
            break
        # survivors of the first assignment root the next stage; all assignments agree
        # whenever their closed families agree (checked above)
        first = per_assign[0]
        prev_roots = [(first.nodes[i].presentation, first.nodes[i].auts) for i in first.filtered_survivors]
    return RunResult(config, out)


def _assignment_count(lattices) -> int:
    n = 1
    for L in lattices:
        n = max(n, len(L.assignments()))
    return n


def _closed_key(roots, spec, a):
    keys = []
    for P, auts in roots:
        try:
            fams = init_pairs(P, spec.lattices, auts, attach=spec.attach, assignment=a)
        except ConfigError:
            fams = init_pairs(P, spec.lattices, auts, attach=spec.attach, assignment=None)
        keys.append(tuple(tuple(family_key(f) for f in fl) for fl in fams))
    return tuple(keys)


def _alias(res: SearchResult, a, note) -> SearchResult:
    r = SearchResult(res.stage, res.nodes, res.levels, res.candidates, res.status, res.roots, [note],
                     res.survivors, res.filtered_survivors, res.filtered_candidates)
    r.assignment = a
    r.aliased = True
    return r


def _apply_filters(res: SearchResult, spec: StageSpec) -> None:
    if not res.roots:
        return
    child_level = res.nodes[res.roots[0]].level + 1
    if spec.narrowing == "list":
        res.survivors = res.listed(child_level)
    else:
        res.survivors = res.narrowed(child_level)
    groups = [res.nodes[i].presentation for i in res.survivors]
    keep = filter_required_quotients(groups, spec.required_quotients)
    kept_ids = {id(g) for g in keep}
    res.filtered_survivors = [i for i in res.survivors if id(res.nodes[i].presentation) in kept_ids]
    cands = list(res.candidates)
    for idx, aqi in spec.subgroup_aqi:
        cands = [i for i in cands if has_subgroup_aqi(res.nodes[i].presentation, idx, aqi)]
    res.filtered_candidates = cands


# --- reports and exports ----------------------------------------------------------------


def canonical_path(res: SearchResult, i: int) -> tuple:
    """(step, U) keys from the root down; comparable with ``descend.identify``."""
    out = []
    while res.nodes[i].parent is not None:
        nd = res.nodes[i]
        out.append((nd.step, nd.U))
        i = nd.parent
    return tuple(reversed(out))


def node_path(res: SearchResult, i: int) -> str:
    parts = []
    while i is not None:
        nd = res.nodes[i]
        parts.append(str(nd.orbit))
        i = nd.parent
    return ".".join(reversed(parts))


def stage_report(res: SearchResult) -> str:
    lines = [f"stage {res.stage}" + (f" assignment {res.assignment}" if getattr(res, "assignment", None) is not None else "")]
    for note in res.notes:
        lines.append(f"  note: {note}")
    if res.notes and getattr(res, "aliased", False):
        return "\n".join(lines) + "\n"
    lines.append(f"  status: {res.status}")
    for lev in sorted(res.levels):
        ids = res.levels[lev]
        nonterm = sum(1 for i in ids if not res.nodes[i].terminal)
        lines.append(
            f"  level {lev}: groups {len(ids)} nonterminal {nonterm} pairs {sum(res.nodes[i].pairs for i in ids)} "
            f"candidates {sum(res.nodes[i].candidate for i in ids)}"
        )
    lines.append(f"  candidates: {len(res.candidates)}")
    for i in res.candidates:
        nd = res.nodes[i]
        lines.append(f"    {node_path(res, i)} order 2^{nd.presentation.n} level {nd.level}")
    lines.append(f"  narrowed: {len(res.survivors)} -> " + ", ".join(node_path(res, i) for i in res.survivors))
    for i in res.survivors:
        P = res.nodes[i].presentation
        lines.append(f"    {node_path(res, i)} order {P.order} AQI {structure.abelian_quotient_invariants(P)}")
    lines.append(f"  after required quotients: {len(res.filtered_survivors)} -> "
                 + ", ".join(node_path(res, i) for i in res.filtered_survivors))
    lines.append(f"  candidates after subgroup filter: {len(res.filtered_candidates)}")
    for i in res.filtered_candidates:
        lines.append(f"    {node_path(res, i)}")
    cut = [i for i, nd in enumerate(res.nodes) if nd.unfinished]
    if cut:
        lines.append(f"  cap cut at: " + ", ".join(node_path(res, i) for i in cut))
    return "\n".join(lines) + "\n"


def report(rr: RunResult) -> str:
    lines = [f"search {rr.config.name}", f"status: {rr.status}", ""]
    out = "\n".join(lines)
    for spec, per in rr.stages:
        for res in per:
            out += stage_report(res) + "\n"
    return out


def export_tree(res: SearchResult | None, mode: str = "full") -> str:
    """DOT graph of the listed groups; ``paper`` mode drops groups without descendants."""
    lines = ["digraph tree {"]
    if res is None or not res.nodes:
        lines.append("}")
        return "\n".join(lines) + "\n"
    if mode not in ("full", "paper"):
        raise ValueError("mode must be 'full' or 'paper'")
    shown = [nd for nd in res.nodes if mode == "full" or not nd.terminal]
    # number in breadth-first order (level, then path)
    order = sorted(shown, key=lambda nd: (nd.level, [int(x) for x in node_path(res, nd.id).split(".")]))
    num = {nd.id: k for k, nd in enumerate(order)}
    for nd in order:
        attrs = [f'label="{num[nd.id]}"']
        if nd.candidate:
            attrs.append("shape=box")
        if nd.unfinished:
            attrs.append("style=dashed")
        lines.append(f"  n{num[nd.id]} [{', '.join(attrs)}];")
    for nd in order:
        if nd.parent is not None and nd.parent in num:
            lines.append(f"  n{num[nd.parent]} -> n{num[nd.id]};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_candidates(res: SearchResult, ids: Sequence[int] | None = None) -> str:
    ids = res.candidates if ids is None else ids
    chunks = []
    for i in ids:
        chunks.append(f"# candidate {node_path(res, i)}\n" + serialize(res.nodes[i].presentation))
    return "\n".join(chunks)
