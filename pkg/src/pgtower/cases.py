"""Shipped case studies: search configurations, final presentations, checks."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from importlib import resources

from . import structure
from .descend import identify
from .linalg import AbelianInvariants
from .pcp import PcPresentation, PresentationError, parse_presentation
from .tower import ConfigError, SearchConfig


class UnknownCaseError(KeyError):
    pass


class ParameterError(ValueError):
    pass


@dataclass
class CaseStudy:
    id: str
    d: int
    field: str
    abelianization: AbelianInvariants
    config_data: dict
    final_text: str
    params: dict  # name -> allowed values
    expected: dict
    groups: dict = field(default_factory=dict)  # name -> presentation text
    polynomials: dict = field(default_factory=dict)  # documentation only, never evaluated
    degree4_subfield: str = ""

    def config(self, *, max_order=None, max_class=None) -> SearchConfig:
        cfg = SearchConfig.from_dict(self.config_data)
        if max_order is not None:
            cfg.max_order = max_order
        if max_class is not None:
            cfg.max_class = max_class
        return cfg

    def group(self, name: str) -> PcPresentation:
        try:
            return parse_presentation(self.groups[name])
        except KeyError:
            raise UnknownCaseError(f"case {self.id} has no group named {name!r}") from None

    def parameter_choices(self) -> list[dict]:
        names = sorted(self.params)
        return [dict(zip(names, vals)) for vals in itertools.product(*(self.params[k] for k in names))]

    def final_groups(self) -> list[tuple[dict, PcPresentation]]:
        return [(ch, build_paper_group(self, ch)) for ch in self.parameter_choices()]


def _normalize(case_id) -> str:
    s = str(case_id).strip()
    if not s.startswith("-"):
        s = "-" + s
    return s


def case_ids() -> list[str]:
    out = []
    for f in resources.files(__package__).joinpath("casedata").iterdir():
        if f.name.startswith("case") and f.name.endswith(".json"):
            out.append(f.name[4:-5])
    return sorted(out, key=lambda s: abs(int(s)))


def load_case(case_id) -> CaseStudy:
    cid = _normalize(case_id)
    path = resources.files(__package__).joinpath("casedata").joinpath(f"case{cid}.json")
    if not path.is_file():
        raise UnknownCaseError(f"unknown case {case_id!r}; known: {', '.join(case_ids())}")
    data = json.loads(path.read_text())
    return CaseStudy(
        id=data["id"],
        d=data["d"],
        field=data["field"],
        abelianization=AbelianInvariants.parse(data["abelianization"]),
        config_data=data["config"],
        final_text=data["final"]["text"],
        params={k: list(v) for k, v in data["final"]["params"].items()},
        expected=data["expected"],
        groups=data.get("groups", {}),
        polynomials=data.get("polynomials", {}),
        degree4_subfield=data.get("degree4_subfield", ""),
    )


def build_paper_group(case: CaseStudy | str, params: dict | None = None) -> PcPresentation:
    """The final presentation of ``case`` with the given parameter values."""
    if not isinstance(case, CaseStudy):
        case = load_case(case)
    params = dict(params or {})
    missing = set(case.params) - set(params)
    extra = set(params) - set(case.params)
    if missing or extra:
        raise ParameterError(f"case {case.id} takes parameters {sorted(case.params)}, got {sorted(params)}")
    for k, v in params.items():
        if v not in case.params[k]:
            raise ParameterError(f"parameter {k}={v} outside {case.params[k]}")
    return parse_presentation(case.final_text, params)


# --- verification --------------------------------------------------------------------


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} {self.name}" + (f": {self.detail}" if self.detail else "")


def _fmt(params: dict) -> str:
    return ",".join(f"{k}={v}" for k, v in sorted(params.items()))


def _has_subgroup_aqi(G, idx, aqi) -> bool:
    return any(structure.abelian_quotient_invariants(S) == aqi for S in structure.iter_subgroups_of_index(G, idx))


def _class2_quotient(G):
    S = structure.lower_p_central_series(G)
    if len(S) <= 2:
        return G
    Q, _ = structure.quotient_presentation(G, S[2])
    return Q


def verify_case(case: CaseStudy | str) -> list[Check]:
    """Recompute every stated property of the final groups of ``case``."""
    if not isinstance(case, CaseStudy):
        case = load_case(case)
    exp = case.expected
    checks = []
    groups = []
    for ch in case.parameter_choices():
        try:
            G = build_paper_group(case, ch)
        except PresentationError as exc:
            checks.append(Check(f"{_fmt(ch)} consistent", False, str(exc)))
            continue
        groups.append((ch, G))
        tag = _fmt(ch)
        checks.append(Check(f"{tag} consistent", G.is_consistent()))
        checks.append(Check(f"{tag} order", G.order == exp["order"], f"{G.order}"))
        c = structure.p_class(G)
        checks.append(Check(f"{tag} p-class", c == exp["p_class"], f"{c}"))
        facs = [str(f) for f in structure.derived_series_factors(G)]
        checks.append(Check(f"{tag} derived factors", facs == exp["derived_factors"], "[" + ",".join(facs) + "]"))
        checks.append(Check(f"{tag} derived length", len(facs) == exp["tower_length"], f"{len(facs)}"))
        if "p1_aqi" in exp:
            a = structure.abelian_quotient_invariants(structure.lower_p_central_series(G)[1])
            checks.append(Check(f"{tag} AQI(P1)", str(a) == exp["p1_aqi"], str(a)))
        if "subgroup_aqi" in exp:
            idx, aqi = exp["subgroup_aqi"]["index"], AbelianInvariants.parse(exp["subgroup_aqi"]["aqi"])
            checks.append(Check(f"{tag} index-{idx} subgroup with AQI {aqi}", _has_subgroup_aqi(G, idx, aqi)))
        Q = _class2_quotient(G)
        names = [nm for nm in exp.get("class2_quotient", []) if structure.is_isomorphic(Q, case.group(nm))]
        checks.append(Check(f"{tag} class-2 quotient", bool(names), "isomorphic to " + (names[0] if names else "none")))
    checks.append(Check("group count", len(groups) == exp["count"], f"{len(groups)}"))
    checks.extend(_distinctness(groups))
    return checks


def _distinctness(groups) -> list[Check]:
    if len(groups) < 2:
        return []
    order = groups[0][1].order
    if order <= structure.ISO_ORDER_LIMIT:
        bad = [
            (_fmt(a), _fmt(b))
            for (a, G), (b, H) in itertools.combinations(groups, 2)
            if structure.is_isomorphic(G, H)
        ]
        return [Check("pairwise non-isomorphic (brute force)", not bad, "; ".join(f"{x} ~ {y}" for x, y in bad))]
    # canonical descendant-tree paths are isomorphism invariants
    paths = {}
    for ch, G in groups:
        try:
            paths[_fmt(ch)] = tuple(identify(G).path)
        except PresentationError as exc:
            return [Check("pairwise non-isomorphic (tree paths)", False, f"not distinguished: {exc}")]
    same = [(a, b) for a, b in itertools.combinations(paths, 2) if paths[a] == paths[b]]
    return [Check("pairwise non-isomorphic (tree paths)", not same, "; ".join(f"{x} ~ {y}" for x, y in same))]


def verify_report(case: CaseStudy | str) -> tuple[str, bool]:
    if not isinstance(case, CaseStudy):
        case = load_case(case)
    checks = verify_case(case)
    ok = all(c.ok for c in checks)
    lines = [f"verify {case.id}: {case.field}"] + ["  " + c.line() for c in checks]
    lines.append(f"  result: {'ok' if ok else 'FAILED'}")
    return "\n".join(lines) + "\n", ok


def config_for(case_id, **caps) -> SearchConfig:
    try:
        return load_case(case_id).config(**caps)
    except UnknownCaseError:
        raise
    except (KeyError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
