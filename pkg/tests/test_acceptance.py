"""Acceptance criteria, each at its stated tolerance (exact throughout).

Every test prints one PASS/FAIL line; the lines are repeated in the
terminal summary.
"""

import pytest
from conftest import ACCEPTANCE_LINES

from pgtower import cases, oracles, structure, tower
from pgtower.descend import identify, immediate_descendants, root_automorphisms
from pgtower.linalg import AbelianInvariants
from pgtower.pcp import parse_presentation

H4_2379 = "p=2 n=4\nx1^2 = x4; [x2,x1] = x3"
H6_2379 = "p=2 n=5\nx1^2 = x4; x2^2 = x5; [x2,x1] = x3"
C24 = "p=2 n=3\nx1^2 = x3"
D4 = "p=2 n=3\n[x2,x1] = x3"
Q8 = "p=2 n=3\nx1^2 = x3; x2^2 = x3; [x2,x1] = x3"


def record(label, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'} {label}" + (f": {detail}" if detail else "")
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def aqi(G):
    return str(structure.abelian_quotient_invariants(G))


def factors(G):
    return [str(f) for f in structure.derived_series_factors(G)]


def class2_quotient(G):
    S = structure.lower_p_central_series(G)
    return structure.quotient_presentation(G, S[2])[0]


def index4_aqis(G):
    return {aqi(S) for S in structure.iter_subgroups_of_index(G, 4)}


def distinct(case):
    checks = [c for c in cases.verify_case(case) if c.name.startswith("pairwise")]
    return bool(checks) and all(c.ok for c in checks)


# --- 1: final presentations ------------------------------------------------------------


def test_1a_final_groups_2379():
    groups = cases.load_case("-2379").final_groups()
    problems = []
    for ch, G in groups:
        got = (
            G.is_consistent(),
            G.order,
            structure.p_class(G),
            factors(G),
            aqi(structure.lower_p_central_series(G)[1]),
            "[4,32]" in index4_aqis(G),
        )
        if got != (True, 2**11, 5, ["[4,4]", "[2,4,16]"], "[4,4,8]", True):
            problems.append(f"{ch}: {got}")
    ok = len(groups) == 8 and not problems and distinct("-2379")
    record("1a -2379 final groups", ok, f"{len(groups)} groups" + (f"; {problems[0]}" if problems else ""))


def test_1b_final_groups_445():
    groups = cases.load_case("-445").final_groups()
    H = parse_presentation(H4_2379)
    problems = []
    for ch, G in groups:
        got = (
            G.is_consistent(),
            G.order,
            structure.p_class(G),
            factors(G),
            "[2,16]" in index4_aqis(G),
            structure.is_isomorphic(class2_quotient(G), H),
        )
        if got != (True, 2**8, 5, ["[2,4]", "[2,2,4]", "[2]"], True, True):
            problems.append(f"{ch}: {got}")
    ok = len(groups) == 2 and not problems and distinct("-445")
    record("1b -445 final groups", ok, f"{len(groups)} groups" + (f"; {problems[0]}" if problems else ""))


@pytest.mark.parametrize("cid", ["-1015", "-1595"])
def test_1c_final_groups_1015(cid):
    groups = cases.load_case(cid).final_groups()
    problems = []
    for ch, G in groups:
        got = (G.is_consistent(), G.order, structure.p_class(G), factors(G))
        if got != (True, 2**9, 5, ["[2,8]", "[2,2,4]", "[2]"]):
            problems.append(f"{ch}: {got}")
    ok = len(groups) == 2 and not problems and distinct(cid)
    record(f"1c {cid} final groups", ok, f"{len(groups)} groups" + (f"; {problems[0]}" if problems else ""))


# --- 2: stage-1 searches -----------------------------------------------------------------


def stage1(cid, jobs=1):
    cfg = cases.load_case(cid).config()
    rr = tower.run(cfg, stages=[1], jobs=jobs)
    return rr, rr.stages[0][1][0]


@pytest.fixture(scope="module")
def stage1_runs():
    return {cid: stage1(cid) for cid in ["-445", "-1015", "-1595", "-2379"]}


def iso_index(groups, G):
    return [i for i, H in enumerate(groups) if H.order == G.order and structure.is_isomorphic(H, G)]


def test_2a_stage1_2379(stage1_runs):
    _, res = stage1_runs["-2379"]
    n_cand = len(res.candidates)
    level2 = res.listed(2)
    grp = [res.nodes[i].presentation for i in level2]
    h4 = iso_index(grp, parse_presentation(H4_2379))
    h6 = iso_index(grp, parse_presentation(H6_2379))
    under_h6 = len(h6) == 1 and set(res.candidates) <= set(res.subtree(level2[h6[0]]))
    # the filtered candidates must contain the 8 final groups; tree paths are invariants
    paths = {tower.canonical_path(res, i) for i in res.filtered_candidates}
    finals = cases.load_case("-2379").final_groups()
    found = sum(tuple(identify(G).path) in paths for _, G in finals)
    ok = n_cand == 81 and len(level2) == 6 and len(h4) == 1 and under_h6 and found == 8
    record(
        "2a -2379 stage 1",
        ok,
        f"{n_cand} candidates, all under H6: {under_h6}; level 2 with descendants {len(level2)}, "
        f"H4 {len(h4)} H6 {len(h6)}; subgroup filter keeps {len(res.filtered_candidates)} containing {found}/8",
    )


def test_2b_stage1_445(stage1_runs):
    _, res = stage1_runs["-445"]
    kept = [res.nodes[i].presentation for i in res.filtered_survivors]
    iso = len(kept) == 1 and structure.is_isomorphic(kept[0], parse_presentation(H4_2379))
    ok = len(res.survivors) == 3 and iso
    record("2b -445 stage 1", ok, f"level 2 narrowed to {len(res.survivors)}, filter leaves {len(kept)}, H3: {iso}")


@pytest.mark.parametrize("cid", ["-1015", "-1595"])
def test_2c_stage1_1015(stage1_runs, cid):
    case = cases.load_case(cid)
    _, res = stage1_runs[cid]
    kept = [res.nodes[i].presentation for i in res.filtered_survivors]
    names = []
    for nm in ("H3", "H4"):
        if len(iso_index(kept, case.group(nm))) == 1:
            names.append(nm)
    ok = len(res.survivors) == 4 and len(kept) == 2 and names == ["H3", "H4"]
    record(f"2c {cid} stage 1", ok, f"level 2 narrowed to {len(res.survivors)}, filter leaves {len(kept)} ({names})")


# --- 3: stage-2 searches, conditional on the unlabeled slots ------------------------------


STAGE2 = {"-2379": (24, 8), "-445": (12, 2), "-1015": (2, 2), "-1595": (2, 2)}


def unknown_slots(case):
    return sum(
        1
        for stage in case.config_data["stages"][1:]
        for L in stage.get("lattices", [])
        for s in L["slots"]
        if s.get("target") in (None, "unknown")
    )


@pytest.mark.parametrize("cid", list(STAGE2))
def test_3_stage2(cid):
    case = cases.load_case(cid)
    missing = unknown_slots(case)
    if missing:
        line = f"SKIP 3 {cid} stage 2: conditional, {missing} subgroup targets are unlabeled in the case file"
        print(line)
        ACCEPTANCE_LINES.append(line)
        pytest.skip(line)
    rr = tower.run(case.config())
    res = rr.stages[-1][1][0]
    want_cand, want_final = STAGE2[cid]
    paths = {tower.canonical_path(res, i) for i in res.filtered_candidates}
    found = sum(tuple(identify(G).path) in paths for _, G in case.final_groups())
    ok = res.terminated and len(res.candidates) == want_cand and found == want_final == len(res.filtered_candidates)
    record(f"3 {cid} stage 2", ok, f"{len(res.candidates)} candidates, {len(res.filtered_candidates)} filtered, {found} final")


# --- 4: oracle suites ------------------------------------------------------------------------


def test_4a_collection():
    res = oracles.suite_collection(count=200, max_n=6)
    record("4a collection vs brute-force tables", res.ok and res.checked >= 200, res.line())


def test_4b_smith():
    res = oracles.suite_smith(count=500)
    record("4b smith_invariants vs cokernel enumeration", res.ok and res.checked == 500, res.line())


def test_4c_quotient():
    res = oracles.suite_quotient(max_exp=6)
    record("4c is_quotient vs surjection search", res.ok, res.line())


def tree_up_to(text, max_order):
    root = parse_presentation(text)
    out = []
    frontier = [(root, root_automorphisms(root))]
    while frontier:
        nxt = []
        for P, auts in frontier:
            for x in immediate_descendants(P, auts, max_order=None, max_class=None):
                if x.presentation.order <= max_order:
                    out.append((x.presentation, P))
                    nxt.append((x.presentation, x.automorphisms))
        frontier = nxt
    return out


def test_4d_descendants():
    V4 = parse_presentation("p=2 n=2")
    eight = immediate_descendants(V4, root_automorphisms(V4), steps=[1])
    classes_ok = len(eight) == 3 and all(
        len(iso_index([x.presentation for x in eight], parse_presentation(t))) == 1 for t in (C24, D4, Q8)
    )
    C2 = parse_presentation("p=2 n=1")
    two = immediate_descendants(C2, root_automorphisms(C2))
    cyclic_ok = len(two) == 1 and aqi(two[0].presentation) == "[4]"
    pairs = tree_up_to("p=2 n=1", 2**8) + tree_up_to("p=2 n=2", 2**8)
    bad = 0
    for Q, P in pairs:
        S = structure.lower_p_central_series(Q)
        R, _ = structure.quotient_presentation(Q, S[structure.p_class(P)])
        bad += not structure.is_isomorphic(R, P)
    ok = classes_ok and cyclic_ok and bad == 0
    record(
        "4d immediate descendants",
        ok,
        f"[2,2] -> {{[2,4], D4, Q8}}: {classes_ok}; [2] -> {{[4]}}: {cyclic_ok}; "
        f"{len(pairs) - bad}/{len(pairs)} descendants of order <= 2^8 project onto their parent",
    )


def test_4e_determinism(stage1_runs):
    same = []
    for cid, (rr, _) in stage1_runs.items():
        again, _ = stage1(cid, jobs=2)
        same.append(tower.report(rr) == tower.report(again))
    record("4e deterministic reports across runs and --jobs", all(same), f"{sum(same)}/{len(same)} identical")
