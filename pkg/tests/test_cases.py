import pytest

from pgtower import cases, structure
from pgtower.pcp import parse_presentation


def test_case_ids():
    assert cases.case_ids() == ["-445", "-1015", "-1595", "-2379"]


@pytest.mark.parametrize("cid", ["-445", "445", -445, " -445 "])
def test_load_normalizes_id(cid):
    assert cases.load_case(cid).id == "-445"


def test_unknown_case():
    with pytest.raises(cases.UnknownCaseError):
        cases.load_case("-7")


@pytest.mark.parametrize("cid,count", [("-2379", 8), ("-445", 2), ("-1015", 2), ("-1595", 2)])
def test_parameter_choices(cid, count):
    case = cases.load_case(cid)
    assert len(case.parameter_choices()) == count
    assert len(case.final_groups()) == count


def test_build_rejects_bad_parameters():
    with pytest.raises(cases.ParameterError):
        cases.build_paper_group("-2379", {"r": 0, "s": 1})
    with pytest.raises(cases.ParameterError):
        cases.build_paper_group("-445", {"r": 0, "q": 1})
    with pytest.raises(cases.ParameterError):
        cases.build_paper_group("-445", {"r": 2})


def test_abelianization_matches_final_groups():
    for cid in cases.case_ids():
        case = cases.load_case(cid)
        for _, G in case.final_groups():
            assert structure.abelian_quotient_invariants(G) == case.abelianization


def test_named_groups_parse():
    for cid in cases.case_ids():
        case = cases.load_case(cid)
        for name in case.groups:
            assert case.group(name).is_consistent()
        with pytest.raises(cases.UnknownCaseError):
            case.group("nope")


def test_configs_parse():
    for cid in cases.case_ids():
        cfg = cases.config_for(cid, max_order=4096)
        assert cfg.max_order == 4096
        assert cfg.stages[0].lattices
        parse_presentation(cfg.root)


def test_polynomials_are_documentation_only():
    case = cases.load_case("-2379")
    assert case.polynomials
    assert all(isinstance(v, str) for v in case.polynomials.values())


@pytest.mark.parametrize("cid", ["-445", "-1015", "-1595"])
def test_verify_small_cases(cid):
    text, ok = cases.verify_report(cid)
    assert ok, text
    assert "FAIL" not in text
