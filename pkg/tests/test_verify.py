import json

import pytest

from tbl import verify


def test_registry_kinds_and_fields():
    assert len(verify.REGISTRY) > 30
    for name, claim in verify.REGISTRY.items():
        assert claim.name == name
        assert claim.kind in verify.KINDS
        assert claim.locus and claim.quote


def test_cited_and_derived_entries():
    assert verify.REGISTRY["fft.rank"].kind == "cited"
    assert verify.REGISTRY["sft.kernel"].kind == "derived"


@pytest.mark.parametrize("text", ["yb.braid[h=1,k=2]", "local.loop_value[m=3]", "yb.example"])
def test_claim_id_round_trip(text):
    name, params = verify.parse_claim_id(text)
    assert verify.claim_id(name, params) == text


def test_unknown_claim_id():
    with pytest.raises(KeyError):
        verify.parse_claim_id("no.such.claim[m=1]")


def test_run_claim_records_failure_instead_of_raising():
    rec = verify.run_claim("yb.kernel", m=0)
    assert rec.status == "fail" and "error" in rec.certificate


def test_mutation_breaks_skein():
    assert verify.run_claim("presentation.skein", m=1).passed
    rec = verify.run_claim("presentation.skein", "R_q2", m=1)
    assert not rec.passed
    assert rec.certificate["mutation"] == "R_q2"


def test_y_mutation_breaks_kernel():
    assert verify.run_claim("yb.kernel", m=1).passed
    assert not verify.run_claim("yb.kernel", "Y", m=1).passed


def test_empty_report_is_valid():
    doc = json.loads(verify.emit_report([]))
    assert doc == {"claims": [], "summary": {"fail": 0, "pass": 0, "skipped": 0}}
    assert verify.all_passed([])


def test_bad_report_format():
    with pytest.raises(ValueError):
        verify.emit_report([], "xml")


def test_bad_suite_mutation():
    with pytest.raises(ValueError):
        verify.run_suite(verify.SuiteConfig(mutate="Z"))


@pytest.fixture(scope="module")
def small_suite():
    return verify.run_suite(verify.SuiteConfig(ms=(1,), ns=(3,)))


def test_small_suite_passes(small_suite):
    failing = [r.id for r in small_suite if not r.passed]
    assert not failing
    ids = [r.id for r in small_suite]
    assert len(ids) == len(set(ids)) and ids == sorted(ids)


def test_report_is_deterministic(small_suite):
    again = verify.run_suite(verify.SuiteConfig(ms=(1,), ns=(3,)))
    assert verify.emit_report(small_suite) == verify.emit_report(again)
    doc = json.loads(verify.emit_report(small_suite))
    for c in doc["claims"]:
        assert set(c) == {"id", "locus", "quote", "kind", "params", "status", "certificate"}
    assert "wall_time" in json.loads(verify.emit_report(small_suite, timing=True))["claims"][0]


def test_markdown_report(small_suite):
    text = verify.emit_report(small_suite, "markdown")
    assert text.startswith("| claim | kind | status | params |")
    assert f"{len(small_suite)} pass, 0 fail" in text


def test_full_default_suite_passes():
    records = verify.run_suite()
    assert len(records) >= 120
    assert not [r.id for r in records if not r.passed]
    kinds = {r.kind for r in records}
    assert kinds == set(verify.KINDS)
