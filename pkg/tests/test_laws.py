import pytest

from nilops import laws


def test_registry_contains_required_laws():
    required = {
        "lemma_5_7", "cartan_serre_leading", "chi_top_absent", "lemma_6_2", "prop_2_4", "cor_2_5",
        "support_u1", "support_u2", "prop_1_8", "prop_1_9", "susp_formula", "tensor_nil", "tor_corner",
        "adem_display_5",
    }
    assert required <= set(laws.law_ids())


def test_unknown_law():
    with pytest.raises(KeyError):
        laws.run_law("no_such_law")
    with pytest.raises(ValueError):
        laws.run_law("lemma_5_7", {"bogus": 1})


def test_lemma_5_7_n1_witness():
    r = laws.run_law("lemma_5_7", {"n": [1]})
    assert r.verdict == "verified"
    assert r.witness == {"1": [["Sq1", "Sq1"]]}


def test_adem_display_expected_refuted():
    r = laws.run_law("adem_display_5", {"n": [2]})
    assert r.verdict == "refuted" and r.expected == "refuted" and not r.failed
    assert r.witness["2"]["difference"] == "Sq7 Sq1"
    assert r.status == "refuted (expected)"


def test_failed_semantics():
    r = laws.LawReport("x", {}, "refuted", "exhaustive")
    assert r.failed and "UNEXPECTED" in r.status
    assert not laws.LawReport("x", {}, "undetermined", "sampled").failed
    assert laws.LawReport("x", {}, "error", "sampled").failed
    assert laws.LawReport("x", {}, "verified", "exhaustive", expected="refuted").failed


def test_sampled_laws_are_replayable():
    a = laws.run_law("prop_1_8", {"count": 3}, seed=5)
    b = laws.run_law("prop_1_8", {"count": 3}, seed=5)
    assert a.to_dict() == b.to_dict()
    assert a.params["seed"] == 5 and a.domain == "sampled"


def test_suite_order_and_threads():
    ids = ["tor_exterior", "lemma_5_7", "chi_top_absent"]
    serial = laws.run_suite(ids, seed=1, threads=1)
    parallel = laws.run_suite(ids, seed=1, threads=3)
    order = laws.law_ids()
    assert [r.id for r in serial] == sorted(ids, key=order.index)
    assert laws.suite_json(serial, 1) == laws.suite_json(parallel, 1)


def test_threads_env(monkeypatch):
    monkeypatch.setenv("NILOPS_THREADS", "3")
    assert laws._threads() == 3
    monkeypatch.setenv("NILOPS_THREADS", "junk")
    assert laws._threads() == 1


def test_text_output():
    reports = laws.run_suite(["lemma_5_7"], seed=0)
    text = laws.suite_text(reports, 0)
    assert text.startswith("# law suite, seed=0")
    assert "lemma_5_7" in text and "0 unexpected" in text
