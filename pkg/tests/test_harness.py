import json

import pytest

from dpl.errors import ConfigError
from dpl.harness import (AuditConfig, UniverseSpec, config_from_dict, enumerate_preorders,
                         load_config, random_model, run_audit, universe, valuations)
from dpl.model import is_total, validate
from dpl.postulates import PostulateId, SchemaId


def test_enumeration_is_duplicate_free():
    for n in range(1, 5):
        models = list(enumerate_preorders(n, ("p",)))
        assert len({(m.down, m.val) for m in models}) == len(models)
        assert len({m.fingerprint() for m in enumerate_preorders(n, ())}) == [1, 4, 29, 355][n - 1]


def test_enumeration_caps():
    with pytest.raises(ConfigError):
        list(enumerate_preorders(6, ()))
    with pytest.raises(ConfigError):
        list(enumerate_preorders(0, ()))
    with pytest.raises(ConfigError):
        random_model(9)


def test_valuation_schemes():
    assert len(valuations(3, ("p", "q"))) == 64
    assert valuations(3, ("p", "q"), "canonical") == [(0b010, 0b100)]
    with pytest.raises(ConfigError):
        valuations(3, ("p",), "weird")
    assert len(universe(2, ("p",), "canonical")) == 1 + 4


def test_random_models():
    assert random_model(5, ("p", "q"), 42) == random_model(5, ("p", "q"), 42)
    assert all(validate(random_model(5, ("p", "q"), s)) == [] for s in range(1000))
    totals = {is_total(random_model(3, ("p",), s)) for s in range(100)}
    assert totals == {True, False}


def rev_config(**kw):
    return AuditConfig(
        universe=UniverseSpec("enumerate", 3, ("p",)),
        operators=("rev",),
        postulates=(PostulateId.Faith, PostulateId.DP1comp, PostulateId.DP2comp, PostulateId.RECcomp),
        **kw,
    )


def test_revision_audit_passes():
    report = run_audit(rev_config())
    assert report.exit_code == 0
    assert report.summary == {"pass": 250 * 4, "fail": 0, "error": 0}
    assert len(report.records) == sum(report.summary.values())


def test_audit_is_deterministic(tmp_path):
    a, b, c = tmp_path / "a.jsonl", tmp_path / "b.jsonl", tmp_path / "c.jsonl"
    run_audit(rev_config(output=str(a)))
    run_audit(rev_config(output=str(b)))
    run_audit(rev_config(output=str(c), jobs=2))
    assert a.read_bytes() == b.read_bytes() == c.read_bytes()


def test_fact41_audit():
    cfg = AuditConfig(UniverseSpec("fixtures", names=("F1",)), operators=("fact41-star", "id"),
                      postulates=(PostulateId.DP1,))
    report = run_audit(cfg)
    verdicts = {r["op"]: r["verdict"] for r in report.records}
    assert verdicts == {"fact41_star": "fail", "id": "pass"}
    assert report.exit_code == 1
    bad = next(r for r in report.records if r["verdict"] == "fail")
    assert bad["witness"]["clause"] == "DP1" and set(bad["witness"]["worlds"]) == {"w1", "w2"}
    assert bad["phi"] == "T"


def test_contraction_audit_records_gr_per_model():
    cfg = AuditConfig(UniverseSpec("enumerate", 3, ("p",)), operators=("ctr",),
                      postulates=(PostulateId.LCcomp, PostulateId.GR), schemas=(SchemaId.LCAx,))
    report = run_audit(cfg)
    by_check = {}
    for r in report.records:
        by_check.setdefault(r["check"], set()).add(r["verdict"])
    assert by_check["LCcomp"] == {"pass"} and by_check["LCAx"] == {"pass"}
    assert by_check["GR"] <= {"pass", "fail"}
    assert len([r for r in report.records if r["check"] == "GR"]) == 250


def test_report_lines_and_field_order():
    cfg = AuditConfig(UniverseSpec("fixtures", names=("E1",)), postulates=(PostulateId.DP1comp,))
    report = run_audit(cfg)
    lines = report.lines()
    first = json.loads(lines[0])
    assert list(first) == ["check", "op", "model", "phi", "verdict", "witness"]
    last = json.loads(lines[-1])
    assert last["summary"] == {"pass": 1, "fail": 0, "error": 0}
    assert set(last["environment"]) == {"seed", "package", "fixtures", "models"}
    assert report.text_lines()[-1] == "summary: 1 pass, 0 fail, 0 error"


def test_errors_are_recorded_not_fatal():
    cfg = AuditConfig(UniverseSpec("fixtures", names=("F1_M1", "E1")), operators=("ctr",),
                      postulates=(PostulateId.LC,), schemas=(SchemaId.DP1Ax,), max_blocks=2)
    report = run_audit(cfg)
    verdicts = [(r["check"], r["model"].startswith("{w1<=w2"), r["verdict"]) for r in report.records]
    assert ("LC", False, "error") in verdicts
    assert ("DP1Ax", True, "error") in verdicts
    assert report.exit_code == 2
    assert any("requires total preorder" in r["witness"]["message"] for r in report.records
               if r["verdict"] == "error")


def test_config_files(tmp_path):
    table = tmp_path / "t.json"
    table.write_text(json.dumps([{"model": [["w1", "w1"], ["w2", "w2"]], "extension": ["w1", "w2"],
                                  "output": [["w1", "w1"], ["w1", "w2"], ["w2", "w1"], ["w2", "w2"]]}]))
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({
        "universe": {"fixtures": ["F1_M1"]},
        "operators": ["mine", "id"],
        "tables": {"mine": "t.json"},
        "postulates": ["dp1", "dp1comp"],
        "caps": {"max_blocks": 4},
    }))
    cfg = load_config(path)
    assert cfg.max_blocks == 4 and cfg.operators == ("mine", "id")
    verdicts = [(r["op"], r["check"], r["verdict"]) for r in run_audit(cfg).records]
    assert verdicts == [("mine", "DP1", "fail"), ("mine", "DP1comp", "pass"),
                        ("id", "DP1", "pass"), ("id", "DP1comp", "pass")]


@pytest.mark.parametrize("doc", [
    {},
    {"universe": {}},
    {"universe": {"enumerate": 2}, "operators": ["nosuch"]},
    {"universe": {"enumerate": 2}, "postulates": ["dp9"]},
    {"universe": {"enumerate": 2}, "caps": {"max_blocks": 0}},
    {"universe": {"enumerate": 2}, "tables": {"t": "missing.json"}, "operators": ["t"]},
])
def test_bad_configs(doc, tmp_path):
    with pytest.raises(ConfigError):
        config_from_dict(doc, tmp_path)


def test_unreadable_config(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "none.json")


def test_random_universe_config():
    cfg = config_from_dict({"universe": {"random": {"worlds": 4, "count": 5, "seed": 3}},
                            "postulates": ["faith"]})
    report = run_audit(cfg)
    assert report.summary["pass"] == 5
    assert report.environment["models"] == 5
