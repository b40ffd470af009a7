import json
import subprocess
import sys

import pytest

from hecketools import cli, zeta
from hecketools.cli import (
    Entry,
    SuiteConfig,
    VerificationReport,
    emit_formula,
    main,
    report_render,
    run_suite,
    select_checks,
)
from hecketools.errors import UnknownFilter, UnknownFormula
from hecketools.exactalg import RatFunc


def test_appendix_filter():
    rep = run_suite(SuiteConfig(), ["appendix"])
    keys = [(e.theorem_anchor.rsplit("[", 1)[1], e.rank) for e in rep.entries]
    assert keys == [(f"{m}]", n) for m in ("TypeC", "TypeD0", "Type2D") for n in range(1, 6)]
    assert all(e.status == "pass" for e in rep.entries)
    assert rep.exit_code == 0


def test_filters():
    assert select_checks([]) == list(cli.CHECKS)
    assert select_checks(["weyl"]) == ["appendix", "lemma-trick"]
    with pytest.raises(UnknownFilter):
        select_checks(["nope"])


def test_config_validation():
    with pytest.raises(ValueError):
        SuiteConfig(max_rank={"weyl": 0})
    with pytest.raises(ValueError):
        SuiteConfig(seed=-1)
    assert SuiteConfig.capped(2).max_rank == {s: 2 for s in cli.SUITES}


def test_emit_examples():
    data = json.loads(emit_formula("L_sigma_minus", 1, "json"))
    assert RatFunc.from_json(data["value"]) == zeta.lfactor("L_sigma_minus", 1)
    q = zeta.BASE.q
    data = json.loads(emit_formula("vol_bruhat", 2, "json", index=1))
    assert RatFunc.from_json(data["value"]) == q * (1 + q) / ((q + 1) * (q**2 + 1))
    assert emit_formula("C", 1, "text") == (1 / q).to_text() + "\n"
    assert emit_formula("c_function:c'", 1, "latex").startswith("\\frac")
    with pytest.raises(UnknownFormula):
        emit_formula("nope")


def test_every_formula_emits():
    for name in cli.FORMULAS:
        json.loads(emit_formula(name, 2, "json", index=1))


def test_render_empty_and_single():
    empty = VerificationReport({}, ())
    assert report_render(empty, "markdown") == "# hecketools verification report\n\n"
    one = VerificationReport({}, (Entry("weyl", "appendix", "x", 1, "pass", {"a": 1}),))
    rows = [line for line in report_render(one, "markdown").splitlines() if line.startswith("| appendix")]
    assert rows == ["| appendix | `x` | 1 | pass | {\"a\":1} |"]


def test_status_lattice():
    mk = lambda s: Entry("zeta", "t", "a", 1, s)
    assert VerificationReport({}, (mk("pass"), mk("exploratory"))).exit_code == 0
    rep = VerificationReport({}, (mk("pass"), mk("expected-counterexample"), mk("exploratory")))
    assert rep.worst_status == "expected-counterexample" and rep.exit_code == 0
    rep = VerificationReport({}, (mk("fail"), mk("expected-counterexample")))
    assert rep.worst_status == "fail" and rep.exit_code == 1
    assert json.loads(report_render(rep))["summary"]["exit_code"] == 1


def test_failures_carry_counterexamples():
    rep = run_suite(SuiteConfig.capped(1), ["spherical-average"])
    fails = [e for e in rep.entries if e.status == "fail"]
    assert fails and all(e.to_json()["detail"]["counterexample"] for e in fails)


def test_expected_counterexamples():
    rep = run_suite(SuiteConfig.capped(1), ["kato", "sections"])
    flagged = [e.tag for e in rep.entries if e.status == "expected-counterexample"]
    assert sorted(flagged) == ["kato", "sections"]


def test_deterministic_json():
    cfg = SuiteConfig.capped(2, seed=11)
    a = report_render(run_suite(cfg, ["weyl", "satake", "lattices"]))
    b = report_render(run_suite(cfg, ["weyl", "satake", "lattices"]))
    assert a == b


def test_main_verify_writes_to_env_dir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(cli.OUT_DIR_ENV, str(tmp_path))
    code = main(["verify", "--filter", "appendix", "--max-rank", "2", "--format", "markdown"])
    assert code == 0
    assert (tmp_path / "report.md").read_text().startswith("# hecketools verification report")


def test_main_exit_codes(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["verify", "--filter", "qbinomial", "--max-rank", "1", "--out", str(out)]) == 1
    assert json.loads(out.read_text())["summary"]["worst_status"] == "fail"
    assert main(["verify", "--filter", "bogus"]) == 2
    assert main(["emit", "bogus"]) == 2


def test_main_weyl(capsys):
    assert main(["weyl", "length", "[2,-1]"]) == 0
    assert json.loads(capsys.readouterr().out)["length"] == 2
    assert main(["weyl", "word", "1,-2"]) == 0
    assert json.loads(capsys.readouterr().out)["word"] == [1, 0, 1]
    assert main(["weyl", "enumerate", "--rank", "2"]) == 0
    assert len(json.loads(capsys.readouterr().out)) == 8
    assert main(["weyl", "poincare", "--rank", "2", "--model", "Type2D"]) == 0
    assert json.loads(capsys.readouterr().out)["status"] == "pass"


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "hecketools", "emit", "C", "--rank", "1", "--format", "text"],
        capture_output=True,
        text=True,
        check=True,
    )
    assert res.stdout.strip() == "t^-2"
