import json
from fractions import Fraction

import pytest

from g12calc import cli
from g12calc.cli import (SuiteConfig, main, run_suites, strip_timings)


def test_unknown_suite_rejected_before_execution():
    with pytest.raises(ValueError):
        SuiteConfig(["pairings", "nonsense"])


def test_usage_error_exit_code(capsys):
    assert main(["verify", "--suites", "nonsense"]) == 2
    assert "unknown suite" in capsys.readouterr().err


def test_no_command_is_usage_error(capsys):
    assert main([]) == 2


def test_single_suite_filtering():
    cfg = SuiteConfig(["pairings"], seed=3)
    report = run_suites(cfg)
    assert set(c["suite"] for c in report["checks"]) == {"pairings"}
    assert report["summary"]["fail"] == 0


def test_all_expands_to_every_suite():
    cfg = SuiteConfig(["all"])
    assert cfg.suites == list(cli.SUITE_ORDER)


def test_exit_codes_pass_and_fail(monkeypatch, capsys):
    def fake_suite(cfg):
        return [{"check": "doomed", "claim": "always fails",
                 "status": "fail", "certificate": {}, "wall_time": 0.0}]
    monkeypatch.setitem(cli.SUITES, "pairings", fake_suite)
    assert main(["verify", "--suites", "pairings", "--format", "text"]) == 1
    out = capsys.readouterr().out
    assert "FAIL" in out


def test_report_records_carry_claims():
    report = run_suites(SuiteConfig(["frobenius"], seed=7))
    for record in report["checks"]:
        assert record["claim"]
        assert record["status"] in ("pass", "fail", "skip")
        assert "certificate" in record


def test_determinism_of_reports():
    r1 = strip_timings(run_suites(SuiteConfig(["spencer"], seed=7)))
    r2 = strip_timings(run_suites(SuiteConfig(["spencer"], seed=7)))
    assert json.dumps(r1, sort_keys=True) == json.dumps(r2, sort_keys=True)


def test_workers_do_not_change_report():
    base = strip_timings(run_suites(SuiteConfig(["frobenius", "bianchi"],
                                                seed=7)))
    threaded = strip_timings(run_suites(SuiteConfig(["frobenius", "bianchi"],
                                                    seed=7, workers=3)))
    assert json.dumps(base, sort_keys=True) == \
        json.dumps(threaded, sort_keys=True)


def test_decompose_product(capsys):
    assert main(["decompose", "V(1,2)*V(1,2)"]) == 0
    out = capsys.readouterr().out
    assert "V(2,4)" in out and "total dimension 36" in out


def test_decompose_single_module(capsys):
    assert main(["decompose", "V(0,0)"]) == 0
    out = capsys.readouterr().out
    assert "V(0,0)" in out and "total dimension 1" in out


def test_decompose_double_sum_formula(capsys):
    assert main(["decompose", "V(1,2)*V(3,4)"]) == 0
    out = capsys.readouterr().out
    # sum over p1 in {0,1}, p2 in {0,1,2} of V(4-2p1, 6-2p2)
    for label in ("V(4,6)", "V(4,4)", "V(4,2)", "V(2,6)", "V(2,4)", "V(2,2)"):
        assert label in out
    assert "total dimension 120" in out


def test_decompose_parse_error(capsys):
    assert main(["decompose", "W(1,2)"]) == 2


def test_transvect_values(capsys):
    assert main(["transvect", "x1^2", "y1^2", "1", "0"]) == 0
    assert "4*x1*y1" in capsys.readouterr().out
    assert main(["transvect", "x1^0*x2^2", "y2^2", "0", "2"]) == 0
    out = capsys.readouterr().out
    assert "bidegree (0,0)" in out and "2" in out


def test_transvect_product_case(capsys):
    assert main(["transvect", "x1*x2", "y1*y2", "0", "0"]) == 0
    assert "x1*y1*x2*y2" in capsys.readouterr().out.replace(" ", "")


def test_transvect_odd_self_pairing(capsys):
    assert main(["transvect", "x2^2 + y2^2", "x2^2 + y2^2", "0", "1"]) == 0
    assert "0" in capsys.readouterr().out


def test_transvect_range_violation(capsys):
    assert main(["transvect", "x1", "y1", "2", "0"]) == 2


def test_t_expression_routes_to_transvect(capsys):
    assert main(["decompose", "T(x1*x2^2, y1*y2^2; 1, 2)"]) == 0
    assert "bidegree (0,0)" in capsys.readouterr().out


def test_jmatrix_json(capsys):
    assert main(["jmatrix", "--c", "1", "--emit", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["rows"] == 12 and data["cols"] == 12


def test_closure_command_modes(capsys):
    for mode in ("h12", "g12"):
        assert main(["closure", "--mode", mode]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["all_zero"]
        assert all(v == "0" for v in data["residuals"].values())
    assert main(["closure", "--mode", "torsion-s30"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["torsion_structure"]["residual_is_predicted_torsion_terms"]


def test_rank_command(capsys):
    assert main(["rank", "--seed", "5", "--c", "2"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["rank_at_point"] == 10


def test_integrals_command(capsys):
    assert main(["integrals", "--check"]) == 0
    assert "pass" in capsys.readouterr().out


def test_constants_command(tmp_path, capsys):
    point = {f"a20_{k}": str(Fraction(k + 1, 2)) for k in range(3)}
    point.update({f"a02_{k}": str(Fraction(k - 1, 3)) for k in range(3)})
    point.update({f"b_{k}": str(Fraction(1, k + 1)) for k in range(6)})
    # one entry in the polynomial JSON layout, degree 0
    point["c"] = {"vars": [], "terms": [{"coeff": "3/4", "exps": []}]}
    path = tmp_path / "point.json"
    path.write_text(json.dumps(point))
    assert main(["constants", "--point", str(path)]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["c"] == "3/4"


def test_constants_missing_entries(tmp_path, capsys):
    path = tmp_path / "incomplete.json"
    path.write_text(json.dumps({"a20_0": "1"}))
    assert main(["constants", "--point", str(path)]) == 2


def test_env_override_seed(monkeypatch):
    monkeypatch.setenv("G12CALC_SEED", "123")
    parser = cli.build_parser()
    args = parser.parse_args(["verify"])
    assert args.seed == 123


def test_verify_writes_report(tmp_path):
    out = tmp_path / "report.json"
    assert main(["verify", "--suites", "frobenius", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["summary"]["fail"] == 0
