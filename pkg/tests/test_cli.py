import json

import pytest

from qmcforge.cli import main, parse_weights
from qmcforge.errors import UsageError


def run(args):
    return main(args)


class TestWeightSpecs:
    def test_product_formula(self):
        W = parse_weights("product:j^-2")
        assert W.weight({3}) == pytest.approx(1 / 9)

    def test_product_list(self):
        W = parse_weights("product:1,0.5,0.25")
        assert W.weight({2}) == 0.5

    def test_pod(self):
        W = parse_weights("pod:1,2|0.5,0.5")
        assert W.weight({1, 2}) == pytest.approx(2 * 0.25)

    def test_explicit(self):
        W = parse_weights("explicit:1=0.5;1,2=0.25")
        assert W.weight({1, 2}) == 0.25
        assert W.weight({2}) == 0.0

    def test_bad_spec(self):
        with pytest.raises(UsageError):
            parse_weights("nonsense")


class TestConstruct:
    def test_lattice_roundtrip(self, tmp_path, capsys):
        rule_path = tmp_path / "rule.json"
        code = run(["construct", "--kind", "lattice", "--N", "31", "--s", "4",
                    "--alpha", "1", "--weights", "product:j^-2",
                    "--out", str(rule_path)])
        assert code == 0
        obj = json.loads(rule_path.read_text())
        assert obj["type"] == "lattice" and obj["z"][0] == 1
        trace_merit = obj["trace"][-1]["merit"]

        report_path = tmp_path / "report.json"
        code = run(["evaluate", str(rule_path), "--alpha", "1",
                    "--weights", "product:j^-2", "--out", str(report_path)])
        assert code == 0
        report = json.loads(report_path.read_text())
        assert report["P"] == pytest.approx(trace_merit, rel=1e-12)

    def test_poly_default_modulus(self, tmp_path):
        rule_path = tmp_path / "rule.json"
        code = run(["construct", "--kind", "poly-lattice", "--b", "2", "--m", "5",
                    "--s", "3", "--alpha", "1", "--weights", "product:j^-2",
                    "--out", str(rule_path)])
        assert code == 0
        obj = json.loads(rule_path.read_text())
        assert obj["p"] == [1, 0, 1, 0, 0, 1]  # x^5 + x^2 + 1

    def test_fast_composite_rejected(self, tmp_path):
        code = run(["construct", "--kind", "lattice", "--N", "12", "--s", "2",
                    "--alpha", "1", "--weights", "product:j^-2", "--fast",
                    "--out", str(tmp_path / "r.json")])
        assert code == 2

    def test_random_rule_seeded(self, tmp_path):
        p1 = tmp_path / "a.json"
        p2 = tmp_path / "b.json"
        for p in (p1, p2):
            assert run(["construct", "--N", "17", "--s", "3", "--alpha", "1",
                        "--weights", "product:j^-2", "--random", "--seed", "7",
                        "--out", str(p)]) == 0
        assert json.loads(p1.read_text())["z"] == json.loads(p2.read_text())["z"]


class TestEvaluate:
    def test_missing_file(self):
        assert run(["evaluate", "/nonexistent/rule.json", "--alpha", "1",
                    "--weights", "product:j^-2"]) == 2

    def test_rho_and_discrepancy(self, tmp_path):
        rule_path = tmp_path / "rule.json"
        run(["construct", "--N", "16", "--s", "2", "--alpha", "1",
             "--weights", "product:j^-2", "--out", str(rule_path)])
        report_path = tmp_path / "rep.json"
        code = run(["evaluate", str(rule_path), "--alpha", "1",
                    "--weights", "product:j^-2", "--rho", "--discrepancy",
                    "--out", str(report_path)])
        assert code == 0
        rep = json.loads(report_path.read_text())
        assert rep["rho"] is not None
        assert rep["rho"] <= rep["P"] * (1 + 1e-12)
        assert all(e["phi"] is not None for e in rep["per_subset"])
        disc = rep["discrepancy"]
        assert disc["exact_dstar"] <= disc["bound_joe"] + 1e-9
        assert disc["exact_dstar"] <= disc["bound_rho"] + 1e-9

    def test_resource_cap_exit_three(self, tmp_path):
        # figure-of-merit enumeration is capped at s <= 4
        rule_path = tmp_path / "rule.json"
        run(["construct", "--N", "13", "--s", "5", "--alpha", "1",
             "--weights", "product:j^-2", "--out", str(rule_path)])
        code = run(["evaluate", str(rule_path), "--alpha", "1",
                    "--weights", "product:j^-2", "--rho"])
        assert code == 3

    def test_changed_parameters(self, tmp_path):
        # evaluating under different (alpha, gamma): the stability use case
        rule_path = tmp_path / "rule.json"
        run(["construct", "--N", "16", "--s", "2", "--alpha", "1",
             "--weights", "product:j^-2", "--out", str(rule_path)])
        out = tmp_path / "rep.json"
        assert run(["evaluate", str(rule_path), "--alpha", "2",
                    "--weights", "product:j^-4", "--out", str(out)]) == 0
        assert json.loads(out.read_text())["P"] > 0


class TestCertify:
    @pytest.fixture
    def lattice_rule_file(self, tmp_path):
        rule_path = tmp_path / "rule.json"
        run(["construct", "--N", "16", "--s", "2", "--alpha", "1",
             "--weights", "product:j^-2", "--out", str(rule_path)])
        return rule_path

    @pytest.fixture
    def poly_rule_file(self, tmp_path):
        rule_path = tmp_path / "rule.json"
        run(["construct", "--kind", "poly-lattice", "--m", "4", "--s", "2",
             "--alpha", "1", "--weights", "product:j^-2", "--out", str(rule_path)])
        return rule_path

    def test_thm1_passes(self, lattice_rule_file, capsys):
        code = run(["certify", str(lattice_rule_file), "--theorem", "thm1",
                    "--alpha", "1", "--weights", "product:j^-2",
                    "--alpha-prime", "2", "--weights-prime", "product:j^-4"])
        assert code == 0
        cert = json.loads(capsys.readouterr().out)
        assert cert["passed"]

    def test_thm2_passes(self, poly_rule_file, capsys):
        code = run(["certify", str(poly_rule_file), "--theorem", "thm2",
                    "--alpha", "1", "--weights", "product:j^-2",
                    "--alpha-prime", "2", "--weights-prime", "product:j^-4"])
        assert code == 0

    def test_jensen(self, lattice_rule_file):
        assert run(["certify", str(lattice_rule_file), "--theorem", "jensen",
                    "--alpha", "1", "--weights", "product:j^-2",
                    "--delta", "0.5"]) == 0

    def test_nonmonotone_usage_error(self, lattice_rule_file):
        code = run(["certify", str(lattice_rule_file), "--theorem", "thm1",
                    "--alpha", "1", "--weights", "explicit:1=0.1;1,2=0.5"])
        assert code == 2

    def test_failed_certificate_exit_one(self, tmp_path):
        # a deliberately bad vector violates the CBC guarantee at alpha = 2
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"type": "lattice", "N": 16, "z": [1, 1]}))
        code = run(["certify", str(bad), "--theorem", "prop1",
                    "--alpha", "2", "--weights", "order:1,1"])
        assert code == 1

    def test_prop2(self, poly_rule_file):
        assert run(["certify", str(poly_rule_file), "--theorem", "prop2",
                    "--alpha", "1", "--weights", "product:j^-2",
                    "--lambda", "0.75"]) == 0


class TestSweep:
    def test_csv_with_slope(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = run(["sweep", "--kind", "lattice", "--N-grid", "17,31,61",
                    "--s", "2", "--alpha", "1", "--weights", "product:j^-2",
                    "--out", str(out)])
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0].startswith("N_or_m,")
        assert len(lines) == 5  # header + 3 rows + slope footer
        assert lines[-1].startswith("# slope_log_sqrtP_vs_log_N")
        slope = float(lines[-1].split("=")[1])
        assert slope < -0.5

    def test_empty_grid_usage_error(self):
        assert run(["sweep", "--kind", "lattice", "--N-grid", "",
                    "--s", "2", "--alpha", "1", "--weights", "product:j^-2"]) == 2

    def test_certify_column(self, tmp_path, capsys):
        code = run(["sweep", "--kind", "lattice", "--N-grid", "8,16",
                    "--s", "2", "--alpha", "1", "--weights", "product:j^-2",
                    "--certify", "thm1"])
        assert code == 0
        outtext = capsys.readouterr().out
        assert "passed" in outtext.splitlines()[0]
        assert all("True" in line for line in outtext.splitlines()[1:3])

    def test_threads_env(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("QMCFORGE_THREADS", "2")
        code = run(["sweep", "--kind", "lattice", "--N-grid", "8,16,32",
                    "--s", "2", "--alpha", "1", "--weights", "product:j^-2"])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert [line.split(",")[0] for line in lines[1:4]] == ["8", "16", "32"]

    def test_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"N-grid": "8,16", "s": 2, "alpha": 1,
                                   "weights": "product:j^-2"}))
        assert run(["sweep", "--kind", "lattice", "--config", str(cfg)]) == 0
