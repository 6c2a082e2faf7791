import json

from monoclif.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out) if out else None


class TestVerify:
    def test_n3_all_pass(self, capsys):
        code, body = run_json(capsys, "verify", "--n", "3")
        assert code == 0
        assert body["exit_status"] == 0
        assert all(c["status"] == "pass" for c in body["checks"])

    def test_deterministic_output(self, capsys):
        _, out1 = run(capsys, "verify", "--n", "2")
        _, out2 = run(capsys, "verify", "--n", "2")
        assert out1 == out2

    def test_perturbed_constant_fails(self, capsys):
        code, body = run_json(capsys, "verify", "--n", "3",
                              "--perturb", "sigma-const")
        assert code == 1
        failing = [c["name"] for c in body["checks"] if c["status"] == "fail"]
        assert "spin_action_is_representation" in failing

    def test_n1_degenerate_passes(self, capsys):
        code, body = run_json(capsys, "verify", "--n", "1")
        assert code == 0

    def test_unsupported_n(self, capsys):
        code, _ = run(capsys, "verify", "--n", "9")
        assert code == 64


class TestWeight:
    def test_trace_n5(self, capsys):
        code, body = run_json(capsys, "weight", "--symbol", "trace", "--n", "5")
        assert code == 0
        assert body["report"]["weight"] == "-4"

    def test_clifford_n4(self, capsys):
        code, body = run_json(capsys, "weight", "--symbol", "clifford", "--n", "4")
        assert code == 0
        assert body["report"]["weight"] == "-3/2"
        assert body["report"]["operator"] == "E[-3/2] -> E[-5/2]"

    def test_hodge_negative(self, capsys):
        code, body = run_json(capsys, "weight", "--symbol", "hodge", "--n", "4")
        assert code == 2
        assert body["report"]["weight"] is None
        assert body["report"]["message"] == "no conformal weight exists"

    def test_rarita(self, capsys):
        code, body = run_json(capsys, "weight", "--symbol", "rarita", "--n", "3")
        assert code == 0
        assert body["report"]["weight"] == "-1"

    def test_rarita_j(self, capsys):
        code, body = run_json(capsys, "weight", "--symbol", "rarita-j",
                              "--n", "3", "--j", "2")
        assert code == 0
        assert body["report"]["weight"] == "-1"

    def test_unknown_symbol_usage_error(self, capsys):
        assert main(["weight", "--symbol", "nope", "--n", "3"]) == 64


class TestGamma:
    def test_even_json(self, capsys):
        code, body = run_json(capsys, "gamma", "--n", "4")
        assert code == 0
        assert body["copies"] == 4
        assert body["block_defect"] == 0
        assert len(body["gamma"]) == 4
        # entries carry the four exact rational component strings
        cell = body["gamma"]["gamma1"][0][1]
        assert set(cell) == {"re", "im", "s2re", "s2im"}

    def test_even_csv(self, capsys):
        code, out = run(capsys, "gamma", "--n", "2", "--format", "csv")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "name,row,col,re,im"
        assert any(line.startswith("phi,") for line in lines)

    def test_odd(self, capsys):
        code, body = run_json(capsys, "gamma", "--n", "3")
        assert code == 0
        assert body["report"]["copies"] == 4
        assert body["report"]["spinor_dim"] == 2

    def test_resource_guard(self, capsys):
        assert main(["gamma", "--n", "8"]) == 64  # exact mode caps at 6
        code, _ = run(capsys, "gamma", "--n", "8", "--mode", "float")
        assert code == 0


class TestRarita:
    def test_n3(self, capsys):
        code, body = run_json(capsys, "rarita", "--n", "3")
        assert code == 0
        assert body["dims"]["F"] == 16
        assert body["weight"]["weight"] == "-1"
        assert all(body["checks"].values())

    def test_n2_degenerate_reported(self, capsys):
        code, body = run_json(capsys, "rarita", "--n", "2")
        assert code == 0
        assert body["degenerate"] is True
        assert body["weight"]["weight"] is None


class TestGrid:
    def test_invariance_at_invariant_weight(self, capsys):
        code, body = run_json(capsys, "grid", "--n", "3",
                              "--test", "dirac-invariance", "--h", "0.25")
        assert code == 0
        assert body["residual"] <= 1e-12

    def test_invariance_at_w0(self, capsys):
        code, body = run_json(capsys, "grid", "--n", "3",
                              "--test", "dirac-invariance", "--w", "0",
                              "--h", "0.25")
        assert code == 0
        assert body["residual"] > 0

    def test_hodge_control(self, capsys):
        code, body = run_json(capsys, "grid", "--n", "3",
                              "--test", "hodge-noninvariance", "--h", "0.25")
        assert code == 0
        assert body["normalized_residual"] > 0.01

    def test_cauchy_csv(self, capsys):
        code, out = run(capsys, "grid", "--n", "3", "--test", "cauchy",
                        "--h", "0.2,0.1", "--format", "csv")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "h,residual,order"
        assert len(lines) == 3

    def test_bad_h(self, capsys):
        assert main(["grid", "--n", "3", "--test", "cauchy", "--h", "zz"]) == 64


class TestConfig:
    def test_config_file_defaults_and_flag_override(self, tmp_path, capsys):
        cfgfile = tmp_path / "cfg.json"
        cfgfile.write_text(json.dumps({"n": 5, "symbol": "trace"}))
        code, body = run_json(capsys, "--config", str(cfgfile), "weight")
        assert code == 0
        assert body["report"]["weight"] == "-4"  # n, symbol from the file
        code, body = run_json(capsys, "--config", str(cfgfile), "weight",
                              "--n", "3")
        assert body["report"]["weight"] == "-2"  # flag wins over file

    def test_unknown_config_key(self, tmp_path, capsys):
        cfgfile = tmp_path / "cfg.json"
        cfgfile.write_text(json.dumps({"bogus": 1}))
        assert main(["--config", str(cfgfile), "verify"]) == 64

    def test_out_file(self, tmp_path, capsys):
        dest = tmp_path / "report.json"
        code = main(["weight", "--symbol", "skew", "--n", "3",
                     "--out", str(dest)])
        assert code == 0
        body = json.loads(dest.read_text())
        assert body["report"]["weight"] == "-1"
