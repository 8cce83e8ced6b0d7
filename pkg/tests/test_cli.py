import json
import math

import numpy as np
import pytest

from qsnr import applications, cli, matrix_io, qcore
from qsnr.errors import ParseError
from qsnr.reproduce import fixed_switching_system


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, json.loads(out.out) if out.out.strip() else None, out.err


@pytest.fixture
def triple_files(tmp_path, three_level_triple):
    paths = []
    for name, m in zip(("r1", "r2", "a"), three_level_triple):
        p = tmp_path / f"{name}.json"
        matrix_io.save_matrix(p, m)
        paths.append(p)
    return paths


class TestMatrixIO:
    def test_roundtrip_exact(self, tmp_path):
        m = qcore.random_density(4, 3, 0)
        p = tmp_path / "m.json"
        matrix_io.save_matrix(p, m)
        np.testing.assert_array_equal(matrix_io.load_matrix(p), m)
        doc = json.loads(p.read_text())
        assert doc["dim"] == 4 and len(doc["entries"]) == 16

    def test_row_major(self):
        m = matrix_io.matrix_from_json({"dim": 2, "entries": [[1, 0], [2, 0], [3, 0], [4, 1]]})
        np.testing.assert_array_equal(m, [[1, 2], [3, 4 + 1j]])

    @pytest.mark.parametrize("doc", [
        {"dim": 2},
        {"dim": 2, "entries": [[1, 0]]},
        {"dim": 0, "entries": []},
        {"dim": 1, "entries": [["a", 0]]},
        {"dim": 1, "entries": [[1, 0, 0]]},
        [1, 2],
    ])
    def test_malformed(self, doc):
        with pytest.raises(ParseError):
            matrix_io.matrix_from_json(doc)

    def test_json_error_location(self):
        with pytest.raises(ParseError, match=r"f\.json:2:"):
            matrix_io.loads('{"dim": 1,\n "entries" [[1, 0]]}', "f.json")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            matrix_io.load_matrix(tmp_path / "nope.json")


class TestAnalyze:
    def test_report(self, capsys, triple_files):
        code, rep, _ = run(capsys, "--no-timestamp", "analyze", *triple_files)
        assert code == 0
        assert rep["signal"] == pytest.approx(1 / 3)
        assert "timestamp" not in rep

    def test_timestamp_and_out(self, capsys, triple_files, tmp_path):
        out = tmp_path / "rep.json"
        code, rep, _ = run(capsys, "analyze", *triple_files, "--out", out)
        assert code == 0 and "timestamp" in rep
        assert json.loads(out.read_text()) == rep

    def test_invalid_state(self, capsys, tmp_path, triple_files):
        bad = tmp_path / "bad.json"
        matrix_io.save_matrix(bad, np.eye(3))
        code, _, err = run(capsys, "analyze", bad, triple_files[1], triple_files[2])
        assert code == cli.EXIT_VALIDATION and "error" in err

    def test_dim_mismatch(self, capsys, tmp_path, triple_files):
        small = tmp_path / "s.json"
        matrix_io.save_matrix(small, np.eye(2) / 2)
        code, _, _ = run(capsys, "analyze", small, triple_files[1], triple_files[2])
        assert code == cli.EXIT_DIM

    def test_parse_error(self, capsys, tmp_path, triple_files):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code, _, err = run(capsys, "analyze", bad, triple_files[1], triple_files[2])
        assert code == cli.EXIT_PARSE and "bad.json:1:" in err


class TestExamples:
    @pytest.mark.parametrize("name", ["oscillator", "qubit", "fidelity3x3", "coherent", "switching"])
    def test_pass(self, capsys, name):
        code, rep, _ = run(capsys, "--no-timestamp", "examples", name)
        assert code == 0 and rep["pass"] and rep["example"] == name

    def test_unknown(self, capsys):
        code, _, err = run(capsys, "examples", "nope")
        assert code == cli.EXIT_UNKNOWN and "nope" in err

    def test_oscillator_identical_flag(self, capsys):
        code, rep, _ = run(capsys, "examples", "oscillator", "--theta", math.pi / 4)
        assert code == 0 and rep["degenerate"]

    def test_qubit_params(self, capsys):
        code, rep, _ = run(capsys, "examples", "qubit", "--p", 0.9, "--sign", -1)
        assert code == 0 and rep["params"] == {"p": 0.9, "sign": -1}

    def test_fidelity3x3_values(self, capsys):
        _, rep, _ = run(capsys, "examples", "fidelity3x3")
        assert rep["comparison"]["tighter"] == "snr_based"
        assert abs(rep["comparison"]["snr_based"] - 29 / 30) <= 1e-12


class TestVerify:
    def test_clean_run(self, capsys):
        code, rep, _ = run(capsys, "--no-timestamp", "verify", "--dims", "2,3", "--instances", 10)
        assert code == 0 and rep["total_violations"] == 0
        assert "wall_time_s" not in rep

    def test_tiny_tolerance_fails(self, capsys):
        # equality instances sit exactly on the bound, so float noise shows up
        code, rep, _ = run(capsys, "verify", "--dims", "3", "--instances", 20, "--tolerance", 1e-30)
        assert code == cli.EXIT_FAIL and rep["total_violations"] > 0

    def test_config_file_and_override(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"dims": [2], "instances_per_dim": 5, "base_seed": 7, "checks": ["lemma"]}))
        _, rep, _ = run(capsys, "verify", "--config", cfg)
        assert rep["config"]["base_seed"] == 7 and list(rep["checks"]) == ["lemma"]
        _, rep, _ = run(capsys, "--seed", 3, "verify", "--config", cfg, "--instances", 4)
        assert rep["config"]["base_seed"] == 3 and rep["config"]["instances_per_dim"] == 4

    def test_bad_config(self, capsys):
        code, _, _ = run(capsys, "verify", "--checks", "bogus")
        assert code == cli.EXIT_PARSE

    def test_global_flags_after_subcommand(self, capsys):
        code, rep, _ = run(capsys, "verify", "--dims", "2", "--instances", 3, "--seed", 11, "--no-timestamp")
        assert code == 0 and rep["config"]["base_seed"] == 11 and "timestamp" not in rep


class TestOptimizeCoherentPower:
    def test_optimize(self, capsys, tmp_path):
        r1, r2 = tmp_path / "r1.json", tmp_path / "r2.json"
        matrix_io.save_matrix(r1, np.diag([0.75, 0.25]))
        matrix_io.save_matrix(r2, np.diag([0.25, 0.75]))
        code, rep, _ = run(capsys, "optimize", r1, r2, "--restarts", 2)
        assert code == 0
        assert rep["snr"] <= rep["bound"] + 1e-9

    def test_optimize_orthogonal(self, capsys, tmp_path):
        r1, r2 = tmp_path / "r1.json", tmp_path / "r2.json"
        matrix_io.save_matrix(r1, np.diag([1.0, 0]))
        matrix_io.save_matrix(r2, np.diag([0, 1.0]))
        _, rep, _ = run(capsys, "optimize", r1, r2)
        assert rep["snr"] == "inf" and rep["slack"] == "nan"

    def test_optimize_identical(self, capsys, tmp_path):
        r1 = tmp_path / "r1.json"
        matrix_io.save_matrix(r1, np.eye(2) / 2)
        code, _, _ = run(capsys, "optimize", r1, r1)
        assert code == cli.EXIT_IDENTICAL

    def test_coherent_flags_and_spec(self, capsys, tmp_path):
        code, rep, _ = run(capsys, "coherent", "--nbar", 1.0)
        assert code == 0 and rep["fidelity"] == pytest.approx(math.exp(-0.5))
        assert rep["bound_as_printed"] == pytest.approx(2 * rep["bound_eq3"])
        spec = tmp_path / "c.json"
        spec.write_text(json.dumps({"nbar": 0.1, "truncation_dim": 12}))
        _, rep, _ = run(capsys, "coherent", spec)
        assert rep["truncation_dim"] == 12

    def test_coherent_errors(self, capsys):
        assert run(capsys, "coherent")[0] == cli.EXIT_PARSE
        assert run(capsys, "coherent", "--nbar", -1)[0] == cli.EXIT_VALIDATION
        assert run(capsys, "coherent", "--nbar", 4, "--truncation", 3)[0] == cli.EXIT_VALIDATION

    def test_power(self, capsys, tmp_path):
        path = tmp_path / "sys.json"
        sys_ = applications.random_switching_system(2, 2, 4)
        path.write_text(matrix_io.dumps(cli.switching_system_to_json(sys_)))
        code, rep, _ = run(capsys, "power", path)
        assert code == 0 and rep["within_bound"]
        assert rep["power"] == pytest.approx(applications.switching_power(sys_))
        assert cli.load_switching_system(path).tau == sys_.tau

    def test_power_fixed_system(self, capsys, tmp_path):
        path = tmp_path / "sys.json"
        path.write_text(matrix_io.dumps(cli.switching_system_to_json(fixed_switching_system())))
        _, rep, _ = run(capsys, "power", path)
        assert rep["power"] == pytest.approx(0.0, abs=1e-15)

    def test_power_missing_field(self, capsys, tmp_path):
        path = tmp_path / "sys.json"
        path.write_text(json.dumps({"h_t": matrix_io.matrix_to_json(np.eye(2))}))
        assert run(capsys, "power", path)[0] == cli.EXIT_PARSE
