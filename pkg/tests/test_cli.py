import json

import pytest
from click.testing import CliRunner

from intertwinor.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def run_ok(runner, args, **kwargs):
    result = runner.invoke(main, args, **kwargs)
    assert result.exit_code == 0, result.output
    return result


class TestEval:
    def test_normalized_record(self, runner):
        result = run_ok(runner, ["eval", "--p", "4", "--q", "6", "--k", "2", "--a", "1",
                                 "--jp", "1", "--j", "2", "--r", "1",
                                 "--family", "m1-delta"])
        record = json.loads(result.output)
        assert record["s"] == "2" and record["Jp"] == "2" and record["J"] == "4"
        assert record["coeff"] == "-3" and record["radicand"] == "3"
        assert record["family"] == "coexact"

    def test_r_zero_is_unit(self, runner):
        result = run_ok(runner, ["eval", "--p", "5", "--q", "4", "--k", "2", "--a", "1",
                                 "--jp", "2", "--j", "3", "--r", "0",
                                 "--family", "coexact"])
        record = json.loads(result.output)
        assert record["coeff"] == "1" and record["radicand"] == "1"

    def test_mixed_family_reports_trace_and_det(self, runner):
        result = run_ok(runner, ["eval", "--p", "4", "--q", "6", "--k", "2", "--a", "1",
                                 "--jp", "1", "--j", "2", "--r", "1", "--family", "m2"])
        record = json.loads(result.output)
        assert "det" in record and "trace_unit_seed" in record and "seed_squared" in record

    def test_even_order_operator(self, runner):
        result = run_ok(runner, ["eval", "--p", "4", "--q", "6", "--k", "2", "--a", "1",
                                 "--jp", "1", "--j", "2", "--r", "2",
                                 "--family", "coexact", "--operator", "even-order"])
        record = json.loads(result.output)
        assert record["operator"] == "even-order"
        assert "value" in record

    def test_nonexistent_type_fails(self, runner):
        result = runner.invoke(main, ["eval", "--p", "4", "--q", "6", "--k", "2", "--a", "1",
                                      "--jp", "0", "--j", "2", "--r", "1",
                                      "--family", "m1-d"])
        assert result.exit_code != 0
        assert "empty" in result.output

    def test_exact_mode_rejects_non_integer_r(self, runner):
        result = runner.invoke(main, ["eval", "--p", "4", "--q", "6", "--k", "2", "--a", "1",
                                      "--jp", "1", "--j", "2", "--r", "1/2",
                                      "--family", "coexact"])
        assert result.exit_code != 0
        assert "integer" in result.output

    def test_float_mode_accepts_real_r(self, runner):
        result = run_ok(runner, ["eval", "--p", "4", "--q", "6", "--k", "2", "--a", "1",
                                 "--jp", "1", "--j", "2", "--r", "0.5",
                                 "--family", "coexact", "--mode", "float"])
        record = json.loads(result.output)
        assert record["mode"] == "float"
        assert "value_float" in record

    def test_float_mode_integral_r_takes_exact_path(self, runner):
        # the value sits on a numeric gamma pole pair but is finite exactly
        result = run_ok(runner, ["eval", "--p", "4", "--q", "6", "--k", "2", "--a", "1",
                                 "--jp", "1", "--j", "2", "--r", "1.0",
                                 "--family", "coexact", "--mode", "float"])
        record = json.loads(result.output)
        assert record["coeff"] == "-3" and not record["pole"]

    def test_degenerate_normalization_fails(self, runner):
        # p = q = 2, k = 0 has s = 1 = r
        result = runner.invoke(main, ["eval", "--p", "2", "--q", "2", "--k", "0", "--a", "0",
                                      "--jp", "1", "--j", "1", "--r", "1",
                                      "--family", "coexact"])
        assert result.exit_code != 0


class TestTable:
    ARGS = ["table", "--p", "4", "--q", "6", "--k", "2", "--a", "1",
            "--jp-max", "2", "--j-max", "2", "--r", "1", "--family", "m1-delta"]

    def test_csv_deterministic(self, runner):
        first = run_ok(runner, self.ARGS).output
        second = run_ok(runner, self.ARGS).output
        assert first == second
        header, *rows = first.splitlines()
        assert header.startswith("p,q,k,a,jp,j,r,family,operator")
        assert rows  # grid is nonempty

    def test_rows_are_lexicographic(self, runner):
        out = run_ok(runner, self.ARGS).output
        keys = [tuple(map(int, line.split(",")[4:6])) for line in out.splitlines()[1:]]
        assert keys == sorted(keys)

    def test_empty_grid(self, runner):
        args = self.ARGS.copy()
        args[args.index("--jp-max") + 1] = "-1"
        out = run_ok(runner, args).output
        assert out.splitlines()[1:] == []

    def test_jsonl_format(self, runner):
        out = run_ok(runner, self.ARGS + ["--format", "jsonl"]).output
        records = [json.loads(line) for line in out.splitlines()]
        assert records and all(rec["p"] == 4 for rec in records)

    def test_output_file_and_outdir_override(self, runner, tmp_path, monkeypatch):
        monkeypatch.setenv("INTERTWINOR_OUTDIR", str(tmp_path))
        run_ok(runner, self.ARGS + ["-o", "table.csv"])
        assert (tmp_path / "table.csv").exists()

    def test_degenerate_rows_are_marked(self, runner):
        out = run_ok(runner, ["table", "--p", "2", "--q", "2", "--k", "0", "--a", "0",
                              "--jp-max", "1", "--j-max", "1", "--r", "1",
                              "--family", "coexact"]).output
        rows = out.splitlines()[1:]
        assert rows and all(",degenerate," in row for row in rows)


class TestVerify:
    def test_exit_zero_and_report(self, runner, tmp_path):
        report = tmp_path / "report.jsonl"
        result = run_ok(runner, ["verify", "--suite", "scalar", "--p-max", "3",
                                 "--q-max", "3", "--j-max", "2", "--r-max", "2",
                                 "-o", str(report)])
        assert "scalar:" in result.output
        lines = report.read_text().splitlines()
        assert lines and all(json.loads(line)["check"] == "scalar-reduction"
                             for line in lines)

    def test_all_suites_small_grid(self, runner, tmp_path):
        report = tmp_path / "report.jsonl"
        result = run_ok(runner, ["verify", "--p-max", "3", "--q-max", "3",
                                 "--j-max", "2", "--r-max", "1", "-o", str(report)])
        for name in ("diamond", "interface", "det", "even-order", "scalar"):
            assert f"{name}:" in result.output


class TestTorus:
    def test_pass_record(self, runner):
        result = run_ok(runner, ["torus", "--k", "1", "--r", "1", "--M", "6"])
        record = json.loads(result.output.splitlines()[-1])
        assert record["status"] == "pass"
        assert record["check"] == "intertwining-residual"
        assert record["lhs"] == "0.0"
        assert record["point"]["M"] == 6

    def test_strict_tolerance_failure_exit(self, runner):
        # float mode at a non-integer order leaves roundoff; tol 0 must fail
        result = runner.invoke(main, ["torus", "--k", "0", "--r", "1.5", "--m", "6",
                                      "--mode", "float", "--tol", "0"])
        assert result.exit_code == 1
        record = json.loads(result.output.splitlines()[-1])
        assert record["status"] == "fail"

    def test_exact_mode_rejects_non_integer(self, runner):
        result = runner.invoke(main, ["torus", "--k", "0", "--r", "0.5", "--m", "6"])
        assert result.exit_code != 0
