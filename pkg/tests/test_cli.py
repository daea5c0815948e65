"""End-to-end command-line behaviour: artifacts, determinism, exit codes."""

import json
import os

import pytest

from expsampling.cli import list_registries, main


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestList:
    def test_registries_listed(self, capsys):
        code, out, _ = run_cli(["list"], capsys)
        assert code == 0
        for name in ("bspline2", "bspline3", "gauss1", "linc0", "weight", "psi"):
            assert name in out

    def test_list_registries_function(self):
        text = list_registries()
        assert "kernels:" in text and "functions:" in text


class TestKernelCheck:
    def test_json_artifact(self, tmp_path, capsys):
        out_file = tmp_path / "report.json"
        code, out, _ = run_cli(
            ["kernel-check", "--kernel", "bspline3", "--mu", "5", "--r", "1",
             "--output", str(out_file)],
            capsys,
        )
        assert code == 0
        assert "chi1=yes chi2=yes" in out
        payload = json.loads(out_file.read_text())
        assert payload["results"]["eta"] == pytest.approx(0.125)
        assert payload["config"]["kernel"] == "bspline3"

    def test_verdicts_do_not_fail_the_run(self, capsys):
        code, out, _ = run_cli(["kernel-check", "--kernel", "bspline2"], capsys)
        assert code == 0
        assert "chi2=no" in out


class TestMoments:
    def test_divergent_reported(self, capsys):
        code, out, _ = run_cli(["moments", "--kernel", "linc0", "--nu", "0,2"], capsys)
        assert code == 0
        assert "divergent" in out


class TestReconstruct:
    def test_csv_shape_and_header(self, tmp_path, capsys):
        out_file = tmp_path / "rec.csv"
        code, _, _ = run_cli(
            ["reconstruct", "--function", "log", "--kernel", "bspline2", "--op", "S",
             "--w", "8", "--grid", "-1:1:101", "--format", "csv", "--output", str(out_file)],
            capsys,
        )
        assert code == 0
        lines = out_file.read_text().splitlines()
        assert lines[0].startswith("# config:")
        assert lines[1] == "x,log_x,value,error_vs_f,weighted_error"
        assert len(lines) == 103  # header comment + column row + 101 points

    def test_byte_identical_reruns(self, tmp_path, capsys):
        args = ["reconstruct", "--function", "weight", "--kernel", "bspline3", "--op", "MG",
                "--w", "8", "--grid", "-1:1:33", "--format", "csv"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run_cli(args + ["--output", str(a)], capsys)[0] == 0
        assert run_cli(args + ["--output", str(b)], capsys)[0] == 0
        ra = a.read_bytes().replace(b"a.csv", b"X.csv")
        rb = b.read_bytes().replace(b"b.csv", b"X.csv")
        assert ra == rb

    def test_outdir_env(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("EXPSAMPLING_OUTDIR", str(tmp_path))
        code, _, _ = run_cli(
            ["reconstruct", "--function", "one", "--kernel", "bspline2", "--op", "S",
             "--w", "4", "--grid", "-1:1:11", "--format", "csv", "--output", "rel.csv"],
            capsys,
        )
        assert code == 0
        assert (tmp_path / "rel.csv").exists()

    def test_usage_error_on_unknown_kernel(self, capsys):
        code, _, err = run_cli(
            ["reconstruct", "--function", "log", "--kernel", "nope", "--op", "S",
             "--w", "8", "--grid", "-1:1:11"],
            capsys,
        )
        assert code == 2
        assert "unknown kernel" in err

    def test_usage_error_on_bad_grid(self, capsys):
        code, _, err = run_cli(
            ["reconstruct", "--function", "log", "--kernel", "bspline2", "--op", "S",
             "--w", "8", "--grid", "oops"],
            capsys,
        )
        assert code == 2
        assert "grid" in err


class TestConverge:
    def test_decreasing_errors_csv(self, tmp_path, capsys):
        out_file = tmp_path / "conv.csv"
        code, out, _ = run_cli(
            ["converge", "--function", "weight", "--kernel", "bspline3",
             "--w", "4,8,16,32,64", "--interval", "0.5,2", "--grid", "-0.6:0.6:65",
             "--format", "csv", "--output", str(out_file)],
            capsys,
        )
        assert code == 0
        rows = [l.split(",") for l in out_file.read_text().splitlines()[2:]]
        errs = [float(r[2]) for r in rows]
        assert all(errs[i + 1] < errs[i] for i in range(len(errs) - 1))


class TestExitCodes:
    def test_rate_ok(self, capsys):
        code, out, _ = run_cli(
            ["rate", "--function", "weight", "--kernel", "bspline3", "--w", "8,16",
             "--grid", "-1:1:65"],
            capsys,
        )
        assert code == 0
        assert "[ok]" in out

    def test_rate_hypothesis_not_met(self, capsys):
        code, _, err = run_cli(
            ["rate", "--function", "weight", "--kernel", "bspline2", "--w", "8"], capsys
        )
        assert code == 3
        assert "hypothesis" in err

    def test_voronovskaja_needs_flag_for_varying_moments(self, capsys):
        code, _, err = run_cli(
            ["voronovskaja", "--function", "damped_log2", "--kernel", "bspline3",
             "--w", "8", "--grid", "-1:1:33"],
            capsys,
        )
        assert code == 3
        code, out, _ = run_cli(
            ["voronovskaja", "--function", "damped_log2", "--kernel", "bspline3",
             "--w", "8", "--grid", "-1:1:33", "--allow-varying-moments"],
            capsys,
        )
        assert code == 0
        assert "[ok]" in out


class TestSuite:
    def test_suite_runs_clean(self, tmp_path, capsys):
        out_file = tmp_path / "suite.md"
        code, out, _ = run_cli(
            ["suite", "--kernels", "bspline3", "--format", "md", "--output", str(out_file)],
            capsys,
        )
        assert code == 0
        assert out_file.read_text().lstrip("<!-- config:").strip()
        assert "fitted order" in out

    def test_suite_json_deterministic(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        base = ["suite", "--kernels", "bspline3", "--seed", "7"]
        assert run_cli(base + ["--output", str(a)], capsys)[0] == 0
        assert run_cli(base + ["--output", str(b)], capsys)[0] == 0
        ra = a.read_bytes().replace(b"a.json", b"X")
        rb = b.read_bytes().replace(b"b.json", b"X")
        assert ra == rb
