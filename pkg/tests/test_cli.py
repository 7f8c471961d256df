"""End-to-end tests for the command-line interface.

Everything goes through main(argv) so exit codes, stdout shape, and file
side effects are exercised exactly as a shell user would see them.  Sweep
invocations use a small model (n=400) to keep the suite fast.
"""

import json
import math

import numpy as np
import pytest

from specdiff.cli import main
from specdiff.density import BandSet, band_count_slope, delta_m
from specdiff.hankel import k_eps_trace_exact


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestDensityCommand:
    def test_window_value_matches_library(self, capsys):
        code, out, err = run(capsys, ["density", "--edges", "0.8", "--window", "0.4"])
        assert code == 0
        assert err == ""
        expected = band_count_slope(BandSet([0.8]), 0.4)
        value = float(out.splitlines()[1].split()[-1])
        assert value == pytest.approx(expected, rel=1e-10)

    def test_moment_value_matches_library(self, capsys):
        code, out, _ = run(capsys, ["density", "--edges", "0.8,0.6", "--moment", "2"])
        assert code == 0
        expected = delta_m(BandSet([0.8, 0.6]), 2)
        value = float(out.splitlines()[1].split()[-1])
        assert value == pytest.approx(expected, rel=1e-10)

    def test_json_payload(self, capsys):
        code, out, _ = run(
            capsys, ["--json", "density", "--edges", "0.8,0.6", "--window", "0.3"]
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["quantity"] == "band_count_slope"
        assert payload["argument"] == 0.3
        assert payload["edges"] == [0.8, 0.6]
        assert payload["value"] == pytest.approx(
            band_count_slope(BandSet([0.8, 0.6]), 0.3), rel=1e-10
        )

    def test_empty_edges_gives_zero_slope(self, capsys):
        code, out, _ = run(capsys, ["--json", "density", "--edges", "", "--window", "0.5"])
        assert code == 0
        assert json.loads(out)["value"] == 0.0

    def test_requires_exactly_one_quantity(self, capsys):
        code, _, err = run(capsys, ["density", "--edges", "0.8"])
        assert code == 2
        assert "exactly one" in err
        code, _, err = run(
            capsys, ["density", "--edges", "0.8", "--window", "0.4", "--moment", "2"]
        )
        assert code == 2

    def test_rejects_out_of_range_edge(self, capsys):
        code, _, err = run(capsys, ["density", "--edges", "1.5", "--window", "0.4"])
        assert code == 2
        assert "specdiff: error" in err

    def test_rejects_unparseable_edges(self, capsys):
        code, _, _ = run(capsys, ["density", "--edges", "0.8,oops", "--window", "0.4"])
        assert code == 2


class TestHankelCommand:
    ARGS = ["hankel", "--eps-start", "1e-2", "--eps-stop", "1e-4",
            "--count", "4", "--powers", "1,2"]

    def test_csv_shape_and_exact_columns(self, capsys):
        code, out, _ = run(capsys, self.ARGS)
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "epsilon,log_inv_eps,trace_m1,trace_m2,exact_m1,exact_m2"
        data = [line.split(",") for line in lines[1:5]]
        assert len(data) == 4
        for row in data:
            eps = float(row[0])
            assert float(row[1]) == pytest.approx(math.log(1.0 / eps), rel=1e-12)
            assert float(row[4]) == pytest.approx(k_eps_trace_exact(eps, 1), rel=1e-12)
            assert float(row[5]) == pytest.approx(k_eps_trace_exact(eps, 2), rel=1e-12)
        comments = [line for line in lines if line.startswith("#")]
        assert any(line.startswith("# m=1 fitted_slope=") for line in comments)
        assert any(line.startswith("# m=2 fitted_slope=") for line in comments)
        assert any(line.startswith("# resolution_ok=true") for line in comments)

    def test_empty_powers_prints_header_only(self, capsys):
        code, out, _ = run(capsys, ["hankel", "--powers", ""])
        assert code == 0
        assert out.strip() == "epsilon,log_inv_eps"

    def test_output_file(self, capsys, tmp_path):
        path = tmp_path / "traces.csv"
        code, out, _ = run(capsys, self.ARGS + ["--output", str(path)])
        assert code == 0
        assert f"wrote {path}" in out
        text = path.read_text()
        assert text.startswith("epsilon,log_inv_eps,trace_m1")
        assert text.endswith("\n")

    def test_json_payload_is_pure_json(self, capsys):
        code, out, _ = run(capsys, ["--json"] + self.ARGS)
        assert code == 0
        payload = json.loads(out)
        assert set(payload) == {"epsilon", "log_inv_eps", "traces", "fitted_slopes",
                                "predicted_slopes", "resolution_ok"}
        assert len(payload["epsilon"]) == 4
        assert set(payload["traces"]) == {"1", "2"}
        # m=1 slope approaches 1/(2 pi) over this range
        assert payload["fitted_slopes"]["1"] == pytest.approx(1 / (2 * math.pi), rel=5e-3)

    def test_rejects_bad_ranges_and_powers(self, capsys):
        cases = [
            ["hankel", "--count", "2"],
            ["hankel", "--eps-start", "1e-5", "--eps-stop", "1e-2"],
            ["hankel", "--eps-start", "2.0"],
            ["hankel", "--powers", "0"],
            ["hankel", "--powers", "1,x"],
        ]
        for argv in cases:
            code, _, err = run(capsys, argv)
            assert code == 2, argv
            assert "specdiff: error" in err


def write_config(path, **overrides):
    data = {
        "model": {"L": 8.0, "n": 400, "bump": "gaussian", "c": 0.5},
        "epsilon": {"start": 0.3, "stop": 0.03, "count": 5},
        "windows": [[0.4, 1.0]],
        "trace_powers": [1, 2],
        "tolerance": 10.0,
    }
    data.update(overrides)
    path.write_text(json.dumps(data))
    return str(path)


class TestSweepCommand:
    def test_runs_and_writes_outputs(self, capsys, tmp_path):
        prefix = tmp_path / "sw"
        cfg = write_config(tmp_path / "cfg.json", output=str(prefix))
        code, out, _ = run(capsys, ["sweep", "--config", cfg])
        assert code == 0
        assert "worst deviation" in out
        assert "[ok]" in out or "[FAIL]" in out
        csv_text = (tmp_path / "sw.csv").read_text()
        assert csv_text.startswith("epsilon,log_inv_eps,")
        summary = json.loads((tmp_path / "sw.json").read_text())
        assert summary["profile"] == "ARCTAN_HALF"
        assert len(summary["records"]) == 5

    def test_exit_one_when_tolerance_missed(self, capsys, tmp_path):
        cfg = write_config(tmp_path / "cfg.json", output=str(tmp_path / "sw"),
                           tolerance=1e-9)
        code, out, _ = run(capsys, ["sweep", "--config", cfg])
        assert code == 1
        assert "[FAIL]" in out

    def test_json_mode_emits_payload_only(self, capsys, tmp_path):
        cfg = write_config(tmp_path / "cfg.json", output=str(tmp_path / "sw"))
        code, out, _ = run(capsys, ["--json", "sweep", "--config", cfg])
        assert code == 0
        payload = json.loads(out)
        assert payload["profile"] == "ARCTAN_HALF"
        assert payload["windows"] == ["(0.4,1)"]

    def test_deterministic_across_runs(self, capsys, tmp_path):
        cfg_a = write_config(tmp_path / "a.json", output=str(tmp_path / "run_a"))
        cfg_b = write_config(tmp_path / "b.json", output=str(tmp_path / "run_b"))
        assert run(capsys, ["sweep", "--config", cfg_a])[0] == 0
        assert run(capsys, ["sweep", "--config", cfg_b])[0] == 0
        assert (tmp_path / "run_a.csv").read_bytes() == (tmp_path / "run_b.csv").read_bytes()
        assert (tmp_path / "run_a.json").read_bytes() == (tmp_path / "run_b.json").read_bytes()

    def test_worker_and_seed_overrides(self, capsys, tmp_path):
        cfg = write_config(tmp_path / "cfg.json", output=str(tmp_path / "sw"))
        code, _, _ = run(capsys, ["--workers", "2", "--seed", "7", "sweep",
                                  "--config", cfg])
        assert code == 0
        assert json.loads((tmp_path / "sw.json").read_text())["seed"] == 7

    def test_multi_profile_suffixes(self, capsys, tmp_path):
        cfg = write_config(tmp_path / "cfg.json", output=str(tmp_path / "sw"),
                           profiles=["ARCTAN_HALF", "TANH_HALF"])
        code, _, _ = run(capsys, ["sweep", "--config", cfg])
        assert code == 0
        for name in ("ARCTAN_HALF", "TANH_HALF"):
            assert (tmp_path / f"sw-{name}.csv").exists()
            summary = json.loads((tmp_path / f"sw-{name}.json").read_text())
            assert summary["profile"] == name

    def test_missing_config_exits_two(self, capsys, tmp_path):
        code, _, err = run(capsys, ["sweep", "--config", str(tmp_path / "nope.json")])
        assert code == 2
        assert "cannot read" in err

    def test_corrupt_config_exits_two(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        code, _, err = run(capsys, ["sweep", "--config", str(path)])
        assert code == 2
        assert "not valid JSON" in err

    def test_unknown_config_key_exits_two(self, capsys, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"surprise": 1}))
        code, _, err = run(capsys, ["sweep", "--config", str(path)])
        assert code == 2
        assert "unknown config keys" in err

    def test_guard_rejection_exits_one(self, capsys, tmp_path):
        # every point below the n=400 resolution floor: the run must refuse
        cfg = write_config(tmp_path / "cfg.json", output=str(tmp_path / "sw"),
                           epsilon={"start": 0.02, "stop": 0.005, "count": 4})
        code, _, err = run(capsys, ["sweep", "--config", cfg])
        assert code == 1
        assert "specdiff: error" in err


@pytest.fixture(scope="module")
def summary_path(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("report")
    cfg = write_config(tmp / "cfg.json", output=str(tmp / "sw"))
    assert main(["sweep", "--config", cfg]) == 0
    return tmp / "sw.json"


class TestReportCommand:
    def test_renders_text_and_svg(self, capsys, summary_path):
        svg_path = summary_path.parent / "chart.svg"
        code, out, _ = run(capsys, ["report", "--input", str(summary_path),
                                    "--svg", str(svg_path)])
        assert code == 0
        assert "profile ARCTAN_HALF" in out
        assert "count (0.4,1)" in out
        assert f"wrote {svg_path}" in out
        svg = svg_path.read_text()
        assert svg.startswith("<svg xmlns=")
        assert svg.rstrip().endswith("</svg>")

    def test_default_svg_path_replaces_suffix(self, capsys, summary_path):
        code, out, _ = run(capsys, ["report", "--input", str(summary_path)])
        assert code == 0
        assert summary_path.with_suffix(".svg").exists()

    def test_svg_is_byte_identical_across_renders(self, capsys, summary_path):
        a = summary_path.parent / "a.svg"
        b = summary_path.parent / "b.svg"
        run(capsys, ["report", "--input", str(summary_path), "--svg", str(a)])
        run(capsys, ["report", "--input", str(summary_path), "--svg", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_missing_input_exits_two(self, capsys, tmp_path):
        code, _, err = run(capsys, ["report", "--input", str(tmp_path / "nope.json")])
        assert code == 2
        assert "cannot read" in err

    def test_corrupt_input_exits_two(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("][")
        code, _, err = run(capsys, ["report", "--input", str(path)])
        assert code == 2
        assert "not valid JSON" in err


class TestParser:
    def test_subcommand_is_required(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main([])
        assert excinfo.value.code == 2

    def test_unknown_subcommand_rejected(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["frobnicate"])
        assert excinfo.value.code == 2
