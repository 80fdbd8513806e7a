"""End-to-end tests for the command-line surface: option resolution and
precedence, output-file headers, dataset layout, exit codes, and the
interrupted-run marker."""

import json

import pytest

from isochron import (
    ModelParams,
    __version__,
    ir4_projection_contains,
    jump,
    region_spec,
    region_volume,
    s_embed,
)
from isochron import cli
from isochron.cli import FAILED_MARKER, THREADS_ENV, main

P = ModelParams(b=3.0, eps=0.58, n=3, tau=0.58)

#: Pinned wall-clock stamp: outputs carrying it must be byte-reproducible.
TS = "2026-01-01T00:00:00+00:00"

GENERIC_SIGMA = (0.30, 0.10, 0.40)


def state_flag(sigma=GENERIC_SIGMA) -> str:
    state = s_embed(P, "IR4", sigma)
    return json.dumps(
        {"phases": list(state.phases), "ftds": [list(r) for r in state.ftds]}
    )


class TestParsing:
    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert capsys.readouterr().out.strip() == f"isochron {__version__}"

    def test_unknown_kind_is_a_config_error(self, capsys):
        assert main(["region", "exists", "--kind", "irx"]) == 2
        assert capsys.readouterr().err.startswith("error:")

    def test_missing_subcommand_exits(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["region"])
        assert exc.value.code == 2


class TestConfigResolution:
    def test_flag_overrides_file(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"tau": 0.10}))
        assert main(["region", "exists", "--config", str(cfg)]) == 0
        assert capsys.readouterr().out.strip() == "false"
        assert (
            main(["region", "exists", "--config", str(cfg), "--tau", "0.58"]) == 0
        )
        assert capsys.readouterr().out.strip() == "true"

    def test_config_must_be_an_object(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("[1, 2]")
        assert main(["region", "exists", "--config", str(cfg)]) == 2
        assert "JSON object" in capsys.readouterr().err

    def test_config_rejects_bad_json(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("{not json")
        assert main(["region", "exists", "--config", str(cfg)]) == 2
        assert capsys.readouterr().err.startswith("error:")

    def test_config_missing_file(self, capsys, tmp_path):
        assert (
            main(["region", "exists", "--config", str(tmp_path / "absent.json")])
            == 2
        )
        assert capsys.readouterr().err.startswith("error:")

    def test_header_records_resolved_values(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"samples": 3, "seed": 5}))
        out = tmp_path / "points.csv"
        assert (
            main(
                [
                    "region",
                    "sample",
                    "--config",
                    str(cfg),
                    "--out",
                    str(out),
                    "--timestamp",
                    TS,
                ]
            )
            == 0
        )
        lines = out.read_text().splitlines()
        assert lines[0] == f"# isochron {__version__}"
        assert lines[1].startswith("# config: ")
        resolved = json.loads(lines[1][len("# config: ") :])
        assert resolved["command"] == "region sample"
        assert resolved["samples"] == 3
        assert resolved["seed"] == 5
        assert resolved["tau"] == 0.58
        assert lines[2] == "# seed: 5"
        assert lines[3] == f"# timestamp: {TS}"
        assert lines[4] == "sigma1,sigma2,sigma3"
        assert len(lines) == 5 + 3

    def test_state_center_accepted_from_config_file(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"center": "ir4"}))
        assert main(["poincare", "--config", str(cfg)]) == 0
        assert "section period 1" in capsys.readouterr().out

    def test_state_object_accepted_from_config_file(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"state": json.loads(state_flag())}))
        assert main(["poincare", "--config", str(cfg)]) == 0
        assert "section period 4" in capsys.readouterr().out


class TestSimulate:
    def test_center_default_horizon(self, capsys):
        assert main(["simulate", "--center", "ir4", "--timestamp", TS]) == 0
        out = capsys.readouterr().out
        assert out.splitlines()[0] == f"# isochron {__version__}"
        assert f"simulated {cli._fmt(3 * P.tau)} time units: 24 events" in out

    def test_trace_files(self, capsys, tmp_path):
        text = tmp_path / "trace.txt"
        jsonl = tmp_path / "trace.jsonl"
        assert (
            main(
                [
                    "simulate",
                    "--center",
                    "ir4",
                    "--out-text",
                    str(text),
                    "--out-jsonl",
                    str(jsonl),
                    "--timestamp",
                    TS,
                ]
            )
            == 0
        )
        tlines = text.read_text().splitlines()
        assert tlines[0] == f"# isochron {__version__}"
        assert tlines[1].startswith("# config: ")
        assert tlines[2] == f"# timestamp: {TS}"
        jlines = jsonl.read_text().splitlines()
        meta = json.loads(jlines[0])
        assert meta["version"] == __version__
        assert meta["timestamp"] == TS
        assert meta["config"]["command"] == "simulate"
        events = [json.loads(line) for line in jlines[1:]]
        assert len(events) == 24

    def test_state_flag_runs(self, capsys):
        assert (
            main(
                [
                    "simulate",
                    "--state",
                    state_flag(),
                    "--horizon",
                    "0.58",
                    "--timestamp",
                    TS,
                ]
            )
            == 0
        )
        assert "events" in capsys.readouterr().out

    def test_invalid_state_rejected(self, capsys):
        bad = json.dumps({"phases": [1.5, 0.2, 0.0], "ftds": [[], [], [0.0]]})
        assert main(["simulate", "--state", bad]) == 2
        assert capsys.readouterr().err.startswith("error:")

    def test_state_needs_exact_keys(self, capsys):
        assert main(["simulate", "--state", '{"phases": [0.1, 0.2, 0.0]}']) == 2
        assert "ftds" in capsys.readouterr().err

    def test_state_and_center_conflict(self, capsys):
        assert (
            main(["simulate", "--state", state_flag(), "--center", "ir4"]) == 2
        )
        assert "mutually exclusive" in capsys.readouterr().err

    def test_state_required(self, capsys):
        assert main(["simulate"]) == 2
        assert "initial state" in capsys.readouterr().err


class TestPoincare:
    def test_center_is_a_fixed_point(self, capsys):
        assert main(["poincare", "--center", "ir4"]) == 0
        line = capsys.readouterr().out.strip()
        assert line == (
            "periodic: section period 1, orbit period "
            f"{cli._fmt(3 * P.tau / 4)}, transient 0"
        )

    def test_generic_period4_report(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        assert (
            main(
                [
                    "poincare",
                    "--state",
                    state_flag(),
                    "--out",
                    str(out),
                    "--timestamp",
                    TS,
                ]
            )
            == 0
        )
        payload = json.loads(out.read_text())
        assert payload["version"] == __version__
        assert payload["timestamp"] == TS
        assert payload["periodic"] is True
        assert payload["result"]["poincare_period"] == 4
        assert payload["signature"] is not None

    def test_budget_exhaustion_reported(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        assert (
            main(
                [
                    "poincare",
                    "--state",
                    state_flag(),
                    "--max-iter",
                    "1",
                    "--out",
                    str(out),
                ]
            )
            == 0
        )
        assert "not periodic within 1 section returns" in capsys.readouterr().out
        payload = json.loads(out.read_text())
        assert payload["periodic"] is False
        assert payload["signature"] is None
        assert payload["result"]["iterations"] == 1


class TestRegionQueries:
    def test_exists_true_and_false(self, capsys):
        assert main(["region", "exists"]) == 0
        assert capsys.readouterr().out.strip() == "true"
        assert main(["region", "exists", "--tau", "0.10"]) == 0
        assert capsys.readouterr().out.strip() == "false"

    def test_member_true_and_false(self, capsys):
        assert main(["region", "member", "--sigma", "0.30,0.10,0.40"]) == 0
        assert capsys.readouterr().out.strip() == "true"
        assert main(["region", "member", "--sigma", "0.10,0.30,0.40"]) == 0
        assert capsys.readouterr().out.strip() == "false"

    def test_member_dimension_checked(self, capsys):
        assert main(["region", "member", "--sigma", "0.30,0.10"]) == 2
        err = capsys.readouterr().err
        assert "3 coordinates" in err and "sigma1" in err

    def test_member_requires_sigma(self, capsys):
        assert main(["region", "member"]) == 2
        assert "--sigma" in capsys.readouterr().err


class TestRegionVolume:
    def test_exact_matches_library(self, capsys):
        assert main(["region", "volume", "--kind", "ir4"]) == 0
        line = capsys.readouterr().out.strip()
        expected = region_volume(region_spec(P, "IR4"), method="exact").volume
        assert line == f"exact: {cli._fmt(expected)}"

    def test_both_cross_checks(self, capsys, tmp_path):
        out = tmp_path / "volume.json"
        assert (
            main(
                [
                    "region",
                    "volume",
                    "--method",
                    "both",
                    "--samples",
                    "20000",
                    "--out",
                    str(out),
                    "--timestamp",
                    TS,
                ]
            )
            == 0
        )
        assert "check: PASS" in capsys.readouterr().out
        payload = json.loads(out.read_text())
        assert payload["ok"] is True
        assert set(payload["reports"]) == {"exact", "montecarlo"}

    def test_mismatch_fails(self, capsys, monkeypatch):
        class Fake:
            def __init__(self, volume, stderr=0.0):
                self.volume = volume
                self.stderr = stderr

            def to_json_dict(self):
                return {"volume": self.volume}

        def fake_volume(spec, method, **kwargs):
            return Fake(0.5) if method == "exact" else Fake(0.1, stderr=1e-6)

        monkeypatch.setattr(cli, "region_volume", fake_volume)
        assert main(["region", "volume", "--method", "both"]) == 1
        assert "check: FAIL" in capsys.readouterr().out

    def test_unknown_method_rejected(self, capsys):
        assert main(["region", "volume", "--method", "quadrature"]) == 2
        assert "method" in capsys.readouterr().err


class TestRegionSample:
    def test_stdout_layout(self, capsys):
        assert main(["region", "sample", "--samples", "2", "--timestamp", TS]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == f"# isochron {__version__}"
        assert lines[2] == "# seed: 0"
        assert lines[4] == "sigma1,sigma2,sigma3"
        rows = [tuple(float(v) for v in ln.split(",")) for ln in lines[5:7]]
        assert all(len(r) == 3 for r in rows)
        assert lines[7] == "sampled 2 interior points of IR4"

    def test_file_output_is_reproducible(self, capsys, tmp_path):
        # The output path is part of the recorded config, so reproduction
        # means rerunning the identical command, not writing a sibling file.
        path = tmp_path / "points.csv"
        argv = [
            "region",
            "sample",
            "--kind",
            "ir3",
            "--samples",
            "4",
            "--out",
            str(path),
            "--timestamp",
            TS,
        ]
        assert main(argv) == 0
        first = path.read_bytes()
        assert main(argv) == 0
        assert path.read_bytes() == first
        assert path.read_text().splitlines()[4] == "sigma1,sigma3"


class TestRegionProject:
    def test_analytic_rows_are_inside_the_image(self, capsys):
        assert (
            main(["region", "project", "--samples", "5", "--timestamp", TS]) == 0
        )
        lines = capsys.readouterr().out.splitlines()
        data = [ln for ln in lines if ln.startswith("analytic,")]
        assert len(data) == 5
        for row in data:
            _, theta1, theta2 = row.split(",")
            assert ir4_projection_contains(P, float(theta1), float(theta2))

    def test_compare_overlay(self, capsys, tmp_path):
        csv = tmp_path / "overlay.csv"
        js = tmp_path / "overlay.json"
        plot = tmp_path / "overlay.gp"
        assert (
            main(
                [
                    "region",
                    "project",
                    "--compare",
                    "--samples",
                    "10",
                    "--step",
                    "0.25",
                    "--out-csv",
                    str(csv),
                    "--out-json",
                    str(js),
                    "--plot-script",
                    str(plot),
                    "--timestamp",
                    TS,
                ]
            )
            == 0
        )
        out = capsys.readouterr().out
        assert "containment: PASS" in out
        payload = json.loads(js.read_text())
        assert payload["contained"] is True
        assert payload["seeded_orbit_count"] == 10
        assert str(csv) in plot.read_text()


class TestScanPhases:
    def test_small_grid_census(self, capsys, tmp_path):
        csv = tmp_path / "scan.csv"
        plot = tmp_path / "scan.gp"
        assert (
            main(
                [
                    "scan",
                    "phases",
                    "--step",
                    "0.25",
                    "--out-csv",
                    str(csv),
                    "--plot-script",
                    str(plot),
                    "--timestamp",
                    TS,
                ]
            )
            == 0
        )
        assert (
            "16 cells; section periods {1: 7, 3: 9}" in capsys.readouterr().out
        )
        lines = csv.read_text().splitlines()
        assert lines[0] == f"# isochron {__version__}"
        assert str(csv) in plot.read_text()

    def test_env_thread_count_is_recorded_and_neutral(
        self, capsys, tmp_path, monkeypatch
    ):
        out = tmp_path / "volume.json"
        base = [
            "region",
            "volume",
            "--method",
            "montecarlo",
            "--samples",
            "20000",
            "--out",
            str(out),
            "--timestamp",
            TS,
        ]
        assert main(base + ["--threads", "3"]) == 0
        via_flag = out.read_bytes()
        assert json.loads(via_flag)["config"]["threads"] == 3
        monkeypatch.setenv(THREADS_ENV, "3")
        assert main(base) == 0
        assert out.read_bytes() == via_flag

    def test_nonpositive_threads_rejected(self, capsys):
        assert main(["scan", "phases", "--step", "0.25", "--threads", "0"]) == 2
        assert "positive" in capsys.readouterr().err

    def test_bad_step_rejected(self, capsys):
        assert main(["scan", "phases", "--step", "1.5"]) == 2
        assert capsys.readouterr().err.startswith("error:")


class TestScanParams:
    def test_small_grid_counts(self, capsys, tmp_path):
        csv = tmp_path / "params.csv"
        assert (
            main(
                [
                    "scan",
                    "params",
                    "--grid",
                    "3x3",
                    "--out-csv",
                    str(csv),
                    "--timestamp",
                    TS,
                ]
            )
            == 0
        )
        assert (
            "9 cells; nonempty: IR3: 5, IR4: 2, IR5: 4"
            in capsys.readouterr().out
        )
        rows = [
            ln for ln in csv.read_text().splitlines() if not ln.startswith("#")
        ][1:]
        eps_values = sorted({float(r.split(",")[0]) for r in rows})
        assert eps_values == pytest.approx([1 / 3, 2 / 3, 1.0])

    def test_bad_grid_rejected(self, capsys):
        assert main(["scan", "params", "--grid", "1x5"]) == 2
        assert main(["scan", "params", "--grid", "fine"]) == 2


class TestVerify:
    def test_period4_suite_passes(self, capsys):
        assert main(["verify", "--samples", "5"]) == 0
        out = capsys.readouterr().out
        for name in (
            "PASS ir4-existence",
            "PASS intertwining",
            "PASS return-map-algebra",
            "PASS stability",
            "PASS ir4-oracle",
        ):
            assert name in out
        assert "verify: PASS (5 checks)" in out

    def test_all_suites_report(self, capsys, tmp_path):
        out = tmp_path / "verify.json"
        assert (
            main(
                [
                    "verify",
                    "--suite",
                    "all",
                    "--samples",
                    "3",
                    "--out",
                    str(out),
                    "--timestamp",
                    TS,
                ]
            )
            == 0
        )
        payload = json.loads(out.read_text())
        assert payload["ok"] is True
        assert len(payload["checks"]) == 9
        assert all(c["ok"] for c in payload["checks"])

    def test_empty_region_fails_with_exit_1(self, capsys):
        assert main(["verify", "--tau", "0.10", "--samples", "3"]) == 1
        out = capsys.readouterr().out
        assert "FAIL ir4-existence" in out
        assert "verify: FAIL (1 checks)" in out


class TestInterrupt:
    def test_marker_written_for_missing_output(self, capsys, tmp_path, monkeypatch):
        csv = tmp_path / "scan.csv"

        def boom(*args, **kwargs):
            raise KeyboardInterrupt

        monkeypatch.setattr(cli, "phase_scan", boom)
        rc = main(
            [
                "scan",
                "phases",
                "--step",
                "0.25",
                "--out-csv",
                str(csv),
                "--timestamp",
                TS,
            ]
        )
        assert rc == 130
        assert "interrupted" in capsys.readouterr().err
        lines = csv.read_text().splitlines()
        assert lines[0] == f"# isochron {__version__}"
        assert lines[-1] == FAILED_MARKER

    def test_marker_appended_to_partial_output(self, capsys, tmp_path, monkeypatch):
        csv = tmp_path / "scan.csv"
        csv.write_text("partial\n")

        def boom(*args, **kwargs):
            raise KeyboardInterrupt

        monkeypatch.setattr(cli, "phase_scan", boom)
        assert (
            main(["scan", "phases", "--out-csv", str(csv), "--timestamp", TS])
            == 130
        )
        assert csv.read_text() == f"partial\n{FAILED_MARKER}\n"
