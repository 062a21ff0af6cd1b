import json

import pytest

from suite_paths import FIXTURE_DIR
from rlpathctl import cli
from rlpathctl.ctl import run_mock_controller
from rlpathctl.flows import parse_entry


def run(capsys, *argv):
    rc = cli.main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


@pytest.fixture()
def out_dir(tmp_path):
    return tmp_path / "out"


@pytest.fixture()
def ingested(capsys, out_dir):
    rc, _, _ = run(capsys, "ingest", "--fixture", str(FIXTURE_DIR), "--output", str(out_dir))
    assert rc == 0
    return out_dir


@pytest.fixture()
def trained(capsys, ingested):
    rc, _, _ = run(
        capsys,
        "train", "--fixture", str(FIXTURE_DIR), "--output", str(ingested),
        "--episodes", "5", "--seed", "1",
    )
    assert rc == 0
    return ingested


@pytest.fixture()
def pathed(capsys, trained):
    rc, _, _ = run(capsys, "path", "--fixture", str(FIXTURE_DIR), "--output", str(trained))
    assert rc == 0
    return trained


class TestIngest:
    def test_artifacts_and_summary(self, capsys, out_dir):
        rc, out, _ = run(
            capsys, "ingest", "--fixture", str(FIXTURE_DIR), "--output", str(out_dir)
        )
        assert rc == 0
        assert out.strip() == (
            "14 switches, 15 links, "
            "start 00:00:00:00:00:00:00:01, end 00:00:00:00:00:00:00:0e"
        )
        topo_doc = json.loads((out_dir / "topology.json").read_text())
        assert len(topo_doc["switches"]) == 14
        adj_doc = json.loads((out_dir / "adjacency.json").read_text())
        assert adj_doc["num_nodes"] == 14
        assert adj_doc["start_node"] == 0 and adj_doc["end_node"] == 13
        assert adj_doc["weight_mode"] == "unit"
        assert len(adj_doc["net"]) == 14

    def test_rerun_byte_identical(self, capsys, out_dir):
        run(capsys, "ingest", "--fixture", str(FIXTURE_DIR), "--output", str(out_dir))
        first = {p.name: p.read_bytes() for p in out_dir.iterdir()}
        run(capsys, "ingest", "--fixture", str(FIXTURE_DIR), "--output", str(out_dir))
        second = {p.name: p.read_bytes() for p in out_dir.iterdir()}
        assert first == second

    def test_from_mock_controller(self, capsys, out_dir, fixture_bytes):
        with run_mock_controller(fixture_bytes) as mock:
            rc, out, _ = run(
                capsys, "ingest", "--controller", mock.base_url, "--output", str(out_dir)
            )
        assert rc == 0
        assert "14 switches" in out
        assert (out_dir / "topology.json").exists()

    def test_inverse_bandwidth_requires_bandwidths(self, capsys, out_dir):
        rc, _, err = run(
            capsys,
            "ingest", "--fixture", str(FIXTURE_DIR), "--output", str(out_dir),
            "--weight-mode", "inverse_bandwidth",
        )
        assert rc == 2
        assert "bandwidth" in err


class TestTrain:
    def test_artifacts_and_summary(self, capsys, ingested):
        rc, out, _ = run(
            capsys,
            "train", "--fixture", str(FIXTURE_DIR), "--output", str(ingested),
            "--episodes", "3", "--seed", "1",
        )
        assert rc == 0
        assert out.startswith("trained 3 episodes,")
        for name in ("checkpoint.json", "trace.csv", "train_report.json"):
            assert (ingested / name).exists()
        report = json.loads((ingested / "train_report.json").read_text())
        assert report["episodes_run"] == 3
        assert report["fit_calls"] == report["steps_total"] - report["dead_end_aborts"]
        ckpt = json.loads((ingested / "checkpoint.json").read_text())
        assert ckpt["seed"] == 1

    def test_missing_ingest_artifact(self, capsys, out_dir):
        rc, _, err = run(
            capsys, "train", "--fixture", str(FIXTURE_DIR), "--output", str(out_dir)
        )
        assert rc == 2
        assert "topology.json" in err

    def test_determinism_same_seed(self, capsys, tmp_path):
        blobs = []
        for name in ("a", "b"):
            out = tmp_path / name
            run(capsys, "ingest", "--fixture", str(FIXTURE_DIR), "--output", str(out))
            run(
                capsys,
                "train", "--fixture", str(FIXTURE_DIR), "--output", str(out),
                "--episodes", "4", "--seed", "3",
            )
            blobs.append(
                ((out / "trace.csv").read_bytes(), (out / "checkpoint.json").read_bytes())
            )
        assert blobs[0] == blobs[1]


class TestPath:
    def test_verdict_stdout_and_artifacts(self, capsys, trained):
        rc, out, _ = run(
            capsys, "path", "--fixture", str(FIXTURE_DIR), "--output", str(trained)
        )
        assert rc == 0
        verdict = json.loads(out)
        assert set(verdict) == {"valid", "hops", "oracle_hops", "is_shortest"}
        assert verdict["valid"] is True
        assert verdict["oracle_hops"] == 7
        path_doc = json.loads((trained / "path.json").read_text())
        assert path_doc["nodes"][0] == 0 and path_doc["nodes"][-1] == 13
        assert path_doc["hops"] == len(path_doc["nodes"]) - 1
        assert len(path_doc["dpids"]) == len(path_doc["nodes"])
        assert verdict == json.loads((trained / "verdict.json").read_text())

    def test_missing_checkpoint(self, capsys, ingested):
        rc, _, err = run(
            capsys, "path", "--fixture", str(FIXTURE_DIR), "--output", str(ingested)
        )
        assert rc == 2
        assert "checkpoint.json" in err


class TestPush:
    def test_dry_run_writes_jsonl(self, capsys, pathed):
        rc, out, _ = run(
            capsys,
            "push", "--fixture", str(FIXTURE_DIR), "--output", str(pathed), "--dry-run",
        )
        assert rc == 0
        path_doc = json.loads((pathed / "path.json").read_text())
        expected_entries = 2 * (len(path_doc["nodes"]))
        assert json.loads(out) == {"dry_run": True, "entries": expected_entries}
        lines = (pathed / "flows.jsonl").read_text().splitlines()
        assert len(lines) == expected_entries
        entries = [parse_entry(line.encode()) for line in lines]
        assert len({e.name for e in entries}) == expected_entries

    def test_push_to_mock(self, capsys, pathed, fixture_bytes):
        with run_mock_controller(fixture_bytes) as mock:
            rc, out, _ = run(
                capsys,
                "push", "--fixture", str(FIXTURE_DIR), "--controller", mock.base_url,
                "--output", str(pathed),
            )
            assert rc == 0
            report = json.loads(out)
            assert report["accepted"] == len(mock.received_flows)
            assert report["rejected"] == []

    def test_push_needs_target(self, capsys, pathed):
        rc, _, err = run(
            capsys, "push", "--fixture", str(FIXTURE_DIR), "--output", str(pathed)
        )
        assert rc == 1
        assert "dry-run" in err

    def test_missing_path_artifact(self, capsys, ingested):
        rc, _, err = run(
            capsys,
            "push", "--fixture", str(FIXTURE_DIR), "--output", str(ingested), "--dry-run",
        )
        assert rc == 2
        assert "path.json" in err

    def test_unreachable_controller_exit_3(self, capsys, pathed):
        rc, _, err = run(
            capsys,
            "push", "--fixture", str(FIXTURE_DIR),
            "--controller", "http://127.0.0.1:9", "--output", str(pathed),
        )
        assert rc == 3


def write_trace(path, rows):
    lines = ["episode,step,p_0,p_1"]
    for ep, step, p0, p1 in rows:
        lines.append(f"{ep},{step},{p0:.6f},{p1:.6f}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


class TestReport:
    def test_rising_trace_reports_episode_60(self, capsys, tmp_path, out_dir):
        trace = tmp_path / "trace.csv"
        rows = [(ep, 0, 0.5 + ep * 0.005, 0.5 - ep * 0.005) for ep in range(60)]
        rows.append((60, 0, 1.0, 0.0))
        write_trace(trace, rows)
        rc, out, _ = run(capsys, "report", str(trace), "--output", str(out_dir))
        assert rc == 0
        assert out.strip() == "converged at episode 60"
        report_lines = (out_dir / "report.csv").read_text().splitlines()
        assert report_lines[0] == "episode,max_start_prob"
        assert len(report_lines) == 62
        assert report_lines[-1] == "60,1.000000"

    def test_constant_uniform_not_converged(self, capsys, tmp_path, out_dir):
        trace = tmp_path / "trace.csv"
        write_trace(trace, [(ep, 0, 0.5, 0.5) for ep in range(20)])
        rc, out, _ = run(capsys, "report", str(trace), "--output", str(out_dir))
        assert rc == 0
        assert out.strip() == "not converged"

    def test_single_episode_single_row(self, capsys, tmp_path, out_dir):
        trace = tmp_path / "trace.csv"
        write_trace(trace, [(0, 0, 0.4, 0.6), (0, 1, 0.3, 0.7)])
        rc, out, _ = run(capsys, "report", str(trace), "--output", str(out_dir))
        assert rc == 0
        lines = (out_dir / "report.csv").read_text().splitlines()
        # last row of the episode wins
        assert lines[1:] == ["0,0.700000"]

    def test_real_trace_round_trip(self, capsys, trained, out_dir):
        rc, out, _ = run(
            capsys, "report", str(trained / "trace.csv"), "--output", str(out_dir)
        )
        assert rc == 0
        assert out.startswith(("converged at episode", "not converged"))

    def test_malformed_trace_exit_2(self, capsys, tmp_path, out_dir):
        trace = tmp_path / "trace.csv"
        trace.write_text("nonsense\n1,2\n", encoding="utf-8")
        rc, _, err = run(capsys, "report", str(trace), "--output", str(out_dir))
        assert rc == 2
        assert "header" in err

    def test_missing_trace_exit_2(self, capsys, tmp_path, out_dir):
        rc, _, _ = run(capsys, "report", str(tmp_path / "nope.csv"), "--output", str(out_dir))
        assert rc == 2

    def test_ragged_row_exit_2(self, capsys, tmp_path, out_dir):
        trace = tmp_path / "trace.csv"
        trace.write_text("episode,step,p_0,p_1\n0,0,0.5\n", encoding="utf-8")
        rc, _, err = run(capsys, "report", str(trace), "--output", str(out_dir))
        assert rc == 2
        assert "columns" in err


class TestUsageErrors:
    def test_neither_source(self, capsys, out_dir):
        rc, _, err = run(capsys, "ingest", "--output", str(out_dir))
        assert rc == 1
        assert "exactly one" in err

    def test_both_sources(self, capsys, out_dir):
        rc, _, err = run(
            capsys,
            "ingest", "--fixture", str(FIXTURE_DIR),
            "--controller", "http://x:8080", "--output", str(out_dir),
        )
        assert rc == 1

    def test_unknown_command(self, capsys):
        rc, _, _ = run(capsys, "frobnicate")
        assert rc == 1

    def test_bad_weight_mode_flag(self, capsys, out_dir):
        rc, _, _ = run(
            capsys,
            "ingest", "--fixture", str(FIXTURE_DIR), "--output", str(out_dir),
            "--weight-mode", "hops",
        )
        assert rc == 1

    def test_zero_episodes(self, capsys, ingested):
        rc, _, err = run(
            capsys,
            "train", "--fixture", str(FIXTURE_DIR), "--output", str(ingested),
            "--episodes", "0",
        )
        assert rc == 1
        assert "episodes" in err

    def test_missing_fixture_dir(self, capsys, tmp_path, out_dir):
        rc, _, err = run(
            capsys, "ingest", "--fixture", str(tmp_path / "gone"), "--output", str(out_dir)
        )
        assert rc == 1
        assert "not found" in err

    def test_ambiguous_fixture_dir(self, capsys, tmp_path, out_dir):
        for name in ("a.links.json", "b.links.json", "c.devices.json"):
            (tmp_path / name).write_text("[]")
        rc, _, err = run(
            capsys, "ingest", "--fixture", str(tmp_path), "--output", str(out_dir)
        )
        assert rc == 1
        assert "exactly one" in err


class TestConfigFile:
    def test_json_config(self, capsys, tmp_path, out_dir):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"fixture": str(FIXTURE_DIR), "output": str(out_dir)}))
        rc, out, _ = run(capsys, "ingest", "--config", str(cfg))
        assert rc == 0
        assert "14 switches" in out

    def test_toml_config(self, capsys, tmp_path, out_dir):
        cfg = tmp_path / "run.toml"
        cfg.write_text(
            f'fixture = "{FIXTURE_DIR}"\noutput = "{out_dir}"\nseed = 4\nepisodes = 2\n'
        )
        rc, _, _ = run(capsys, "ingest", "--config", str(cfg))
        assert rc == 0
        rc, _, _ = run(capsys, "train", "--config", str(cfg))
        assert rc == 0
        ckpt = json.loads((out_dir / "checkpoint.json").read_text())
        assert ckpt["seed"] == 4
        report = json.loads((out_dir / "train_report.json").read_text())
        assert report["episodes_run"] == 2

    def test_flag_beats_file(self, capsys, tmp_path, out_dir, ingested):
        cfg = tmp_path / "run.json"
        cfg.write_text(
            json.dumps({"fixture": str(FIXTURE_DIR), "output": str(ingested), "seed": 4})
        )
        rc, _, _ = run(capsys, "train", "--config", str(cfg), "--seed", "9",
                       "--episodes", "2")
        assert rc == 0
        ckpt = json.loads((ingested / "checkpoint.json").read_text())
        assert ckpt["seed"] == 9

    def test_fixture_flag_clears_file_controller(self, capsys, tmp_path, out_dir):
        # file names an unreachable controller; the flag must win without contacting it
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"controller": "http://127.0.0.1:9", "output": str(out_dir)}))
        rc, out, _ = run(
            capsys, "ingest", "--config", str(cfg), "--fixture", str(FIXTURE_DIR)
        )
        assert rc == 0
        assert "14 switches" in out

    def test_unknown_key_rejected(self, capsys, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"fixtures": str(FIXTURE_DIR)}))
        rc, _, err = run(capsys, "ingest", "--config", str(cfg))
        assert rc == 1
        assert "fixtures" in err

    def test_config_file_missing(self, capsys):
        rc, _, err = run(capsys, "ingest", "--config", "/nope/run.json")
        assert rc == 1
        assert "not found" in err

    def test_config_file_invalid_json(self, capsys, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text("{broken")
        rc, _, _ = run(capsys, "ingest", "--config", str(cfg))
        assert rc == 1

    def test_bad_weight_mode_in_file(self, capsys, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"fixture": str(FIXTURE_DIR), "weight_mode": "hops"}))
        rc, _, err = run(capsys, "ingest", "--config", str(cfg))
        assert rc == 1
        assert "weight_mode" in err


class TestEnvFallback:
    def test_controller_from_env(self, capsys, monkeypatch, out_dir, fixture_bytes):
        with run_mock_controller(fixture_bytes) as mock:
            monkeypatch.setenv(cli.ENV_CONTROLLER, mock.base_url)
            rc, out, _ = run(capsys, "ingest", "--output", str(out_dir))
        assert rc == 0
        assert "14 switches" in out

    def test_fixture_flag_beats_env(self, capsys, monkeypatch, out_dir):
        monkeypatch.setenv(cli.ENV_CONTROLLER, "http://127.0.0.1:9")
        rc, out, _ = run(
            capsys, "ingest", "--fixture", str(FIXTURE_DIR), "--output", str(out_dir)
        )
        assert rc == 0
        assert "14 switches" in out
