"""End-to-end command-line behavior on miniature configurations."""

import json

import pytest
from click.testing import CliRunner

from deepthought.cli import main

TINY_TOML = """\
config_id = "t1"
protocol = "deepthought"
n_users = 20
n_propositions = 6
accuracy = 80.0
adversarial_pct = 25.0
repetitions = 3
seed = 9
"""


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "tiny.toml"
    path.write_text(TINY_TOML)
    return path


def test_run_prints_table_row(runner, config_file, tmp_path):
    out = tmp_path / "out"
    result = runner.invoke(main, ["run", "--config", str(config_file), "--out", str(out)])
    assert result.exit_code == 0, result.output
    header = result.output.splitlines()[0].split()
    assert header == ["config_id", "protocol", "V", "PR", "A", "ADV",
                      "C-SPEC", "C-ANY", "STD", "MIN", "MAX"]
    assert (out / "metrics.json").exists()
    assert (out / "repetitions.jsonl").exists()


def test_run_missing_config_fails_cleanly(runner, tmp_path):
    result = runner.invoke(main, ["run", "--config", str(tmp_path / "nope.toml")])
    assert result.exit_code != 0
    assert not list(tmp_path.iterdir())  # no partial output


def test_run_invalid_config_fails(runner, tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text('protocol = "zeus"\n')
    result = runner.invoke(main, ["run", "--config", str(bad)])
    assert result.exit_code != 0


def test_run_seed_override_is_deterministic(runner, config_file):
    outputs = []
    for _ in range(2):
        result = runner.invoke(
            main, ["run", "--config", str(config_file), "--seed", "42", "--format", "json"]
        )
        assert result.exit_code == 0
        outputs.append(result.output)
    assert outputs[0] == outputs[1]


def test_compare_runs_both_protocols(runner, config_file, tmp_path):
    out = tmp_path / "cmp"
    result = runner.invoke(
        main,
        ["compare", "--config", str(config_file), "--out", str(out), "--format", "csv"],
    )
    assert result.exit_code == 0, result.output
    lines = [l for l in result.stdout.splitlines() if l]
    assert lines[0] == "config_id,protocol,V,PR,A,ADV,c_spec,c_any,std,min,max"
    assert len(lines) == 3  # header + one row per protocol
    protocols = {line.split(",")[1] for line in lines[1:]}
    assert protocols == {"deepthought", "astraea"}
    csv_text = (out / "compare.csv").read_text()
    assert csv_text.splitlines()[0] == lines[0]


def test_compare_config_dir(runner, tmp_path):
    cfg_dir = tmp_path / "configs"
    cfg_dir.mkdir()
    for i in (1, 2):
        (cfg_dir / f"c{i}.toml").write_text(TINY_TOML.replace('"t1"', f'"t{i}"'))
    result = runner.invoke(main, ["compare", "--config-dir", str(cfg_dir), "--format", "csv"])
    assert result.exit_code == 0, result.output
    lines = [l for l in result.stdout.splitlines() if l]
    assert len(lines) == 5  # header + 2 configs x 2 protocols


def test_replay_matches_then_detects_edit(runner, config_file, tmp_path):
    out = tmp_path / "run"
    assert runner.invoke(
        main, ["run", "--config", str(config_file), "--out", str(out)]
    ).exit_code == 0
    good = runner.invoke(main, ["replay", str(out)])
    assert good.exit_code == 0, good.output
    assert "match" in good.output

    records = out / "repetitions.jsonl"
    lines = records.read_text().splitlines()
    doctored = json.loads(lines[0])
    doctored["corrupted"] += 1
    lines[0] = json.dumps(doctored, sort_keys=True)
    records.write_text("\n".join(lines) + "\n")
    bad = runner.invoke(main, ["replay", str(out)])
    assert bad.exit_code != 0


def test_report_renders_saved_runs(runner, config_file, tmp_path):
    out = tmp_path / "run"
    runner.invoke(main, ["run", "--config", str(config_file), "--out", str(out)])
    result = runner.invoke(main, ["report", str(out), "--format", "csv"])
    assert result.exit_code == 0
    assert "t1,deepthought" in result.output


def test_sweep_emits_grid(runner, config_file, tmp_path):
    result = runner.invoke(
        main,
        ["sweep", "--config", str(config_file), "--alpha", "0.5,0.9",
         "--beta", "0.5", "--out", str(tmp_path / "sweep")],
    )
    assert result.exit_code == 0, result.output
    lines = [l for l in result.stdout.splitlines() if l]
    assert lines[0].startswith("alpha,beta,")
    assert len(lines) == 3  # header + 2 alpha values x 1 beta
    assert (tmp_path / "sweep" / "sensitivity.csv").exists()


def test_compare_parallel_jobs_matches_serial(runner, config_file, tmp_path):
    serial = runner.invoke(main, ["compare", "--config", str(config_file), "--format", "csv"])
    parallel = runner.invoke(
        main,
        ["compare", "--config", str(config_file), "--format", "csv", "--jobs", "2"],
    )
    assert serial.exit_code == 0 and parallel.exit_code == 0
    assert serial.stdout == parallel.stdout


def test_run_protocol_override(runner, config_file):
    result = runner.invoke(
        main,
        ["run", "--config", str(config_file), "--protocol", "astraea", "--format", "csv"],
    )
    assert result.exit_code == 0
    assert result.stdout.splitlines()[1].split(",")[1] == "astraea"
