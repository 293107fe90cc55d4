"""Agent policies, experiment runs, metrics, and replay determinism."""

import json

import numpy as np
import pytest

from deepthought.agents import (
    PREDICTION_MIMIC,
    AgentProfile,
    adversarial_ballot,
    honest_ballot,
)
from deepthought.errors import ConfigInvalid, EmptyInput, MismatchDetected
from deepthought.harness import (
    ExperimentConfig,
    compute_metrics,
    load_run,
    replay_run,
    run_experiment,
    save_run,
)


def tiny(protocol="deepthought", **overrides):
    base = dict(
        protocol=protocol, n_propositions=8, repetitions=4, seed=5,
        accuracy=80.0, adversarial_pct=25.0, config_id="tiny",
    )
    base.update(overrides)
    return ExperimentConfig(**base)


# ----------------------------------------------------------------- agents


def test_honest_ballot_frequency():
    profile = AgentProfile(kind="honest", accuracy=0.8)
    rng = np.random.default_rng(11)
    draws = 100_000
    trues = sum(honest_ballot(profile, rng)[0] for _ in range(draws))
    assert trues / draws == pytest.approx(0.8, abs=0.005)


def test_honest_ballot_always_true_at_full_accuracy():
    profile = AgentProfile(kind="honest", accuracy=1.0)
    rng = np.random.default_rng(2)
    assert all(honest_ballot(profile, rng)[0] for _ in range(200))


def test_honest_prediction_is_calibrated():
    profile = AgentProfile(kind="honest", accuracy=0.8)
    rng = np.random.default_rng(3)
    for _ in range(50):
        vote, prediction = honest_ballot(profile, rng)
        assert prediction == (0.8 if vote else pytest.approx(0.2))


def test_adversarial_ballot_constant():
    profile = AgentProfile(kind="adversarial", accuracy=0.8)
    for _ in range(100):
        assert adversarial_ballot(profile) == (False, 0.0)


def test_adversarial_mimic_policy():
    profile = AgentProfile(
        kind="adversarial", accuracy=0.8, prediction_policy=PREDICTION_MIMIC
    )
    vote, prediction = adversarial_ballot(profile)
    assert vote is False
    assert prediction == pytest.approx(0.2)


def test_profile_validation():
    with pytest.raises(ConfigInvalid):
        AgentProfile(kind="sneaky").validate()
    with pytest.raises(ConfigInvalid):
        AgentProfile(kind="honest", accuracy=1.2).validate()
    with pytest.raises(ConfigInvalid):
        AgentProfile(kind="honest", prediction_policy="psychic").validate()


# ---------------------------------------------------------------- metrics


def test_compute_metrics_hand_case():
    m = compute_metrics([1, 3], [True, False])
    assert m.c_spec == 50.0
    assert m.c_any == 2.0
    assert m.std == 1.0
    assert m.min == 1 and m.max == 3


def test_compute_metrics_all_clean():
    m = compute_metrics([0, 0, 0, 0], [False] * 4)
    assert m.c_spec == 0.0 and m.c_any == 0.0 and m.max == 0


def test_compute_metrics_empty_rejected():
    with pytest.raises(EmptyInput):
        compute_metrics([], [])
    with pytest.raises(EmptyInput):
        compute_metrics([1], [])


# ------------------------------------------------------------- experiments


def test_config_validation():
    with pytest.raises(ConfigInvalid):
        ExperimentConfig(protocol="zeus").validate()
    with pytest.raises(ConfigInvalid):
        ExperimentConfig(adversarial_pct=120).validate()
    with pytest.raises(ConfigInvalid):
        ExperimentConfig(repetitions=0).validate()
    assert ExperimentConfig(n_users=20, adversarial_pct=25).n_adversaries == 5
    assert ExperimentConfig(n_users=20, adversarial_pct=5).n_adversaries == 1
    assert ExperimentConfig(n_users=20, adversarial_pct=45).n_adversaries == 9


def test_config_file_round_trip(tmp_path):
    cfg = tiny()
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    assert ExperimentConfig.from_file(path) == cfg
    toml_path = tmp_path / "cfg.toml"
    toml_path.write_text(
        'protocol = "deepthought"\nn_propositions = 8\nrepetitions = 4\n'
        'seed = 5\naccuracy = 80.0\nadversarial_pct = 25.0\nconfig_id = "tiny"\n'
    )
    assert ExperimentConfig.from_file(toml_path) == cfg


def test_config_file_rejects_unknown_keys(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"protocl": "deepthought"}))
    with pytest.raises(ConfigInvalid):
        ExperimentConfig.from_file(path)


def test_run_experiment_shapes():
    metrics, records = run_experiment(tiny())
    assert len(records) == 4
    assert all(len(r.outcomes) == 8 for r in records)
    assert metrics.repetitions == 4
    assert 0 <= metrics.c_any <= 8


def test_no_adversaries_full_accuracy_never_corrupts():
    metrics, records = run_experiment(
        tiny(accuracy=100.0, adversarial_pct=0.0, n_propositions=10)
    )
    assert metrics.c_any == 0.0
    assert metrics.c_spec == 0.0
    assert all(r.outcomes == "T" * 10 for r in records)


def test_replay_determinism_in_memory():
    cfg = tiny()
    first = run_experiment(cfg)
    second = run_experiment(cfg)
    assert [r.to_dict() for r in first[1]] == [r.to_dict() for r in second[1]]
    assert first[0].to_dict() == second[0].to_dict()


def test_astraea_runs_and_differs_from_deepthought():
    dt = run_experiment(tiny())[0]
    astraea = run_experiment(tiny(protocol="astraea"))[0]
    assert astraea.protocol == "astraea"
    assert dt.protocol == "deepthought"
    # 25% adversaries at 80% accuracy corrupt the equal-weight game far more.
    assert astraea.c_any > dt.c_any


def test_reputation_separation_of_honest_agents():
    cfg = tiny(accuracy=95.0, adversarial_pct=25.0, n_propositions=30, repetitions=2)
    _, records = run_experiment(cfg)
    reps = records[-1].final_reputations
    n_adv = cfg.n_adversaries
    ids = sorted(int(k) for k in reps)
    adv_ids, honest_ids = ids[:n_adv], ids[n_adv:]
    adv_mean = np.mean([reps[str(i)] for i in adv_ids])
    honest_mean = np.mean([reps[str(i)] for i in honest_ids])
    assert honest_mean > adv_mean


def test_certifier_agents_participate():
    cfg = tiny(certifiers_enabled=True, n_certifiers=2, n_propositions=5, repetitions=2)
    metrics, records = run_experiment(cfg)
    assert len(records) == 2  # certifier path exercised without failures


# ---------------------------------------------------------------- file IO


def test_save_load_replay_round_trip(tmp_path):
    cfg = tiny()
    metrics, records = run_experiment(cfg)
    save_run(tmp_path / "run", metrics, records, cfg)
    loaded_cfg, loaded_metrics, loaded_records = load_run(tmp_path / "run")
    assert loaded_cfg == cfg
    assert loaded_metrics == metrics.to_dict()
    assert [r.to_dict() for r in loaded_records] == [r.to_dict() for r in records]
    replay_run(tmp_path / "run")  # must not raise


def test_replay_detects_tampering(tmp_path):
    cfg = tiny()
    metrics, records = run_experiment(cfg)
    save_run(tmp_path / "run", metrics, records, cfg)
    records_file = tmp_path / "run" / "repetitions.jsonl"
    lines = records_file.read_text().splitlines()
    doctored = json.loads(lines[0])
    doctored["outcomes"] = ("T" if doctored["outcomes"][0] != "T" else "F") + doctored["outcomes"][1:]
    lines[0] = json.dumps(doctored, sort_keys=True)
    records_file.write_text("\n".join(lines) + "\n")
    with pytest.raises(MismatchDetected):
        replay_run(tmp_path / "run")


def test_saved_metric_files_byte_identical(tmp_path):
    cfg = tiny()
    for name in ("a", "b"):
        metrics, records = run_experiment(cfg)
        save_run(tmp_path / name, metrics, records, cfg)
    assert (tmp_path / "a" / "metrics.json").read_bytes() == (
        tmp_path / "b" / "metrics.json"
    ).read_bytes()
    assert (tmp_path / "a" / "repetitions.jsonl").read_bytes() == (
        tmp_path / "b" / "repetitions.jsonl"
    ).read_bytes()


def test_settlement_audit_log_round_trip(tmp_path):
    cfg = tiny(n_propositions=4, repetitions=2)
    metrics, records, settlements = run_experiment(cfg, collect_settlements=True)
    assert len(settlements) == 8  # one audit record per closed proposition
    save_run(tmp_path / "run", metrics, records, cfg, settlements)
    assert (tmp_path / "run" / "settlements.jsonl").exists()
    replay_run(tmp_path / "run")  # audit log verified against the re-run

    log = tmp_path / "run" / "settlements.jsonl"
    lines = log.read_text().splitlines()
    doctored = json.loads(lines[0])
    doctored["remainder_to_lost_pool"] += 1
    lines[0] = json.dumps(doctored, sort_keys=True)
    log.write_text("\n".join(lines) + "\n")
    with pytest.raises(MismatchDetected):
        replay_run(tmp_path / "run")


def test_experiments_identical_on_numpy_fallback():
    # Digest backends are bit-compatible, so a whole experiment must be too.
    import subprocess
    import os
    import sys

    code = (
        "import json\n"
        "from deepthought import ExperimentConfig, run_experiment\n"
        "cfg = ExperimentConfig(n_propositions=6, repetitions=2, seed=13,\n"
        "                       accuracy=80.0, adversarial_pct=25.0, config_id='x')\n"
        "m, recs = run_experiment(cfg)\n"
        "print(json.dumps([m.to_dict()] + [r.to_dict() for r in recs], sort_keys=True))\n"
    )
    outputs = []
    for flag in ("0", "1"):
        env = dict(os.environ, DEEPTHOUGHT_NO_NUMBA=flag)
        result = subprocess.run(
            [sys.executable, "-c", code], env=env, capture_output=True, text=True
        )
        assert result.returncode == 0, result.stderr
        outputs.append(result.stdout)
    assert outputs[0] == outputs[1]
