"""Monte-Carlo experiment driver and corruption metrics.

An experiment populates one oracle (or the equal-weight baseline) with a
mixed honest/adversarial population and pushes batches of propositions
through the full lifecycle. Every proposition's ground truth is TRUE, so a
proposition is *corrupted* when it closes FALSE or UNKNOWN.

One population serves the whole experiment: reputations and balances carry
across the repetition batches, mirroring a single deployed contract that
stays live while the experiment runs. Replays are byte-identical because
all randomness derives from the configured seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Optional

import numpy as np

from . import agents
from .agents import AgentProfile, draw_ballot, stake_for
from .astraea import BaselineBallot, baseline_outcome
from .engine import OracleEngine, Role, compute_digest
from .errors import ConfigInvalid, EmptyInput, InsufficientBalance, MismatchDetected
from .params import ProtocolParams
from .scoring import Verdict

PROTOCOLS = ("deepthought", "astraea")

METRICS_FILENAME = "metrics.json"
RECORDS_FILENAME = "repetitions.jsonl"
SETTLEMENTS_FILENAME = "settlements.jsonl"

_OUTCOME_CHAR = {Verdict.TRUE: "T", Verdict.FALSE: "F", Verdict.UNKNOWN: "U"}


@dataclass(frozen=True)
class ExperimentConfig:
    """One row of the experiment matrix."""

    protocol: str = "deepthought"
    n_users: int = 20
    n_propositions: int = 100
    accuracy: float = 80.0  # percent, honest agents
    adversarial_pct: float = 0.0  # percent of users voting FALSE always
    repetitions: int = 20
    seed: int = 1
    config_id: str = ""
    bounty: int = 1
    certifiers_enabled: bool = False
    n_certifiers: int = 2
    stake_policy: str = agents.STAKE_FIXED
    stake_amount: int = 1
    honest_prediction_policy: str = agents.PREDICTION_CALIBRATED
    adversarial_prediction_policy: str = agents.PREDICTION_ZERO
    params: ProtocolParams = field(default_factory=ProtocolParams)

    def validate(self) -> "ExperimentConfig":
        if self.protocol not in PROTOCOLS:
            raise ConfigInvalid(f"protocol must be one of {PROTOCOLS}")
        if self.n_users < 1:
            raise ConfigInvalid("n_users must be positive")
        if self.n_propositions < 1:
            raise ConfigInvalid("n_propositions must be positive")
        if self.repetitions < 1:
            raise ConfigInvalid("repetitions must be positive")
        if not 0.0 <= self.accuracy <= 100.0:
            raise ConfigInvalid("accuracy is a percentage in [0, 100]")
        if not 0.0 <= self.adversarial_pct <= 100.0:
            raise ConfigInvalid("adversarial_pct is a percentage in [0, 100]")
        if self.bounty < self.params.min_bounty:
            raise ConfigInvalid("bounty below the protocol minimum")
        if self.certifiers_enabled and self.n_certifiers < 1:
            raise ConfigInvalid("certifiers enabled but n_certifiers < 1")
        needed = self.bounty * self.n_propositions * self.repetitions
        if self.protocol == "deepthought" and self.params.starting_balance < needed:
            raise ConfigInvalid(
                f"starting_balance {self.params.starting_balance} cannot fund "
                f"{needed} tokens of bounties; raise params.starting_balance"
            )
        self.params.validate()
        # The profiles check their own policy knobs.
        self._profile(adversarial=False).validate()
        self._profile(adversarial=True).validate()
        return self

    @property
    def n_adversaries(self) -> int:
        return round(self.n_users * self.adversarial_pct / 100.0)

    def _profile(self, adversarial: bool) -> AgentProfile:
        return AgentProfile(
            kind=agents.ADVERSARIAL if adversarial else agents.HONEST,
            accuracy=self.accuracy / 100.0,
            stake_policy=self.stake_policy,
            stake_amount=self.stake_amount,
            prediction_policy=(
                self.adversarial_prediction_policy
                if adversarial
                else self.honest_prediction_policy
            ),
        )

    def to_dict(self) -> dict:
        raw = asdict(self)
        raw["params"] = self.params.to_dict()
        return raw

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        raw = dict(raw)
        params = raw.pop("params", {})
        if not isinstance(params, dict):
            raise ConfigInvalid("params section must be a table/object")
        known = set(cls.__dataclass_fields__)
        unknown = set(raw) - known
        if unknown:
            raise ConfigInvalid(f"unknown configuration key(s): {sorted(unknown)}")
        raw["params"] = ProtocolParams.from_dict(params)
        if "config_id" in raw:
            raw["config_id"] = str(raw["config_id"])
        return cls(**raw).validate()

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        path = Path(path)
        if not path.exists():
            raise ConfigInvalid(f"configuration file not found: {path}")
        if path.suffix.lower() == ".toml":
            try:
                import tomllib
            except ImportError:  # Python < 3.11
                import tomli as tomllib
            with open(path, "rb") as fh:
                raw = tomllib.load(fh)
        elif path.suffix.lower() == ".json":
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        else:
            raise ConfigInvalid(f"unsupported config format: {path.suffix}")
        return cls.from_dict(raw)


@dataclass
class RepetitionRecord:
    repetition: int
    corrupted: int
    target_corrupted: bool
    outcomes: str  # one char per proposition: T, F, or U
    final_reputations: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, raw: dict) -> "RepetitionRecord":
        return cls(**raw)


@dataclass
class RunMetrics:
    protocol: str
    config_id: str
    n_users: int
    n_propositions: int
    accuracy: float
    adversarial_pct: float
    repetitions: int
    seed: int
    c_spec: float
    c_any: float
    std: float
    min: int
    max: int

    def to_dict(self) -> dict:
        return asdict(self)

    def table_row(self) -> list:
        return [
            self.config_id,
            self.protocol,
            self.n_users,
            self.n_propositions,
            f"{self.accuracy:g}",
            f"{self.adversarial_pct:g}",
            f"{self.c_spec:.2f}",
            f"{self.c_any:.2f}",
            f"{self.std:.2f}",
            self.min,
            self.max,
        ]


def compute_metrics(
    corrupted_counts: list[int],
    target_flags: list[bool],
    config: Optional[ExperimentConfig] = None,
) -> RunMetrics:
    """Corruption statistics over per-repetition counts and target flags.

    C-SPEC is the percentage of repetitions whose designated target
    proposition was corrupted; C-ANY the mean corrupted count; STD the
    population standard deviation of the counts.
    """
    if not corrupted_counts or len(corrupted_counts) != len(target_flags):
        raise EmptyInput("need at least one repetition with matching target flags")
    counts = np.asarray(corrupted_counts, dtype=float)
    cfg = config or ExperimentConfig()
    return RunMetrics(
        protocol=cfg.protocol,
        config_id=cfg.config_id,
        n_users=cfg.n_users,
        n_propositions=cfg.n_propositions,
        accuracy=cfg.accuracy,
        adversarial_pct=cfg.adversarial_pct,
        repetitions=len(corrupted_counts),
        seed=cfg.seed,
        c_spec=100.0 * sum(target_flags) / len(target_flags),
        c_any=float(counts.mean()),
        std=float(counts.std()),
        min=int(counts.min()),
        max=int(counts.max()),
    )


def _population(config: ExperimentConfig) -> list[AgentProfile]:
    """Profiles by voter index; the first ``n_adversaries`` are adversarial."""
    profiles = []
    for i in range(config.n_users):
        profiles.append(config._profile(adversarial=i < config.n_adversaries))
    return profiles


def _run_deepthought(
    config: ExperimentConfig,
) -> tuple[list[RepetitionRecord], list[dict]]:
    engine = OracleEngine(
        params=config.params,
        rng=np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(0,))),
    )
    rng_agents = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(1,)))

    submitter = engine.subscribe(Role.SUBMITTER).id
    voter_ids = [engine.subscribe(Role.VOTER).id for _ in range(config.n_users)]
    certifier_ids = []
    if config.certifiers_enabled:
        certifier_ids = [
            engine.subscribe(Role.CERTIFIER).id for _ in range(config.n_certifiers)
        ]
    profiles = {vid: p for vid, p in zip(voter_ids, _population(config))}
    honest_cert = config._profile(adversarial=False)

    records = []
    for rep in range(config.repetitions):
        corrupted = 0
        outcomes = []
        for p in range(config.n_propositions):
            pid = engine.submit_proposition(
                submitter, f"statement {rep}:{p}", config.bounty
            )
            prop = engine.available[pid]
            pending = []
            for slot_voter in list(prop.selected_slots):
                profile = profiles[slot_voter]
                vote, prediction = draw_ballot(profile, rng_agents)
                salt = rng_agents.bytes(16)
                try:
                    engine.commit_vote(
                        slot_voter,
                        pid,
                        stake_for(profile, config.params),
                        compute_digest(vote, prediction, salt),
                    )
                except InsufficientBalance:
                    continue  # a broke voter simply leaves the slot unused
                pending.append((slot_voter, vote, prediction, salt))
            cert_pending = []
            for cid in certifier_ids:
                vote, _ = draw_ballot(honest_cert, rng_agents)
                salt = rng_agents.bytes(16)
                engine.commit_certification(
                    cid,
                    pid,
                    stake_for(honest_cert, config.params, certifier=True),
                    compute_digest(vote, None, salt),
                )
                cert_pending.append((cid, vote, salt))
            engine.advance_block(config.params.certification_window + 1)
            for voter, vote, prediction, salt in pending:
                engine.reveal(voter, pid, vote, prediction, salt)
            for cid, vote, salt in cert_pending:
                engine.reveal(cid, pid, vote, None, salt)
            outcome = engine.close_proposition(pid)
            outcomes.append(_OUTCOME_CHAR[outcome])
            if outcome is not Verdict.TRUE:
                corrupted += 1
        records.append(
            RepetitionRecord(
                repetition=rep,
                corrupted=corrupted,
                target_corrupted=outcomes[-1] != "T",
                outcomes="".join(outcomes),
                final_reputations={
                    str(vid): engine.users[vid].reputation for vid in voter_ids
                },
            )
        )
    return records, [r.to_dict() for r in engine.settlement_reports]


def _run_astraea(config: ExperimentConfig) -> list[RepetitionRecord]:
    rng_sel = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(0,)))
    rng_agents = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(1,)))
    profiles = _population(config)
    n = config.n_users
    stake = stake_for(profiles[0], config.params)

    records = []
    for rep in range(config.repetitions):
        corrupted = 0
        outcomes = []
        for _ in range(config.n_propositions):
            draws = rng_sel.integers(0, n, size=config.params.voter_slots)
            ballots = [
                BaselineBallot(int(d), "voter", draw_ballot(profiles[int(d)], rng_agents)[0], stake)
                for d in draws
            ]
            outcome = baseline_outcome(ballots)
            outcomes.append(_OUTCOME_CHAR[outcome])
            if outcome is not Verdict.TRUE:
                corrupted += 1
        records.append(
            RepetitionRecord(
                repetition=rep,
                corrupted=corrupted,
                target_corrupted=outcomes[-1] != "T",
                outcomes="".join(outcomes),
            )
        )
    return records


def run_experiment(
    config: ExperimentConfig, collect_settlements: bool = False
):
    """Run one experiment to completion and aggregate its metrics.

    The designated C-SPEC target is the last proposition of each repetition
    batch, i.e. the one measured after the reputation war has played out.
    Returns (metrics, records); with ``collect_settlements`` a third element
    carries one audit dict per closed proposition (empty for the baseline,
    which has no token ledger).
    """
    config.validate()
    if config.protocol == "astraea":
        records = _run_astraea(config)
        settlements: list[dict] = []
    else:
        records, settlements = _run_deepthought(config)
    metrics = compute_metrics(
        [r.corrupted for r in records],
        [r.target_corrupted for r in records],
        config,
    )
    _self_audit(metrics, records)
    if collect_settlements:
        return metrics, records, settlements
    return metrics, records


def _self_audit(metrics: RunMetrics, records: list[RepetitionRecord]) -> None:
    """Recompute the aggregates straight from the per-repetition records."""
    counts = [r.outcomes.count("F") + r.outcomes.count("U") for r in records]
    flags = [r.outcomes[-1] != "T" for r in records]
    ok = (
        counts == [r.corrupted for r in records]
        and flags == [r.target_corrupted for r in records]
        and abs(metrics.c_any - float(np.mean(counts))) < 1e-12
        and abs(metrics.c_spec - 100.0 * float(np.mean(flags))) < 1e-12
        and metrics.min == min(counts)
        and metrics.max == max(counts)
    )
    if not ok:
        raise MismatchDetected("metrics disagree with the per-repetition records")


# ------------------------------------------------------------------- file IO


def save_run(
    out_dir: str | Path, metrics: RunMetrics, records: list[RepetitionRecord],
    config: ExperimentConfig, settlements: Optional[list[dict]] = None,
) -> tuple[Path, ...]:
    """Write metrics.json, repetitions.jsonl, and the settlement audit log."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    metrics_path = out / METRICS_FILENAME
    records_path = out / RECORDS_FILENAME
    payload = {"config": config.to_dict(), "metrics": metrics.to_dict()}
    metrics_path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    with open(records_path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")
    paths = [metrics_path, records_path]
    if settlements is not None:
        settlements_path = out / SETTLEMENTS_FILENAME
        with open(settlements_path, "w", encoding="utf-8") as fh:
            for report in settlements:
                fh.write(json.dumps(report, sort_keys=True) + "\n")
        paths.append(settlements_path)
    return tuple(paths)


def load_run(run_dir: str | Path) -> tuple[ExperimentConfig, dict, list[RepetitionRecord]]:
    run = Path(run_dir)
    payload = json.loads((run / METRICS_FILENAME).read_text())
    config = ExperimentConfig.from_dict(payload["config"])
    records = []
    with open(run / RECORDS_FILENAME, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(RepetitionRecord.from_dict(json.loads(line)))
    return config, payload["metrics"], records


def replay_run(run_dir: str | Path) -> RunMetrics:
    """Re-execute a stored run and verify it reproduces the stored records.

    When a settlement audit log was saved, the replayed settlements must
    match it line for line as well.
    """
    config, stored_metrics, stored_records = load_run(run_dir)
    metrics, records, settlements = run_experiment(config, collect_settlements=True)
    if [r.to_dict() for r in records] != [r.to_dict() for r in stored_records]:
        raise MismatchDetected(f"repetition records diverge for {run_dir}")
    if metrics.to_dict() != stored_metrics:
        raise MismatchDetected(f"metrics diverge for {run_dir}")
    settlements_path = Path(run_dir) / SETTLEMENTS_FILENAME
    if settlements_path.exists():
        stored = [
            json.loads(line)
            for line in settlements_path.read_text().splitlines()
            if line.strip()
        ]
        if stored != settlements:
            raise MismatchDetected(f"settlement audit log diverges for {run_dir}")
    return metrics
