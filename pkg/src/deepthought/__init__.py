"""Reputation-weighted commit-reveal voting oracle and simulation harness."""

from .agents import AgentProfile, adversarial_ballot, draw_ballot, honest_ballot
from .astraea import BaselineBallot, baseline_outcome, baseline_settle
from .economy import certifier_reward, settle, update_reputations, voter_reward
from .engine import (
    ActorKind,
    OracleEngine,
    Phase,
    Proposition,
    RevealedVote,
    Role,
    UserAccount,
    VoteCommitment,
    compute_digest,
    encode_commitment,
)
from .harness import (
    ExperimentConfig,
    RepetitionRecord,
    RunMetrics,
    compute_metrics,
    replay_run,
    run_experiment,
    save_run,
)
from .keccak import backend_name, keccak256
from .params import ProtocolParams
from .scoring import (
    Ballot,
    Scoreboard,
    ScoreboardEntry,
    SideOutcome,
    Verdict,
    aggregate_voter_stance,
    build_scoreboard,
    combine_outcomes,
    information_score,
    prediction_score,
    side_outcome,
    vote_weight,
)

__version__ = "0.1.0"

__all__ = [
    "ActorKind",
    "AgentProfile",
    "Ballot",
    "BaselineBallot",
    "ExperimentConfig",
    "OracleEngine",
    "Phase",
    "Proposition",
    "ProtocolParams",
    "RepetitionRecord",
    "RevealedVote",
    "Role",
    "RunMetrics",
    "Scoreboard",
    "ScoreboardEntry",
    "SideOutcome",
    "UserAccount",
    "Verdict",
    "VoteCommitment",
    "adversarial_ballot",
    "aggregate_voter_stance",
    "backend_name",
    "baseline_outcome",
    "baseline_settle",
    "build_scoreboard",
    "certifier_reward",
    "combine_outcomes",
    "compute_digest",
    "compute_metrics",
    "draw_ballot",
    "encode_commitment",
    "honest_ballot",
    "information_score",
    "keccak256",
    "prediction_score",
    "replay_run",
    "run_experiment",
    "save_run",
    "settle",
    "side_outcome",
    "update_reputations",
    "vote_weight",
    "voter_reward",
]
