"""Simulated voter populations: honest-but-noisy agents and adversaries."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigInvalid
from .params import ProtocolParams

HONEST = "honest"
ADVERSARIAL = "adversarial"

# Prediction policies. Honest agents default to calibrated beliefs; the
# adversary's default mirrors the protocol description of a confident liar.
PREDICTION_CALIBRATED = "calibrated"
PREDICTION_ZERO = "zero"
PREDICTION_MIMIC = "mimic"

STAKE_FIXED = "fixed"
STAKE_MAX_RANGE = "max_range"


@dataclass(frozen=True)
class AgentProfile:
    """Behavioral description of one simulated user.

    ``accuracy`` is the probability an honest agent votes TRUE on a
    proposition whose ground truth is TRUE. Adversarial agents always vote
    FALSE; their ``accuracy`` field only parameterizes the ``mimic``
    prediction policy.
    """

    kind: str
    accuracy: float = 1.0
    stake_policy: str = STAKE_FIXED
    stake_amount: int = 1
    prediction_policy: str = PREDICTION_CALIBRATED

    def validate(self) -> "AgentProfile":
        if self.kind not in (HONEST, ADVERSARIAL):
            raise ConfigInvalid(f"unknown agent kind {self.kind!r}")
        if not 0.0 <= self.accuracy <= 1.0:
            raise ConfigInvalid("agent accuracy must lie in [0, 1]")
        if self.stake_policy not in (STAKE_FIXED, STAKE_MAX_RANGE):
            raise ConfigInvalid(f"unknown stake policy {self.stake_policy!r}")
        if self.prediction_policy not in (
            PREDICTION_CALIBRATED,
            PREDICTION_ZERO,
            PREDICTION_MIMIC,
        ):
            raise ConfigInvalid(f"unknown prediction policy {self.prediction_policy!r}")
        return self


def honest_ballot(profile: AgentProfile, rng: np.random.Generator) -> tuple[bool, float]:
    """(vote, prediction) for an honest agent on a TRUE-ground-truth statement."""
    vote = bool(rng.random() < profile.accuracy)
    if profile.prediction_policy == PREDICTION_ZERO:
        prediction = 0.0
    elif profile.prediction_policy == PREDICTION_MIMIC:
        prediction = 1.0 - profile.accuracy
    else:
        prediction = profile.accuracy if vote else 1.0 - profile.accuracy
    return vote, prediction


def adversarial_ballot(profile: AgentProfile) -> tuple[bool, float]:
    """(vote, prediction) for an adversary: always FALSE, confidently."""
    if profile.prediction_policy == PREDICTION_MIMIC:
        return False, 1.0 - profile.accuracy
    return False, 0.0


def draw_ballot(profile: AgentProfile, rng: np.random.Generator) -> tuple[bool, float]:
    if profile.kind == ADVERSARIAL:
        return adversarial_ballot(profile)
    return honest_ballot(profile, rng)


def stake_for(profile: AgentProfile, params: ProtocolParams, certifier: bool = False) -> int:
    """Stake an agent puts behind one ballot under its stake policy."""
    lo = params.min_certifier_stake if certifier else params.min_voter_stake
    hi = params.max_certifier_stake if certifier else params.max_voter_stake
    if profile.stake_policy == STAKE_MAX_RANGE:
        return hi
    return max(lo, min(hi, profile.stake_amount if not certifier else lo))
