"""Protocol parameter set shared by the engine, scoring, and settlement."""

from __future__ import annotations

from dataclasses import dataclass, fields, asdict

from .errors import ConfigInvalid


@dataclass(frozen=True)
class ProtocolParams:
    """Deployment-time constants of the voting game.

    Certifier stakes must start strictly above the voter stake ceiling, so a
    certification is always a bigger bond than any single vote.
    """

    min_voter_stake: int = 1
    max_voter_stake: int = 10
    min_certifier_stake: int = 11
    max_certifier_stake: int = 20
    alpha: float = 0.7  # stake sub-linearity mix in the vote weight
    beta: float = 0.5  # stake super-linearity mix in the voter reward
    max_reputation: int = 10
    voter_slots: int = 20  # N, slots drawn per proposition
    votes_to_close: int = 20  # K, voter commitments that conclude voting
    reward_fraction: float = 0.5  # x, fraction of ranked voters eligible for payout
    certification_window: int = 10  # blocks after creation
    reveal_window: int = 10  # blocks after the certification window
    min_bounty: int = 1
    starting_balance: int = 2500

    def validate(self) -> "ProtocolParams":
        if self.min_voter_stake < 1 or self.max_voter_stake < self.min_voter_stake:
            raise ConfigInvalid("voter stake range is empty or non-positive")
        if self.min_certifier_stake <= self.max_voter_stake:
            raise ConfigInvalid("certifier stakes must start above the voter stake ceiling")
        if self.max_certifier_stake < self.min_certifier_stake:
            raise ConfigInvalid("certifier stake range is empty")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigInvalid("alpha must lie in [0, 1]")
        if not 0.0 <= self.beta <= 1.0:
            raise ConfigInvalid("beta must lie in [0, 1]")
        if self.max_reputation < 1:
            raise ConfigInvalid("max_reputation must be at least 1")
        if self.voter_slots < 1:
            raise ConfigInvalid("voter_slots must be positive")
        if not 1 <= self.votes_to_close <= self.voter_slots:
            raise ConfigInvalid("votes_to_close must satisfy 1 <= K <= N")
        if not 0.0 < self.reward_fraction < 1.0:
            raise ConfigInvalid("reward_fraction must lie strictly between 0 and 1")
        if self.certification_window < 1 or self.reveal_window < 1:
            raise ConfigInvalid("phase windows must be at least one block")
        if self.min_bounty < 1:
            raise ConfigInvalid("min_bounty must be at least 1 token")
        if self.starting_balance < 0:
            raise ConfigInvalid("starting_balance cannot be negative")
        return self

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, raw: dict) -> "ProtocolParams":
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigInvalid(f"unknown protocol parameter(s): {sorted(unknown)}")
        return cls(**raw).validate()
