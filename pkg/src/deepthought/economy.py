"""Token pools, reward settlement, and reputation updates at close.

``settle`` is a pure planner: it turns the closing state of a proposition
into an explicit list of credits, forfeitures, and pool movements, and
verifies that the plan conserves tokens before anything is applied. The
engine is the single writer that executes the plan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import DomainError, InternalAccountingMismatch
from .scoring import Scoreboard, Verdict


def voter_reward(stake: float, reputation: int, beta: float) -> float:
    """Reward owed to a ranked voter: [beta*s^2 + (1-beta)*s] * sqrt(r).

    Super-linear in the stake; the scoreboard cutoff is the counterweight
    that keeps high-stake strategies risky.
    """
    if stake <= 0:
        raise DomainError(f"stake must be positive, got {stake}")
    if reputation < 1:
        raise DomainError(f"reputation must be at least 1, got {reputation}")
    if not 0.0 <= beta <= 1.0:
        raise DomainError(f"beta must lie in [0, 1], got {beta}")
    return (beta * stake * stake + (1.0 - beta) * stake) * math.sqrt(reputation)


def certifier_reward(
    stake: float, lost_pool: float, open_propositions: int, total_winning_stake: float
) -> float:
    """Reward of a winning certifier: s + (R/(P+1)) * (s / total_winning_stake).

    Dividing by P+1 rations the shared pool across the still-open
    propositions, which is what keeps it solvent.
    """
    if stake <= 0:
        raise DomainError(f"stake must be positive, got {stake}")
    if total_winning_stake < stake:
        raise DomainError("total winning stake cannot be below the certifier's own stake")
    if open_propositions < 0:
        raise DomainError("open proposition count cannot be negative")
    if lost_pool < 0:
        raise DomainError("lost pool cannot be negative")
    return stake + (lost_pool / (open_propositions + 1)) * (stake / total_winning_stake)


@dataclass(frozen=True)
class SettlementBallot:
    """Minimal view of a revealed ballot needed for settlement."""

    actor: int
    vote: bool
    stake: int


@dataclass
class SettlementReport:
    """Auditable record of every token moved while closing one proposition."""

    proposition: int
    outcome: Verdict
    paid_voters: list[tuple[int, int]] = field(default_factory=list)
    refunded_voters: list[tuple[int, int]] = field(default_factory=list)
    paid_certifiers: list[tuple[int, int]] = field(default_factory=list)
    forfeited: list[tuple[int, int, str]] = field(default_factory=list)
    remainder_to_lost_pool: int = 0
    lost_pool_credit: int = 0
    lost_pool_debit: int = 0
    reputation_deltas: list[tuple[int, int]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "proposition": self.proposition,
            "outcome": self.outcome.value,
            "paid_voters": [list(t) for t in self.paid_voters],
            "refunded_voters": [list(t) for t in self.refunded_voters],
            "paid_certifiers": [list(t) for t in self.paid_certifiers],
            "forfeited": [list(t) for t in self.forfeited],
            "remainder_to_lost_pool": self.remainder_to_lost_pool,
            "lost_pool_credit": self.lost_pool_credit,
            "lost_pool_debit": self.lost_pool_debit,
            "reputation_deltas": [list(t) for t in self.reputation_deltas],
        }


def settle(
    proposition_id: int,
    outcome: Verdict,
    scoreboard: Scoreboard,
    revealed_voter_stakes: Sequence[tuple[int, int]],
    revealed_certifiers: Sequence[SettlementBallot],
    unrevealed: Sequence[tuple[int, int]],
    bounty: int,
    lost_pool_balance: int,
    open_propositions: int,
    beta: float,
    reward_fraction: float,
) -> SettlementReport:
    """Plan the token settlement for a closing proposition.

    Order of operations, which fixes how the shared lost pool is read:

    1. Unrevealed stakes (voter and certifier alike) are forfeited.
    2. On a decided outcome, the voter pool (bounty + revealed voter stakes)
       pays the top ceil(x * K_actual) scoreboard entries from the top down,
       each floor(g_v); the first entry the pool cannot cover stops payouts
       for it and everything ranked below. On UNKNOWN, revealed voter stakes
       are refunded and the bounty is forfeited instead.
    3. Losing (or, on UNKNOWN, all) revealed certifier stakes are forfeited.
    4. All forfeitures and the voter-pool residue are credited to the lost
       pool, and only then is the pool read as R to pay winning certifiers
       their stake plus floor of the rationed share.
    """
    report = SettlementReport(proposition=proposition_id, outcome=outcome)
    unrevealed_total = 0
    for actor, stake in unrevealed:
        report.forfeited.append((actor, stake, "unrevealed"))
        unrevealed_total += stake

    voter_stake_total = sum(stake for _, stake in revealed_voter_stakes)
    residue = 0
    if outcome is Verdict.UNKNOWN:
        for actor, stake in revealed_voter_stakes:
            report.refunded_voters.append((actor, stake))
        residue = bounty
    else:
        pool = bounty + voter_stake_total
        candidates = scoreboard.top(math.ceil(reward_fraction * len(scoreboard)))
        for entry in candidates:
            owed = int(voter_reward(entry.stake, entry.reputation, beta))
            if owed > pool:
                break
            report.paid_voters.append((entry.voter, owed))
            pool -= owed
        residue = pool
    report.remainder_to_lost_pool = residue

    winning: list[SettlementBallot] = []
    certifier_forfeit_total = 0
    for ballot in revealed_certifiers:
        if outcome is not Verdict.UNKNOWN and Verdict.from_bool(ballot.vote) is outcome:
            winning.append(ballot)
        else:
            reason = "certifier_unknown" if outcome is Verdict.UNKNOWN else "certifier_mismatch"
            report.forfeited.append((ballot.actor, ballot.stake, reason))
            certifier_forfeit_total += ballot.stake

    report.lost_pool_credit = unrevealed_total + residue + certifier_forfeit_total
    pool_at_read = lost_pool_balance + report.lost_pool_credit

    if winning:
        total_winning_stake = sum(b.stake for b in winning)
        debit = 0
        for ballot in winning:
            total = int(
                certifier_reward(
                    ballot.stake, pool_at_read, open_propositions, total_winning_stake
                )
            )
            report.paid_certifiers.append((ballot.actor, total))
            debit += total - ballot.stake
        report.lost_pool_debit = debit

    _audit(report, bounty, voter_stake_total, unrevealed_total,
           certifier_forfeit_total, sum(b.stake for b in winning), pool_at_read,
           open_propositions)
    return report


def _audit(
    report: SettlementReport,
    bounty: int,
    voter_stake_total: int,
    unrevealed_total: int,
    certifier_forfeit_total: int,
    winning_stake_total: int,
    pool_at_read: int,
    open_propositions: int,
) -> None:
    """Abort settlement if the plan does not balance to the token."""
    escrow_in = bounty + voter_stake_total + unrevealed_total + certifier_forfeit_total + winning_stake_total
    credits = (
        sum(a for _, a in report.paid_voters)
        + sum(a for _, a in report.refunded_voters)
        + winning_stake_total  # stake-return part of certifier payouts
        + unrevealed_total
        + certifier_forfeit_total
        + report.remainder_to_lost_pool
    )
    if credits != escrow_in:
        raise InternalAccountingMismatch(
            f"settlement of proposition {report.proposition} does not balance: "
            f"escrow {escrow_in} vs credits {credits}"
        )
    share_cap = pool_at_read // (open_propositions + 1)
    if report.lost_pool_debit > share_cap:
        raise InternalAccountingMismatch(
            f"certifier shares {report.lost_pool_debit} exceed the rationed cap {share_cap}"
        )
    paid_total = sum(a for _, a in report.paid_certifiers)
    if paid_total != winning_stake_total + report.lost_pool_debit:
        raise InternalAccountingMismatch("certifier payouts disagree with pool debit")


def update_reputations(
    outcome: Verdict,
    voter_stances: Mapping[int, Verdict],
    certifier_stances: Mapping[int, Verdict],
    reputations: Mapping[int, int],
    max_reputation: int,
) -> dict[int, int]:
    """Applied reputation deltas (already clamped to [1, max_r]) per actor.

    Matching the decided outcome gains one point, mismatching loses one; an
    UNKNOWN personal stance moves nothing. An UNKNOWN outcome leaves voters
    untouched and costs every participating certifier one point.
    """
    applied: dict[int, int] = {}

    def clamp_delta(actor: int, delta: int) -> None:
        current = reputations[actor]
        target = max(1, min(max_reputation, current + delta))
        if target != current:
            applied[actor] = target - current

    if outcome is Verdict.UNKNOWN:
        for actor in certifier_stances:
            clamp_delta(actor, -1)
        return applied

    for actor, stance in voter_stances.items():
        if stance is Verdict.UNKNOWN:
            continue
        clamp_delta(actor, 1 if stance is outcome else -1)
    for actor, stance in certifier_stances.items():
        if stance is Verdict.UNKNOWN:
            continue
        clamp_delta(actor, 1 if stance is outcome else -1)
    return applied
