"""Equal-weight voting baseline used for corruption comparisons.

Every ballot counts the same regardless of who cast it or how much was
staked; settlement is a simple pro-rata split of the losing side's pool.
Only the pieces the corruption metrics need are implemented.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .scoring import Verdict, combine_outcomes


@dataclass(frozen=True)
class BaselineBallot:
    actor: int
    actor_kind: str  # "voter" or "certifier"
    vote: bool
    stake: int


@dataclass
class BaselinePools:
    true_pool: int = 0
    false_pool: int = 0


def _majority(votes: Sequence[bool]) -> Verdict:
    trues = sum(1 for v in votes if v)
    falses = len(votes) - trues
    if trues > falses:
        return Verdict.TRUE
    if falses > trues:
        return Verdict.FALSE
    return Verdict.UNKNOWN


def baseline_outcome(ballots: Iterable[BaselineBallot]) -> Verdict:
    """Plain vote-count majority per side, combined like the main protocol.

    The verdict depends only on ballot counts: permuting ballots or rescaling
    stakes cannot change it.
    """
    ballots = list(ballots)
    voters = _majority([b.vote for b in ballots if b.actor_kind == "voter"])
    certifiers = _majority([b.vote for b in ballots if b.actor_kind == "certifier"])
    return combine_outcomes(voters, certifiers)


def baseline_settle(
    ballots: Sequence[BaselineBallot], outcome: Verdict
) -> list[tuple[int, float]]:
    """Payout per ballot: winners split the losing pool pro-rata by stake.

    Returns (actor, amount) pairs aligned with the input order. An UNKNOWN
    outcome returns every stake untouched. Amounts are real-valued; the
    baseline has no integer token ledger of its own.
    """
    if outcome is Verdict.UNKNOWN:
        return [(b.actor, float(b.stake)) for b in ballots]
    winners = [b for b in ballots if Verdict.from_bool(b.vote) is outcome]
    losing_pool = sum(b.stake for b in ballots if Verdict.from_bool(b.vote) is not outcome)
    winning_stake = sum(b.stake for b in winners)
    payouts = []
    for b in ballots:
        if Verdict.from_bool(b.vote) is outcome:
            share = losing_pool * (b.stake / winning_stake) if winning_stake else 0.0
            payouts.append((b.actor, b.stake + share))
        else:
            payouts.append((b.actor, 0.0))
    return payouts


def pools_from_ballots(ballots: Iterable[BaselineBallot]) -> BaselinePools:
    pools = BaselinePools()
    for b in ballots:
        if b.vote:
            pools.true_pool += b.stake
        else:
            pools.false_pool += b.stake
    return pools
