"""Vote weighting, outcome aggregation, and the voter scoreboard.

Everything here is a pure function of its arguments (plus an explicit RNG
where peer sampling is involved), so callers may evaluate concurrently on
disjoint inputs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DomainError, PredictionOutOfRange, VoterNotFound


class Verdict(str, enum.Enum):
    """Ternary result of a vote aggregation or a whole proposition."""

    TRUE = "TRUE"
    FALSE = "FALSE"
    UNKNOWN = "UNKNOWN"

    @classmethod
    def from_bool(cls, value: bool) -> "Verdict":
        return cls.TRUE if value else cls.FALSE


def vote_weight(stake: float, reputation: int, alpha: float) -> float:
    """Weight of one ballot: [alpha*sqrt(s) + (1-alpha)*s] * sqrt(r).

    Sub-linear in the stake so wealth alone cannot buy dominant voting
    power; sub-linear in reputation so seniority helps without crushing
    newcomers.
    """
    if stake <= 0:
        raise DomainError(f"stake must be positive, got {stake}")
    if reputation < 1:
        raise DomainError(f"reputation must be at least 1, got {reputation}")
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    return (alpha * math.sqrt(stake) + (1.0 - alpha) * stake) * math.sqrt(reputation)


@dataclass(frozen=True)
class SideOutcome:
    """Verdict of one side (voters or certifiers) with its weight sums."""

    verdict: Verdict
    true_weight: float
    false_weight: float


def side_outcome(votes: Iterable[tuple[bool, float]]) -> SideOutcome:
    """Aggregate (vote, weight) pairs into a side verdict.

    The comparison is exact on the accumulated sums; an empty collection is
    a legal input and yields UNKNOWN.
    """
    true_weight = 0.0
    false_weight = 0.0
    for vote, weight in votes:
        if vote:
            true_weight += weight
        else:
            false_weight += weight
    if true_weight > false_weight:
        verdict = Verdict.TRUE
    elif false_weight > true_weight:
        verdict = Verdict.FALSE
    else:
        verdict = Verdict.UNKNOWN
    return SideOutcome(verdict, true_weight, false_weight)


def combine_outcomes(voters: Verdict, certifiers: Verdict) -> Verdict:
    """Proposition outcome from the voter and certifier side verdicts.

    Agreement wins, an UNKNOWN certifier side defers to the voters, and any
    other disagreement (or an undecided voter side) is UNKNOWN.
    """
    if voters is Verdict.UNKNOWN:
        return Verdict.UNKNOWN
    if certifiers is Verdict.UNKNOWN:
        return voters
    if voters is certifiers:
        return voters
    return Verdict.UNKNOWN


def prediction_score(prediction: float, reference_vote: bool) -> float:
    """Quadratic score of a prediction against a reference boolean vote.

    2q - q^2 when the reference voted TRUE, 1 - q^2 otherwise; proper, and
    bounded in [0, 1] for q in [0, 1].
    """
    if not 0.0 <= prediction <= 1.0:
        raise PredictionOutOfRange(f"prediction must lie in [0, 1], got {prediction}")
    q = prediction
    if reference_vote:
        return 2.0 * q - q * q
    return 1.0 - q * q


@dataclass(frozen=True)
class Ballot:
    """A revealed voter ballot as seen by the scoring layer."""

    actor: int
    vote: bool
    prediction: float
    stake: int
    reputation: int


def information_score(index: int, ballots: Sequence[Ballot]) -> float:
    """Agreement of one ballot's prediction with its same-vote peer group.

    The peer group is every ballot that voted the same way, excluding all
    ballots cast by the same actor. Scores 1 - (mean_peer_prediction - own)^2;
    a ballot whose peer group is empty scores a neutral 1.0.
    """
    if not 0 <= index < len(ballots):
        raise VoterNotFound(f"no ballot at index {index}")
    me = ballots[index]
    peers = [
        b.prediction
        for b in ballots
        if b.vote == me.vote and b.actor != me.actor
    ]
    if not peers:
        return 1.0
    mean = sum(peers) / len(peers)
    return 1.0 - (mean - me.prediction) ** 2


def information_score_for(actor: int, ballots: Sequence[Ballot]) -> float:
    """Information score looked up by actor id (first ballot of that actor)."""
    for i, b in enumerate(ballots):
        if b.actor == actor:
            return information_score(i, ballots)
    raise VoterNotFound(f"actor {actor} has no revealed ballot")


@dataclass(frozen=True)
class ScoreboardEntry:
    voter: int
    total_score: float
    prediction_score: float
    information_score: float
    stake: int
    reputation: int

    def to_dict(self) -> dict:
        return {
            "voter": self.voter,
            "total_score": self.total_score,
            "prediction_score": self.prediction_score,
            "information_score": self.information_score,
            "stake": self.stake,
            "reputation": self.reputation,
        }


@dataclass
class Scoreboard:
    """Voter ballots ranked by total score, best first.

    Ties keep the earlier-revealed ballot on top, so prompt reveals are never
    ranked below later identical scores.
    """

    entries: list[ScoreboardEntry]

    def __len__(self) -> int:
        return len(self.entries)

    def top(self, count: int) -> list[ScoreboardEntry]:
        return self.entries[:count]


def build_scoreboard(
    ballots: Sequence[Ballot],
    rng: np.random.Generator,
    outcome: Optional[Verdict] = None,
) -> Scoreboard:
    """Score every revealed ballot and rank them.

    The prediction score is taken against the vote of a peer ballot drawn
    uniformly from the other actors' ballots. A ballot with no eligible peer
    falls back to the proposition outcome; an UNKNOWN (or absent) outcome
    scores the flat midpoint 0.5 there.

    Insertion is an in-order scan, linear in the current scoreboard length.
    """
    entries: list[ScoreboardEntry] = []
    for i, ballot in enumerate(ballots):
        pool = [j for j in range(len(ballots)) if ballots[j].actor != ballot.actor]
        if pool:
            peer = ballots[pool[int(rng.integers(len(pool)))]]
            u_pr = prediction_score(ballot.prediction, peer.vote)
        elif outcome in (Verdict.TRUE, Verdict.FALSE):
            u_pr = prediction_score(ballot.prediction, outcome is Verdict.TRUE)
        else:
            u_pr = 0.5
        u_ir = information_score(i, ballots)
        entry = ScoreboardEntry(
            voter=ballot.actor,
            total_score=u_pr + u_ir,
            prediction_score=u_pr,
            information_score=u_ir,
            stake=ballot.stake,
            reputation=ballot.reputation,
        )
        pos = 0
        while pos < len(entries) and entries[pos].total_score >= entry.total_score:
            pos += 1
        entries.insert(pos, entry)
    return Scoreboard(entries)


def aggregate_voter_stance(
    actor: int, ballots: Iterable[tuple[int, bool, float]]
) -> Verdict:
    """Overall stance of one actor from their (actor, vote, weight) ballots.

    Used only for the reputation update of actors who cast several ballots
    on the same proposition.
    """
    true_weight = 0.0
    false_weight = 0.0
    seen = False
    for ballot_actor, vote, weight in ballots:
        if ballot_actor != actor:
            continue
        seen = True
        if vote:
            true_weight += weight
        else:
            false_weight += weight
    if not seen:
        raise VoterNotFound(f"actor {actor} cast no ballot here")
    if true_weight > false_weight:
        return Verdict.TRUE
    if false_weight > true_weight:
        return Verdict.FALSE
    return Verdict.UNKNOWN
