"""Proposition lifecycle engine: accounts, commit-reveal ballots, closing.

The engine is one logical state machine. All mutating calls go through a
single writer (no internal locking); reads may happen concurrently between
mutations. Time is a logical block counter advanced explicitly with
``advance_block``, which is what makes whole simulations replayable.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import economy, scoring
from .errors import (
    CertificationWindowClosed,
    DigestMismatch,
    DomainError,
    EmptyContent,
    InsufficientBalance,
    InternalAccountingMismatch,
    NoCommitment,
    NotSelected,
    NoVotersRegistered,
    PredictionOutOfRange,
    RevealWindowClosed,
    StakeOutOfRange,
    VotingClosed,
    WrongPhase,
    WrongRole,
)
from .keccak import keccak256
from .params import ProtocolParams
from .scoring import Verdict


class Role(str, enum.Enum):
    SUBMITTER = "SUBMITTER"
    VOTER = "VOTER"
    CERTIFIER = "CERTIFIER"


class ActorKind(str, enum.Enum):
    VOTER = "VOTER"
    CERTIFIER = "CERTIFIER"


class Phase(str, enum.Enum):
    OPEN = "OPEN"
    REVEAL = "REVEAL"
    CLOSED = "CLOSED"


PREDICTION_SCALE = 10_000  # predictions are quantized to basis points


def quantize_prediction(prediction: float) -> int:
    """Prediction in [0, 1] as an integer number of basis points."""
    if not 0.0 <= prediction <= 1.0:
        raise PredictionOutOfRange(f"prediction must lie in [0, 1], got {prediction}")
    return round(prediction * PREDICTION_SCALE)


def encode_commitment(vote: bool, prediction: Optional[float], salt: bytes) -> bytes:
    """Canonical byte layout hashed into a commitment digest.

    One vote byte (0x01 TRUE / 0x00 FALSE), then for voter ballots the
    prediction as a big-endian 16-bit basis-point count, then the raw salt.
    Certifier ballots omit the prediction field entirely. The layout is
    bit-exact across implementations, so digests are portable.
    """
    head = b"\x01" if vote else b"\x00"
    if prediction is None:
        return head + salt
    return head + quantize_prediction(prediction).to_bytes(2, "big") + salt


def compute_digest(vote: bool, prediction: Optional[float], salt: bytes) -> bytes:
    """Keccak-256 digest binding a ballot to its commitment."""
    return keccak256(encode_commitment(vote, prediction, salt))


@dataclass
class UserAccount:
    id: int
    role: Role
    reputation: int
    balance: int


@dataclass
class VoteCommitment:
    actor: int
    actor_kind: ActorKind
    stake: int
    digest: bytes
    revealed: bool = False


@dataclass
class RevealedVote:
    actor: int
    actor_kind: ActorKind
    vote: bool
    prediction: Optional[float]
    salt: bytes
    stake: int


@dataclass
class Proposition:
    id: int
    content: str
    bounty: int
    submitter: int
    created_at: int
    certification_deadline: int
    reveal_deadline: int
    phase: Phase = Phase.OPEN
    selected_slots: list[int] = field(default_factory=list)
    slots_drawn: bool = False
    voter_commitments: list[VoteCommitment] = field(default_factory=list)
    certifier_commitments: list[VoteCommitment] = field(default_factory=list)
    revealed: list[RevealedVote] = field(default_factory=list)
    outcome: Optional[Verdict] = None

    def escrow(self) -> int:
        """Tokens held by this proposition until settlement."""
        if self.phase is Phase.CLOSED:
            return 0
        stakes = sum(c.stake for c in self.voter_commitments)
        stakes += sum(c.stake for c in self.certifier_commitments)
        return self.bounty + stakes

    def remaining_slots(self, voter: int) -> int:
        held = sum(1 for s in self.selected_slots if s == voter)
        used = sum(1 for c in self.voter_commitments if c.actor == voter)
        return held - used

    def all_revealed(self) -> bool:
        return all(
            c.revealed for c in self.voter_commitments + self.certifier_commitments
        )


class OracleEngine:
    """Single-writer oracle state machine over a seeded random source."""

    def __init__(
        self,
        params: Optional[ProtocolParams] = None,
        seed: Optional[int] = None,
        rng: Optional[np.random.Generator] = None,
    ):
        self.params = (params or ProtocolParams()).validate()
        if rng is not None:
            self.rng = rng
        else:
            self.rng = np.random.default_rng(seed)
        self.block = 0
        self.users: dict[int, UserAccount] = {}
        self.available: dict[int, Proposition] = {}
        self.closed: dict[int, Proposition] = {}
        self.lost_pool = 0
        self.settlement_reports: list[economy.SettlementReport] = []
        self._next_user = 0
        self._next_proposition = 0

    # ------------------------------------------------------------------ users

    def subscribe(self, role: Role) -> UserAccount:
        """Register a new account with reputation 1 and the starting balance."""
        account = UserAccount(
            id=self._next_user,
            role=Role(role),
            reputation=1,
            balance=self.params.starting_balance,
        )
        self._next_user += 1
        self.users[account.id] = account
        return account

    def voter_ids(self) -> list[int]:
        return sorted(u.id for u in self.users.values() if u.role is Role.VOTER)

    # ----------------------------------------------------------- propositions

    def submit_proposition(
        self, submitter: int, content: str, bounty: int, draw_slots: bool = True
    ) -> int:
        """Escrow a bounty and open a new proposition for voting."""
        account = self._account(submitter)
        if account.role is not Role.SUBMITTER:
            raise WrongRole(f"account {submitter} is not a submitter")
        if not content:
            raise EmptyContent("proposition content must be non-empty")
        if bounty < self.params.min_bounty:
            raise DomainError(
                f"bounty {bounty} is below the minimum of {self.params.min_bounty}"
            )
        if account.balance < bounty:
            raise InsufficientBalance(
                f"submitter {submitter} holds {account.balance} < bounty {bounty}"
            )
        account.balance -= bounty
        prop = Proposition(
            id=self._next_proposition,
            content=content,
            bounty=bounty,
            submitter=submitter,
            created_at=self.block,
            certification_deadline=self.block + self.params.certification_window,
            reveal_deadline=self.block
            + self.params.certification_window
            + self.params.reveal_window,
        )
        self._next_proposition += 1
        self.available[prop.id] = prop
        if draw_slots:
            self.select_voters(prop.id)
        return prop.id

    def select_voters(self, proposition: int) -> list[int]:
        """Draw N voter slots uniformly with replacement over subscribed voters.

        A voter drawn more than once may commit once per held slot. The draw
        is a pure function of the engine RNG state, so replays reproduce it.
        """
        prop = self._proposition(proposition)
        if prop.phase is not Phase.OPEN:
            raise WrongPhase(f"proposition {proposition} is not open")
        if prop.slots_drawn:
            raise WrongPhase(f"slots already drawn for proposition {proposition}")
        voters = self.voter_ids()
        if not voters:
            raise NoVotersRegistered("cannot draw voter slots: no voters subscribed")
        draws = self.rng.integers(0, len(voters), size=self.params.voter_slots)
        prop.selected_slots = [voters[int(i)] for i in draws]
        prop.slots_drawn = True
        return list(prop.selected_slots)

    # ------------------------------------------------------------ commitments

    def commit_vote(self, voter: int, proposition: int, stake: int, digest: bytes) -> None:
        """Escrow a stake and record a hidden voter ballot, consuming a slot."""
        account = self._account(voter)
        if account.role is not Role.VOTER:
            raise WrongRole(f"account {voter} is not a voter")
        prop = self._proposition(proposition)
        self._refresh_phase(prop)
        if prop.phase is not Phase.OPEN:
            raise VotingClosed(f"proposition {proposition} no longer accepts votes")
        if len(prop.voter_commitments) >= self.params.votes_to_close:
            raise VotingClosed(f"proposition {proposition} already holds K votes")
        if prop.remaining_slots(voter) <= 0:
            raise NotSelected(f"voter {voter} holds no unconsumed slot")
        if not self.params.min_voter_stake <= stake <= self.params.max_voter_stake:
            raise StakeOutOfRange(
                f"voter stake {stake} outside "
                f"[{self.params.min_voter_stake}, {self.params.max_voter_stake}]"
            )
        if account.balance < stake:
            raise InsufficientBalance(f"voter {voter} cannot stake {stake}")
        account.balance -= stake
        prop.voter_commitments.append(
            VoteCommitment(voter, ActorKind.VOTER, stake, bytes(digest))
        )

    def commit_certification(
        self, certifier: int, proposition: int, stake: int, digest: bytes
    ) -> None:
        """Escrow a certifier stake and record a hidden certification."""
        account = self._account(certifier)
        if account.role is not Role.CERTIFIER:
            raise WrongRole(f"account {certifier} is not a certifier")
        prop = self._proposition(proposition)
        self._refresh_phase(prop)
        if prop.phase is not Phase.OPEN or self.block > prop.certification_deadline:
            raise CertificationWindowClosed(
                f"certification window of proposition {proposition} has closed"
            )
        if not self.params.min_certifier_stake <= stake <= self.params.max_certifier_stake:
            raise StakeOutOfRange(
                f"certifier stake {stake} outside "
                f"[{self.params.min_certifier_stake}, {self.params.max_certifier_stake}]"
            )
        if account.balance < stake:
            raise InsufficientBalance(f"certifier {certifier} cannot stake {stake}")
        account.balance -= stake
        prop.certifier_commitments.append(
            VoteCommitment(certifier, ActorKind.CERTIFIER, stake, bytes(digest))
        )

    # ----------------------------------------------------------------- reveal

    def reveal(
        self,
        actor: int,
        proposition: int,
        vote: bool,
        prediction: Optional[float] = None,
        salt: bytes = b"",
    ) -> None:
        """Open a commitment by re-deriving and matching its digest.

        The digest is recomputed from the submitted tuple and compared against
        the actor's unrevealed commitments; on a match the ballot is recorded,
        otherwise the commitment stays hidden and the reveal is rejected.
        """
        self._account(actor)
        prop = self._proposition(proposition)
        self._refresh_phase(prop)
        if prop.phase is not Phase.REVEAL:
            raise WrongPhase(
                f"proposition {proposition} is not in its reveal phase"
            )
        if self.block > prop.reveal_deadline:
            raise RevealWindowClosed(
                f"reveal window of proposition {proposition} has closed"
            )
        pending = [
            c
            for c in prop.voter_commitments + prop.certifier_commitments
            if c.actor == actor and not c.revealed
        ]
        if not pending:
            raise NoCommitment(f"actor {actor} has no unrevealed commitment")
        digest = compute_digest(vote, prediction, salt)
        for commitment in pending:
            if commitment.digest == digest:
                commitment.revealed = True
                stored_prediction = None
                if commitment.actor_kind is ActorKind.VOTER:
                    stored_prediction = quantize_prediction(prediction) / PREDICTION_SCALE
                prop.revealed.append(
                    RevealedVote(
                        actor=actor,
                        actor_kind=commitment.actor_kind,
                        vote=vote,
                        prediction=stored_prediction,
                        salt=bytes(salt),
                        stake=commitment.stake,
                    )
                )
                return
        raise DigestMismatch(
            f"revealed tuple does not match any commitment of actor {actor}"
        )

    # ------------------------------------------------------------------ close

    def close_proposition(self, proposition: int) -> Verdict:
        """Compute the outcome, settle rewards, update reputations, archive.

        Requires every commitment revealed or the reveal window elapsed.
        Effects are planned first (and audited for token conservation), then
        applied as one atomic batch.
        """
        prop = self._proposition(proposition)
        self._refresh_phase(prop)
        if prop.phase is Phase.CLOSED:
            raise WrongPhase(f"proposition {proposition} is already closed")
        if prop.phase is not Phase.REVEAL:
            raise WrongPhase(f"proposition {proposition} is still open")
        if not prop.all_revealed() and self.block <= prop.reveal_deadline:
            raise WrongPhase(
                f"proposition {proposition} still has unrevealed commitments"
            )

        total_before = self.total_tokens()

        voter_votes = [v for v in prop.revealed if v.actor_kind is ActorKind.VOTER]
        certifier_votes = [v for v in prop.revealed if v.actor_kind is ActorKind.CERTIFIER]
        alpha = self.params.alpha

        voter_weighted = [
            (v, scoring.vote_weight(v.stake, self.users[v.actor].reputation, alpha))
            for v in voter_votes
        ]
        certifier_weighted = [
            (v, scoring.vote_weight(v.stake, self.users[v.actor].reputation, alpha))
            for v in certifier_votes
        ]
        w_voters = scoring.side_outcome((v.vote, w) for v, w in voter_weighted)
        w_certifiers = scoring.side_outcome((v.vote, w) for v, w in certifier_weighted)
        outcome = scoring.combine_outcomes(w_voters.verdict, w_certifiers.verdict)

        ballots = [
            scoring.Ballot(
                actor=v.actor,
                vote=v.vote,
                prediction=v.prediction,
                stake=v.stake,
                reputation=self.users[v.actor].reputation,
            )
            for v in voter_votes
        ]
        scoreboard = scoring.build_scoreboard(ballots, self.rng, outcome)

        unrevealed = [
            (c.actor, c.stake)
            for c in prop.voter_commitments + prop.certifier_commitments
            if not c.revealed
        ]

        # The proposition leaves the available list as part of closing, so
        # the pool ration denominator P+1 counts it alongside the remainder.
        open_count = len(self.available) - 1

        report = economy.settle(
            proposition_id=prop.id,
            outcome=outcome,
            scoreboard=scoreboard,
            revealed_voter_stakes=[(v.actor, v.stake) for v in voter_votes],
            revealed_certifiers=[
                economy.SettlementBallot(v.actor, v.vote, v.stake)
                for v in certifier_votes
            ],
            unrevealed=unrevealed,
            bounty=prop.bounty,
            lost_pool_balance=self.lost_pool,
            open_propositions=open_count,
            beta=self.params.beta,
            reward_fraction=self.params.reward_fraction,
        )

        voter_stances = {
            actor: scoring.aggregate_voter_stance(
                actor, ((v.actor, v.vote, w) for v, w in voter_weighted)
            )
            for actor in {v.actor for v in voter_votes}
        }
        certifier_stances = {
            actor: scoring.aggregate_voter_stance(
                actor, ((v.actor, v.vote, w) for v, w in certifier_weighted)
            )
            for actor in {v.actor for v in certifier_votes}
        }
        deltas = economy.update_reputations(
            outcome,
            voter_stances,
            certifier_stances,
            {uid: acc.reputation for uid, acc in self.users.items()},
            self.params.max_reputation,
        )
        report.reputation_deltas = sorted(deltas.items())

        # Apply the audited plan.
        for actor, amount in report.paid_voters:
            self.users[actor].balance += amount
        for actor, amount in report.refunded_voters:
            self.users[actor].balance += amount
        for actor, amount in report.paid_certifiers:
            self.users[actor].balance += amount
        self.lost_pool += report.lost_pool_credit - report.lost_pool_debit
        if self.lost_pool < 0:
            raise InternalAccountingMismatch("lost reward pool went negative")
        for actor, delta in deltas.items():
            self.users[actor].reputation += delta

        prop.phase = Phase.CLOSED
        prop.outcome = outcome
        del self.available[prop.id]
        self.closed[prop.id] = prop
        self.settlement_reports.append(report)

        if self.total_tokens() != total_before:
            raise InternalAccountingMismatch(
                f"token supply changed while closing proposition {prop.id}"
            )
        return outcome

    # ------------------------------------------------------------------- time

    def advance_block(self, count: int = 1) -> int:
        """Move the logical clock forward and refresh proposition phases."""
        if count < 0:
            raise DomainError("the block counter only moves forward")
        self.block += count
        for prop in self.available.values():
            self._refresh_phase(prop)
        return self.block

    def _refresh_phase(self, prop: Proposition) -> None:
        if prop.phase is Phase.OPEN and self.block > prop.certification_deadline:
            prop.phase = Phase.REVEAL

    # ------------------------------------------------------------------ audit

    def total_tokens(self) -> int:
        """Balances plus escrows plus the lost pool; constant across ops."""
        balances = sum(u.balance for u in self.users.values())
        escrows = sum(p.escrow() for p in self.available.values())
        return balances + escrows + self.lost_pool

    # --------------------------------------------------------------- snapshot

    def snapshot(self) -> dict:
        """Full engine state as a JSON-compatible dict (including RNG state)."""
        rng_state = self.rng.bit_generator.state
        return {
            "params": self.params.to_dict(),
            "block": self.block,
            "lost_pool": self.lost_pool,
            "next_user": self._next_user,
            "next_proposition": self._next_proposition,
            "rng": json.loads(json.dumps(rng_state, default=int)),
            "users": [
                {
                    "id": u.id,
                    "role": u.role.value,
                    "reputation": u.reputation,
                    "balance": u.balance,
                }
                for u in self.users.values()
            ],
            "available": [self._prop_dict(p) for p in self.available.values()],
            "closed": [self._prop_dict(p) for p in self.closed.values()],
            "settlements": [r.to_dict() for r in self.settlement_reports],
        }

    def to_json(self) -> str:
        return json.dumps(self.snapshot(), sort_keys=True)

    @classmethod
    def from_json(cls, payload: str) -> "OracleEngine":
        raw = json.loads(payload)
        engine = cls(params=ProtocolParams.from_dict(raw["params"]))
        engine.block = raw["block"]
        engine.lost_pool = raw["lost_pool"]
        engine._next_user = raw["next_user"]
        engine._next_proposition = raw["next_proposition"]
        engine.rng.bit_generator.state = raw["rng"]
        for u in raw["users"]:
            engine.users[u["id"]] = UserAccount(
                id=u["id"],
                role=Role(u["role"]),
                reputation=u["reputation"],
                balance=u["balance"],
            )
        for p in raw["available"]:
            prop = cls._prop_from_dict(p)
            engine.available[prop.id] = prop
        for p in raw["closed"]:
            prop = cls._prop_from_dict(p)
            engine.closed[prop.id] = prop
        for r in raw["settlements"]:
            report = economy.SettlementReport(
                proposition=r["proposition"],
                outcome=Verdict(r["outcome"]),
                paid_voters=[tuple(t) for t in r["paid_voters"]],
                refunded_voters=[tuple(t) for t in r["refunded_voters"]],
                paid_certifiers=[tuple(t) for t in r["paid_certifiers"]],
                forfeited=[tuple(t) for t in r["forfeited"]],
                remainder_to_lost_pool=r["remainder_to_lost_pool"],
                lost_pool_credit=r["lost_pool_credit"],
                lost_pool_debit=r["lost_pool_debit"],
                reputation_deltas=[tuple(t) for t in r["reputation_deltas"]],
            )
            engine.settlement_reports.append(report)
        return engine

    @staticmethod
    def _prop_dict(prop: Proposition) -> dict:
        def commitment_dict(c: VoteCommitment) -> dict:
            return {
                "actor": c.actor,
                "actor_kind": c.actor_kind.value,
                "stake": c.stake,
                "digest": c.digest.hex(),
                "revealed": c.revealed,
            }

        return {
            "id": prop.id,
            "content": prop.content,
            "bounty": prop.bounty,
            "submitter": prop.submitter,
            "created_at": prop.created_at,
            "certification_deadline": prop.certification_deadline,
            "reveal_deadline": prop.reveal_deadline,
            "phase": prop.phase.value,
            "selected_slots": list(prop.selected_slots),
            "slots_drawn": prop.slots_drawn,
            "voter_commitments": [commitment_dict(c) for c in prop.voter_commitments],
            "certifier_commitments": [
                commitment_dict(c) for c in prop.certifier_commitments
            ],
            "revealed": [
                {
                    "actor": v.actor,
                    "actor_kind": v.actor_kind.value,
                    "vote": v.vote,
                    "prediction": v.prediction,
                    "salt": v.salt.hex(),
                    "stake": v.stake,
                }
                for v in prop.revealed
            ],
            "outcome": prop.outcome.value if prop.outcome is not None else "PENDING",
        }

    @staticmethod
    def _prop_from_dict(raw: dict) -> Proposition:
        prop = Proposition(
            id=raw["id"],
            content=raw["content"],
            bounty=raw["bounty"],
            submitter=raw["submitter"],
            created_at=raw["created_at"],
            certification_deadline=raw["certification_deadline"],
            reveal_deadline=raw["reveal_deadline"],
            phase=Phase(raw["phase"]),
            selected_slots=list(raw["selected_slots"]),
            slots_drawn=raw["slots_drawn"],
        )
        for c in raw["voter_commitments"]:
            prop.voter_commitments.append(
                VoteCommitment(
                    c["actor"], ActorKind(c["actor_kind"]), c["stake"],
                    bytes.fromhex(c["digest"]), c["revealed"],
                )
            )
        for c in raw["certifier_commitments"]:
            prop.certifier_commitments.append(
                VoteCommitment(
                    c["actor"], ActorKind(c["actor_kind"]), c["stake"],
                    bytes.fromhex(c["digest"]), c["revealed"],
                )
            )
        for v in raw["revealed"]:
            prop.revealed.append(
                RevealedVote(
                    actor=v["actor"],
                    actor_kind=ActorKind(v["actor_kind"]),
                    vote=v["vote"],
                    prediction=v["prediction"],
                    salt=bytes.fromhex(v["salt"]),
                    stake=v["stake"],
                )
            )
        if raw["outcome"] != "PENDING":
            prop.outcome = Verdict(raw["outcome"])
        return prop

    # ---------------------------------------------------------------- helpers

    def _account(self, user: int) -> UserAccount:
        try:
            return self.users[user]
        except KeyError:
            raise WrongRole(f"unknown account {user}") from None

    def _proposition(self, proposition: int) -> Proposition:
        if proposition in self.available:
            return self.available[proposition]
        if proposition in self.closed:
            return self.closed[proposition]
        raise WrongPhase(f"unknown proposition {proposition}")
