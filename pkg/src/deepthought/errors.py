"""Exception types raised by the oracle engine, scoring, and harness."""


class OracleError(Exception):
    """Base class for all protocol-level failures."""


class ConfigInvalid(OracleError):
    """Parameter set or experiment configuration violates its constraints."""


class DomainError(OracleError):
    """Numeric argument outside the domain of a scoring/reward formula."""


class PredictionOutOfRange(DomainError):
    """Prediction value not in [0, 1]."""


class EmptyContent(OracleError):
    """Proposition submitted without statement text."""


class InsufficientBalance(OracleError):
    """Account balance cannot cover the requested stake or bounty."""


class WrongRole(OracleError):
    """Account role does not permit the attempted operation."""


class NoVotersRegistered(OracleError):
    """Voter selection requested while no voter accounts exist."""


class NotSelected(OracleError):
    """Voter holds no unconsumed slot on the proposition."""


class StakeOutOfRange(OracleError):
    """Stake outside the configured range for the actor kind."""


class VotingClosed(OracleError):
    """Voter commitments are no longer accepted on the proposition."""


class CertificationWindowClosed(OracleError):
    """Certifier commitments are no longer accepted on the proposition."""


class RevealWindowClosed(OracleError):
    """Reveal submitted after the reveal deadline."""


class WrongPhase(OracleError):
    """Operation not valid in the proposition's current phase."""


class NoCommitment(OracleError):
    """Actor has no unrevealed commitment on the proposition."""


class DigestMismatch(OracleError):
    """Revealed tuple does not reproduce any stored commitment digest."""


class VoterNotFound(OracleError):
    """Scoring requested for a voter with no revealed ballot."""


class InternalAccountingMismatch(OracleError):
    """Token conservation would be violated; settlement aborted."""


class MismatchDetected(OracleError):
    """Replay produced records different from the stored ones."""


class EmptyInput(OracleError):
    """Metrics requested over zero repetitions."""
