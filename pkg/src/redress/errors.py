"""Exception types raised across the redress package.

Every operation failure mode has a dedicated class so callers (and the HTTP
layer) can branch on type instead of parsing messages.
"""


class RedressError(Exception):
    """Base class for all redress errors."""


# evidence vault
class EmptyContent(RedressError):
    pass


class NotFound(RedressError):
    pass


class AlreadyErased(RedressError):
    pass


class UnreferencedAccess(RedressError):
    """Caller's report does not cite the requested snapshot."""


class Purged(RedressError):
    """Snapshot existed but its retention deadline has passed."""


# case engine
class NoEvidence(RedressError):
    pass


class UnknownSnapshot(RedressError):
    pass


class WrongState(RedressError):
    pass


class Forbidden(RedressError):
    pass


class AccountFrozen(RedressError):
    """Account is frozen until its penalty debt is repaid."""


# verifier crowd
class PoolTooSmall(RedressError):
    pass


class NotAssigned(RedressError):
    pass


class DuplicateBallot(RedressError):
    pass


class PastDeadline(RedressError):
    pass


class BelowQuorum(RedressError):
    pass


class NoBallots(RedressError):
    pass


# attestation
class UnsupportedValue(RedressError):
    """Document contains a value the canonical encoding refuses (floats, None, non-string keys)."""


class NotValidated(RedressError):
    pass


class MalformedDocument(RedressError):
    pass


# escrow ledger
class InsufficientFunds(RedressError):
    pass


class NoActiveHold(RedressError):
    pass


# guard
class RateLimited(RedressError):
    def __init__(self, message: str, retry_after: float):
        super().__init__(message)
        self.retry_after = retry_after


# analytics
class InvalidCounts(RedressError):
    pass


class DegenerateTable(RedressError):
    pass


class EmptyGroup(RedressError):
    pass


class TooFewGroups(RedressError):
    pass


class LengthMismatch(RedressError):
    pass


class InvalidArgs(RedressError):
    pass


# gateway / persistence
class SpecInvalid(RedressError):
    pass


class ConfigInvalid(RedressError):
    pass


class CorruptLog(RedressError):
    """Event log has a sequence gap or a chain-hash mismatch."""


class StoreCorrupt(RedressError):
    pass
