"""Exception hierarchy shared across the package."""


class ClickpassError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ClickpassError):
    """Input outside the valid domain (out-of-bounds click, bad sequence length)."""


class ConfigError(ClickpassError):
    """Invalid configuration value (tolerance, viewport side, portfolio)."""


class PolicyError(ClickpassError):
    """Request violates an account policy (e.g. fewer than the minimum clicks)."""


class ConflictError(ClickpassError):
    """Write conflicts with existing state (duplicate user, stale version)."""


class NotFoundError(ClickpassError):
    """Referenced entity does not exist."""


class StorageError(ClickpassError):
    """Underlying storage failed; distinct from NotFoundError by contract."""


class SessionExpiredError(ClickpassError):
    """Session TTL elapsed or session unknown."""


class NonceReplayError(ClickpassError):
    """A single-use nonce was presented twice."""
