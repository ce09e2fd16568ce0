"""Exception hierarchy shared by all modules."""


class WilsonLabError(Exception):
    """Base class for errors raised by wilson_lab."""


class ConfigError(WilsonLabError, ValueError):
    """Invalid user-supplied parameter or configuration."""


class TailBoundError(WilsonLabError):
    """Fock-space truncation discards more kernel mass than allowed."""


class ConditioningError(WilsonLabError):
    """A linear solve is too ill-conditioned to trust in double precision."""


class BasisError(WilsonLabError):
    """A Lie-algebra basis or representation violates its invariants."""
