"""Exception types shared across the package.

Argument errors that Python already names well (bad indices, division by
zero) use the builtin exceptions; everything domain-specific lives here.
"""


class NonInvertibleDenominatorError(ValueError):
    """A fractional power eps^(p/q) was requested with gcd(q, l) != 1."""


class KindMismatchError(ValueError):
    """A descent-sequence form was evaluated on a sequence of the wrong type."""


class NotInvariantError(ValueError):
    """An operator mapped a restricted subspace outside itself."""


class RankTooSmallError(ValueError):
    """An affine construction was requested for n < 2."""


class NotHighestWeightError(ValueError):
    """A computation assumed v(0) is highest weight, but the module disagreed."""


class ConfigError(ValueError):
    """A run configuration violated a documented invariant."""
