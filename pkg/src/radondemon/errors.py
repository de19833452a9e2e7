"""Exception types raised across the package."""


class DegenerateInputError(ValueError):
    """Points are not in general position (or a kernel coordinate vanished)."""


class RankAmbiguityError(DegenerateInputError):
    """A singular value sits too close to the rank threshold to call the rank."""


class InvalidDistributionError(ValueError):
    pass


class UnknownIdentifierError(KeyError):
    pass


class DimensionMismatchError(ValueError):
    pass
