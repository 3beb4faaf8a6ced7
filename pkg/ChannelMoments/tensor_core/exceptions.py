class ChannelMomentsError(ValueError):
    """
    Base class for every error raised by the numerical apps.

    The command layer maps it to exit code 2 (usage or input error).
    """


class DimensionError(ChannelMomentsError):
    """A tensor power, factor count or matrix size exceeds what dense storage allows."""


class ShapeMismatchError(ChannelMomentsError):
    """Operands do not have compatible shapes."""


class NotIsometryError(ChannelMomentsError):
    """An operator expected to satisfy V*V = I does not."""


class NotPositiveError(ChannelMomentsError):
    """A matrix expected to be positive semidefinite has a negative eigenvalue beyond tolerance."""


class InvalidParameterError(ChannelMomentsError):
    """A scalar parameter (weight, rank, grid size, family name) is out of range."""


class UnsupportedNormError(ChannelMomentsError):
    """A p->p norm was requested for a p other than 1, 2 or infinity."""
