"""Exception hierarchy shared by all modules."""


class ZetaSumsError(Exception):
    """Base class for every error raised by the package."""


class ConfigurationError(ZetaSumsError, ValueError):
    pass


class DomainError(ZetaSumsError, ValueError):
    """An argument lies outside the region where a quantity is defined."""


class OutOfRangeError(ZetaSumsError, ValueError):
    """A query exceeds the extent of a precomputed table."""


class CapacityError(ZetaSumsError, ValueError):
    pass


class ToleranceNotReachedError(ZetaSumsError, RuntimeError):
    pass


class PrecisionError(ZetaSumsError, ValueError):
    """Input carries too few digits for the requested computation."""


class CertificationError(ZetaSumsError, RuntimeError):
    pass
