"""Exception types raised across the package.

Everything derives from :class:`NetworkCodingError` so callers (and the CLI)
can catch domain failures with one clause.
"""


class NetworkCodingError(Exception):
    """Base class for domain errors."""


# -- field / matrix ---------------------------------------------------------

class NonPrimeCharacteristic(NetworkCodingError, ValueError):
    pass


class UnsupportedExtension(NetworkCodingError, ValueError):
    pass


class FieldTooLarge(NetworkCodingError, ValueError):
    pass


class ReducibleModulus(NetworkCodingError, ValueError):
    pass


class DivisionByZero(NetworkCodingError, ZeroDivisionError):
    pass


class FieldMismatch(NetworkCodingError, ValueError):
    pass


class DimensionMismatch(NetworkCodingError, ValueError):
    pass


class RankDeficient(NetworkCodingError):
    pass


class InconsistentSystem(NetworkCodingError):
    pass


# -- graphs -----------------------------------------------------------------

class SchemaError(NetworkCodingError, ValueError):
    """Malformed JSON input (missing/unknown keys, wrong types)."""


class InvalidNetwork(NetworkCodingError):
    def __init__(self, report):
        self.report = report
        super().__init__("; ".join(str(i) for i in report.issues) or "invalid network")


class CycleDetected(NetworkCodingError):
    pass


class Unreachable(NetworkCodingError):
    pass


class UnknownNode(NetworkCodingError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class UnknownDestination(NetworkCodingError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class NotVariant1(NetworkCodingError):
    pass


class NotLayered(NetworkCodingError):
    pass


class FieldTooSmall(NetworkCodingError):
    pass
