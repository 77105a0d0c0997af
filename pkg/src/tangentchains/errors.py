"""Exception hierarchy shared by every module."""


class GeometryError(ValueError):
    """Base class for construction and verification failures."""


class DuplicatePoints(GeometryError):
    pass


class NotTangent(GeometryError):
    pass


class NoIntersection(GeometryError):
    pass


class AllParallel(GeometryError):
    pass


class PointNotOnCircle(GeometryError):
    pass


class CoincidentObjects(GeometryError):
    pass


class CenterIsSingular(GeometryError):
    pass


class NotNested(GeometryError):
    pass


class NotOrthogonal(GeometryError):
    pass


class NotClosable(GeometryError):
    pass


class DegenerateMember(GeometryError):
    pass


class BadCount(GeometryError):
    pass


class IndexOutOfRange(GeometryError, IndexError):
    pass


class WrongKind(GeometryError):
    pass


class RankDeficient(GeometryError):
    pass


class NotCentral(GeometryError):
    pass


class BadChord(GeometryError):
    pass


class PoleAtSample(GeometryError):
    pass


class UnknownFixture(KeyError):
    pass


class ConfigError(ValueError):
    """Scene configuration failed validation; ``field`` names the offending path."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message
