"""Exception hierarchy for qgeo."""


class QGeoError(ValueError):
    """Base class for all library errors."""


class DimensionMismatch(QGeoError):
    pass


class NotHermitianError(QGeoError):
    pass


class ChartDomainError(QGeoError):
    """Point lies on the antipodal manifold of the chart center."""


class CutLocusError(QGeoError):
    """Minimal geodesic to an antipodal point is not unique."""


class RegularityDomainError(QGeoError):
    """Ray lies in the projectivized kernel of an operator."""


class ZeroDispersionError(QGeoError):
    pass


class EmptySubmanifoldError(QGeoError):
    pass


class InvalidDensityError(QGeoError):
    pass
