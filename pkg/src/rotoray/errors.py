"""Exception taxonomy shared across the library."""


class RotorayError(Exception):
    """Base class for all library errors."""


class NearCollinear(RotorayError):
    """Three defining points of a bisecting circle are collinear within
    tolerance; the carrier must be treated as a line."""


class DegenerateArc(RotorayError):
    """Arc parametrization requested on a degenerate bisector (point or
    unbounded half-line pair)."""


class DegenerateInput(RotorayError):
    """Input violates the general-position assumptions of a builder."""


class InvalidPolygon(RotorayError):
    """Vertex sequence is not a strictly convex ccw polygon."""


class ParallelEdges(RotorayError):
    """Polygon has an antiparallel edge pair where the requested pipeline
    assumes none."""


class SearchFailed(RotorayError):
    """An adversarial-instance parameter search exhausted its budget."""


class AxiomViolation(RotorayError):
    """A sub-diagram region disconnected during divide and conquer."""


class TraceStall(RotorayError):
    """Merge-curve tracing found no exit from the current faces."""


class OpenChain(RotorayError):
    """A merge curve did not terminate at its mandated endpoint."""


class ApexOnCurve(RotorayError):
    """A site apex lies on the 1-D domain; its split point is ill-defined."""


class RootConditioning(RotorayError):
    """Tangential circle/curve contact; envelope root multiplicity unclear."""


class DegenerateCandidate(RotorayError):
    """Brocard-point candidate construction hit tangent circles."""
