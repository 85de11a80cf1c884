"""Exception hierarchy for courtlift.

All library errors derive from :class:`CourtliftError`; geometric failures
additionally derive from :class:`GeometryError` so callers can catch the
whole family when reconstructing noisy predictions.
"""


class CourtliftError(Exception):
    """Base class for all courtlift errors."""


class GeometryError(CourtliftError):
    """Base class for camera/reconstruction geometry failures."""


class DepthNonPositive(GeometryError):
    """Point lies behind (or on) the camera plane."""


class NoConvergence(GeometryError):
    """Iterative undistortion did not reach the required residual."""


class RayParallelToPlane(GeometryError):
    """Ray direction has no component along the plane axis."""


class IntersectionBehindCamera(GeometryError):
    """Ray/plane intersection lies at negative ray parameter."""


class NonPositiveScale(GeometryError):
    """Calibration scale factor must be > 0."""


class DegenerateVertical(GeometryError):
    """World vertical projects to (nearly) a point at this pixel."""


class GroundIntersectionFailed(GeometryError):
    """Foot-pixel ray misses the ground plane in front of the camera."""


class BothPlanesDegenerate(GeometryError):
    """Neither vertical reprojection plane yields a usable intersection."""


class NonPositiveDiameter(GeometryError):
    """Image-space ball diameter must be > 0."""


class MissingGroundTruth(CourtliftError):
    """Sample lacks the ground-truth value a predictor needs."""


class LengthMismatch(CourtliftError):
    """Parallel input sequences differ in length."""


class EmptyInput(CourtliftError):
    """Operation requires at least one element."""


class BadBins(CourtliftError):
    """Histogram bin edges are empty or not strictly increasing."""


class SchemaVersionMismatch(CourtliftError):
    """Dataset file carries an unsupported schema version."""


class MalformedRecord(CourtliftError):
    """Dataset record failed to parse; carries the record index."""

    def __init__(self, index: int, message: str):
        super().__init__(f"record {index}: {message}")
        self.index = index


class FoldViolation(CourtliftError):
    """A sample's arena is missing from the folds or assigned twice."""


class UnknownFold(CourtliftError):
    """Requested fold name does not exist in the dataset."""


class OneSidedDataset(CourtliftError):
    """Rebalancing needs samples on both sides of the threshold."""


class FrameCoverageFailure(CourtliftError):
    """Could not place a ball inside the image after the retry budget."""
