"""Height-to-3D reconstruction, its forward oracle, and the diameter baseline.

Pipeline for one ball (all heavy lifting happens in undistorted image
space): undistort the raw ball pixel, walk the predicted pixel height
along the local image vertical to the foot pixel, drop the foot ray onto
the ground plane to get the ground projection, then intersect the ball
ray with the two vertical planes through that projection and average.

In an undistorted pinhole image every world-vertical line passes through
the vanishing point of the world Z axis, so the local vertical evaluated
at the pixel's own ground point is exact and the foot fixed point
converges immediately for exact inputs; the iteration only matters for
pathological predictions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import _kernels as _k
from ._accel import run_chunked
from .camera import (
    CameraCalibration,
    ImagePoint,
    WorldPoint,
    raise_for_status,
)
from .errors import NonPositiveDiameter

# A predicted pixel height is just a float (px along the image vertical);
# negative values are legal predictor outputs and propagate through.
HeightPrediction = float

BALL_DIAMETER_M = 0.24


@dataclass(frozen=True)
class Reconstruction:
    """Result of lifting one ball pixel to world coordinates.

    ``ground_projection`` always has z = 0 exactly. ``plane_gap`` is the
    distance between the two vertical-plane intersections before
    averaging (0 when only one plane was usable). ``foot_pixel`` is in
    undistorted image coordinates. For the diameter baseline the foot
    pixel and vertical angle are diagnostics and may be None when the
    local geometry does not define them.
    """

    ball_3d: WorldPoint
    ground_projection: WorldPoint
    foot_pixel: ImagePoint | None
    vertical_angle: float | None
    plane_gap: float

    def to_json_dict(self) -> dict:
        return {
            "ball_3d": [self.ball_3d.x, self.ball_3d.y, self.ball_3d.z],
            "ground_projection": [
                self.ground_projection.x,
                self.ground_projection.y,
                self.ground_projection.z,
            ],
            "foot_pixel": None
            if self.foot_pixel is None
            else [self.foot_pixel.x, self.foot_pixel.y],
            "vertical_angle": self.vertical_angle,
            "plane_gap": self.plane_gap,
        }


class VerticalDirection(NamedTuple):
    """Unit image direction of decreasing world Z, plus its angle to +y."""

    direction: np.ndarray
    angle: float


def vertical_direction(cal: CameraCalibration, ball_px: ImagePoint) -> VerticalDirection:
    """Local image-space vertical at an undistorted pixel.

    Angle 0 means the world vertical maps to the image +y direction (the
    rectified case); the sign follows atan2(v.x, v.y).
    """
    vx, vy, angle, status = _k.vertical_direction(cal.as_array(), ball_px.x, ball_px.y)
    raise_for_status(status, "vertical direction undefined at this pixel")
    return VerticalDirection(np.array([vx, vy], dtype=np.float64), float(angle))


def foot_pixel(
    cal: CameraCalibration, ball_px: ImagePoint, h: HeightPrediction
) -> ImagePoint:
    """Ground-projection pixel: ball pixel + h px along the local vertical.

    The vertical is refined at the ground point of the ray through each
    foot iterate (step tolerance 0.01 px, at most 5 iterations).
    """
    fu, fv, _, _, _, status = _k.foot_pixel(cal.as_array(), ball_px.x, ball_px.y, h)
    raise_for_status(status, "vertical direction failed during foot refinement")
    return ImagePoint(float(fu), float(fv))


def true_pixel_height(cal: CameraCalibration, ball_3d: WorldPoint) -> float:
    """Annotation-style pixel height of a 3D ball.

    Euclidean distance, in undistorted image space, between the ball and
    its vertical projection on the ground. This is the supervision target
    a height predictor learns and what the oracle predictor returns.
    """
    h, status = _k.true_pixel_height(cal.as_array(), ball_3d.x, ball_3d.y, ball_3d.z)
    raise_for_status(status, "ball or its ground projection is behind the camera")
    return float(h)


def reconstruct_from_height(
    cal: CameraCalibration, ball_px_raw: ImagePoint, h: HeightPrediction
) -> Reconstruction:
    """Reconstruct the 3D ball from a raw (distorted) pixel and a height."""
    bx, by, bz, gx, gy, fu, fv, angle, gap, status = _k.reconstruct_height(
        cal.as_array(), ball_px_raw.x, ball_px_raw.y, h
    )
    raise_for_status(status, "height reconstruction failed")
    return Reconstruction(
        ball_3d=WorldPoint(float(bx), float(by), float(bz)),
        ground_projection=WorldPoint(float(gx), float(gy), 0.0),
        foot_pixel=ImagePoint(float(fu), float(fv)),
        vertical_angle=float(angle),
        plane_gap=float(gap),
    )


def reconstruct_from_diameter(
    cal: CameraCalibration,
    ball_px_raw: ImagePoint,
    diameter_px: float,
    ball_diameter_m: float = BALL_DIAMETER_M,
) -> Reconstruction:
    """Diameter baseline: depth from apparent size, point on the pixel ray.

    Depth along the optical axis is mean(fx, fy) * ball_diameter_m /
    diameter_px by similar triangles; the ball is placed on the
    back-projected ray at that camera-frame depth.
    """
    if not (ball_diameter_m > 0.0):
        raise NonPositiveDiameter(f"ball diameter must be > 0 m, got {ball_diameter_m}")
    arr = cal.as_array()
    bx, by, bz, status = _k.reconstruct_diameter(
        arr, ball_px_raw.x, ball_px_raw.y, diameter_px, ball_diameter_m
    )
    raise_for_status(status, "diameter reconstruction failed")
    foot: ImagePoint | None = None
    angle: float | None = None
    fu, fv, st = _k.project_point_nodist(arr, bx, by, 0.0)
    if st == _k.STATUS_OK:
        foot = ImagePoint(float(fu), float(fv))
        vx, vy, ang, st = _k.vertical_direction(arr, float(fu), float(fv))
        if st == _k.STATUS_OK:
            angle = float(ang)
    return Reconstruction(
        ball_3d=WorldPoint(float(bx), float(by), float(bz)),
        ground_projection=WorldPoint(float(bx), float(by), 0.0),
        foot_pixel=foot,
        vertical_angle=angle,
        plane_gap=0.0,
    )


@dataclass(frozen=True, eq=False)
class AffineTransform:
    """2D affine map q -> matrix @ q + offset over image coordinates."""

    matrix: np.ndarray
    offset: np.ndarray

    def apply(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=np.float64)
        return pts @ self.matrix.T + self.offset


def crop_transform(
    cal: CameraCalibration,
    ball_px_raw: ImagePoint,
    crop_size: float,
    scale: float = 1.0,
) -> AffineTransform:
    """Affine map from (undistorted) image coordinates to crop coordinates.

    Composition of: translation bringing the ball to the crop center,
    rotation aligning the local world vertical with crop +y, and uniform
    scaling. The (undistorted) ball pixel maps exactly to
    (crop_size / 2, crop_size / 2). The raw pixel is undistorted
    internally; with zero distortion the two coincide.
    """
    if not (crop_size > 0.0):
        raise ValueError(f"crop_size must be > 0, got {crop_size}")
    if not (scale > 0.0):
        raise ValueError(f"scale must be > 0, got {scale}")
    uu, vv, status = _k.undistort_pixel(cal.as_array(), ball_px_raw.x, ball_px_raw.y)
    raise_for_status(status, "undistortion failed for crop anchor")
    vx, vy, _, status = _k.vertical_direction(cal.as_array(), float(uu), float(vv))
    raise_for_status(status, "vertical direction undefined at crop anchor")
    # Rotation sending the unit vertical (vx, vy) to (0, 1).
    rot = np.array([[vy, -vx], [vx, vy]], dtype=np.float64)
    matrix = scale * rot
    center = np.array([0.5 * crop_size, 0.5 * crop_size], dtype=np.float64)
    offset = center - matrix @ np.array([uu, vv], dtype=np.float64)
    return AffineTransform(matrix=matrix, offset=offset)


@dataclass(frozen=True, eq=False)
class HeightBatch:
    """Array-of-structs result of a batch height reconstruction.

    Rows with ``status != 0`` carry undefined geometry; ``status_name``
    maps codes to error names.
    """

    ball_3d: np.ndarray  # (n, 3)
    ground_projection: np.ndarray  # (n, 2), z is 0 by construction
    foot_px: np.ndarray  # (n, 2)
    vertical_angle: np.ndarray  # (n,)
    plane_gap: np.ndarray  # (n,)
    status: np.ndarray  # (n,) int64

    @property
    def ok(self) -> np.ndarray:
        return self.status == _k.STATUS_OK


@dataclass(frozen=True, eq=False)
class DiameterBatch:
    ball_3d: np.ndarray
    ground_projection: np.ndarray
    status: np.ndarray

    @property
    def ok(self) -> np.ndarray:
        return self.status == _k.STATUS_OK


def pack_calibrations(cals: Sequence[CameraCalibration]) -> np.ndarray:
    """Stack calibrations into the (m, 24) array the batch kernels expect."""
    out = np.empty((len(cals), _k.CAL_LEN), dtype=np.float64)
    for i, cal in enumerate(cals):
        out[i] = cal.as_array()
    return out


def _as_batch_inputs(px, values):
    px = np.ascontiguousarray(px, dtype=np.float64)
    if px.ndim != 2 or px.shape[1] != 2:
        raise ValueError("ball pixels must have shape (n, 2)")
    values = np.ascontiguousarray(values, dtype=np.float64).reshape(-1)
    if values.shape[0] != px.shape[0]:
        raise ValueError("pixel and value arrays must have equal length")
    return px, values


def reconstruct_from_height_batch(
    cals: Sequence[CameraCalibration] | np.ndarray,
    cal_index: np.ndarray,
    ball_px_raw: np.ndarray,
    heights: np.ndarray,
    threads: int = 1,
) -> HeightBatch:
    """Vectorized reconstruct_from_height over n samples.

    ``cals`` is a calibration sequence (or pre-packed (m, 24) array) and
    ``cal_index[i]`` selects the camera of sample i. Failures surface as
    nonzero statuses rather than exceptions. Results are identical for
    any thread count.
    """
    packed = cals if isinstance(cals, np.ndarray) else pack_calibrations(cals)
    px, h = _as_batch_inputs(ball_px_raw, heights)
    idx = np.ascontiguousarray(cal_index, dtype=np.int64).reshape(-1)
    if idx.shape[0] != px.shape[0]:
        raise ValueError("cal_index must match the number of samples")
    n = px.shape[0]
    out_ball = np.empty((n, 3), dtype=np.float64)
    out_ground = np.empty((n, 2), dtype=np.float64)
    out_foot = np.empty((n, 2), dtype=np.float64)
    out_angle = np.empty(n, dtype=np.float64)
    out_gap = np.empty(n, dtype=np.float64)
    out_status = np.empty(n, dtype=np.int64)
    run_chunked(
        _k.reconstruct_height_batch,
        n,
        threads,
        packed,
        idx,
        px,
        h,
        out_ball,
        out_ground,
        out_foot,
        out_angle,
        out_gap,
        out_status,
    )
    return HeightBatch(out_ball, out_ground, out_foot, out_angle, out_gap, out_status)


def reconstruct_from_diameter_batch(
    cals: Sequence[CameraCalibration] | np.ndarray,
    cal_index: np.ndarray,
    ball_px_raw: np.ndarray,
    diameters_px: np.ndarray,
    ball_diameter_m: float = BALL_DIAMETER_M,
    threads: int = 1,
) -> DiameterBatch:
    """Vectorized reconstruct_from_diameter over n samples."""
    packed = cals if isinstance(cals, np.ndarray) else pack_calibrations(cals)
    px, diam = _as_batch_inputs(ball_px_raw, diameters_px)
    idx = np.ascontiguousarray(cal_index, dtype=np.int64).reshape(-1)
    if idx.shape[0] != px.shape[0]:
        raise ValueError("cal_index must match the number of samples")
    n = px.shape[0]
    out_ball = np.empty((n, 3), dtype=np.float64)
    out_ground = np.empty((n, 2), dtype=np.float64)
    out_status = np.empty(n, dtype=np.int64)
    run_chunked(
        _k.reconstruct_diameter_batch,
        n,
        threads,
        packed,
        idx,
        px,
        diam,
        float(ball_diameter_m),
        out_ball,
        out_ground,
        out_status,
    )
    return DiameterBatch(out_ball, out_ground, out_status)


def diameter_px_of(cal: CameraCalibration, ball_3d: WorldPoint, ball_diameter_m: float = BALL_DIAMETER_M) -> float:
    """Exact image-space diameter of a ball at its camera-frame depth."""
    depth = float(_k.camera_depth(cal.as_array(), ball_3d.x, ball_3d.y, ball_3d.z))
    if depth <= _k.EPS_DEPTH:
        raise_for_status(_k.STATUS_DEPTH_NONPOSITIVE, "ball is behind the camera")
    return 0.5 * (cal.fx + cal.fy) * ball_diameter_m / depth


def status_counts(status: np.ndarray) -> dict[str, int]:
    """Histogram of batch status codes by error name (for diagnostics)."""
    from .camera import STATUS_NAMES

    out: dict[str, int] = {}
    for code in np.unique(status):
        out[STATUS_NAMES.get(int(code), str(int(code)))] = int((status == code).sum())
    return out


def euclid(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise Euclidean distance between equally shaped arrays."""
    return np.linalg.norm(np.asarray(a, float) - np.asarray(b, float), axis=-1)
