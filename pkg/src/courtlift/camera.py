"""Calibrated camera model: projection, distortion, rays, plane intersection.

Coordinate conventions
----------------------
World frame (right-handed): X/Y span the court, Z points up, the court
floor is the plane Z = 0, units are meters.

Camera frame (standard computer vision): x right, y down, z forward along
the optical axis. Extrinsics are stored as (R, t) with
``x_cam = R @ X_world + t``, so the camera center is ``-R.T @ t``.

Image frame: origin at the top-left, x right, y down, units are pixels,
pixel centers at integer coordinates.

Distortion follows the Brown-Conrady model (radial k1, k2, k3 and
tangential p1, p2) applied to normalized camera coordinates; all
coefficients default to zero. Undistortion inverts the model by fixed-point
iteration (max 50 iterations, failure above 1e-8 in normalized units).
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels as _k
from .errors import (
    BothPlanesDegenerate,
    DegenerateVertical,
    DepthNonPositive,
    GroundIntersectionFailed,
    IntersectionBehindCamera,
    NoConvergence,
    NonPositiveDiameter,
    NonPositiveScale,
    RayParallelToPlane,
)

_STATUS_EXCEPTIONS = {
    _k.STATUS_DEPTH_NONPOSITIVE: DepthNonPositive,
    _k.STATUS_NO_CONVERGENCE: NoConvergence,
    _k.STATUS_RAY_PARALLEL: RayParallelToPlane,
    _k.STATUS_BEHIND_CAMERA: IntersectionBehindCamera,
    _k.STATUS_DEGENERATE_VERTICAL: DegenerateVertical,
    _k.STATUS_GROUND_FAILED: GroundIntersectionFailed,
    _k.STATUS_BOTH_PLANES_DEGENERATE: BothPlanesDegenerate,
    _k.STATUS_NONPOSITIVE_DIAMETER: NonPositiveDiameter,
}

STATUS_NAMES = {
    _k.STATUS_OK: "OK",
    _k.STATUS_DEPTH_NONPOSITIVE: "DepthNonPositive",
    _k.STATUS_NO_CONVERGENCE: "NoConvergence",
    _k.STATUS_RAY_PARALLEL: "RayParallelToPlane",
    _k.STATUS_BEHIND_CAMERA: "IntersectionBehindCamera",
    _k.STATUS_DEGENERATE_VERTICAL: "DegenerateVertical",
    _k.STATUS_GROUND_FAILED: "GroundIntersectionFailed",
    _k.STATUS_BOTH_PLANES_DEGENERATE: "BothPlanesDegenerate",
    _k.STATUS_NONPOSITIVE_DIAMETER: "NonPositiveDiameter",
}


def raise_for_status(status: int, context: str = "") -> None:
    """Translate a kernel status code into the matching typed exception."""
    if status == _k.STATUS_OK:
        return
    exc = _STATUS_EXCEPTIONS.get(int(status))
    if exc is None:  # pragma: no cover - codes are exhaustive
        raise RuntimeError(f"unknown kernel status {status}")
    raise exc(context or STATUS_NAMES[int(status)])


class Axis(enum.IntEnum):
    X = 0
    Y = 1
    Z = 2


@dataclass(frozen=True)
class ImagePoint:
    """Pixel position, origin top-left, y down. May lie outside the frame."""

    x: float
    y: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=np.float64)


@dataclass(frozen=True)
class WorldPoint:
    """Point in the court frame, meters; the ground plane is z = 0."""

    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=np.float64)


@dataclass(frozen=True, eq=False)
class Ray:
    """World-space ray; the stored direction is normalized to unit length."""

    origin: WorldPoint
    direction: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=np.float64).reshape(3).copy()
        norm = float(np.linalg.norm(d))
        if norm == 0.0 or not math.isfinite(norm):
            raise ValueError("ray direction must be a finite nonzero vector")
        d /= norm
        d.flags.writeable = False
        object.__setattr__(self, "direction", d)

    def point_at(self, s: float) -> WorldPoint:
        o = self.origin
        return WorldPoint(
            o.x + s * self.direction[0],
            o.y + s * self.direction[1],
            o.z + s * self.direction[2],
        )


@dataclass(frozen=True)
class AxisPlane:
    """Axis-aligned plane {axis coordinate == value}."""

    axis: Axis
    value: float

    def __post_init__(self):
        object.__setattr__(self, "axis", Axis(self.axis))


@dataclass(frozen=True, eq=False)
class CameraCalibration:
    """Pinhole intrinsics + extrinsics + Brown-Conrady distortion.

    ``rotation`` maps world to camera coordinates; ``translation`` is in
    meters so camera coords = rotation @ X_world + translation.
    Compared by identity (array fields make value equality ambiguous).
    """

    fx: float
    fy: float
    cx: float
    cy: float
    rotation: np.ndarray
    translation: np.ndarray
    image_width: float
    image_height: float
    skew: float = 0.0
    k1: float = 0.0
    k2: float = 0.0
    k3: float = 0.0
    p1: float = 0.0
    p2: float = 0.0
    _packed: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        rot = np.asarray(self.rotation, dtype=np.float64).reshape(3, 3).copy()
        trans = np.asarray(self.translation, dtype=np.float64).reshape(3).copy()
        rot.flags.writeable = False
        trans.flags.writeable = False
        object.__setattr__(self, "rotation", rot)
        object.__setattr__(self, "translation", trans)
        packed = np.empty(_k.CAL_LEN, dtype=np.float64)
        packed[_k.CAL_FX] = self.fx
        packed[_k.CAL_FY] = self.fy
        packed[_k.CAL_CX] = self.cx
        packed[_k.CAL_CY] = self.cy
        packed[_k.CAL_SKEW] = self.skew
        packed[_k.CAL_R : _k.CAL_R + 9] = rot.ravel()
        packed[_k.CAL_T : _k.CAL_T + 3] = trans
        packed[_k.CAL_K1] = self.k1
        packed[_k.CAL_K2] = self.k2
        packed[_k.CAL_K3] = self.k3
        packed[_k.CAL_P1] = self.p1
        packed[_k.CAL_P2] = self.p2
        packed[_k.CAL_W] = self.image_width
        packed[_k.CAL_H] = self.image_height
        packed.flags.writeable = False
        object.__setattr__(self, "_packed", packed)

    def as_array(self) -> np.ndarray:
        """Packed float64 vector consumed by the numeric kernels."""
        return self._packed

    @property
    def has_distortion(self) -> bool:
        return any(c != 0.0 for c in (self.k1, self.k2, self.k3, self.p1, self.p2))

    def without_distortion(self) -> "CameraCalibration":
        return replace(self, k1=0.0, k2=0.0, k3=0.0, p1=0.0, p2=0.0)


def project(cal: CameraCalibration, p: WorldPoint) -> ImagePoint:
    """Project a world point in front of the camera to (distorted) pixels.

    Raises DepthNonPositive when the camera-frame depth is <= 1e-9 m.
    """
    u, v, status = _k.project_point(cal.as_array(), p.x, p.y, p.z)
    raise_for_status(status, "point is behind or on the camera plane")
    return ImagePoint(float(u), float(v))


def distort(cal: CameraCalibration, n) -> np.ndarray:
    """Apply the distortion model to normalized camera coordinates."""
    n = np.asarray(n, dtype=np.float64).reshape(2)
    xd, yd = _k.distort_norm(cal.as_array(), float(n[0]), float(n[1]))
    return np.array([xd, yd], dtype=np.float64)


def undistort_point(cal: CameraCalibration, p: ImagePoint) -> ImagePoint:
    """Map a distorted pixel to the undistorted pixel under the same K.

    Raises NoConvergence when the fixed point leaves a residual above
    1e-8 in normalized coordinates (extreme distortion).
    """
    u, v, status = _k.undistort_pixel(cal.as_array(), p.x, p.y)
    raise_for_status(status, "undistortion residual above 1e-8")
    return ImagePoint(float(u), float(v))


def back_project(cal: CameraCalibration, p: ImagePoint) -> Ray:
    """Ray of world points imaging to an UNDISTORTED pixel.

    The caller applies undistort_point first when the pixel comes from a
    distorted image.
    """
    arr = cal.as_array()
    ox, oy, oz = _k.camera_center(arr)
    dx, dy, dz = _k.ray_direction(arr, p.x, p.y)
    return Ray(WorldPoint(float(ox), float(oy), float(oz)), np.array([dx, dy, dz]))


def camera_center(cal: CameraCalibration) -> WorldPoint:
    """Camera optical center in world coordinates, -R^T t."""
    ox, oy, oz = _k.camera_center(cal.as_array())
    return WorldPoint(float(ox), float(oy), float(oz))


def intersect_ray_plane(ray: Ray, plane: AxisPlane) -> WorldPoint:
    """Intersect a ray with an axis-aligned plane.

    Raises RayParallelToPlane when the direction component along the plane
    axis is below 1e-9, IntersectionBehindCamera when the hit lies at a
    negative ray parameter. The result carries exactly plane.value on the
    plane axis.
    """
    o = ray.origin
    d = ray.direction
    px, py, pz, status = _k.intersect_axis_plane(
        o.x, o.y, o.z, d[0], d[1], d[2], int(plane.axis), plane.value
    )
    raise_for_status(status, f"plane {plane.axis.name}={plane.value}")
    return WorldPoint(float(px), float(py), float(pz))


def scale_calibration(cal: CameraCalibration, s: float) -> CameraCalibration:
    """Rescale the image grid by s (the shrunk-image calibration).

    fx, fy, cx, cy, skew and the image size scale by s; pose and
    distortion are untouched, so project(scale(cal, s), p) == s * project(cal, p).
    """
    if not (s > 0.0):
        raise NonPositiveScale(f"scale must be > 0, got {s}")
    return replace(
        cal,
        fx=cal.fx * s,
        fy=cal.fy * s,
        cx=cal.cx * s,
        cy=cal.cy * s,
        skew=cal.skew * s,
        image_width=cal.image_width * s,
        image_height=cal.image_height * s,
    )


def validate(cal: CameraCalibration) -> list[str]:
    """Check calibration invariants; returns the names of violated ones.

    An empty list means the calibration is valid. A camera center at or
    below the ground plane is physically suspect for arena cameras and
    emits a warning but is not reported as a violation.
    """
    violations: list[str] = []
    intrinsics = [cal.fx, cal.fy, cal.cx, cal.cy, cal.skew]
    dist = [cal.k1, cal.k2, cal.k3, cal.p1, cal.p2]
    if not all(
        math.isfinite(x) for x in intrinsics + dist + [cal.image_width, cal.image_height]
    ) or not (np.isfinite(cal.rotation).all() and np.isfinite(cal.translation).all()):
        violations.append("NonFinite")
        return violations
    if cal.fx <= 0.0 or cal.fy <= 0.0:
        violations.append("FocalNonPositive")
    if cal.image_width <= 0.0 or cal.image_height <= 0.0:
        violations.append("ImageSizeNonPositive")
    rtr = cal.rotation.T @ cal.rotation
    if np.abs(rtr - np.eye(3)).max() >= 1e-9:
        violations.append("RotationNotOrthonormal")
    elif abs(float(np.linalg.det(cal.rotation)) - 1.0) >= 1e-9:
        violations.append("RotationNotProper")
    if not violations:
        center = camera_center(cal)
        if center.z <= 0.0:
            warnings.warn(
                f"camera center z = {center.z:.3f} m is not above the ground plane",
                stacklevel=2,
            )
    return violations


def calibration_to_json_dict(cal: CameraCalibration) -> dict:
    """Calibration as the JSON object used by dataset files."""
    return {
        "fx": cal.fx,
        "fy": cal.fy,
        "cx": cal.cx,
        "cy": cal.cy,
        "skew": cal.skew,
        "R": [float(x) for x in cal.rotation.ravel()],
        "t": [float(x) for x in cal.translation],
        "dist": {"k1": cal.k1, "k2": cal.k2, "k3": cal.k3, "p1": cal.p1, "p2": cal.p2},
        "width": cal.image_width,
        "height": cal.image_height,
    }


def calibration_from_json_dict(obj: dict) -> CameraCalibration:
    dist = obj["dist"]
    return CameraCalibration(
        fx=float(obj["fx"]),
        fy=float(obj["fy"]),
        cx=float(obj["cx"]),
        cy=float(obj["cy"]),
        skew=float(obj["skew"]),
        rotation=np.array(obj["R"], dtype=np.float64).reshape(3, 3),
        translation=np.array(obj["t"], dtype=np.float64),
        k1=float(dist["k1"]),
        k2=float(dist["k2"]),
        k3=float(dist["k3"]),
        p1=float(dist["p1"]),
        p2=float(dist["p2"]),
        image_width=float(obj["width"]),
        image_height=float(obj["height"]),
    )
