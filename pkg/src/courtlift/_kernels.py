"""Numeric kernels behind the camera and reconstruction modules.

Calibration travels through these functions as a packed float64 vector
(offsets below) so the same code runs as plain Python or under numba.
Kernels report failures through integer status codes instead of raising;
the public wrappers translate codes into typed exceptions.

World frame: right-handed, Z up, ground plane Z = 0.
Image frame: origin top-left, x right, y down, pixel centers at integers.
Extrinsics: x_cam = R @ X_world + t.
"""

from __future__ import annotations

import math

from ._accel import njit

# Packed calibration layout.
CAL_FX = 0
CAL_FY = 1
CAL_CX = 2
CAL_CY = 3
CAL_SKEW = 4
CAL_R = 5  # 9 entries, row-major
CAL_T = 14  # 3 entries
CAL_K1 = 17
CAL_K2 = 18
CAL_K3 = 19
CAL_P1 = 20
CAL_P2 = 21
CAL_W = 22
CAL_H = 23
CAL_LEN = 24

# Status codes.
STATUS_OK = 0
STATUS_DEPTH_NONPOSITIVE = 1
STATUS_NO_CONVERGENCE = 2
STATUS_RAY_PARALLEL = 3
STATUS_BEHIND_CAMERA = 4
STATUS_DEGENERATE_VERTICAL = 5
STATUS_GROUND_FAILED = 6
STATUS_BOTH_PLANES_DEGENERATE = 7
STATUS_NONPOSITIVE_DIAMETER = 8

# Numeric guards; far below physical scales, above double-precision noise.
EPS_DEPTH = 1e-9
EPS_AXIS = 1e-9

# Undistortion fixed point: stop early once the residual is at float noise,
# declare failure above 1e-8 normalized units.
UNDISTORT_MAX_ITER = 50
UNDISTORT_STOP_TOL = 1e-13
UNDISTORT_FAIL_TOL = 1e-8

# Local vertical probe height (m) and degeneracy threshold (px).
VERTICAL_PROBE_M = 0.1
VERTICAL_MIN_PX = 1e-6

# Foot-pixel fixed point; exact pinhole verticals converge on the first
# refinement, so these bounds only matter for pathological inputs.
FOOT_STEP_TOL_PX = 0.01
FOOT_MAX_ITERS = 5


@njit(cache=True, nogil=True)
def distort_norm(cal, x, y):
    """Brown-Conrady distortion of normalized camera coordinates."""
    k1 = cal[CAL_K1]
    k2 = cal[CAL_K2]
    k3 = cal[CAL_K3]
    p1 = cal[CAL_P1]
    p2 = cal[CAL_P2]
    r2 = x * x + y * y
    radial = 1.0 + r2 * (k1 + r2 * (k2 + r2 * k3))
    xd = x * radial + 2.0 * p1 * x * y + p2 * (r2 + 2.0 * x * x)
    yd = y * radial + p1 * (r2 + 2.0 * y * y) + 2.0 * p2 * x * y
    return xd, yd


@njit(cache=True, nogil=True)
def undistort_norm(cal, xd, yd):
    """Invert distort_norm by fixed-point iteration on normalized coords."""
    k1 = cal[CAL_K1]
    k2 = cal[CAL_K2]
    k3 = cal[CAL_K3]
    p1 = cal[CAL_P1]
    p2 = cal[CAL_P2]
    x = xd
    y = yd
    ex = 0.0
    ey = 0.0
    for it in range(UNDISTORT_MAX_ITER + 1):
        r2 = x * x + y * y
        radial = 1.0 + r2 * (k1 + r2 * (k2 + r2 * k3))
        tx = 2.0 * p1 * x * y + p2 * (r2 + 2.0 * x * x)
        ty = p1 * (r2 + 2.0 * y * y) + 2.0 * p2 * x * y
        ex = x * radial + tx - xd
        ey = y * radial + ty - yd
        if abs(ex) <= UNDISTORT_STOP_TOL and abs(ey) <= UNDISTORT_STOP_TOL:
            return x, y, STATUS_OK
        if it == UNDISTORT_MAX_ITER or radial <= 1e-9:
            break
        x = (xd - tx) / radial
        y = (yd - ty) / radial
    if abs(ex) <= UNDISTORT_FAIL_TOL and abs(ey) <= UNDISTORT_FAIL_TOL:
        return x, y, STATUS_OK
    return x, y, STATUS_NO_CONVERGENCE


@njit(cache=True, nogil=True)
def project_point(cal, wx, wy, wz):
    """World point -> distorted pixel. Returns (u, v, status)."""
    xc = cal[CAL_R + 0] * wx + cal[CAL_R + 1] * wy + cal[CAL_R + 2] * wz + cal[CAL_T + 0]
    yc = cal[CAL_R + 3] * wx + cal[CAL_R + 4] * wy + cal[CAL_R + 5] * wz + cal[CAL_T + 1]
    zc = cal[CAL_R + 6] * wx + cal[CAL_R + 7] * wy + cal[CAL_R + 8] * wz + cal[CAL_T + 2]
    if zc <= EPS_DEPTH:
        return 0.0, 0.0, STATUS_DEPTH_NONPOSITIVE
    xn = xc / zc
    yn = yc / zc
    xd, yd = distort_norm(cal, xn, yn)
    u = cal[CAL_FX] * xd + cal[CAL_SKEW] * yd + cal[CAL_CX]
    v = cal[CAL_FY] * yd + cal[CAL_CY]
    return u, v, STATUS_OK


@njit(cache=True, nogil=True)
def project_point_nodist(cal, wx, wy, wz):
    """World point -> undistorted pixel (distortion ignored)."""
    xc = cal[CAL_R + 0] * wx + cal[CAL_R + 1] * wy + cal[CAL_R + 2] * wz + cal[CAL_T + 0]
    yc = cal[CAL_R + 3] * wx + cal[CAL_R + 4] * wy + cal[CAL_R + 5] * wz + cal[CAL_T + 1]
    zc = cal[CAL_R + 6] * wx + cal[CAL_R + 7] * wy + cal[CAL_R + 8] * wz + cal[CAL_T + 2]
    if zc <= EPS_DEPTH:
        return 0.0, 0.0, STATUS_DEPTH_NONPOSITIVE
    xn = xc / zc
    yn = yc / zc
    u = cal[CAL_FX] * xn + cal[CAL_SKEW] * yn + cal[CAL_CX]
    v = cal[CAL_FY] * yn + cal[CAL_CY]
    return u, v, STATUS_OK


@njit(cache=True, nogil=True)
def camera_depth(cal, wx, wy, wz):
    """Camera-frame depth (z) of a world point."""
    return cal[CAL_R + 6] * wx + cal[CAL_R + 7] * wy + cal[CAL_R + 8] * wz + cal[CAL_T + 2]


@njit(cache=True, nogil=True)
def undistort_pixel(cal, u, v):
    """Distorted pixel -> undistorted pixel under the same intrinsics."""
    if (
        cal[CAL_K1] == 0.0
        and cal[CAL_K2] == 0.0
        and cal[CAL_K3] == 0.0
        and cal[CAL_P1] == 0.0
        and cal[CAL_P2] == 0.0
    ):
        return u, v, STATUS_OK
    yn = (v - cal[CAL_CY]) / cal[CAL_FY]
    xn = (u - cal[CAL_CX] - cal[CAL_SKEW] * yn) / cal[CAL_FX]
    xu, yu, status = undistort_norm(cal, xn, yn)
    uu = cal[CAL_FX] * xu + cal[CAL_SKEW] * yu + cal[CAL_CX]
    vv = cal[CAL_FY] * yu + cal[CAL_CY]
    return uu, vv, status


@njit(cache=True, nogil=True)
def camera_center(cal):
    """Camera optical center in world coordinates: -R^T t."""
    t0 = cal[CAL_T + 0]
    t1 = cal[CAL_T + 1]
    t2 = cal[CAL_T + 2]
    cx = -(cal[CAL_R + 0] * t0 + cal[CAL_R + 3] * t1 + cal[CAL_R + 6] * t2)
    cy = -(cal[CAL_R + 1] * t0 + cal[CAL_R + 4] * t1 + cal[CAL_R + 7] * t2)
    cz = -(cal[CAL_R + 2] * t0 + cal[CAL_R + 5] * t1 + cal[CAL_R + 8] * t2)
    return cx, cy, cz


@njit(cache=True, nogil=True)
def ray_direction(cal, u, v):
    """Unit world direction of the ray through an UNDISTORTED pixel."""
    yn = (v - cal[CAL_CY]) / cal[CAL_FY]
    xn = (u - cal[CAL_CX] - cal[CAL_SKEW] * yn) / cal[CAL_FX]
    dx = cal[CAL_R + 0] * xn + cal[CAL_R + 3] * yn + cal[CAL_R + 6]
    dy = cal[CAL_R + 1] * xn + cal[CAL_R + 4] * yn + cal[CAL_R + 7]
    dz = cal[CAL_R + 2] * xn + cal[CAL_R + 5] * yn + cal[CAL_R + 8]
    norm = math.sqrt(dx * dx + dy * dy + dz * dz)
    return dx / norm, dy / norm, dz / norm


@njit(cache=True, nogil=True)
def intersect_axis_plane(ox, oy, oz, dx, dy, dz, axis, value):
    """Intersect a ray with the plane {axis coordinate == value}.

    The returned point carries exactly `value` along the plane axis.
    """
    if axis == 0:
        comp = dx
        oc = ox
    elif axis == 1:
        comp = dy
        oc = oy
    else:
        comp = dz
        oc = oz
    if abs(comp) < EPS_AXIS:
        return 0.0, 0.0, 0.0, STATUS_RAY_PARALLEL
    s = (value - oc) / comp
    if s < 0.0:
        return 0.0, 0.0, 0.0, STATUS_BEHIND_CAMERA
    px = ox + s * dx
    py = oy + s * dy
    pz = oz + s * dz
    if axis == 0:
        px = value
    elif axis == 1:
        py = value
    else:
        pz = value
    return px, py, pz, STATUS_OK


@njit(cache=True, nogil=True)
def vertical_direction(cal, u, v):
    """Unit image direction of decreasing world Z at an undistorted pixel.

    Evaluated at the ground point hit by the pixel's ray, by projecting a
    0.1 m vertical probe; both probe images lie on the image of that world
    vertical, so the direction is exact for a pinhole camera.
    Returns (vx, vy, angle, status) with angle = atan2(vx, vy).
    """
    ox, oy, oz = camera_center(cal)
    dx, dy, dz = ray_direction(cal, u, v)
    gx, gy, gz, status = intersect_axis_plane(ox, oy, oz, dx, dy, dz, 2, 0.0)
    if status != STATUS_OK:
        return 0.0, 0.0, 0.0, status
    u0, v0, st0 = project_point_nodist(cal, gx, gy, 0.0)
    u1, v1, st1 = project_point_nodist(cal, gx, gy, VERTICAL_PROBE_M)
    if st0 != STATUS_OK or st1 != STATUS_OK:
        return 0.0, 0.0, 0.0, STATUS_DEPTH_NONPOSITIVE
    ex = u0 - u1
    ey = v0 - v1
    norm = math.sqrt(ex * ex + ey * ey)
    if norm < VERTICAL_MIN_PX:
        return 0.0, 0.0, 0.0, STATUS_DEGENERATE_VERTICAL
    vx = ex / norm
    vy = ey / norm
    return vx, vy, math.atan2(vx, vy), STATUS_OK


@njit(cache=True, nogil=True)
def foot_pixel(cal, u, v, h):
    """Foot pixel = ball pixel displaced h px along the local vertical.

    Fixed-point refinement: the vertical is re-evaluated at the ground
    point of the ray through the current foot iterate.
    Returns (fu, fv, vx, vy, angle, status).
    """
    vx, vy, angle, status = vertical_direction(cal, u, v)
    if status != STATUS_OK:
        return 0.0, 0.0, 0.0, 0.0, 0.0, status
    fu = u + h * vx
    fv = v + h * vy
    for _ in range(FOOT_MAX_ITERS):
        vx2, vy2, angle2, status = vertical_direction(cal, fu, fv)
        if status != STATUS_OK:
            return 0.0, 0.0, 0.0, 0.0, 0.0, status
        nu = u + h * vx2
        nv = v + h * vy2
        step = math.hypot(nu - fu, nv - fv)
        fu = nu
        fv = nv
        vx = vx2
        vy = vy2
        angle = angle2
        if step < FOOT_STEP_TOL_PX:
            break
    return fu, fv, vx, vy, angle, STATUS_OK


@njit(cache=True, nogil=True)
def reconstruct_height(cal, u_raw, v_raw, h):
    """Full height-based reconstruction from a raw (distorted) ball pixel.

    Returns (bx, by, bz, gx, gy, fu, fv, angle, plane_gap, status).
    """
    u, v, status = undistort_pixel(cal, u_raw, v_raw)
    if status != STATUS_OK:
        return 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, status
    fu, fv, vx, vy, angle, status = foot_pixel(cal, u, v, h)
    if status != STATUS_OK:
        return 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, status

    ox, oy, oz = camera_center(cal)
    fdx, fdy, fdz = ray_direction(cal, fu, fv)
    gx, gy, gz, gstatus = intersect_axis_plane(ox, oy, oz, fdx, fdy, fdz, 2, 0.0)
    if gstatus != STATUS_OK:
        return 0.0, 0.0, 0.0, 0.0, 0.0, fu, fv, angle, 0.0, STATUS_GROUND_FAILED

    bdx, bdy, bdz = ray_direction(cal, u, v)
    # Vertical-plane intersections; a plane is skipped when the ray is
    # (near-)parallel to it or meets it behind the camera.
    x_ok = False
    y_ok = False
    x_px = 0.0
    x_py = 0.0
    x_pz = 0.0
    y_px = 0.0
    y_py = 0.0
    y_pz = 0.0
    if abs(bdx) >= EPS_AXIS:
        x_px, x_py, x_pz, st = intersect_axis_plane(ox, oy, oz, bdx, bdy, bdz, 0, gx)
        x_ok = st == STATUS_OK
    if abs(bdy) >= EPS_AXIS:
        y_px, y_py, y_pz, st = intersect_axis_plane(ox, oy, oz, bdx, bdy, bdz, 1, gy)
        y_ok = st == STATUS_OK
    if x_ok and y_ok:
        bx = 0.5 * (x_px + y_px)
        by = 0.5 * (x_py + y_py)
        bz = 0.5 * (x_pz + y_pz)
        gap = math.sqrt(
            (x_px - y_px) ** 2 + (x_py - y_py) ** 2 + (x_pz - y_pz) ** 2
        )
    elif x_ok:
        bx = x_px
        by = x_py
        bz = x_pz
        gap = 0.0
    elif y_ok:
        bx = y_px
        by = y_py
        bz = y_pz
        gap = 0.0
    else:
        return 0.0, 0.0, 0.0, gx, gy, fu, fv, angle, 0.0, STATUS_BOTH_PLANES_DEGENERATE
    return bx, by, bz, gx, gy, fu, fv, angle, gap, STATUS_OK


@njit(cache=True, nogil=True)
def reconstruct_diameter(cal, u_raw, v_raw, diameter_px, ball_diameter_m):
    """Diameter-baseline reconstruction. Returns (bx, by, bz, status)."""
    if diameter_px <= 0.0:
        return 0.0, 0.0, 0.0, STATUS_NONPOSITIVE_DIAMETER
    u, v, status = undistort_pixel(cal, u_raw, v_raw)
    if status != STATUS_OK:
        return 0.0, 0.0, 0.0, status
    depth = 0.5 * (cal[CAL_FX] + cal[CAL_FY]) * ball_diameter_m / diameter_px
    ox, oy, oz = camera_center(cal)
    dx, dy, dz = ray_direction(cal, u, v)
    # Camera-frame depth grows at rate (R d)_z per unit ray parameter.
    rz = cal[CAL_R + 6] * dx + cal[CAL_R + 7] * dy + cal[CAL_R + 8] * dz
    if rz <= 1e-12:
        return 0.0, 0.0, 0.0, STATUS_DEPTH_NONPOSITIVE
    s = depth / rz
    return ox + s * dx, oy + s * dy, oz + s * dz, STATUS_OK


@njit(cache=True, nogil=True)
def true_pixel_height(cal, wx, wy, wz):
    """Undistorted-image Euclidean distance ball -> ground projection."""
    u0, v0, st0 = project_point_nodist(cal, wx, wy, wz)
    if st0 != STATUS_OK:
        return 0.0, st0
    u1, v1, st1 = project_point_nodist(cal, wx, wy, 0.0)
    if st1 != STATUS_OK:
        return 0.0, st1
    return math.hypot(u0 - u1, v0 - v1), STATUS_OK


@njit(cache=True, nogil=True)
def forward_sample(cal, wx, wy, wz):
    """Forward oracle for one ball: all image-space annotations at once.

    Returns (u, v, foot_u, foot_v, h_true, depth, status) where (u, v) and
    (foot_u, foot_v) are distorted pixels of the ball and its ground
    projection, h_true the undistorted pixel height, depth the camera-frame
    depth of the ball.
    """
    u, v, st = project_point(cal, wx, wy, wz)
    if st != STATUS_OK:
        return 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, st
    fu, fv, st = project_point(cal, wx, wy, 0.0)
    if st != STATUS_OK:
        return 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, st
    h, st = true_pixel_height(cal, wx, wy, wz)
    if st != STATUS_OK:
        return 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, st
    depth = camera_depth(cal, wx, wy, wz)
    return u, v, fu, fv, h, depth, STATUS_OK


@njit(cache=True, nogil=True)
def reconstruct_height_batch(
    cals,
    cal_idx,
    px,
    heights,
    out_ball,
    out_ground,
    out_foot,
    out_angle,
    out_gap,
    out_status,
    start,
    stop,
):
    for i in range(start, stop):
        c = cals[cal_idx[i]]
        bx, by, bz, gx, gy, fu, fv, angle, gap, st = reconstruct_height(
            c, px[i, 0], px[i, 1], heights[i]
        )
        out_ball[i, 0] = bx
        out_ball[i, 1] = by
        out_ball[i, 2] = bz
        out_ground[i, 0] = gx
        out_ground[i, 1] = gy
        out_foot[i, 0] = fu
        out_foot[i, 1] = fv
        out_angle[i] = angle
        out_gap[i] = gap
        out_status[i] = st


@njit(cache=True, nogil=True)
def reconstruct_diameter_batch(
    cals,
    cal_idx,
    px,
    diameters,
    ball_diameter_m,
    out_ball,
    out_ground,
    out_status,
    start,
    stop,
):
    for i in range(start, stop):
        c = cals[cal_idx[i]]
        bx, by, bz, st = reconstruct_diameter(
            c, px[i, 0], px[i, 1], diameters[i], ball_diameter_m
        )
        out_ball[i, 0] = bx
        out_ball[i, 1] = by
        out_ball[i, 2] = bz
        out_ground[i, 0] = bx
        out_ground[i, 1] = by
        out_status[i] = st
