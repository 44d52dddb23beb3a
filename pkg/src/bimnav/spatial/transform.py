"""Rigid registration between the device (vps) and building (bim) frames.

The transform is estimated from surveyed anchor pairs with the closed-form
SVD method: subtract centroids, decompose the covariance, and flip the
last singular axis if the rotation came out as a reflection. No scale is
solved for; both frames are metric.

Handedness convention: right-handed, y up. A positive yaw rotates +x
toward -z, so a 90 degree yaw maps (1,0,0) to (0,0,-1).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np

from ..errors import DegenerateAnchors, FrameMismatch
from ..geometry import Point3
from ..ingest import AnchorPair

LOGGER = logging.getLogger(__name__)

Frame = Literal["vps", "bim"]

# above this RMS residual (meters) the anchor survey is suspect
HIGH_RESIDUAL_M = 0.5

Quaternion = tuple[float, float, float, float]  # (w, x, y, z), unit

IDENTITY_QUAT: Quaternion = (1.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class Pose:
    """Position plus orientation quaternion, tagged with its frame."""

    position: Point3
    orientation: Quaternion = IDENTITY_QUAT
    frame: Frame = "bim"


@dataclass(frozen=True)
class RigidTransform:
    """Rotation-then-translation map from the vps frame to the bim frame."""

    rotation: Quaternion
    translation: Point3

    def apply_point(self, p: Point3) -> Point3:
        x, y, z = quat_rotate(self.rotation, p)
        return (x + self.translation[0], y + self.translation[1], z + self.translation[2])

    def inverse(self) -> "RigidTransform":
        inv_q = quat_conjugate(self.rotation)
        t = quat_rotate(inv_q, self.translation)
        return RigidTransform(inv_q, (-t[0], -t[1], -t[2]))

    @staticmethod
    def identity() -> "RigidTransform":
        return RigidTransform(IDENTITY_QUAT, (0.0, 0.0, 0.0))


@dataclass(frozen=True)
class AlignmentResult:
    """Estimated transform with its fit quality."""

    transform: RigidTransform
    rms_residual_m: float
    high_residual: bool


# ---------------------------------------------------------------------------
# quaternion helpers
# ---------------------------------------------------------------------------

def quat_multiply(a: Quaternion, b: Quaternion) -> Quaternion:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return (
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    )


def quat_conjugate(q: Quaternion) -> Quaternion:
    return (q[0], -q[1], -q[2], -q[3])


def quat_normalize(q: Quaternion) -> Quaternion:
    n = math.sqrt(sum(v * v for v in q))
    if n < 1e-12:
        return IDENTITY_QUAT
    return (q[0] / n, q[1] / n, q[2] / n, q[3] / n)


def quat_rotate(q: Quaternion, p: Point3) -> Point3:
    w, x, y, z = q
    # R(q) rows, expanded once instead of two quaternion products
    return (
        (1 - 2 * (y * y + z * z)) * p[0] + 2 * (x * y - w * z) * p[1] + 2 * (x * z + w * y) * p[2],
        2 * (x * y + w * z) * p[0] + (1 - 2 * (x * x + z * z)) * p[1] + 2 * (y * z - w * x) * p[2],
        2 * (x * z - w * y) * p[0] + 2 * (y * z + w * x) * p[1] + (1 - 2 * (x * x + y * y)) * p[2],
    )


def quat_from_matrix(m: np.ndarray) -> Quaternion:
    """Unit quaternion for a proper rotation matrix (Shepperd's method)."""
    trace = float(m[0, 0] + m[1, 1] + m[2, 2])
    if trace > 0.0:
        s = math.sqrt(trace + 1.0) * 2.0
        q = (
            0.25 * s,
            float(m[2, 1] - m[1, 2]) / s,
            float(m[0, 2] - m[2, 0]) / s,
            float(m[1, 0] - m[0, 1]) / s,
        )
    elif m[0, 0] >= m[1, 1] and m[0, 0] >= m[2, 2]:
        s = math.sqrt(1.0 + float(m[0, 0] - m[1, 1] - m[2, 2])) * 2.0
        q = (
            float(m[2, 1] - m[1, 2]) / s,
            0.25 * s,
            float(m[0, 1] + m[1, 0]) / s,
            float(m[0, 2] + m[2, 0]) / s,
        )
    elif m[1, 1] >= m[2, 2]:
        s = math.sqrt(1.0 + float(m[1, 1] - m[0, 0] - m[2, 2])) * 2.0
        q = (
            float(m[0, 2] - m[2, 0]) / s,
            float(m[0, 1] + m[1, 0]) / s,
            0.25 * s,
            float(m[1, 2] + m[2, 1]) / s,
        )
    else:
        s = math.sqrt(1.0 + float(m[2, 2] - m[0, 0] - m[1, 1])) * 2.0
        q = (
            float(m[1, 0] - m[0, 1]) / s,
            float(m[0, 2] + m[2, 0]) / s,
            float(m[1, 2] + m[2, 1]) / s,
            0.25 * s,
        )
    if q[0] < 0.0:
        q = (-q[0], -q[1], -q[2], -q[3])
    return quat_normalize(q)


def quat_to_matrix(q: Quaternion) -> np.ndarray:
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ],
        dtype=np.float64,
    )


def yaw_quaternion(angle_rad: float) -> Quaternion:
    """Rotation about +y; positive angle turns +x toward -z."""
    half = angle_rad / 2.0
    return (math.cos(half), 0.0, math.sin(half), 0.0)


# ---------------------------------------------------------------------------
# estimation and application
# ---------------------------------------------------------------------------

def estimate_transform(pairs: Sequence[AnchorPair] | Iterable[AnchorPair]) -> AlignmentResult:
    """Best rigid vps-to-bim map for the anchor pairs, least squares.

    Needs at least three pairs whose vps points are not collinear;
    otherwise the rotation is not determined and DegenerateAnchors is
    raised. The result carries the RMS residual, with ``high_residual``
    set when it exceeds 0.5 m.
    """
    pair_list = list(pairs)
    if len(pair_list) < 3:
        raise DegenerateAnchors(f"need at least 3 anchor pairs, got {len(pair_list)}")

    src = np.array([p.vps for p in pair_list], dtype=np.float64)
    dst = np.array([p.bim for p in pair_list], dtype=np.float64)

    src_centroid = src.mean(axis=0)
    dst_centroid = dst.mean(axis=0)
    src_centered = src - src_centroid
    dst_centered = dst - dst_centroid

    # collinear anchors leave a free rotation about the common axis
    if np.linalg.matrix_rank(src_centered, tol=1e-9) < 2:
        raise DegenerateAnchors("anchor points are collinear")

    covariance = src_centered.T @ dst_centered
    u, _, vt = np.linalg.svd(covariance)
    d = np.sign(np.linalg.det(vt.T @ u.T))
    if d == 0.0:
        d = 1.0
    flip = np.diag([1.0, 1.0, d])
    rotation_matrix = vt.T @ flip @ u.T

    translation = dst_centroid - rotation_matrix @ src_centroid
    transform = RigidTransform(
        rotation=quat_from_matrix(rotation_matrix),
        translation=(float(translation[0]), float(translation[1]), float(translation[2])),
    )

    residuals = np.array([transform.apply_point(p.vps) for p in pair_list]) - dst
    rms = float(np.sqrt(np.mean(np.sum(residuals * residuals, axis=1))))
    high = rms > HIGH_RESIDUAL_M
    if high:
        LOGGER.warning("anchor fit residual %.3f m exceeds %.1f m", rms, HIGH_RESIDUAL_M)
    return AlignmentResult(transform=transform, rms_residual_m=rms, high_residual=high)


def apply_transform(transform: RigidTransform, pose: Pose) -> Pose:
    """Map a vps-frame pose into the bim frame."""
    if pose.frame != "vps":
        raise FrameMismatch(f"expected a vps-frame pose, got {pose.frame!r}")
    return Pose(
        position=transform.apply_point(pose.position),
        orientation=quat_normalize(quat_multiply(transform.rotation, pose.orientation)),
        frame="bim",
    )
