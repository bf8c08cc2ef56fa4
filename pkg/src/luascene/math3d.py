"""Small vector/matrix toolkit shared by the scene, shading, and raster code.

Conventions (mirrored exactly by the generated web templates): right-handed
world with Y up, column vectors (M @ v), camera looking down -Z in view
space, and a perspective projection mapping the near/far range to [-1, 1].
Matrices are numpy (4, 4) float64; 'column-major' refers to the 16-number
serialization order used in scene documents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, slots=True)
class Vec3:
    x: float
    y: float
    z: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=np.float64)

    def add(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def sub(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def scale(self, k: float) -> "Vec3":
        return Vec3(self.x * k, self.y * k, self.z * k)

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Vec3") -> "Vec3":
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def normalized(self) -> "Vec3":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize a zero vector")
        return self.scale(1.0 / n)

    def is_finite(self) -> bool:
        return all(math.isfinite(c) for c in self.as_tuple())

    @staticmethod
    def from_seq(seq) -> "Vec3":
        x, y, z = seq
        return Vec3(float(x), float(y), float(z))


def identity4() -> np.ndarray:
    return np.eye(4, dtype=np.float64)


def translation(v: Vec3) -> np.ndarray:
    m = identity4()
    m[0, 3] = v.x
    m[1, 3] = v.y
    m[2, 3] = v.z
    return m


def scaling(v: Vec3) -> np.ndarray:
    m = identity4()
    m[0, 0] = v.x
    m[1, 1] = v.y
    m[2, 2] = v.z
    return m


def rotation_axis_angle(axis: Vec3, angle_deg: float) -> np.ndarray:
    """Rodrigues rotation about a (normalized internally) axis, in degrees."""
    u = axis.normalized()
    a = math.radians(angle_deg)
    c, s = math.cos(a), math.sin(a)
    t = 1.0 - c
    x, y, z = u.x, u.y, u.z
    m = identity4()
    m[0, 0] = t * x * x + c
    m[0, 1] = t * x * y - s * z
    m[0, 2] = t * x * z + s * y
    m[1, 0] = t * x * y + s * z
    m[1, 1] = t * y * y + c
    m[1, 2] = t * y * z - s * x
    m[2, 0] = t * x * z - s * y
    m[2, 1] = t * y * z + s * x
    m[2, 2] = t * z * z + c
    return m


def look_at(eye: Vec3, target: Vec3, up: Vec3) -> np.ndarray:
    forward = target.sub(eye).normalized()
    side = forward.cross(up).normalized()
    true_up = side.cross(forward)
    m = identity4()
    m[0, :3] = side.as_tuple()
    m[1, :3] = true_up.as_tuple()
    m[2, :3] = (-forward.x, -forward.y, -forward.z)
    m[0, 3] = -side.dot(eye)
    m[1, 3] = -true_up.dot(eye)
    m[2, 3] = forward.dot(eye)
    return m


def perspective(fov_y_deg: float, aspect: float, near: float, far: float) -> np.ndarray:
    f = 1.0 / math.tan(math.radians(fov_y_deg) / 2.0)
    m = np.zeros((4, 4), dtype=np.float64)
    m[0, 0] = f / aspect
    m[1, 1] = f
    m[2, 2] = (far + near) / (near - far)
    m[2, 3] = 2.0 * far * near / (near - far)
    m[3, 2] = -1.0
    return m


def inverse_transpose3(model: np.ndarray) -> np.ndarray:
    """Normal matrix: inverse-transpose of the model matrix's upper 3x3."""
    return np.linalg.inv(model[:3, :3]).T


def transform_points(matrix: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Apply an affine 4x4 to an (n, 3) array of points."""
    return points @ matrix[:3, :3].T + matrix[:3, 3]


def transform_directions(matrix3: np.ndarray, dirs: np.ndarray) -> np.ndarray:
    """Apply a 3x3 to an (n, 3) array of directions."""
    return dirs @ matrix3.T


def normalize_rows(vectors: np.ndarray) -> np.ndarray:
    """Row-normalize an (n, 3) array; zero rows are left as zeros."""
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    safe = np.where(norms == 0.0, 1.0, norms)
    return vectors / safe
