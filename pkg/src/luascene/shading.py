"""Phong illumination with Blinn and classic specular variants, plus the
per-triangle shading strategies (flat, per-vertex, per-fragment).

For every light the contribution is

    ambient = material.ambient * light.ambient
    diffuse = material.diffuse * light.diffuse * max(dot(N, L), 0)
    specular = material.specular * light.specular * S      (only if dot(N, L) > 0)

with L the unit surface-to-light vector, S = max(dot(N, H), 0)^shininess and
H = normalize(L + V) for the Blinn variant, or S = max(dot(R, V), 0)^shininess
with R = reflect(-L, N) for the classic variant. Spot lights scale the
diffuse/specular terms (not the ambient term) by a cutoff/exponent falloff
factor. There is no distance attenuation. The summed color is clamped to
[0, 1] componentwise.

The flat and per-vertex (Gouraud-style) strategies use the classic specular;
only the per-fragment Blinn-Phong scene model uses the halfway vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .math3d import Vec3, normalize_rows
from .scene import (
    DirectionalLight,
    Light,
    Material,
    PointLight,
    ShadingModel,
    SpotLight,
)

BLINN = "blinn"
PHONG = "phong"


@dataclass(frozen=True)
class ShadePoint:
    world_position: Vec3
    world_normal: Vec3  # unit
    view_dir: Vec3  # unit, surface -> eye


def specular_variant_for(model: ShadingModel) -> str:
    return BLINN if model is ShadingModel.BLINN_PHONG else PHONG


def illuminate_batch(
    positions: np.ndarray,
    normals: np.ndarray,
    view_dirs: np.ndarray,
    material: Material,
    lights: tuple[Light, ...] | list[Light],
    variant: str,
    *,
    clamp: bool = True,
) -> np.ndarray:
    """Vectorized illumination of n shade points; arrays are (n, 3)."""
    n = positions.shape[0]
    color = np.zeros((n, 3), dtype=np.float64)
    m_ambient = material.ambient.as_array()
    m_diffuse = material.diffuse.as_array()
    m_specular = material.specular.as_array()
    for light in lights:
        color += m_ambient * light.ambient.as_array()
        if isinstance(light, DirectionalLight):
            to_light = np.broadcast_to(-light.direction.as_array(), (n, 3))
            spot = 1.0
        else:
            offsets = light.position.as_array() - positions
            to_light = normalize_rows(offsets)
            spot = 1.0
            if isinstance(light, SpotLight):
                spot = _spot_factor(light, to_light)
        n_dot_l = np.einsum("ij,ij->i", normals, to_light)
        lit = n_dot_l > 0.0
        diffuse_strength = np.maximum(n_dot_l, 0.0)
        if variant == BLINN:
            halfway = normalize_rows(to_light + view_dirs)
            spec_angle = np.einsum("ij,ij->i", normals, halfway)
        else:
            reflected = 2.0 * n_dot_l[:, None] * normals - to_light
            spec_angle = np.einsum("ij,ij->i", reflected, view_dirs)
        spec_strength = np.where(
            lit, np.maximum(spec_angle, 0.0) ** material.shininess, 0.0
        )
        falloff = spot * diffuse_strength
        spec_falloff = spot * spec_strength
        color += falloff[:, None] * (m_diffuse * light.diffuse.as_array())
        color += spec_falloff[:, None] * (m_specular * light.specular.as_array())
    if clamp:
        np.clip(color, 0.0, 1.0, out=color)
    return color


def _spot_factor(light: SpotLight, to_light: np.ndarray) -> np.ndarray:
    """Falloff factor per shade point: (cos angle to axis)^exponent inside the
    cutoff cone, 0 outside."""
    from_light = -to_light
    cos_angle = from_light @ light.direction.as_array()
    cos_cutoff = math.cos(math.radians(light.cutoff_deg))
    inside = cos_angle >= cos_cutoff
    base = np.maximum(cos_angle, 0.0)
    return np.where(inside, base**light.exponent, 0.0)


def illuminate(
    point: ShadePoint,
    material: Material,
    lights: tuple[Light, ...] | list[Light],
    variant: str,
    *,
    clamp: bool = True,
) -> Vec3:
    """Scalar convenience over illuminate_batch."""
    color = illuminate_batch(
        point.world_position.as_array().reshape(1, 3),
        point.world_normal.as_array().reshape(1, 3),
        point.view_dir.as_array().reshape(1, 3),
        material,
        lights,
        variant,
        clamp=clamp,
    )
    return Vec3(*color[0])


def _view_dirs_toward(eye: Vec3, positions: np.ndarray) -> np.ndarray:
    return normalize_rows(eye.as_array() - positions)


@dataclass(frozen=True)
class TriangleShading:
    """Per-fragment color rule for one world-space triangle.

    mode 'constant': constant_color everywhere (flat).
    mode 'vertex': barycentric blend of vertex_colors (Gouraud).
    mode 'fragment': interpolate position/normal, illuminate per fragment.
    """

    mode: str
    constant_color: Vec3 | None = None
    vertex_colors: np.ndarray | None = None  # (3, 3)
    positions: np.ndarray | None = None  # (3, 3)
    normals: np.ndarray | None = None  # (3, 3)
    material: Material | None = None
    lights: tuple[Light, ...] | None = None
    eye: Vec3 | None = None

    def color_at(self, bary) -> Vec3:
        b = np.asarray(bary, dtype=np.float64)
        if self.mode == "constant":
            return self.constant_color
        if self.mode == "vertex":
            return Vec3(*(b @ self.vertex_colors))
        position = b @ self.positions
        normal = normalize_rows((b @ self.normals).reshape(1, 3))
        view = _view_dirs_toward(self.eye, position.reshape(1, 3))
        color = illuminate_batch(
            position.reshape(1, 3), normal, view, self.material, self.lights, BLINN
        )
        return Vec3(*color[0])


def shade_triangle(
    positions: np.ndarray,
    normals: np.ndarray,
    model: ShadingModel,
    material: Material,
    lights: tuple[Light, ...] | list[Light],
    eye: Vec3,
) -> TriangleShading:
    """Build the fragment color rule for one triangle (world-space inputs).

    Flat: illuminate once at the centroid with the geometric face normal.
    Gouraud: illuminate each vertex, interpolate colors barycentrically.
    Blinn-Phong: interpolate position and re-normalized normal, illuminate
    per fragment with the Blinn specular.
    """
    positions = np.asarray(positions, dtype=np.float64).reshape(3, 3)
    normals = np.asarray(normals, dtype=np.float64).reshape(3, 3)
    lights = tuple(lights)
    if model is ShadingModel.FLAT:
        centroid = positions.mean(axis=0, keepdims=True)
        face_normal = np.cross(positions[1] - positions[0], positions[2] - positions[0])
        norm = np.linalg.norm(face_normal)
        if norm > 0.0:
            face_normal = face_normal / norm
        view = _view_dirs_toward(eye, centroid)
        color = illuminate_batch(
            centroid, face_normal.reshape(1, 3), view, material, lights, PHONG
        )
        return TriangleShading(mode="constant", constant_color=Vec3(*color[0]))
    if model is ShadingModel.GOURAUD:
        view = _view_dirs_toward(eye, positions)
        colors = illuminate_batch(positions, normals, view, material, lights, PHONG)
        return TriangleShading(mode="vertex", vertex_colors=colors)
    return TriangleShading(
        mode="fragment",
        positions=positions,
        normals=normals,
        material=material,
        lights=lights,
        eye=eye,
    )
