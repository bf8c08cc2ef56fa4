"""Canonical primitive meshes: cube, cone, sphere, cylinder, grid.

All generators return an indexed triangle Mesh with per-vertex unit normals
and a derived unique edge list used by the Lines display mode. The cube,
cone, and cylinder use split vertices along hard edges so flat and smooth
shading both produce correct creases; the sphere's normals equal its
(unit-radius) positions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class Mesh:
    positions: np.ndarray  # (n, 3) float64
    normals: np.ndarray  # (n, 3) float64, unit rows
    triangles: np.ndarray  # (m, 3) int32
    edges: np.ndarray  # (k, 2) int32, unique, each row sorted

    def vertex_count(self) -> int:
        return int(self.positions.shape[0])

    def triangle_count(self) -> int:
        return int(self.triangles.shape[0])


def derive_edges(triangles: np.ndarray) -> np.ndarray:
    """Unique undirected edges of a triangle list, lexicographically sorted."""
    if len(triangles) == 0:
        return np.zeros((0, 2), dtype=np.int32)
    pairs = np.concatenate(
        [triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]], axis=0
    )
    pairs = np.sort(pairs, axis=1)
    return np.unique(pairs, axis=0).astype(np.int32)


def make_mesh(positions, normals, triangles, edges=None) -> Mesh:
    positions = np.asarray(positions, dtype=np.float64).reshape(-1, 3)
    normals = np.asarray(normals, dtype=np.float64).reshape(-1, 3)
    triangles = np.asarray(triangles, dtype=np.int32).reshape(-1, 3)
    if edges is None:
        edges = derive_edges(triangles)
    else:
        edges = np.asarray(edges, dtype=np.int32).reshape(-1, 2)
    for a in (positions, normals, triangles, edges):
        a.setflags(write=False)
    return Mesh(positions, normals, triangles, edges)


def validate_mesh(mesh: Mesh, *, require_triangles: bool = True) -> None:
    """Assert the Mesh invariants; used by tests over all generators/loaders."""
    n = mesh.vertex_count()
    assert mesh.normals.shape == mesh.positions.shape
    if require_triangles:
        assert mesh.triangle_count() > 0
    if mesh.triangles.size:
        assert mesh.triangles.min() >= 0 and mesh.triangles.max() < n
    if mesh.edges.size:
        assert mesh.edges.min() >= 0 and mesh.edges.max() < n
    lengths = np.linalg.norm(mesh.normals, axis=1)
    assert np.all(np.abs(lengths - 1.0) < 1e-6), "normals must be unit length"
    assert np.all(np.isfinite(mesh.positions))


def gen_cube() -> Mesh:
    """Unit cube centered at the origin: 24 vertices (4 per face), 12 triangles."""
    faces = [
        # (normal, two in-face tangent axes)
        ((1, 0, 0), (0, 1, 0), (0, 0, 1)),
        ((-1, 0, 0), (0, 1, 0), (0, 0, -1)),
        ((0, 1, 0), (0, 0, 1), (1, 0, 0)),
        ((0, -1, 0), (0, 0, -1), (1, 0, 0)),
        ((0, 0, 1), (0, 1, 0), (-1, 0, 0)),
        ((0, 0, -1), (0, 1, 0), (1, 0, 0)),
    ]
    positions = []
    normals = []
    triangles = []
    for normal, u_axis, v_axis in faces:
        n = np.array(normal, dtype=np.float64)
        u = np.array(u_axis, dtype=np.float64)
        v = np.array(v_axis, dtype=np.float64)
        base = len(positions)
        for du, dv in ((-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)):
            positions.append(n * 0.5 + u * du + v * dv)
            normals.append(n)
        triangles.append((base, base + 1, base + 2))
        triangles.append((base, base + 2, base + 3))
    return make_mesh(positions, normals, triangles)


def gen_sphere(slices: int = 40, stacks: int = 36) -> Mesh:
    """Unit-radius latitude/longitude sphere centered at the origin.

    Every band, including the pole bands, is built from quads split into two
    triangles (the pole quads contain one degenerate half), so the triangle
    count is exactly 2 * slices * stacks: 2880 at the defaults.
    """
    if slices < 3 or stacks < 2:
        raise ValueError("gen_sphere needs slices >= 3 and stacks >= 2")
    ring = slices + 1
    positions = np.zeros(((stacks + 1) * ring, 3), dtype=np.float64)
    for i in range(stacks + 1):
        theta = math.pi * i / stacks  # 0 at +Y pole
        y = math.cos(theta)
        r = math.sin(theta)
        for j in range(ring):
            phi = 2.0 * math.pi * j / slices
            positions[i * ring + j] = (r * math.cos(phi), y, r * math.sin(phi))
    triangles = []
    for i in range(stacks):
        for j in range(slices):
            a = i * ring + j
            b = a + 1
            c = a + ring
            d = c + 1
            triangles.append((a, c, b))
            triangles.append((b, c, d))
    return make_mesh(positions, positions.copy(), triangles)


def gen_cone(slices: int = 32) -> Mesh:
    """Unit-radius, height-1 cone: apex at +0.5 Y, capped base at -0.5 Y."""
    if slices < 3:
        raise ValueError("gen_cone needs slices >= 3")
    positions = []
    normals = []
    triangles = []
    # Side: one apex duplicate per column so each slice keeps its own normal.
    inv = 1.0 / math.sqrt(2.0)  # radius == height, so side normals tilt 45deg
    for j in range(slices + 1):
        phi = 2.0 * math.pi * j / slices
        c, s = math.cos(phi), math.sin(phi)
        positions.append((c, -0.5, s))
        normals.append((c * inv, inv, s * inv))
    apex_base = len(positions)
    for j in range(slices + 1):
        phi = 2.0 * math.pi * j / slices
        c, s = math.cos(phi), math.sin(phi)
        positions.append((0.0, 0.5, 0.0))
        normals.append((c * inv, inv, s * inv))
    for j in range(slices):
        triangles.append((apex_base + j, j + 1, j))
    # Base cap.
    cap_center = len(positions)
    positions.append((0.0, -0.5, 0.0))
    normals.append((0.0, -1.0, 0.0))
    cap_base = len(positions)
    for j in range(slices + 1):
        phi = 2.0 * math.pi * j / slices
        positions.append((math.cos(phi), -0.5, math.sin(phi)))
        normals.append((0.0, -1.0, 0.0))
    for j in range(slices):
        triangles.append((cap_center, cap_base + j, cap_base + j + 1))
    return make_mesh(positions, normals, triangles)


def gen_cylinder(slices: int = 32) -> Mesh:
    """Unit-radius, height-1 cylinder centered at the origin, capped ends."""
    if slices < 3:
        raise ValueError("gen_cylinder needs slices >= 3")
    positions = []
    normals = []
    triangles = []
    for j in range(slices + 1):
        phi = 2.0 * math.pi * j / slices
        c, s = math.cos(phi), math.sin(phi)
        positions.append((c, -0.5, s))
        normals.append((c, 0.0, s))
        positions.append((c, 0.5, s))
        normals.append((c, 0.0, s))
    for j in range(slices):
        a = 2 * j
        triangles.append((a, a + 1, a + 2))
        triangles.append((a + 2, a + 1, a + 3))
    for y, ny in ((-0.5, -1.0), (0.5, 1.0)):
        center = len(positions)
        positions.append((0.0, y, 0.0))
        normals.append((0.0, ny, 0.0))
        base = len(positions)
        for j in range(slices + 1):
            phi = 2.0 * math.pi * j / slices
            positions.append((math.cos(phi), y, math.sin(phi)))
            normals.append((0.0, ny, 0.0))
        for j in range(slices):
            if ny > 0:
                triangles.append((center, base + j, base + j + 1))
            else:
                triangles.append((center, base + j + 1, base + j))
    return make_mesh(positions, normals, triangles)


def gen_grid(cells: int = 10) -> Mesh:
    """cells x cells unit squares on the XZ plane, centered, normals +Y.

    The edge list is the square lattice (no triangulation diagonals), which
    is what the Lines display mode shows; Triangles mode uses the fan split.
    """
    if cells < 1:
        raise ValueError("gen_grid needs cells >= 1")
    half = cells / 2.0
    ring = cells + 1
    positions = []
    for i in range(ring):
        for j in range(ring):
            positions.append((j - half, 0.0, i - half))
    normals = [(0.0, 1.0, 0.0)] * len(positions)
    triangles = []
    edges = []
    for i in range(cells):
        for j in range(cells):
            a = i * ring + j
            b = a + 1
            c = a + ring
            d = c + 1
            triangles.append((a, c, b))
            triangles.append((b, c, d))
    for i in range(ring):
        for j in range(cells):
            edges.append((i * ring + j, i * ring + j + 1))  # row segment
            edges.append((j * ring + i, (j + 1) * ring + i))  # column segment
    return make_mesh(positions, normals, triangles, edges=np.array(sorted(set(edges))))


@lru_cache(maxsize=None)
def primitive_mesh(kind: str) -> Mesh:
    """Shared canonical mesh per primitive kind (meshes are immutable)."""
    generators = {
        "cube": gen_cube,
        "cone": gen_cone,
        "sphere": gen_sphere,
        "cylinder": gen_cylinder,
        "grid": gen_grid,
    }
    return generators[kind]()
