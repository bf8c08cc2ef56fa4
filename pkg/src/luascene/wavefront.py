"""Wavefront OBJ ingestion.

Supports v / vn / vt (payload ignored) / f directives with the reference
forms `v`, `v/vt`, `v//vn`, `v/vt/vn`; 1-based and negative (count-relative)
indices; fan triangulation of polygons. When the file carries a normal for
every face corner those normals are used verbatim (re-normalized); otherwise
vertex normals are approximated by averaging the unnormalized (area-weighted)
face normals of the incident faces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Mesh, make_mesh
from .math3d import normalize_rows


class ObjError(Exception):
    """OBJ syntax or index problem; line is the 1-based OBJ line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"OBJ line {line}: {message}")
        self.message = message
        self.line = line


@dataclass(frozen=True)
class ObjModel:
    positions: tuple[tuple[float, float, float], ...]
    normals: tuple[tuple[float, float, float], ...]
    # Each face is a tuple of (position index, normal index or None), 0-based.
    faces: tuple[tuple[tuple[int, int | None], ...], ...]


def _parse_floats(parts: list[str], count: int, line_no: int, what: str):
    if len(parts) < count:
        raise ObjError(f"malformed {what} line: expected {count} coordinates", line_no)
    try:
        return tuple(float(p) for p in parts[:count])
    except ValueError:
        raise ObjError(f"malformed {what} line: non-numeric coordinate", line_no) from None


def _resolve_index(raw: str, count: int, line_no: int, what: str) -> int:
    try:
        value = int(raw)
    except ValueError:
        raise ObjError(f"malformed face: bad {what} index {raw!r}", line_no) from None
    if value == 0:
        raise ObjError(f"malformed face: {what} index may not be 0", line_no)
    index = value - 1 if value > 0 else count + value
    if not 0 <= index < count:
        raise ObjError(f"{what} index {value} out of range", line_no)
    return index


def parse_obj(data: bytes | str) -> ObjModel:
    """Parse OBJ text. Unknown directives are skipped; errors carry line numbers."""
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ObjError("file is not valid UTF-8 text", 1) from exc
    else:
        text = data
    positions: list[tuple[float, float, float]] = []
    normals: list[tuple[float, float, float]] = []
    faces: list[tuple[tuple[int, int | None], ...]] = []
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        directive, rest = parts[0], parts[1:]
        if directive == "v":
            positions.append(_parse_floats(rest, 3, line_no, "vertex"))
        elif directive == "vn":
            normals.append(_parse_floats(rest, 3, line_no, "normal"))
        elif directive == "vt":
            continue
        elif directive == "f":
            if len(rest) < 3:
                raise ObjError("malformed face: needs at least 3 vertices", line_no)
            corners = []
            for ref in rest:
                fields = ref.split("/")
                v = _resolve_index(fields[0], len(positions), line_no, "vertex")
                vn = None
                if len(fields) >= 3 and fields[2] != "":
                    vn = _resolve_index(fields[2], len(normals), line_no, "normal")
                corners.append((v, vn))
            faces.append(tuple(corners))
        # o, g, s, usemtl, mtllib, and anything else: skipped
    return ObjModel(tuple(positions), tuple(normals), tuple(faces))


def _fan_triangles(corner_count: int):
    return [(0, i, i + 1) for i in range(1, corner_count - 1)]


def compute_vertex_normals(model: ObjModel) -> Mesh:
    """Build an indexed triangle Mesh from an ObjModel, resolving normals.

    With complete vn coverage the file normals win (one mesh vertex per
    distinct position/normal pair). Otherwise each vertex normal is
    normalize(sum of cross(p1-p0, p2-p0) over incident faces); zero-area
    faces contribute nothing and untouched vertices default to +Y.
    """
    if not model.faces:
        raise ObjError("OBJ defines no faces", 1)
    has_full_normals = bool(model.normals) and all(
        vn is not None for face in model.faces for (_, vn) in face
    )
    if has_full_normals:
        return _mesh_from_supplied_normals(model)
    return _mesh_from_averaged_normals(model)


def _mesh_from_supplied_normals(model: ObjModel) -> Mesh:
    vertex_ids: dict[tuple[int, int], int] = {}
    positions = []
    normals = []
    triangles = []
    for face in model.faces:
        ids = []
        for v, vn in face:
            key = (v, vn)
            idx = vertex_ids.get(key)
            if idx is None:
                idx = len(positions)
                vertex_ids[key] = idx
                positions.append(model.positions[v])
                normals.append(model.normals[vn])
            ids.append(idx)
        for a, b, c in _fan_triangles(len(ids)):
            triangles.append((ids[a], ids[b], ids[c]))
    normal_rows = normalize_rows(np.asarray(normals, dtype=np.float64))
    zero = np.all(normal_rows == 0.0, axis=1)
    normal_rows[zero] = (0.0, 1.0, 0.0)
    return make_mesh(positions, normal_rows, triangles)


def _mesh_from_averaged_normals(model: ObjModel) -> Mesh:
    positions = np.asarray(model.positions, dtype=np.float64).reshape(-1, 3)
    sums = np.zeros_like(positions)
    triangles = []
    for face in model.faces:
        ids = [v for (v, _) in face]
        p0 = positions[ids[0]]
        p1 = positions[ids[1]]
        p2 = positions[ids[2]]
        face_normal = np.cross(p1 - p0, p2 - p0)
        for v in ids:
            sums[v] += face_normal
        for a, b, c in _fan_triangles(len(ids)):
            triangles.append((ids[a], ids[b], ids[c]))
    normals = normalize_rows(sums)
    untouched = np.all(normals == 0.0, axis=1)
    normals[untouched] = (0.0, 1.0, 0.0)
    return make_mesh(positions, normals, triangles)


def load_obj_mesh(data: bytes | str) -> Mesh:
    return compute_vertex_normals(parse_obj(data))
