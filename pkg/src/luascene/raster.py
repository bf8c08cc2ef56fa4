"""Deterministic software renderer.

Projects a Scene through a right-handed look-at camera and a [-1, 1] clip
range perspective projection, then rasterizes triangles (top-left fill rule
on pixel centers, perspective-correct varyings, strictly-less depth test),
lines (1-pixel Bresenham, endpoint-interpolated depth), and points.

Both triangle faces are rasterized (no culling) and triangles crossing the
near plane are clipped against it; primitives fully behind it are dropped.

Rendering happens in two phases: a serial prepare phase that projects,
clips, and evaluates per-vertex/per-face lighting for every object, and a
rasterization phase over horizontal bands. Each band owns a disjoint set of
rows and the per-band work is order-fixed, so output bytes are identical for
any thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .math3d import inverse_transpose3, look_at, normalize_rows, perspective, transform_points
from .scene import Scene, SceneObject, DisplayMode, ShadingModel, effective_lights
from .shading import BLINN, PHONG, illuminate_batch, specular_variant_for


@dataclass
class Framebuffer:
    width: int
    height: int
    color: np.ndarray  # (h, w, 3) uint8
    depth: np.ndarray  # (h, w) float32, +inf at the far plane

    @staticmethod
    def create(width: int, height: int, clear_rgb) -> "Framebuffer":
        if width < 1 or height < 1:
            raise ValueError("framebuffer dimensions must be >= 1")
        color = np.empty((height, width, 3), dtype=np.uint8)
        color[:, :] = _to_bytes(np.asarray(clear_rgb, dtype=np.float64))
        depth = np.full((height, width), np.inf, dtype=np.float32)
        return Framebuffer(width, height, color, depth)


@dataclass(frozen=True)
class ImageDiff:
    max_channel_delta: int
    differing_pixels: int


def _to_bytes(rgb: np.ndarray) -> np.ndarray:
    return np.rint(np.clip(rgb, 0.0, 1.0) * 255.0).astype(np.uint8)


# -- prepared primitives -------------------------------------------------------


@dataclass
class _TriangleBatch:
    screen: np.ndarray  # (t, 3, 2) float64 pixel coords
    depth: np.ndarray  # (t, 3) float64 ndc z
    inv_w: np.ndarray  # (t, 3) float64
    shading: str  # 'constant' | 'vertex' | 'fragment'
    flat_colors: np.ndarray | None = None  # (t, 3)
    vertex_colors: np.ndarray | None = None  # (t, 3, 3)
    world_positions: np.ndarray | None = None  # (t, 3, 3)
    world_normals: np.ndarray | None = None  # (t, 3, 3)
    material: object = None
    lights: tuple = ()
    eye: np.ndarray | None = None


@dataclass
class _LineBatch:
    screen: np.ndarray  # (s, 2, 2)
    depth: np.ndarray  # (s, 2)
    colors: np.ndarray  # (s, 2, 3)


@dataclass
class _PointBatch:
    pixels: np.ndarray  # (p, 2) int64 (x, y)
    depth: np.ndarray  # (p,)
    colors: np.ndarray  # (p, 3)


def render(scene: Scene, width: int, height: int, threads: int = 1) -> Framebuffer:
    """Render the scene into a fresh framebuffer. Bit-deterministic for any
    threads >= 1."""
    camera = scene.camera
    if camera.eye.as_tuple() == camera.target.as_tuple():
        raise ValueError("degenerate camera: eye equals target")
    fb = Framebuffer.create(width, height, scene.clear_color.as_tuple())
    view = look_at(camera.eye, camera.target, camera.up)
    proj = perspective(camera.fov_y_deg, width / height, camera.near, camera.far)
    view_proj = proj @ view
    lights = effective_lights(scene)

    batches = []
    for obj in scene.objects:
        batches.extend(_prepare_object(obj, scene, view, view_proj, lights, width, height))

    if threads <= 1:
        _raster_band(fb, batches, 0, height)
    else:
        bounds = np.linspace(0, height, threads + 1).astype(int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            jobs = [
                pool.submit(_raster_band, fb, batches, int(bounds[i]), int(bounds[i + 1]))
                for i in range(threads)
            ]
            for job in jobs:
                job.result()
    return fb


# -- prepare phase ---------------------------------------------------------------


def _project(view_proj: np.ndarray, world: np.ndarray, width: int, height: int):
    """Clip-space -> screen. Returns (screen xy, ndc z, 1/w); callers must only
    use rows with w > 0 (in front of the eye plane)."""
    clip = world @ view_proj[:, :3].T + view_proj[:, 3]
    w = clip[:, 3]
    safe_w = np.where(w == 0.0, 1.0, w)
    inv_w = 1.0 / safe_w
    ndc = clip[:, :3] * inv_w[:, None]
    screen = np.empty((world.shape[0], 2), dtype=np.float64)
    screen[:, 0] = (ndc[:, 0] * 0.5 + 0.5) * width
    screen[:, 1] = (1.0 - (ndc[:, 1] * 0.5 + 0.5)) * height
    return screen, ndc[:, 2], inv_w


def _prepare_object(obj: SceneObject, scene: Scene, view, view_proj, lights, width, height):
    mesh = obj.mesh
    camera = scene.camera
    near = camera.near
    world_pos = transform_points(obj.model_matrix, np.asarray(mesh.positions))
    normal_matrix = inverse_transpose3(obj.model_matrix)
    world_nrm = normalize_rows(np.asarray(mesh.normals) @ normal_matrix.T)
    view_z = world_pos @ view[2, :3] + view[2, 3]
    inside = view_z <= -near  # camera looks down -Z in view space
    eye = camera.eye.as_array()

    if obj.display_mode is DisplayMode.TRIANGLES:
        return _prepare_triangles(
            obj, scene, lights, world_pos, world_nrm, view_z, inside,
            view_proj, width, height, near, eye,
        )
    variant = specular_variant_for(scene.shading)
    view_dirs = normalize_rows(eye - world_pos)
    colors = illuminate_batch(world_pos, world_nrm, view_dirs, obj.material, lights, variant)
    if obj.display_mode is DisplayMode.LINES:
        return _prepare_lines(
            mesh, world_pos, colors, view_z, inside, view_proj, width, height, near
        )
    return _prepare_points(world_pos, colors, inside, view_proj, width, height)


def _prepare_triangles(
    obj, scene, lights, world_pos, world_nrm, view_z, inside, view_proj,
    width, height, near, eye,
):
    mesh = obj.mesh
    tris = np.asarray(mesh.triangles)
    if len(tris) == 0:
        return []
    tri_inside = inside[tris]
    keep_full = tri_inside.all(axis=1)
    crossing = tri_inside.any(axis=1) & ~keep_full

    shading = scene.shading
    material = obj.material
    batches = []

    # Per-face colors (flat) or per-vertex colors (gouraud) for the whole object.
    flat_all = None
    vert_colors = None
    if shading is ShadingModel.FLAT:
        p0 = world_pos[tris[:, 0]]
        face_n = np.cross(world_pos[tris[:, 1]] - p0, world_pos[tris[:, 2]] - p0)
        face_n = normalize_rows(face_n)
        centroids = (world_pos[tris[:, 0]] + world_pos[tris[:, 1]] + world_pos[tris[:, 2]]) / 3.0
        view_dirs = normalize_rows(eye - centroids)
        flat_all = illuminate_batch(centroids, face_n, view_dirs, material, lights, PHONG)
    elif shading is ShadingModel.GOURAUD:
        view_dirs = normalize_rows(eye - world_pos)
        vert_colors = illuminate_batch(world_pos, world_nrm, view_dirs, material, lights, PHONG)

    screen, ndc_z, inv_w = _project(view_proj, world_pos, width, height)

    def batch_from_indices(index_array: np.ndarray, tri_ids: np.ndarray) -> _TriangleBatch:
        batch = _TriangleBatch(
            screen=screen[index_array],
            depth=ndc_z[index_array],
            inv_w=inv_w[index_array],
            shading=_SHADING_KIND[shading],
            material=material,
            lights=lights,
            eye=eye,
        )
        if shading is ShadingModel.FLAT:
            batch.flat_colors = flat_all[tri_ids]
        elif shading is ShadingModel.GOURAUD:
            batch.vertex_colors = vert_colors[index_array]
        else:
            batch.world_positions = world_pos[index_array]
            batch.world_normals = world_nrm[index_array]
        return batch

    if keep_full.any():
        ids = np.nonzero(keep_full)[0]
        batches.append(batch_from_indices(tris[ids], ids))

    if crossing.any():
        batches.extend(
            _clip_crossing_triangles(
                np.nonzero(crossing)[0], tris, world_pos, world_nrm, view_z,
                flat_all, vert_colors, shading, material, lights, eye,
                view_proj, width, height, near,
            )
        )
    return batches


_SHADING_KIND = {
    ShadingModel.FLAT: "constant",
    ShadingModel.GOURAUD: "vertex",
    ShadingModel.BLINN_PHONG: "fragment",
}


def _clip_crossing_triangles(
    tri_ids, tris, world_pos, world_nrm, view_z, flat_all, vert_colors,
    shading, material, lights, eye, view_proj, width, height, near,
):
    """Sutherland-Hodgman clip of near-plane-crossing triangles, one plane.

    Attributes are lerped along clipped edges; the resulting polygon is fan
    triangulated and projected like any other geometry.
    """
    out_screen, out_depth, out_invw = [], [], []
    out_flat, out_vcol, out_wpos, out_wnrm = [], [], [], []
    plane = -near

    for tid in tri_ids:
        idx = tris[tid]
        poly = []
        for corner in range(3):
            v = idx[corner]
            attrs = {
                "pos": world_pos[v],
                "nrm": world_nrm[v],
                "col": vert_colors[v] if vert_colors is not None else None,
                "z": view_z[v],
            }
            poly.append(attrs)
        clipped = []
        for i in range(3):
            a, b = poly[i], poly[(i + 1) % 3]
            a_in, b_in = a["z"] <= plane, b["z"] <= plane
            if a_in:
                clipped.append(a)
            if a_in != b_in:
                t = (plane - a["z"]) / (b["z"] - a["z"])
                mid = {
                    "pos": a["pos"] + t * (b["pos"] - a["pos"]),
                    "nrm": a["nrm"] + t * (b["nrm"] - a["nrm"]),
                    "col": None
                    if a["col"] is None
                    else a["col"] + t * (b["col"] - a["col"]),
                    "z": plane,
                }
                clipped.append(mid)
        if len(clipped) < 3:
            continue
        positions = np.array([c["pos"] for c in clipped])
        screen, ndc_z, inv_w = _project(view_proj, positions, width, height)
        for k in range(1, len(clipped) - 1):
            fan = (0, k, k + 1)
            out_screen.append(screen[list(fan)])
            out_depth.append(ndc_z[list(fan)])
            out_invw.append(inv_w[list(fan)])
            if shading is ShadingModel.FLAT:
                out_flat.append(flat_all[tid])
            elif shading is ShadingModel.GOURAUD:
                out_vcol.append(np.array([clipped[i]["col"] for i in fan]))
            else:
                out_wpos.append(np.array([clipped[i]["pos"] for i in fan]))
                out_wnrm.append(np.array([clipped[i]["nrm"] for i in fan]))

    if not out_screen:
        return []
    batch = _TriangleBatch(
        screen=np.array(out_screen),
        depth=np.array(out_depth),
        inv_w=np.array(out_invw),
        shading=_SHADING_KIND[shading],
        material=material,
        lights=lights,
        eye=eye,
    )
    if shading is ShadingModel.FLAT:
        batch.flat_colors = np.array(out_flat)
    elif shading is ShadingModel.GOURAUD:
        batch.vertex_colors = np.array(out_vcol)
    else:
        batch.world_positions = np.array(out_wpos)
        batch.world_normals = np.array(out_wnrm)
    return [batch]


def _prepare_lines(mesh, world_pos, colors, view_z, inside, view_proj, width, height, near):
    edges = np.asarray(mesh.edges)
    if len(edges) == 0:
        return []
    segments = []
    plane = -near
    for a, b in edges:
        a_in, b_in = bool(inside[a]), bool(inside[b])
        if not (a_in or b_in):
            continue
        pa, pb = world_pos[a], world_pos[b]
        ca, cb = colors[a], colors[b]
        if not (a_in and b_in):
            t = (plane - view_z[a]) / (view_z[b] - view_z[a])
            mid_p = pa + t * (pb - pa)
            mid_c = ca + t * (cb - ca)
            if a_in:
                pb, cb = mid_p, mid_c
            else:
                pa, ca = mid_p, mid_c
        segments.append((pa, pb, ca, cb))
    if not segments:
        return []
    pts = np.array([[s[0], s[1]] for s in segments])  # (s, 2, 3)
    cols = np.array([[s[2], s[3]] for s in segments])
    flat = pts.reshape(-1, 3)
    screen, ndc_z, _ = _project(view_proj, flat, width, height)
    return [
        _LineBatch(
            screen=screen.reshape(-1, 2, 2),
            depth=ndc_z.reshape(-1, 2),
            colors=cols,
        )
    ]


def _prepare_points(world_pos, colors, inside, view_proj, width, height):
    if not inside.any():
        return []
    kept = np.nonzero(inside)[0]
    screen, ndc_z, _ = _project(view_proj, world_pos[kept], width, height)
    px = np.floor(screen).astype(np.int64)
    valid = (px[:, 0] >= 0) & (px[:, 0] < width) & (px[:, 1] >= 0) & (px[:, 1] < height)
    if not valid.any():
        return []
    return [
        _PointBatch(
            pixels=px[valid],
            depth=ndc_z[valid],
            colors=colors[kept][valid],
        )
    ]


# -- raster phase ------------------------------------------------------------------


def _raster_band(fb: Framebuffer, batches, row_start: int, row_stop: int) -> None:
    if row_start >= row_stop:
        return
    for batch in batches:
        if isinstance(batch, _TriangleBatch):
            _raster_triangles(fb, batch, row_start, row_stop)
        elif isinstance(batch, _LineBatch):
            _raster_lines(fb, batch, row_start, row_stop)
        else:
            _raster_points(fb, batch, row_start, row_stop)


def _edge_is_top_left(ax: float, ay: float, bx: float, by: float) -> bool:
    # Screen space is y-down; with positive-area winding a 'top' edge is
    # horizontal going left, a 'left' edge goes downward (increasing y).
    return (ay == by and bx < ax) or (by > ay)


def _raster_triangles(fb: Framebuffer, batch: _TriangleBatch, row_start, row_stop) -> None:
    width, height = fb.width, fb.height
    screen = batch.screen
    xs = screen[:, :, 0]
    ys = screen[:, :, 1]
    min_x = np.maximum(np.ceil(xs.min(axis=1) - 0.5), 0.0)
    max_x = np.minimum(np.floor(xs.max(axis=1) - 0.5), width - 1)
    min_y = np.maximum(np.ceil(ys.min(axis=1) - 0.5), row_start)
    max_y = np.minimum(np.floor(ys.max(axis=1) - 0.5), row_stop - 1)
    alive = (min_x <= max_x) & (min_y <= max_y)
    if not alive.any():
        return
    fragment_mode = batch.shading == "fragment"

    for t in np.nonzero(alive)[0]:
        x0, y0 = screen[t, 0]
        x1, y1 = screen[t, 1]
        x2, y2 = screen[t, 2]
        area = (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0)
        if area == 0.0:
            continue
        order = (0, 1, 2)
        if area < 0.0:
            order = (0, 2, 1)
            x1, y1, x2, y2 = x2, y2, x1, y1
            area = -area
        ix0, ix1 = int(min_x[t]), int(max_x[t])
        iy0, iy1 = int(min_y[t]), int(max_y[t])
        px = np.arange(ix0, ix1 + 1, dtype=np.float64) + 0.5
        py = np.arange(iy0, iy1 + 1, dtype=np.float64) + 0.5
        # Edge functions as E(p) = (b-a) x (p-a), one per triangle side.
        w0 = _edge_grid(x1, y1, x2, y2, px, py)
        w1 = _edge_grid(x2, y2, x0, y0, px, py)
        w2 = _edge_grid(x0, y0, x1, y1, px, py)
        cover = (
            _cover(w0, _edge_is_top_left(x1, y1, x2, y2))
            & _cover(w1, _edge_is_top_left(x2, y2, x0, y0))
            & _cover(w2, _edge_is_top_left(x0, y0, x1, y1))
        )
        if not cover.any():
            continue
        b0 = w0 / area
        b1 = w1 / area
        b2 = w2 / area
        depth = batch.depth[t][list(order)]
        frag_depth = (b0 * depth[0] + b1 * depth[1] + b2 * depth[2]).astype(np.float32)
        depth_region = fb.depth[iy0 : iy1 + 1, ix0 : ix1 + 1]
        mask = cover & (frag_depth < depth_region)
        if not mask.any():
            continue
        # Perspective-correct barycentrics for varyings.
        inv_w = batch.inv_w[t][list(order)]
        q0 = b0[mask] * inv_w[0]
        q1 = b1[mask] * inv_w[1]
        q2 = b2[mask] * inv_w[2]
        denom = q0 + q1 + q2
        q0 /= denom
        q1 /= denom
        q2 /= denom
        if batch.shading == "constant":
            rgb = _to_bytes(batch.flat_colors[t])
        elif batch.shading == "vertex":
            colors = batch.vertex_colors[t][list(order)]
            blended = (
                q0[:, None] * colors[0] + q1[:, None] * colors[1] + q2[:, None] * colors[2]
            )
            rgb = _to_bytes(blended)
        else:
            positions = batch.world_positions[t][list(order)]
            normals = batch.world_normals[t][list(order)]
            frag_pos = (
                q0[:, None] * positions[0]
                + q1[:, None] * positions[1]
                + q2[:, None] * positions[2]
            )
            frag_nrm = normalize_rows(
                q0[:, None] * normals[0] + q1[:, None] * normals[1] + q2[:, None] * normals[2]
            )
            view_dirs = normalize_rows(batch.eye - frag_pos)
            shaded = illuminate_batch(
                frag_pos, frag_nrm, view_dirs, batch.material, batch.lights, BLINN
            )
            rgb = _to_bytes(shaded)
        color_region = fb.color[iy0 : iy1 + 1, ix0 : ix1 + 1]
        color_region[mask] = rgb
        depth_region[mask] = frag_depth[mask]


def _edge_grid(ax, ay, bx, by, px, py):
    # (b - a) x (p - a), evaluated on the pixel grid. Positive = inside for
    # positive-area winding.
    dx = bx - ax
    dy = by - ay
    return dx * (py[:, None] - ay) - dy * (px[None, :] - ax)


def _cover(w: np.ndarray, top_left: bool) -> np.ndarray:
    return (w > 0.0) | ((w == 0.0) & top_left)


def _clip_segment_to_rect(x0, y0, x1, y1, width, height):
    """Liang-Barsky clip to the screen rectangle; returns (t_enter, t_exit)
    in the original segment's parameter or None when fully outside."""
    t0, t1 = 0.0, 1.0
    dx, dy = x1 - x0, y1 - y0
    for p, q in (
        (-dx, x0 - 0.0),
        (dx, float(width) - x0),
        (-dy, y0 - 0.0),
        (dy, float(height) - y0),
    ):
        if p == 0.0:
            if q < 0.0:
                return None
            continue
        r = q / p
        if p < 0.0:
            if r > t1:
                return None
            t0 = max(t0, r)
        else:
            if r < t0:
                return None
            t1 = min(t1, r)
    return (t0, t1)


def _raster_lines(fb: Framebuffer, batch: _LineBatch, row_start, row_stop) -> None:
    width = fb.width
    for s in range(batch.screen.shape[0]):
        (x0f, y0f), (x1f, y1f) = batch.screen[s]
        z0, z1 = batch.depth[s]
        c0, c1 = batch.colors[s]
        clip = _clip_segment_to_rect(x0f, y0f, x1f, y1f, fb.width, fb.height)
        if clip is None:
            continue
        t_enter, t_exit = clip
        if t_enter > 0.0 or t_exit < 1.0:
            oz0, oz1, oc0, oc1 = z0, z1, c0, c1
            z0 = oz0 + t_enter * (oz1 - oz0)
            z1 = oz0 + t_exit * (oz1 - oz0)
            c0 = oc0 + t_enter * (oc1 - oc0)
            c1 = oc0 + t_exit * (oc1 - oc0)
            x0f, y0f, x1f, y1f = (
                x0f + t_enter * (x1f - x0f),
                y0f + t_enter * (y1f - y0f),
                x0f + t_exit * (x1f - x0f),
                y0f + t_exit * (y1f - y0f),
            )
        x0, y0 = int(math.floor(x0f)), int(math.floor(y0f))
        x1, y1 = int(math.floor(x1f)), int(math.floor(y1f))
        dx = abs(x1 - x0)
        dy = -abs(y1 - y0)
        sx = 1 if x0 < x1 else -1
        sy = 1 if y0 < y1 else -1
        err = dx + dy
        steps = max(dx, -dy)
        x, y = x0, y0
        i = 0
        while True:
            if 0 <= x < width and row_start <= y < row_stop:
                t = i / steps if steps else 0.0
                z = np.float32(z0 + t * (z1 - z0))
                if z < fb.depth[y, x]:
                    fb.depth[y, x] = z
                    fb.color[y, x] = _to_bytes(c0 + t * (c1 - c0))
            if x == x1 and y == y1:
                break
            e2 = 2 * err
            if e2 >= dy:
                err += dy
                x += sx
            if e2 <= dx:
                err += dx
                y += sy
            i += 1


def _raster_points(fb: Framebuffer, batch: _PointBatch, row_start, row_stop) -> None:
    for p in range(batch.pixels.shape[0]):
        x, y = int(batch.pixels[p, 0]), int(batch.pixels[p, 1])
        if not (row_start <= y < row_stop):
            continue
        z = np.float32(batch.depth[p])
        if z < fb.depth[y, x]:
            fb.depth[y, x] = z
            fb.color[y, x] = _to_bytes(batch.colors[p])


# -- output -----------------------------------------------------------------------


def write_image(fb: Framebuffer, sink=None) -> bytes:
    """Binary PPM (P6, maxval 255); a bit-exact function of the framebuffer."""
    header = f"P6\n{fb.width} {fb.height}\n255\n".encode("ascii")
    payload = fb.color.tobytes()
    data = header + payload
    if sink is not None:
        sink.write(data)
    return data


def image_diff(a: Framebuffer, b: Framebuffer) -> ImageDiff:
    """Exact per-channel comparison statistics for two equal-size framebuffers."""
    if a.width != b.width or a.height != b.height:
        raise ValueError("image_diff requires equal dimensions")
    delta = np.abs(a.color.astype(np.int16) - b.color.astype(np.int16))
    return ImageDiff(
        max_channel_delta=int(delta.max(initial=0)),
        differing_pixels=int(np.count_nonzero(delta.max(axis=2))),
    )
