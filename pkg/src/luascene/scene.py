"""Scene document: camera, shading model, objects, lights, and the builder
the graphics builtins mutate during evaluation.

All scene defaults live here as named constants. A freshly drawn object gets
the identity model matrix and DEFAULT_MATERIAL; a freshly drawn light gets
DEFAULT_LIGHT_* components. A scene with no lights is rendered with a single
directional headlight along the camera view direction so bare scripts are
visibly shaded.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .geometry import Mesh
from .math3d import Vec3, identity4


class DisplayMode(enum.Enum):
    TRIANGLES = "triangles"
    POINTS = "points"
    LINES = "lines"


class ShadingModel(enum.Enum):
    FLAT = "flat"
    GOURAUD = "gouraud"
    BLINN_PHONG = "blinn-phong"


@dataclass(frozen=True)
class Material:
    ambient: Vec3
    diffuse: Vec3
    specular: Vec3
    shininess: float


@dataclass(frozen=True)
class Camera:
    eye: Vec3
    target: Vec3
    up: Vec3
    fov_y_deg: float
    near: float
    far: float


@dataclass(frozen=True)
class PointLight:
    position: Vec3
    ambient: Vec3
    diffuse: Vec3
    specular: Vec3


@dataclass(frozen=True)
class DirectionalLight:
    position: Vec3
    direction: Vec3  # unit, light travel direction
    ambient: Vec3
    diffuse: Vec3
    specular: Vec3


@dataclass(frozen=True)
class SpotLight:
    position: Vec3
    direction: Vec3  # unit, spot axis
    cutoff_deg: float  # half-angle, (0, 90]
    exponent: float  # >= 0
    ambient: Vec3
    diffuse: Vec3
    specular: Vec3


Light = PointLight | DirectionalLight | SpotLight


@dataclass(frozen=True)
class SceneObject:
    id: int
    mesh: Mesh
    model_matrix: np.ndarray  # (4, 4) float64, read-only
    material: Material
    display_mode: DisplayMode
    source_kind: str  # cube|cone|sphere|cylinder|grid|obj
    source_name: str | None = None  # asset name for source_kind == "obj"


@dataclass(frozen=True)
class Scene:
    camera: Camera
    shading: ShadingModel
    clear_color: Vec3
    objects: tuple[SceneObject, ...]
    lights: tuple[Light, ...]


DEFAULT_CAMERA = Camera(
    eye=Vec3(3.0, 3.0, 5.0),
    target=Vec3(0.0, 0.0, 0.0),
    up=Vec3(0.0, 1.0, 0.0),
    fov_y_deg=45.0,
    near=0.1,
    far=100.0,
)
DEFAULT_CLEAR_COLOR = Vec3(0.15, 0.15, 0.15)
DEFAULT_SHADING = ShadingModel.BLINN_PHONG
DEFAULT_MATERIAL = Material(
    ambient=Vec3(0.1, 0.1, 0.1),
    diffuse=Vec3(0.7, 0.7, 0.7),
    specular=Vec3(0.3, 0.3, 0.3),
    shininess=32.0,
)
DEFAULT_LIGHT_AMBIENT = Vec3(0.1, 0.1, 0.1)
DEFAULT_LIGHT_DIFFUSE = Vec3(1.0, 1.0, 1.0)
DEFAULT_LIGHT_SPECULAR = Vec3(1.0, 1.0, 1.0)


def default_headlight(camera: Camera) -> DirectionalLight:
    """Directional light along the camera view direction (the fallback used
    when a scene declares no lights)."""
    return DirectionalLight(
        position=camera.eye,
        direction=camera.target.sub(camera.eye).normalized(),
        ambient=DEFAULT_LIGHT_AMBIENT,
        diffuse=DEFAULT_LIGHT_DIFFUSE,
        specular=DEFAULT_LIGHT_SPECULAR,
    )


def effective_lights(scene: Scene) -> tuple[Light, ...]:
    if scene.lights:
        return scene.lights
    return (default_headlight(scene.camera),)


class SceneBuildError(Exception):
    """Misuse of the SceneBuilder itself (not a script-level error)."""


class _ObjectDraft:
    __slots__ = ("mesh", "model_matrix", "material", "display_mode", "source_kind", "source_name")

    def __init__(self, mesh, display_mode, source_kind, source_name=None):
        self.mesh = mesh
        self.model_matrix = identity4()
        self.material = DEFAULT_MATERIAL
        self.display_mode = display_mode
        self.source_kind = source_kind
        self.source_name = source_name


class _LightDraft:
    __slots__ = ("kind", "params", "ambient", "diffuse", "specular")

    def __init__(self, kind: str, params: dict):
        self.kind = kind
        self.params = params
        self.ambient = DEFAULT_LIGHT_AMBIENT
        self.diffuse = DEFAULT_LIGHT_DIFFUSE
        self.specular = DEFAULT_LIGHT_SPECULAR


class SceneBuilder:
    """Accumulates the scene during evaluation.

    The most recently drawn object or light is the 'current entity': the
    implicit target of the transform and component-setter builtins. freeze()
    produces the immutable Scene and invalidates the builder.
    """

    def __init__(self):
        self._objects: list[_ObjectDraft] = []
        self._lights: list[_LightDraft] = []
        self._shading = DEFAULT_SHADING
        self._camera = DEFAULT_CAMERA
        self._clear_color = DEFAULT_CLEAR_COLOR
        self._cursor: _ObjectDraft | _LightDraft | None = None
        self._frozen = False

    def _check_open(self) -> None:
        if self._frozen:
            raise SceneBuildError("scene builder is frozen")

    @property
    def cursor(self):
        return self._cursor

    def add_object(self, mesh, display_mode: DisplayMode, source_kind: str,
                   source_name: str | None = None) -> None:
        self._check_open()
        draft = _ObjectDraft(mesh, display_mode, source_kind, source_name)
        self._objects.append(draft)
        self._cursor = draft

    def add_point_light(self, position: Vec3) -> None:
        self._check_open()
        draft = _LightDraft("point", {"position": position})
        self._lights.append(draft)
        self._cursor = draft

    def add_directional_light(self, position: Vec3, direction: Vec3) -> None:
        self._check_open()
        draft = _LightDraft("directional", {"position": position, "direction": direction})
        self._lights.append(draft)
        self._cursor = draft

    def add_spot_light(self, position: Vec3, direction: Vec3, cutoff_deg: float,
                       exponent: float) -> None:
        self._check_open()
        draft = _LightDraft(
            "spot",
            {
                "position": position,
                "direction": direction,
                "cutoff_deg": cutoff_deg,
                "exponent": exponent,
            },
        )
        self._lights.append(draft)
        self._cursor = draft

    def current_object(self) -> _ObjectDraft | None:
        return self._cursor if isinstance(self._cursor, _ObjectDraft) else None

    def transform_current(self, op_matrix: np.ndarray) -> None:
        """Right-multiply the current object's model matrix (local-space
        composition, the classic matrix-stack behavior)."""
        self._check_open()
        draft = self.current_object()
        if draft is None:
            raise SceneBuildError("no current object")
        draft.model_matrix = draft.model_matrix @ op_matrix

    def set_shading(self, model: ShadingModel) -> None:
        self._check_open()
        self._shading = model

    def set_component(self, which: str, rgb: Vec3) -> None:
        """Set ambient/diffuse/specular on the current entity (object material
        or light), clamping components to [0, 1]."""
        self._check_open()
        if self._cursor is None:
            raise SceneBuildError("no current entity")
        clamped = Vec3(*(min(1.0, max(0.0, c)) for c in rgb.as_tuple()))
        if isinstance(self._cursor, _ObjectDraft):
            self._cursor.material = replace(self._cursor.material, **{which: clamped})
        else:
            setattr(self._cursor, which, clamped)

    def freeze(self) -> Scene:
        self._check_open()
        self._frozen = True
        objects = []
        for i, draft in enumerate(self._objects):
            matrix = np.array(draft.model_matrix, dtype=np.float64)
            matrix.setflags(write=False)
            objects.append(
                SceneObject(
                    id=i,
                    mesh=draft.mesh,
                    model_matrix=matrix,
                    material=draft.material,
                    display_mode=draft.display_mode,
                    source_kind=draft.source_kind,
                    source_name=draft.source_name,
                )
            )
        lights = []
        for draft in self._lights:
            components = {
                "ambient": draft.ambient,
                "diffuse": draft.diffuse,
                "specular": draft.specular,
            }
            if draft.kind == "point":
                lights.append(PointLight(position=draft.params["position"], **components))
            elif draft.kind == "directional":
                lights.append(
                    DirectionalLight(
                        position=draft.params["position"],
                        direction=draft.params["direction"],
                        **components,
                    )
                )
            else:
                lights.append(
                    SpotLight(
                        position=draft.params["position"],
                        direction=draft.params["direction"],
                        cutoff_deg=draft.params["cutoff_deg"],
                        exponent=draft.params["exponent"],
                        **components,
                    )
                )
        return Scene(
            camera=self._camera,
            shading=self._shading,
            clear_color=self._clear_color,
            objects=tuple(objects),
            lights=tuple(lights),
        )
