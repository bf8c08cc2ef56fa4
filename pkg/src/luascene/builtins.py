"""The sixteen graphics builtins exposed to scripts.

Draw* calls append scene entities and make the new entity 'current';
Translate/Rotate/Scale right-multiply the current object's model matrix;
the *Component setters write the current entity's material or light colors;
ChangeLighting switches the scene-global shading model.
"""

from __future__ import annotations

from . import math3d
from .geometry import primitive_mesh
from .interpreter import BuiltinFunction, CallContext, LuaTable
from .math3d import Vec3
from .scene import DisplayMode, SceneBuildError, ShadingModel
from .wavefront import ObjError, load_obj_mesh

_DISPLAY_MODES = {m.value: m for m in DisplayMode}
_SHADING_MODELS = {m.value: m for m in ShadingModel}


def _want_string(ctx: CallContext, args: list, index: int, what: str) -> str:
    value = args[index]
    if not isinstance(value, str):
        raise ctx.error(f"{what} must be a string")
    return value


def _want_number(ctx: CallContext, args: list, index: int, what: str) -> float:
    value = args[index]
    if not isinstance(value, float) or isinstance(value, bool):
        raise ctx.error(f"{what} must be a number")
    return value


def _want_vec3(ctx: CallContext, args: list, index: int, what: str) -> Vec3:
    value = args[index]
    if not isinstance(value, LuaTable) or value.length() != 3:
        raise ctx.error(f"malformed vector: {what} must be an array of 3 numbers")
    components = []
    for c in value.array:
        if not isinstance(c, float) or isinstance(c, bool):
            raise ctx.error(f"malformed vector: {what} must be an array of 3 numbers")
        components.append(c)
    return Vec3(*components)


def _want_display_mode(ctx: CallContext, args: list, index: int = 0) -> DisplayMode:
    text = _want_string(ctx, args, index, "displayMode")
    mode = _DISPLAY_MODES.get(text.lower())
    if mode is None:
        raise ctx.error(f"unknown display mode '{text}'")
    return mode


def _builder(ctx: CallContext):
    return ctx.session.scene_builder


def _scene_call(ctx: CallContext, action) -> list:
    try:
        action()
    except SceneBuildError as exc:
        raise ctx.error(str(exc)) from None
    return []


def _draw_primitive(kind: str):
    def fn(ctx: CallContext, args: list) -> list:
        mode = _want_display_mode(ctx, args)
        return _scene_call(
            ctx, lambda: _builder(ctx).add_object(primitive_mesh(kind), mode, kind)
        )

    return fn


def _draw_object(ctx: CallContext, args: list) -> list:
    mode = _want_display_mode(ctx, args)
    name = _want_string(ctx, args, 1, "asset name")
    data = ctx.session.asset_resolver.resolve(name)
    if data is None:
        raise ctx.error(f"asset not found: '{name}'")
    try:
        mesh = load_obj_mesh(data)
    except ObjError as exc:
        raise ctx.error(f"cannot load '{name}': {exc}") from None
    return _scene_call(ctx, lambda: _builder(ctx).add_object(mesh, mode, "obj", name))


def _translate(ctx: CallContext, args: list) -> list:
    v = _want_vec3(ctx, args, 0, "translation")
    return _scene_call(ctx, lambda: _builder(ctx).transform_current(math3d.translation(v)))


def _rotate(ctx: CallContext, args: list) -> list:
    angle = _want_number(ctx, args, 0, "angle")
    axis = _want_vec3(ctx, args, 1, "axis")
    if axis.norm() == 0.0:
        raise ctx.error("rotation axis must be non-zero")
    matrix = math3d.rotation_axis_angle(axis, angle)
    return _scene_call(ctx, lambda: _builder(ctx).transform_current(matrix))


def _scale(ctx: CallContext, args: list) -> list:
    v = _want_vec3(ctx, args, 0, "scale")
    if v.x == 0.0 or v.y == 0.0 or v.z == 0.0:
        raise ctx.error("scale components must be non-zero")
    return _scene_call(ctx, lambda: _builder(ctx).transform_current(math3d.scaling(v)))


def _point_light(ctx: CallContext, args: list) -> list:
    pos = _want_vec3(ctx, args, 0, "position")
    return _scene_call(ctx, lambda: _builder(ctx).add_point_light(pos))


def _directional_light(ctx: CallContext, args: list) -> list:
    pos = _want_vec3(ctx, args, 0, "position")
    direction = _want_vec3(ctx, args, 1, "direction")
    if direction.norm() == 0.0:
        raise ctx.error("light direction must be non-zero")
    return _scene_call(
        ctx, lambda: _builder(ctx).add_directional_light(pos, direction.normalized())
    )


def _spot_light(ctx: CallContext, args: list) -> list:
    pos = _want_vec3(ctx, args, 0, "position")
    direction = _want_vec3(ctx, args, 1, "direction")
    cutoff = _want_number(ctx, args, 2, "cutoff")
    exponent = _want_number(ctx, args, 3, "exponent")
    if direction.norm() == 0.0:
        raise ctx.error("light direction must be non-zero")
    if not 0.0 < cutoff <= 90.0:
        raise ctx.error("cutoff out of range (must be in (0, 90])")
    if exponent < 0.0:
        raise ctx.error("exponent must be >= 0")
    return _scene_call(
        ctx,
        lambda: _builder(ctx).add_spot_light(pos, direction.normalized(), cutoff, exponent),
    )


def _change_lighting(ctx: CallContext, args: list) -> list:
    text = _want_string(ctx, args, 0, "shading model")
    model = _SHADING_MODELS.get(text.lower())
    if model is None:
        raise ctx.error(f"unknown shading model '{text}'")
    return _scene_call(ctx, lambda: _builder(ctx).set_shading(model))


def _component_setter(which: str):
    def fn(ctx: CallContext, args: list) -> list:
        rgb = _want_vec3(ctx, args, 0, "color")
        return _scene_call(ctx, lambda: _builder(ctx).set_component(which, rgb))

    return fn


def register_graphics_builtins(session) -> None:
    builtins = [
        BuiltinFunction("DrawCube", 1, _draw_primitive("cube")),
        BuiltinFunction("DrawCone", 1, _draw_primitive("cone")),
        BuiltinFunction("DrawSphere", 1, _draw_primitive("sphere")),
        BuiltinFunction("DrawCylinder", 1, _draw_primitive("cylinder")),
        BuiltinFunction("DrawGrid", 1, _draw_primitive("grid")),
        BuiltinFunction("DrawObject", 2, _draw_object),
        BuiltinFunction("TranslateObject", 1, _translate),
        BuiltinFunction("RotateObject", 2, _rotate),
        BuiltinFunction("ScaleObject", 1, _scale),
        BuiltinFunction("DrawPointLight", 1, _point_light),
        BuiltinFunction("DrawDirectionalLight", 2, _directional_light),
        BuiltinFunction("DrawSpotLight", 4, _spot_light),
        BuiltinFunction("ChangeLighting", 1, _change_lighting),
        BuiltinFunction("AmbientComponent", 1, _component_setter("ambient")),
        BuiltinFunction("DiffuseComponent", 1, _component_setter("diffuse")),
        BuiltinFunction("SpecularComponent", 1, _component_setter("specular")),
    ]
    for b in builtins:
        session.register(b)
