"""Tree-walking evaluator for the Lua subset.

The AST is evaluated depth-first: operands and arguments are reduced to
values before the node that consumes them. Lexical scoping uses a chain of
Environment frames; assignment to an undeclared name writes the root
(global) frame, while 'local' always binds in the current frame.

Runtime values are represented with Python natives where possible:
nil -> None, booleans -> bool, numbers -> float (a single 64-bit float type),
strings -> str, plus LuaTable, LuaFunction, and BuiltinFunction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from . import syntax as S
from .syntax import Chunk, SourceSpan

MAX_CALL_DEPTH = 10_000
DEFAULT_STEP_BUDGET = 50_000_000

_INT64_MIN = -(2**63)
_INT64_MAX = 2**63 - 1
_U64_MASK = (1 << 64) - 1


class LuaRuntimeError(Exception):
    """Script error during evaluation; span points at the failing expression."""

    def __init__(self, message: str, span: SourceSpan):
        super().__init__(message)
        self.message = message
        self.span = span

    def __str__(self) -> str:
        return f"line {self.span.line}: {self.message}"


class _BreakSignal(Exception):
    pass


class _ReturnSignal(Exception):
    def __init__(self, values: list):
        self.values = values


class LuaTable:
    """Table value: contiguous 1-based array part plus a keyed hash part."""

    __slots__ = ("array", "hash")

    def __init__(self):
        self.array: list = []
        self.hash: dict = {}

    @staticmethod
    def _hash_key(key):
        # bool is a subclass-of-int lookalike for float keys in Python dicts;
        # tag it so t[true] and t[1] stay distinct.
        if isinstance(key, bool):
            return ("bool", key)
        return key

    def _array_index(self, key) -> int | None:
        if isinstance(key, float) and key.is_integer():
            i = int(key)
            if 1 <= i <= len(self.array) + 1:
                return i
        return None

    def get(self, key):
        i = self._array_index(key)
        if i is not None and i <= len(self.array):
            return self.array[i - 1]
        return self.hash.get(self._hash_key(key))

    def set(self, key, value):
        i = self._array_index(key)
        if i is None:
            hk = self._hash_key(key)
            if value is None:
                self.hash.pop(hk, None)
            else:
                self.hash[hk] = value
            return
        n = len(self.array)
        if i <= n:
            if value is None:
                # Keep the array contiguous: spill the tail into the hash part.
                for j in range(i + 1, n + 1):
                    self.hash[float(j)] = self.array[j - 1]
                del self.array[i - 1 :]
            else:
                self.array[i - 1] = value
        elif value is not None:
            self.array.append(value)
            # Reabsorb any hash entries that have become contiguous.
            j = float(len(self.array) + 1)
            while j in self.hash:
                self.array.append(self.hash.pop(j))
                j = float(len(self.array) + 1)

    def length(self) -> int:
        return len(self.array)


class LuaFunction:
    __slots__ = ("name", "params", "body", "env")

    def __init__(self, name: str, params: tuple[str, ...], body: Chunk, env: "Environment"):
        self.name = name
        self.params = params
        self.body = body
        self.env = env


class BuiltinFunction:
    """Host function. fn(ctx, args) -> list of return values."""

    __slots__ = ("name", "arity", "fn")

    def __init__(self, name: str, arity: int, fn: Callable):
        self.name = name
        self.arity = arity
        self.fn = fn


class Environment:
    __slots__ = ("bindings", "parent")

    def __init__(self, parent: "Environment | None" = None):
        self.bindings: dict = {}
        self.parent = parent

    def lookup(self, name: str):
        env = self
        while env is not None:
            if name in env.bindings:
                return env.bindings[name]
            env = env.parent
        return None

    def assign(self, name: str, value) -> None:
        env = self
        while env is not None:
            if name in env.bindings:
                env.bindings[name] = value
                return
            if env.parent is None:
                env.bindings[name] = value
                return
            env = env.parent

    def declare(self, name: str, value) -> None:
        self.bindings[name] = value


def type_name(value) -> str:
    if value is None:
        return "nil"
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, float):
        return "number"
    if isinstance(value, str):
        return "string"
    if isinstance(value, LuaTable):
        return "table"
    return "function"


def format_number(x: float) -> str:
    """Shortest decimal text that parses back to the same float; integral
    values inside the exact-integer range print without a decimal point."""
    if x.is_integer() and abs(x) < 2.0**53:
        return str(int(x))
    return repr(x)


def tostring(value) -> str:
    if value is None:
        return "nil"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_number(value)
    if isinstance(value, str):
        return value
    if isinstance(value, LuaTable):
        return "table"
    return "function"


def is_truthy(value) -> bool:
    return value is not None and value is not False


def _coerce_number(value) -> float | None:
    if isinstance(value, float) and not isinstance(value, bool):
        return value
    if isinstance(value, str):
        text = value.strip()
        try:
            if text[:2].lower() in ("0x", "-0") and "x" in text.lower():
                return float(int(text, 16))
            return float(text)
        except ValueError:
            return None
    return None


def values_equal(a, b) -> bool:
    ta, tb = type_name(a), type_name(b)
    if ta != tb:
        return False
    if ta in ("number", "string", "boolean", "nil"):
        return a == b
    return a is b


@dataclass
class AssetResolver:
    """Maps relative asset names (e.g. 'bunny.obj') to file bytes."""

    lookup: Callable[[str], bytes | None]

    def resolve(self, name: str) -> bytes | None:
        return self.lookup(name)

    @staticmethod
    def empty() -> "AssetResolver":
        return AssetResolver(lambda name: None)

    @staticmethod
    def from_mapping(mapping: dict[str, bytes]) -> "AssetResolver":
        return AssetResolver(lambda name: mapping.get(name))

    @staticmethod
    def from_directory(root) -> "AssetResolver":
        import os

        def lookup(name: str) -> bytes | None:
            parts = name.replace("\\", "/").split("/")
            if ".." in parts or name.startswith(("/", "\\")):
                return None
            path = os.path.join(root, *parts)
            if not os.path.isfile(path):
                return None
            with open(path, "rb") as f:
                return f.read()

        return AssetResolver(lookup)


@dataclass
class InterpreterSession:
    """One evaluation context: globals, console sink, builtin registry,
    asset resolver, and the scene builder mutated by graphics builtins."""

    globals: Environment
    console: list[str]
    builtins: dict[str, BuiltinFunction]
    asset_resolver: AssetResolver
    scene_builder: object
    max_call_depth: int = MAX_CALL_DEPTH
    step_budget: int = DEFAULT_STEP_BUDGET
    steps: int = 0
    depth: int = 0

    @staticmethod
    def create(
        asset_resolver: AssetResolver | None = None,
        *,
        max_call_depth: int = MAX_CALL_DEPTH,
        step_budget: int = DEFAULT_STEP_BUDGET,
    ) -> "InterpreterSession":
        from .builtins import register_graphics_builtins
        from .scene import SceneBuilder

        session = InterpreterSession(
            globals=Environment(),
            console=[],
            builtins={},
            asset_resolver=asset_resolver or AssetResolver.empty(),
            scene_builder=SceneBuilder(),
            max_call_depth=max_call_depth,
            step_budget=step_budget,
        )
        session.register(BuiltinFunction("print", -1, _builtin_print))
        register_graphics_builtins(session)
        return session

    def register(self, builtin: BuiltinFunction) -> None:
        self.builtins[builtin.name] = builtin
        self.globals.declare(builtin.name, builtin)


@dataclass(frozen=True)
class EvalOutcome:
    scene: object
    console: list[str]


@dataclass(frozen=True)
class CallContext:
    """Passed to builtins so they can report errors at the call site."""

    session: InterpreterSession
    span: SourceSpan

    def error(self, message: str) -> LuaRuntimeError:
        return LuaRuntimeError(message, self.span)


def _builtin_print(ctx: CallContext, args: list) -> list:
    ctx.session.console.append("\t".join(tostring(a) for a in args))
    return []


class _Evaluator:
    def __init__(self, session: InterpreterSession):
        self.session = session

    # -- statements ----------------------------------------------------------

    def exec_chunk(self, chunk: Chunk, env: Environment) -> None:
        for stat in chunk.stats:
            self.exec_stat(stat, env)
        if chunk.last_stat is not None:
            self.tick(chunk.last_stat.span)
            raise _ReturnSignal([self.eval_expr(e, env) for e in chunk.last_stat.exprs])

    def tick(self, span: SourceSpan) -> None:
        self.session.steps += 1
        if self.session.steps > self.session.step_budget:
            raise LuaRuntimeError("execution budget exceeded", span)

    def exec_stat(self, stat, env: Environment) -> None:
        self.tick(stat.span)
        match stat:
            case S.LocalDecl(names, exprs, _):
                values = [self.eval_expr(e, env) for e in exprs]
                for i, name in enumerate(names):
                    env.declare(name, values[i] if i < len(values) else None)
            case S.Assign(targets, exprs, _):
                values = [self.eval_expr(e, env) for e in exprs]
                for i, target in enumerate(targets):
                    self.assign_target(target, values[i] if i < len(values) else None, env)
            case S.Call():
                self.eval_call(stat, env)
            case S.While(cond, body, _):
                while True:
                    self.tick(cond.span)
                    if not is_truthy(self.eval_expr(cond, env)):
                        break
                    try:
                        self.exec_chunk(body, Environment(env))
                    except _BreakSignal:
                        break
            case S.If(arms, else_body, _):
                for cond, body in arms:
                    if is_truthy(self.eval_expr(cond, env)):
                        self.exec_chunk(body, Environment(env))
                        return
                if else_body is not None:
                    self.exec_chunk(else_body, Environment(env))
            case S.NumericFor(name, start, stop, step, body, _):
                self.exec_numeric_for(stat, name, start, stop, step, body, env)
            case S.Repeat(body, cond, _):
                while True:
                    self.tick(cond.span)
                    # The condition can see locals from the body, so the body
                    # scope stays open until the condition is evaluated.
                    scope = Environment(env)
                    try:
                        self.exec_chunk(body, scope)
                    except _BreakSignal:
                        break
                    if is_truthy(self.eval_expr(cond, scope)):
                        break
            case S.FunctionDecl(name, params, body, is_local, _):
                fn = LuaFunction(name, params, body, env)
                if is_local:
                    env.declare(name, fn)
                else:
                    env.assign(name, fn)
            case S.Break(span):
                raise _BreakSignal()
            case _:
                raise LuaRuntimeError(f"cannot execute {type(stat).__name__}", stat.span)

    def exec_numeric_for(self, stat, name, start, stop, step, body, env: Environment) -> None:
        lo = self.require_number(self.eval_expr(start, env), start.span, "'for' initial value")
        hi = self.require_number(self.eval_expr(stop, env), stop.span, "'for' limit")
        inc = self.require_number(self.eval_expr(step, env), step.span, "'for' step")
        if inc == 0.0:
            raise LuaRuntimeError("'for' step is zero", step.span)
        i = lo
        while (i <= hi) if inc > 0 else (i >= hi):
            self.tick(stat.span)
            scope = Environment(env)
            scope.declare(name, i)
            try:
                self.exec_chunk(body, scope)
            except _BreakSignal:
                break
            i += inc

    def assign_target(self, target, value, env: Environment) -> None:
        match target:
            case S.Var(name, _):
                env.assign(name, value)
            case S.Field(base, name, span):
                table = self.eval_expr(base, env)
                if not isinstance(table, LuaTable):
                    raise LuaRuntimeError(f"attempt to index a {type_name(table)}", span)
                table.set(name, value)
            case S.Index(base, key, span):
                table = self.eval_expr(base, env)
                if not isinstance(table, LuaTable):
                    raise LuaRuntimeError(f"attempt to index a {type_name(table)}", span)
                k = self.eval_expr(key, env)
                if k is None:
                    raise LuaRuntimeError("table index is nil", key.span)
                table.set(k, value)

    # -- expressions -----------------------------------------------------------

    def eval_expr(self, expr, env: Environment):
        self.tick(expr.span)
        match expr:
            case S.Literal(value, _):
                return value
            case S.Var(name, _):
                return env.lookup(name)
            case S.BinOp("and", lhs, rhs, _):
                left = self.eval_expr(lhs, env)
                return self.eval_expr(rhs, env) if is_truthy(left) else left
            case S.BinOp("or", lhs, rhs, _):
                left = self.eval_expr(lhs, env)
                return left if is_truthy(left) else self.eval_expr(rhs, env)
            case S.BinOp(op, lhs, rhs, span):
                return self.binary_op(op, self.eval_expr(lhs, env), self.eval_expr(rhs, env), span)
            case S.UnOp(op, operand, span):
                return self.unary_op(op, self.eval_expr(operand, env), span)
            case S.Call():
                values = self.eval_call(expr, env)
                return values[0] if values else None
            case S.Field(base, name, span):
                table = self.eval_expr(base, env)
                if not isinstance(table, LuaTable):
                    raise LuaRuntimeError(f"attempt to index a {type_name(table)}", span)
                return table.get(name)
            case S.Index(base, key, span):
                table = self.eval_expr(base, env)
                if not isinstance(table, LuaTable):
                    raise LuaRuntimeError(f"attempt to index a {type_name(table)}", span)
                k = self.eval_expr(key, env)
                if k is None:
                    raise LuaRuntimeError("table index is nil", key.span)
                return table.get(k)
            case S.TableCtor(fields, span):
                table = LuaTable()
                array_next = 1
                for f in fields:
                    value = self.eval_expr(f.value, env)
                    if f.key is None:
                        table.set(float(array_next), value)
                        array_next += 1
                    elif isinstance(f.key, str):
                        table.set(f.key, value)
                    else:
                        k = self.eval_expr(f.key, env)
                        if k is None:
                            raise LuaRuntimeError("table index is nil", f.key.span)
                        table.set(k, value)
                return table
            case _:
                raise LuaRuntimeError(f"cannot evaluate {type(expr).__name__}", expr.span)

    def eval_call(self, call: S.Call, env: Environment) -> list:
        callee = self.eval_expr(call.callee, env)
        args = [self.eval_expr(a, env) for a in call.args]
        return call_value(callee, args, self.session, call.span)

    # -- operators ---------------------------------------------------------------

    def require_number(self, value, span: SourceSpan, what: str) -> float:
        num = _coerce_number(value)
        if num is None:
            raise LuaRuntimeError(f"{what} must be a number", span)
        return num

    def binary_op(self, op: str, a, b, span: SourceSpan):
        if op in ("+", "-", "*", "/", "%", "^"):
            return self.arith(op, a, b, span)
        if op in ("==", "~="):
            eq = values_equal(a, b)
            return eq if op == "==" else not eq
        if op in ("<", "<=", ">", ">="):
            return self.compare(op, a, b, span)
        if op == "..":
            return self.concat(a, b, span)
        if op in ("&", "|", "~", "<<", ">>"):
            return self.bitwise(op, a, b, span)
        raise LuaRuntimeError(f"unsupported operator '{op}'", span)

    def arith(self, op: str, a, b, span: SourceSpan) -> float:
        x = _coerce_number(a)
        if x is None:
            raise LuaRuntimeError(f"attempt to perform arithmetic on a {type_name(a)}", span)
        y = _coerce_number(b)
        if y is None:
            raise LuaRuntimeError(f"attempt to perform arithmetic on a {type_name(b)}", span)
        if op == "+":
            r = x + y
        elif op == "-":
            r = x - y
        elif op == "*":
            r = x * y
        elif op == "/":
            if y == 0.0:
                raise LuaRuntimeError("division by zero", span)
            r = x / y
        elif op == "%":
            if y == 0.0:
                raise LuaRuntimeError("modulo by zero", span)
            r = math.fmod(x, y)
            if r != 0.0 and (r < 0.0) != (y < 0.0):
                r += y
        else:
            try:
                r = x**y
            except OverflowError:
                raise LuaRuntimeError("arithmetic result is not finite", span) from None
            if isinstance(r, complex):
                raise LuaRuntimeError("arithmetic result is not finite", span)
        if not math.isfinite(r):
            raise LuaRuntimeError("arithmetic result is not finite", span)
        return r

    def compare(self, op: str, a, b, span: SourceSpan) -> bool:
        ta, tb = type_name(a), type_name(b)
        if ta != tb or ta not in ("number", "string"):
            raise LuaRuntimeError(f"attempt to compare {ta} with {tb}", span)
        if op == "<":
            return a < b
        if op == "<=":
            return a <= b
        if op == ">":
            return a > b
        return a >= b

    def concat(self, a, b, span: SourceSpan) -> str:
        parts = []
        for v in (a, b):
            if isinstance(v, str):
                parts.append(v)
            elif isinstance(v, float) and not isinstance(v, bool):
                parts.append(format_number(v))
            else:
                raise LuaRuntimeError(f"attempt to concatenate a {type_name(v)}", span)
        return parts[0] + parts[1]

    def to_int64(self, value, span: SourceSpan) -> int:
        num = _coerce_number(value)
        if num is None:
            raise LuaRuntimeError(
                f"attempt to perform bitwise operation on a {type_name(value)}", span
            )
        if not num.is_integer() or not (_INT64_MIN <= num <= _INT64_MAX):
            raise LuaRuntimeError("number has no integer representation", span)
        return int(num)

    @staticmethod
    def _wrap_int64(u: int) -> float:
        u &= _U64_MASK
        if u > _INT64_MAX:
            u -= 1 << 64
        return float(u)

    def bitwise(self, op: str, a, b, span: SourceSpan) -> float:
        x = self.to_int64(a, span) & _U64_MASK
        if op in ("<<", ">>"):
            n = self.to_int64(b, span)
            if op == ">>":
                n = -n
            if n <= -64 or n >= 64:
                return 0.0
            u = (x << n) if n >= 0 else (x >> -n)
            return self._wrap_int64(u)
        y = self.to_int64(b, span) & _U64_MASK
        if op == "&":
            return self._wrap_int64(x & y)
        if op == "|":
            return self._wrap_int64(x | y)
        return self._wrap_int64(x ^ y)

    def unary_op(self, op: str, v, span: SourceSpan):
        if op == "-":
            num = _coerce_number(v)
            if num is None:
                raise LuaRuntimeError(f"attempt to perform arithmetic on a {type_name(v)}", span)
            return -num
        if op == "not":
            return not is_truthy(v)
        if op == "#":
            if isinstance(v, str):
                return float(len(v))
            if isinstance(v, LuaTable):
                return float(v.length())
            raise LuaRuntimeError(f"attempt to get length of a {type_name(v)}", span)
        # unary '~' is bitwise not
        x = self.to_int64(v, span) & _U64_MASK
        return self._wrap_int64(x ^ _U64_MASK)


def call_value(callee, args: list, session: InterpreterSession, span: SourceSpan) -> list:
    """Invoke a closure or builtin with already-evaluated arguments."""
    if isinstance(callee, BuiltinFunction):
        ctx = CallContext(session, span)
        if callee.arity >= 0 and len(args) != callee.arity:
            raise LuaRuntimeError(
                f"{callee.name} expects {callee.arity} argument(s), got {len(args)}", span
            )
        return callee.fn(ctx, args)
    if isinstance(callee, LuaFunction):
        if session.depth >= session.max_call_depth:
            raise LuaRuntimeError("stack overflow", span)
        scope = Environment(callee.env)
        for i, param in enumerate(callee.params):
            scope.declare(param, args[i] if i < len(args) else None)
        session.depth += 1
        try:
            _Evaluator(session).exec_chunk(callee.body, scope)
        except _ReturnSignal as ret:
            return ret.values
        except _BreakSignal:
            raise LuaRuntimeError("break outside loop", span) from None
        finally:
            session.depth -= 1
        return []
    raise LuaRuntimeError(f"attempt to call a {type_name(callee)}", span)


def evaluate(chunk: Chunk, session: InterpreterSession) -> EvalOutcome:
    """Run a parsed chunk to completion and freeze the scene.

    Raises LuaRuntimeError; the session's console keeps any output printed
    before the error.
    """
    evaluator = _Evaluator(session)
    try:
        evaluator.exec_chunk(chunk, session.globals)
    except _ReturnSignal:
        pass  # top-level return ends the script
    except _BreakSignal:
        raise LuaRuntimeError("break outside loop", chunk.span) from None
    except RecursionError:
        raise LuaRuntimeError("stack overflow", chunk.span) from None
    scene = session.scene_builder.freeze()
    return EvalOutcome(scene=scene, console=session.console)
