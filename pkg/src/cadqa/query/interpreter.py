"""Sandboxed evaluator for query programs.

Values carry units: every length-typed number is tagged "mm" (lengths are
canonicalized to millimeters at construction, so m(0.005) equals mm(5.0)
exactly). Bare numerals adopt the other operand's unit in arithmetic and
comparisons. Evaluation touches the outside world only through the
injected segmentation provider and is bounded by a wall-clock budget.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..errors import (
    CapabilityError,
    EvaluationTimeout,
    QueryTypeError,
    TooFewVertices,
    UnknownPropertyError,
)
from ..geometry import CadModel
from ..metrics import fit_cylinder, part_center, part_extents
from ..segment import (
    PartInstance,
    PipelineConfig,
    SegmentationProvider,
    filter_by_sides,
    segment_model,
)
from .ast import (
    Assign,
    BinOp,
    Call,
    Lambda,
    ListLit,
    Name,
    Neg,
    Num,
    Program,
    SidesList,
    Str,
)

DEFAULT_TIME_BUDGET_S = 120.0

LENGTH_UNIT = "mm"

# Real CAD concepts the interface knowingly does not provide. Asking for
# one is a capability gap, not a hallucination.
UNSUPPORTED_CAPABILITIES = {
    "normal": "surface normals are not supported",
    "surface_normal": "surface normals are not supported",
    "local_extents": "local-frame measurements are not supported",
    "local_center": "local-frame measurements are not supported",
    "orientation": "part orientation is not supported",
    "volume": "volume is not supported",
    "mass": "mass properties are not supported",
    "material": "material properties are not supported",
}


@dataclass(frozen=True)
class VNumber:
    value: float
    unit: str | None = None


@dataclass(frozen=True)
class VBool:
    value: bool


@dataclass(frozen=True)
class VString:
    value: str


@dataclass(frozen=True)
class VPoint:
    xyz: tuple[float, float, float]


@dataclass(frozen=True)
class VVector:
    xyz: tuple[float, float, float]


@dataclass(frozen=True)
class VPart:
    part: PartInstance


@dataclass(frozen=True)
class VList:
    items: tuple


@dataclass(frozen=True)
class VSides:
    sides: tuple[str, ...]


class _Absent:
    def __repr__(self):
        return "ABSENT"


ABSENT = _Absent()

Value = Any  # one of the V* classes above or ABSENT


def value_to_python(value: Value):
    """Plain-python projection used by scoring and report serialization."""
    if isinstance(value, VNumber):
        return value.value
    if isinstance(value, VBool):
        return value.value
    if isinstance(value, VString):
        return value.value
    if isinstance(value, (VPoint, VVector)):
        return list(value.xyz)
    if isinstance(value, VList):
        return [value_to_python(v) for v in value.items]
    if isinstance(value, VPart):
        return {"face_ids": sorted(value.part.face_ids)}
    if isinstance(value, VSides):
        return list(value.sides)
    if value is ABSENT:
        return None
    raise QueryTypeError(f"cannot serialize {type(value).__name__}")


def _summary(value: Value) -> str:
    if isinstance(value, VList):
        inner = ", ".join(_summary(v) for v in value.items[:4])
        more = "" if len(value.items) <= 4 else f", ... [{len(value.items)}]"
        return f"[{inner}{more}]"
    if isinstance(value, VNumber):
        return f"{value.value!r}{'' if value.unit is None else ' ' + value.unit}"
    if isinstance(value, VPart):
        return f"part{sorted(value.part.face_ids)}"
    if isinstance(value, (VPoint, VVector)):
        return f"({value.xyz[0]!r}, {value.xyz[1]!r}, {value.xyz[2]!r})"
    if isinstance(value, VString):
        return repr(value.value)
    if isinstance(value, VBool):
        return str(value.value).lower()
    if isinstance(value, VSides):
        return "sides" + str(list(value.sides))
    return repr(value)


@dataclass
class Answer:
    value: Value
    trace: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"value": value_to_python(self.value), "trace": self.trace}


class Evaluator:
    def __init__(self, model: CadModel, provider: SegmentationProvider,
                 cfg: PipelineConfig, time_budget_s: float = DEFAULT_TIME_BUDGET_S):
        self.model = model
        self.provider = provider
        self.cfg = cfg
        self.time_budget_s = time_budget_s
        self.trace: list[dict] = []
        self._deadline = 0.0

    # -- driver --------------------------------------------------------------

    def run(self, program: Program) -> Answer:
        self._deadline = time.monotonic() + self.time_budget_s
        env: dict[str, Value] = {}
        for stmt in program.statements:
            self._tick()
            value = self.eval(stmt.expr, env)
            env[stmt.name] = value
            self.trace.append({"stmt": stmt.name, "result": _summary(value)})
        return Answer(value=env["solution"], trace=self.trace)

    def _tick(self):
        if time.monotonic() > self._deadline:
            raise EvaluationTimeout(
                f"evaluation exceeded {self.time_budget_s:.0f}s budget")

    # -- expressions ----------------------------------------------------------

    def eval(self, node, env: dict[str, Value]) -> Value:
        if isinstance(node, Num):
            return VNumber(node.value)
        if isinstance(node, Str):
            return VString(node.value)
        if isinstance(node, Name):
            try:
                return env[node.ident]
            except KeyError:
                raise UnknownPropertyError(f"undefined name {node.ident!r}") from None
        if isinstance(node, SidesList):
            return VSides(node.sides)
        if isinstance(node, ListLit):
            return VList(tuple(self.eval(i, env) for i in node.items))
        if isinstance(node, Neg):
            operand = self.eval(node.operand, env)
            if not isinstance(operand, VNumber):
                raise QueryTypeError("unary minus needs a number")
            return VNumber(-operand.value, operand.unit)
        if isinstance(node, BinOp):
            return self._binop(node, env)
        if isinstance(node, Call):
            return self._call(node, env)
        if isinstance(node, Lambda):
            raise QueryTypeError("a lambda is only valid as a combinator argument")
        raise QueryTypeError(f"cannot evaluate {type(node).__name__}")

    def _binop(self, node: BinOp, env) -> Value:
        left = self.eval(node.left, env)
        right = self.eval(node.right, env)
        if not isinstance(left, VNumber) or not isinstance(right, VNumber):
            raise QueryTypeError(
                f"operator {node.op!r} needs numbers, got "
                f"{type(left).__name__} and {type(right).__name__}")
        lu, ru = left.unit, right.unit
        if lu is not None and ru is not None and lu != ru:
            raise QueryTypeError(f"mismatched units {lu!r} and {ru!r}")
        merged = lu or ru  # bare numerals adopt the other operand's unit
        a, b = left.value, right.value
        op = node.op
        if op == "+":
            return VNumber(a + b, merged)
        if op == "-":
            return VNumber(a - b, merged)
        if op == "*":
            if lu is not None and ru is not None:
                raise QueryTypeError("product of two lengths is not a length")
            return VNumber(a * b, merged)
        if op == "/":
            if b == 0.0:
                raise QueryTypeError("division by zero")
            if ru is not None and lu is None:
                raise QueryTypeError("cannot divide a bare number by a length")
            out_unit = None if (lu is not None and ru is not None) else merged
            return VNumber(a / b, out_unit)
        if op == "<":
            return VBool(a < b)
        if op == "<=":
            return VBool(a <= b)
        if op == ">":
            return VBool(a > b)
        if op == ">=":
            return VBool(a >= b)
        if op == "==":
            return VBool(a == b)
        if op == "!=":
            return VBool(a != b)
        raise QueryTypeError(f"unknown operator {op!r}")

    # -- calls ----------------------------------------------------------------

    def _call(self, node: Call, env) -> Value:
        self._tick()
        name = node.func
        if name in UNSUPPORTED_CAPABILITIES:
            raise CapabilityError(UNSUPPORTED_CAPABILITIES[name])
        handler = _BUILTINS.get(name)
        if handler is None:
            raise UnknownPropertyError(f"unknown function {name!r}")
        args = [a if isinstance(a, Lambda) else self.eval(a, env)
                for a in node.args]
        kwargs = {k: self.eval(v, env) for k, v in node.kwargs}
        if kwargs and name != "search":
            raise QueryTypeError(f"{name} takes no keyword arguments")
        result = handler(self, args, kwargs, env)
        self.trace.append({
            "call": name,
            "args": [("lambda" if isinstance(a, Lambda) else _summary(a)) for a in args],
            "result": _summary(result),
        })
        return result

    def _apply_lambda(self, lam: Lambda, value: Value, env) -> Value:
        inner = dict(env)
        inner[lam.param] = value
        return self.eval(lam.body, inner)


# -- builtin implementations ---------------------------------------------------

def _need(cond: bool, message: str):
    if not cond:
        raise QueryTypeError(message)


def _number(value: Value, what: str) -> VNumber:
    _need(isinstance(value, VNumber), f"{what} must be a number")
    return value


def _part(value: Value, what: str) -> PartInstance:
    _need(isinstance(value, VPart), f"{what} must be a part")
    return value.part


def _items(value: Value, what: str) -> tuple:
    _need(isinstance(value, VList), f"{what} must be a list")
    return value.items


def _lambda_arg(args, index: int, func: str) -> Lambda:
    _need(len(args) > index and isinstance(args[index], Lambda),
          f"{func} needs a lambda as argument {index + 1}")
    return args[index]


def _cylinder(ev: Evaluator, value: Value, prop: str):
    part = _part(value, prop)
    try:
        fit = fit_cylinder(ev.model, part)
    except TooFewVertices as exc:
        raise CapabilityError(f"{prop}: {exc}") from exc
    if fit is None:
        raise CapabilityError(f"{prop}: part is not cylindrical")
    return fit


def _bi_search(ev: Evaluator, args, kwargs, env):
    _need(len(args) == 1 and isinstance(args[0], VString),
          "search needs a prompt string")
    sides_val = kwargs.pop("sides", None)
    _need(not kwargs, f"search got unexpected keyword {sorted(kwargs)}")
    parts = segment_model(ev.model, args[0].value, ev.provider, ev.cfg)
    if sides_val is not None:
        if isinstance(sides_val, VSides):
            sides = list(sides_val.sides)
        elif isinstance(sides_val, VList):
            _need(all(isinstance(s, VString) for s in sides_val.items),
                  "sides must be side names")
            sides = [s.value for s in sides_val.items]
        else:
            raise QueryTypeError("sides must be a [top, bottom, ...] list")
        parts = filter_by_sides(ev.model, parts, sides, ev.cfg)
    ordered = sorted(parts, key=lambda p: min(p.face_ids))
    return VList(tuple(VPart(p) for p in ordered))


def _bi_model(ev: Evaluator, args, kwargs, env):
    _need(not args and not kwargs, "model() takes no arguments")
    whole = PartInstance(frozenset(range(ev.model.n_faces)))
    return VPart(whole)


def _bi_count(ev, args, kwargs, env):
    _need(len(args) == 1, "count needs one list")
    return VNumber(float(len(_items(args[0], "count argument"))))


def _bi_filter(ev: Evaluator, args, kwargs, env):
    _need(len(args) == 2, "filter(list, x -> predicate)")
    items = _items(args[0], "filter argument")
    lam = _lambda_arg(args, 1, "filter")
    kept = []
    for item in items:
        verdict = ev._apply_lambda(lam, item, env)
        _need(isinstance(verdict, VBool), "filter predicate must yield a boolean")
        if verdict.value:
            kept.append(item)
    return VList(tuple(kept))


def _bi_map(ev: Evaluator, args, kwargs, env):
    _need(len(args) == 2, "map(list, x -> expression)")
    items = _items(args[0], "map argument")
    lam = _lambda_arg(args, 1, "map")
    return VList(tuple(ev._apply_lambda(lam, i, env) for i in items))


def _bi_sort_by(ev: Evaluator, args, kwargs, env):
    _need(len(args) == 2, "sort_by(list, x -> key)")
    items = _items(args[0], "sort_by argument")
    lam = _lambda_arg(args, 1, "sort_by")
    keyed = []
    for item in items:
        key = ev._apply_lambda(lam, item, env)
        _need(isinstance(key, VNumber), "sort_by key must be a number")
        keyed.append((key.value, item))
    keyed.sort(key=lambda kv: kv[0])
    return VList(tuple(item for _, item in keyed))


def _fold_minmax(args, pick, name):
    if len(args) == 1 and isinstance(args[0], VList):
        values = args[0].items
    else:
        values = args
    _need(len(values) > 0, f"{name} of an empty list")
    _need(all(isinstance(v, VNumber) for v in values), f"{name} needs numbers")
    units = {v.unit for v in values if v.unit is not None}
    _need(len(units) <= 1, f"{name} over mismatched units")
    unit = units.pop() if units else None
    best = pick(values, key=lambda v: v.value)
    return VNumber(best.value, unit)


def _bi_min(ev, args, kwargs, env):
    return _fold_minmax(args, min, "min")


def _bi_max(ev, args, kwargs, env):
    return _fold_minmax(args, max, "max")


def _bi_abs(ev, args, kwargs, env):
    _need(len(args) == 1, "abs needs one number")
    n = _number(args[0], "abs argument")
    return VNumber(abs(n.value), n.unit)


def _bi_center(ev: Evaluator, args, kwargs, env):
    _need(len(args) == 1, "center needs one part")
    c = part_center(ev.model, _part(args[0], "center argument"))
    return VPoint(tuple(float(x) for x in c))


def _bi_extents(ev: Evaluator, args, kwargs, env):
    _need(len(args) == 1, "extents needs one part")
    e = part_extents(ev.model, _part(args[0], "extents argument"))
    return VVector(tuple(float(x) for x in e))


def _bi_half_extents(ev: Evaluator, args, kwargs, env):
    _need(len(args) == 1, "half_extents needs one part")
    e = part_extents(ev.model, _part(args[0], "half_extents argument"))
    return VVector(tuple(float(x) * 0.5 for x in e))


def _bi_radius(ev, args, kwargs, env):
    _need(len(args) == 1, "radius needs one part")
    return VNumber(_cylinder(ev, args[0], "radius").radius, LENGTH_UNIT)


def _bi_diameter(ev, args, kwargs, env):
    _need(len(args) == 1, "diameter needs one part")
    return VNumber(2.0 * _cylinder(ev, args[0], "diameter").radius, LENGTH_UNIT)


def _bi_depth(ev, args, kwargs, env):
    _need(len(args) == 1, "depth needs one part")
    return VNumber(_cylinder(ev, args[0], "depth").depth, LENGTH_UNIT)


def _bi_axis(ev, args, kwargs, env):
    _need(len(args) == 1, "axis needs one part")
    fit = _cylinder(ev, args[0], "axis")
    return VVector(tuple(float(x) for x in fit.axis))


def _bi_mm(ev, args, kwargs, env):
    _need(len(args) == 1, "mm needs one number")
    n = _number(args[0], "mm argument")
    _need(n.unit in (None, LENGTH_UNIT), "mm() expects a bare number")
    return VNumber(n.value, LENGTH_UNIT)


def _bi_m(ev, args, kwargs, env):
    _need(len(args) == 1, "m needs one number")
    n = _number(args[0], "m argument")
    _need(n.unit is None, "m() expects a bare number")
    return VNumber(n.value * 1000.0, LENGTH_UNIT)


def _bi_distance(ev, args, kwargs, env):
    _need(len(args) == 2, "distance needs two points")
    _need(all(isinstance(a, VPoint) for a in args), "distance needs two points")
    a = np.asarray(args[0].xyz)
    b = np.asarray(args[1].xyz)
    return VNumber(float(np.linalg.norm(a - b)), LENGTH_UNIT)


_BUILTINS = {
    "search": _bi_search,
    "model": _bi_model,
    "count": _bi_count,
    "filter": _bi_filter,
    "map": _bi_map,
    "sort_by": _bi_sort_by,
    "min": _bi_min,
    "max": _bi_max,
    "abs": _bi_abs,
    "center": _bi_center,
    "extents": _bi_extents,
    "half_extents": _bi_half_extents,
    "radius": _bi_radius,
    "diameter": _bi_diameter,
    "depth": _bi_depth,
    "axis": _bi_axis,
    "mm": _bi_mm,
    "m": _bi_m,
    "distance": _bi_distance,
}

BUILTIN_NAMES = tuple(sorted(_BUILTINS))


def evaluate(program: Program, model: CadModel, provider: SegmentationProvider,
             cfg: PipelineConfig,
             time_budget_s: float = DEFAULT_TIME_BUDGET_S) -> Answer:
    """Execute a parsed program; the bound ``solution`` becomes the Answer."""
    return Evaluator(model, provider, cfg, time_budget_s).run(program)
