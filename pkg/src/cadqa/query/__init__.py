from .ast import Program, unparse
from .interpreter import (
    ABSENT,
    Answer,
    BUILTIN_NAMES,
    DEFAULT_TIME_BUDGET_S,
    VBool,
    VList,
    VNumber,
    VPart,
    VPoint,
    VString,
    VVector,
    evaluate,
    value_to_python,
)
from .parser import SIDE_NAMES, parse

__all__ = [
    "Program",
    "unparse",
    "ABSENT",
    "Answer",
    "BUILTIN_NAMES",
    "DEFAULT_TIME_BUDGET_S",
    "VBool",
    "VList",
    "VNumber",
    "VPart",
    "VPoint",
    "VString",
    "VVector",
    "evaluate",
    "value_to_python",
    "SIDE_NAMES",
    "parse",
]
