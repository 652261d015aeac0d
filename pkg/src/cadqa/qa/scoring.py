"""Answer scoring: Correct / Partial / Wrong.

Numbers and points must land within the question's tolerance. Lists are
compared as multisets under tolerance via maximum bipartite matching:
a perfect matching is Correct, any non-empty matching is Partial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

CORRECT = "Correct"
PARTIAL = "Partial"
WRONG = "Wrong"

EXPECTED_KINDS = ("number", "count", "point", "list")


@dataclass(frozen=True)
class Expected:
    kind: str
    value: object = None  # number | [x,y,z] | list of those | int
    tolerance: float = 0.0

    def __post_init__(self):
        if self.kind not in EXPECTED_KINDS:
            raise ValueError(f"expected kind must be one of {EXPECTED_KINDS}")
        if self.tolerance < 0:
            raise ValueError("tolerance must be >= 0")

    @staticmethod
    def from_json(data: dict) -> "Expected":
        kind = data["type"]
        value = data.get("values") if kind == "list" else data.get("value")
        return Expected(kind=kind, value=value,
                        tolerance=float(data.get("tolerance", 0.0)))

    def to_json(self) -> dict:
        key = "values" if self.kind == "list" else "value"
        return {"type": self.kind, key: self.value, "tolerance": self.tolerance}


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _is_point(x) -> bool:
    return (isinstance(x, (list, tuple)) and len(x) == 3
            and all(_is_number(c) for c in x))


def _element_matches(a, b, tol: float) -> bool:
    if _is_number(a) and _is_number(b):
        return abs(a - b) <= tol
    if _is_point(a) and _is_point(b):
        dist = math.sqrt(sum((ai - bi) ** 2 for ai, bi in zip(a, b)))
        return dist <= tol
    return False


def _max_matching(answers: list, expecteds: list, tol: float) -> int:
    """Maximum bipartite matching size on the within-tolerance graph."""
    edges = [[j for j, e in enumerate(expecteds)
              if _element_matches(a, e, tol)] for a in answers]
    match_of_expected = [-1] * len(expecteds)

    def try_assign(i: int, seen: set) -> bool:
        for j in edges[i]:
            if j in seen:
                continue
            seen.add(j)
            if match_of_expected[j] < 0 or try_assign(match_of_expected[j], seen):
                match_of_expected[j] = i
                return True
        return False

    size = 0
    for i in range(len(answers)):
        if try_assign(i, set()):
            size += 1
    return size


def score_answer(answer, expected: Expected) -> tuple[str, str | None]:
    """(outcome, note); note explains incomparable or partial results."""
    if expected.kind == "number":
        if not _is_number(answer):
            return WRONG, f"expected a number, got {type(answer).__name__}"
        return (CORRECT if abs(answer - expected.value) <= expected.tolerance
                else WRONG), None

    if expected.kind == "count":
        if not _is_number(answer):
            return WRONG, f"expected a count, got {type(answer).__name__}"
        if abs(answer - round(answer)) > 1e-9:
            return WRONG, f"expected an integer count, got {answer}"
        return (CORRECT if int(round(answer)) == int(expected.value)
                else WRONG), None

    if expected.kind == "point":
        if not _is_point(answer):
            return WRONG, f"expected a point, got {type(answer).__name__}"
        ok = _element_matches(answer, list(expected.value), expected.tolerance)
        return (CORRECT if ok else WRONG), None

    # list: multiset equality => Correct, non-empty overlap => Partial
    if not isinstance(answer, (list, tuple)):
        return WRONG, f"expected a list, got {type(answer).__name__}"
    answers = list(answer)
    expecteds = list(expected.value)
    matched = _max_matching(answers, expecteds, expected.tolerance)
    if matched == len(answers) == len(expecteds):
        return CORRECT, None
    if matched >= 1:
        return PARTIAL, f"matched {matched}/{len(expecteds)} expected elements"
    return WRONG, None
