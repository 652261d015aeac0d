"""Prompt assembly for the code-writing language model.

The template bundles the query-language API documentation, exactly three
in-context examples and the disambiguation instructions (full extents by
default, explicit unit conversion in code, step-by-step reasoning before
the final program).
"""

from __future__ import annotations

from dataclasses import dataclass, field

API_DOCUMENTATION = """\
You answer measurement questions about a CAD model by writing a short
program in the query language below. The model is a set of faces; parts
(holes, pins, pockets...) are retrieved by free-text search.

Grammar:
  let NAME = EXPRESSION;        bind an intermediate value
  solution = EXPRESSION;        bind the final answer (exactly once)
Expressions support numbers, strings, + - * /, comparisons, parentheses,
lists, and lambdas (x -> expression) as combinator arguments.

Functions:
  search("description")                 all matching parts
  search("description", sides=[top])    only parts visible from those sides
                                        (sides: top, bottom, left, right,
                                        front, back)
  model()                               the whole model as a single part
  count(list)                           number of elements
  map(list, x -> expr)                  transform each element
  filter(list, x -> predicate)          keep matching elements
  sort_by(list, x -> key)               ascending by numeric key
  min(list) / max(list) / abs(number)   numeric helpers
  center(part)                          bounding-box center, mm point
  extents(part)                         full axis-aligned lengths, mm
  half_extents(part)                    half of extents
  radius(part) / diameter(part)         cylindrical parts only, mm
  depth(part)                           extent along the part axis, mm
  axis(part)                            cylinder axis direction
  distance(point, point)                Euclidean distance, mm
  mm(x) / m(x)                          tag a number as millimeters/meters
All lengths returned by the API are in millimeters.
"""

INSTRUCTIONS = """\
Rules:
- Dimensions are full extents along the world axes. Use half_extents only
  when the question explicitly asks for half-extents (or half-width,
  half-depth, half-height).
- Convert units explicitly in the program; never convert in your head.
  Example: a value in meters is radius(h) / mm(1000.0).
- Reason step by step in prose first. Then output exactly one final fenced
  code block containing the complete program.
- The final answer must be assigned to the variable `solution`.
"""


@dataclass(frozen=True)
class PromptExample:
    question: str
    reasoning: str
    program: str


DEFAULT_EXAMPLES = (
    PromptExample(
        question="How many holes does the part have?",
        reasoning=(
            "The question asks for a count of all holes anywhere on the "
            "model, so I search without a side restriction and count the "
            "results."),
        program='let holes = search("hole");\nsolution = count(holes);',
    ),
    PromptExample(
        question="What is the radius of the largest hole, in meters?",
        reasoning=(
            "I retrieve every hole, map each to its radius in millimeters, "
            "take the maximum, and convert to meters explicitly in code by "
            "dividing by 1000 mm."),
        program=('let holes = search("hole");\n'
                 'let radii = map(holes, h -> radius(h));\n'
                 'solution = max(radii) / mm(1000.0);'),
    ),
    PromptExample(
        question="How many pins are visible from the right side?",
        reasoning=(
            "Visibility from a specific side is expressed with the sides "
            "argument of search, so I restrict the search to the right "
            "view and count."),
        program='let pins = search("pin", sides=[right]);\nsolution = count(pins);',
    ),
)


@dataclass(frozen=True)
class PromptTemplate:
    api_documentation: str = API_DOCUMENTATION
    examples: tuple[PromptExample, ...] = DEFAULT_EXAMPLES
    instructions: str = INSTRUCTIONS

    def __post_init__(self):
        if len(self.examples) != 3:
            raise ValueError("the template carries exactly 3 in-context examples")


def default_template() -> PromptTemplate:
    return PromptTemplate()


def build_prompt(question: str, template: PromptTemplate) -> str:
    """Deterministic concatenation; the question appears verbatim once."""
    blocks = [template.api_documentation, template.instructions, "Examples:"]
    for i, ex in enumerate(template.examples, start=1):
        blocks.append(
            f"Example {i}\n"
            f"Question: {ex.question}\n"
            f"Reasoning: {ex.reasoning}\n"
            f"```\n{ex.program}\n```")
    blocks.append(f"Now answer this question.\nQuestion: {question}")
    return "\n\n".join(blocks) + "\n"
