"""Benchmark harness: suite loading, per-question execution, reports.

Failure stages map to the error taxonomy: parse failures are Syntax,
type/runtime failures are Reasoning, unsupported capabilities are
CAD-Interface, provider failures are Masks. An answer that executes but
scores Wrong or Partial is attributed to Masks by the scorer, since the
program itself was sound.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import (
    CadqaError,
    CapabilityError,
    EvaluationTimeout,
    NoCodeBlock,
    ProviderUnavailable,
    QuerySyntaxError,
    QueryTypeError,
    SuiteError,
    UnknownPropertyError,
)
from ..geometry import CadModel, load_model
from ..query import Answer, evaluate, parse, value_to_python
from ..query.interpreter import DEFAULT_TIME_BUDGET_S
from ..segment import PipelineConfig, resolve_provider
from .endpoint import ChatEndpointConfig, ask, replay_key
from .prompt import PromptTemplate, default_template
from .scoring import CORRECT, Expected, score_answer

CATEGORIES = ("Syntax", "Reasoning", "Masks", "CAD-Interface")
MODES = ("golden", "replay", "live")


@dataclass
class BenchQuestion:
    id: str
    model_path: str
    question: str
    expected: Expected
    reference_program: str | None = None

    @staticmethod
    def from_json(data: dict, base_dir: Path) -> "BenchQuestion":
        try:
            ref = data.get("reference_program")
            return BenchQuestion(
                id=str(data["id"]),
                model_path=str(base_dir / data["model"]),
                question=str(data["question"]),
                expected=Expected.from_json(data["expected"]),
                reference_program=None if ref is None else str(base_dir / ref),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SuiteError(f"malformed question {data.get('id')!r}: {exc}") from exc


@dataclass
class QuestionResult:
    id: str
    outcome: str  # Correct | Partial | Wrong
    category: str | None  # None iff Correct
    answer: object = None
    note: str | None = None
    seconds: float = 0.0

    def to_json(self) -> dict:
        return {
            "id": self.id, "outcome": self.outcome, "category": self.category,
            "answer": self.answer, "note": self.note, "seconds": self.seconds,
        }


@dataclass
class BenchReport:
    mode: str
    provider: str
    results: list[QuestionResult]
    total_seconds: float = 0.0

    @property
    def aggregates(self) -> dict:
        agg = {"total": len(self.results), "Correct": 0, "Partial": 0, "Wrong": 0}
        agg.update({c: 0 for c in CATEGORIES})
        for r in self.results:
            agg[r.outcome] += 1
            if r.category is not None:
                agg[r.category] += 1
        return agg

    def validate(self) -> None:
        for r in self.results:
            correct = r.outcome == CORRECT
            if correct != (r.category is None):
                raise AssertionError(
                    f"{r.id}: category {r.category!r} vs outcome {r.outcome!r}")
            if r.category is not None and r.category not in CATEGORIES:
                raise AssertionError(f"{r.id}: unknown category {r.category!r}")
        agg = self.aggregates
        assert agg["Correct"] + agg["Partial"] + agg["Wrong"] == agg["total"]

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "provider": self.provider,
            "aggregates": self.aggregates,
            "results": [r.to_json() for r in self.results],
            "timing": {
                "total_seconds": self.total_seconds,
                "per_question": {r.id: r.seconds for r in self.results},
            },
        }

    def to_text(self) -> str:
        agg = self.aggregates
        lines = [
            f"Benchmark ({self.mode} mode, provider {self.provider}): "
            f"{agg['total']} questions",
            f"{'Correct':<16}{agg['Correct']:>6}",
            f"{'Partial':<16}{agg['Partial']:>6}",
            f"{'Wrong':<16}{agg['Wrong']:>6}",
        ]
        for cat in CATEGORIES:
            lines.append(f"  {cat:<14}{agg[cat]:>6}")
        return "\n".join(lines)


def load_suite(path: str | Path) -> list[BenchQuestion]:
    """Parse and validate a suite file; all model files must resolve."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise SuiteError(f"cannot read suite {path}: {exc}") from exc
    if not isinstance(data, list) or not data:
        raise SuiteError(f"{path}: suite must be a non-empty JSON array")
    questions = [BenchQuestion.from_json(item, path.parent) for item in data]
    seen = set()
    for q in questions:
        if q.id in seen:
            raise SuiteError(f"duplicate question id {q.id!r}")
        seen.add(q.id)
        if not Path(q.model_path).exists():
            raise SuiteError(f"{q.id}: model file missing: {q.model_path}")
    return questions


_FAILURE_CATEGORY = (
    (QuerySyntaxError, "Syntax"),
    (NoCodeBlock, "Syntax"),
    (CapabilityError, "CAD-Interface"),
    (EvaluationTimeout, "Reasoning"),
    (QueryTypeError, "Reasoning"),
    (UnknownPropertyError, "Reasoning"),
    (ProviderUnavailable, "Masks"),
)


def answer_question(question: str, model: CadModel, provider, cfg: PipelineConfig,
                    endpoint: ChatEndpointConfig | None = None,
                    template: PromptTemplate | None = None,
                    reference_program: str | None = None,
                    time_budget_s: float = DEFAULT_TIME_BUDGET_S,
                    ) -> tuple[Answer | None, str | None, str | None]:
    """(answer, failure category, error note); never raises for stage failures.

    EndpointError still propagates: a dead endpoint is infrastructure, not
    an answer-quality category.
    """
    try:
        if reference_program is not None:
            source = Path(reference_program).read_text(encoding="utf-8")
        else:
            source = ask(question, endpoint, template or default_template())
        program = parse(source)
        answer = evaluate(program, model, provider, cfg, time_budget_s)
        return answer, None, None
    except tuple(exc for exc, _ in _FAILURE_CATEGORY) as exc:
        for exc_type, category in _FAILURE_CATEGORY:
            if isinstance(exc, exc_type):
                return None, category, str(exc)
        raise AssertionError("unreachable")
    except CadqaError as exc:
        return None, "Reasoning", f"{type(exc).__name__}: {exc}"


def run_benchmark(suite: list[BenchQuestion], mode: str, provider_spec: str,
                  cfg: PipelineConfig,
                  endpoint: ChatEndpointConfig | None = None,
                  template: PromptTemplate | None = None,
                  workers: int = 1,
                  time_budget_s: float = DEFAULT_TIME_BUDGET_S) -> BenchReport:
    """Execute a suite with per-question isolation and score the answers."""
    if mode not in MODES:
        raise SuiteError(f"mode must be one of {MODES}")
    if mode == "golden":
        missing = [q.id for q in suite if not q.reference_program
                   or not Path(q.reference_program).exists()]
        if missing:
            raise SuiteError(f"golden mode needs reference programs: {missing}")
    if mode == "replay":
        if endpoint is None or endpoint.mode != "replay":
            raise SuiteError("replay mode needs a replay endpoint config")
        absent = [q.id for q in suite
                  if not (Path(endpoint.replay_dir) / f"{replay_key(q.question)}.txt").exists()]
        if absent:
            raise SuiteError(f"missing replay fixtures for: {absent}")
    if mode == "live" and (endpoint is None or endpoint.mode != "live"):
        raise SuiteError("live mode needs a live endpoint config")

    models: dict[str, CadModel] = {}

    def model_for(path: str) -> CadModel:
        if path not in models:
            models[path] = load_model(path)
        return models[path]

    def run_one(q: BenchQuestion) -> QuestionResult:
        start = time.perf_counter()
        model = model_for(q.model_path)
        provider = resolve_provider(provider_spec, model)
        reference = q.reference_program if mode == "golden" else None
        answer, category, note = answer_question(
            q.question, model, provider, cfg, endpoint=endpoint,
            template=template, reference_program=reference,
            time_budget_s=time_budget_s)
        elapsed = time.perf_counter() - start
        if answer is None:
            return QuestionResult(id=q.id, outcome="Wrong", category=category,
                                  note=note, seconds=elapsed)
        value = value_to_python(answer.value)
        outcome, score_note = score_answer(value, q.expected)
        # Executed-but-wrong means segmentation let the program down.
        category = None if outcome == CORRECT else "Masks"
        return QuestionResult(id=q.id, outcome=outcome, category=category,
                              answer=value, note=score_note, seconds=elapsed)

    start = time.perf_counter()
    if workers <= 1:
        results = [run_one(q) for q in suite]
    else:
        # Model loads are racy only on first touch; warm them serially.
        for q in suite:
            model_for(q.model_path)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_one, suite))
    report = BenchReport(mode=mode, provider=provider_spec, results=results,
                         total_seconds=time.perf_counter() - start)
    report.validate()
    return report


def write_report(report: BenchReport, out_dir: str | Path) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / "report.json"
    text_path = out_dir / "report.txt"
    json_path.write_text(json.dumps(report.to_json(), indent=1), encoding="utf-8")
    text_path.write_text(report.to_text() + "\n", encoding="utf-8")
    return json_path, text_path
