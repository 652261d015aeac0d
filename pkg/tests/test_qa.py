from __future__ import annotations

import json
from pathlib import Path

import pytest

from cadqa.errors import EndpointError, NoCodeBlock, SuiteError
from cadqa.qa import (
    BenchQuestion,
    ChatEndpointConfig,
    Expected,
    PromptExample,
    PromptTemplate,
    answer_question,
    ask,
    build_prompt,
    default_template,
    extract_last_code_block,
    load_suite,
    replay_key,
    run_benchmark,
    score_answer,
    write_report,
)
from cadqa.segment import OracleProvider


def write_replay(directory: Path, question: str, completion: str) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    (directory / f"{replay_key(question)}.txt").write_text(completion,
                                                           encoding="utf-8")


def replay_endpoint(directory: Path) -> ChatEndpointConfig:
    return ChatEndpointConfig(mode="replay", replay_dir=str(directory))


class TestPrompt:
    def test_contains_all_three_examples(self):
        template = default_template()
        prompt = build_prompt("How many slots?", template)
        for ex in template.examples:
            assert ex.program in prompt
            assert ex.question in prompt

    def test_question_verbatim_once(self):
        question = 'Find the "large" hole\'s radius?'
        prompt = build_prompt(question, default_template())
        assert prompt.count(question) == 1

    def test_deterministic(self):
        a = build_prompt("q?", default_template())
        b = build_prompt("q?", default_template())
        assert a == b

    def test_exactly_three_examples_enforced(self):
        ex = PromptExample("q", "r", "solution = 1;")
        with pytest.raises(ValueError):
            PromptTemplate(examples=(ex, ex))

    def test_disambiguation_rules_present(self):
        prompt = build_prompt("q?", default_template())
        assert "full extents" in prompt
        assert "solution" in prompt
        assert "Convert units explicitly" in prompt


class TestEndpoint:
    def test_replay_returns_last_block(self, tmp_path):
        completion = (
            "Reasoning first.\n```\nsolution = 1;\n```\n"
            "But on reflection:\n```\nsolution = 2;\n```\n")
        write_replay(tmp_path, "Q1", completion)
        source = ask("Q1", replay_endpoint(tmp_path), default_template())
        assert source == "solution = 2;"

    def test_no_code_block(self, tmp_path):
        write_replay(tmp_path, "Q2", "Just prose, no program.")
        with pytest.raises(NoCodeBlock):
            ask("Q2", replay_endpoint(tmp_path), default_template())

    def test_replay_determinism(self, tmp_path):
        write_replay(tmp_path, "Q3", "```\nsolution = 42;\n```")
        endpoint = replay_endpoint(tmp_path)
        assert ask("Q3", endpoint, default_template()) \
            == ask("Q3", endpoint, default_template())

    def test_missing_fixture(self, tmp_path):
        with pytest.raises(EndpointError):
            ask("unknown", replay_endpoint(tmp_path), default_template())

    def test_language_tagged_fence(self):
        text = "intro\n```python\nsolution = 3;\n```\ntail"
        assert extract_last_code_block(text) == "solution = 3;"

    def test_config_validation(self):
        with pytest.raises(ValueError):
            ChatEndpointConfig(mode="replay", replay_dir=None)
        with pytest.raises(ValueError):
            ChatEndpointConfig(mode="live", base_url="")

    def test_rate_limiter_spacing(self):
        import time
        from cadqa.qa.endpoint import _RateLimiter
        limiter = _RateLimiter()
        start = time.monotonic()
        for _ in range(3):
            limiter.wait(50.0)  # 20 ms spacing
        elapsed = time.monotonic() - start
        assert elapsed >= 0.039  # second and third calls waited
        limiter.wait(0.0)  # disabled: returns immediately


class TestScoring:
    def test_number_within_tolerance(self):
        assert score_answer(5.001, Expected("number", 5.0, 0.01))[0] == "Correct"
        assert score_answer(5.02, Expected("number", 5.0, 0.01))[0] == "Wrong"

    def test_count_exact(self):
        assert score_answer(4.0, Expected("count", 4))[0] == "Correct"
        assert score_answer(3.0, Expected("count", 4))[0] == "Wrong"
        assert score_answer(3.5, Expected("count", 4))[0] == "Wrong"

    def test_point_tolerance(self):
        exp = Expected("point", [1.0, 2.0, 3.0], 0.01)
        assert score_answer([1.0, 2.0, 3.005], exp)[0] == "Correct"
        assert score_answer([1.0, 2.0, 3.02], exp)[0] == "Wrong"

    def test_list_multiset_partial(self):
        exp = Expected("list", [5.0, 8.0, 8.0], 0.01)
        assert score_answer([5.0, 8.0, 8.0], exp)[0] == "Correct"
        assert score_answer([8.0, 5.0, 8.0], exp)[0] == "Correct"
        outcome, note = score_answer([5.0, 8.0], exp)
        assert outcome == "Partial" and "2/3" in note
        assert score_answer([1.0, 2.0], exp)[0] == "Wrong"

    def test_list_duplicates_not_double_matched(self):
        exp = Expected("list", [5.0, 8.0, 8.0], 0.01)
        assert score_answer([5.0, 5.0, 5.0], exp)[0] == "Partial"

    def test_list_of_points(self):
        exp = Expected("list", [[0, 0, 0], [1, 1, 1]], 0.1)
        assert score_answer([[1.0, 1.0, 1.05], [0.0, 0.0, 0.0]], exp)[0] == "Correct"

    def test_incomparable(self):
        outcome, note = score_answer({"face_ids": [1]}, Expected("number", 5.0, 0.1))
        assert outcome == "Wrong"
        assert "expected a number" in note


def _mini_suite(fixture_dir: Path, tmp_path: Path) -> Path:
    programs = tmp_path / "programs"
    programs.mkdir(exist_ok=True)
    (programs / "count.cadq").write_text(
        'solution = count(search("hole"));', encoding="utf-8")
    (programs / "radius.cadq").write_text(
        'solution = min(map(search("hole"), h -> radius(h)));', encoding="utf-8")
    suite = [
        {"id": "q1", "model": str(fixture_dir / "plate4.obj"),
         "question": "How many holes does the plate have?",
         "expected": {"type": "count", "value": 4},
         "reference_program": str(programs / "count.cadq")},
        {"id": "q2", "model": str(fixture_dir / "plate4.obj"),
         "question": "What is the radius of the smallest hole?",
         "expected": {"type": "number", "value": 5.0, "tolerance": 0.05},
         "reference_program": str(programs / "radius.cadq")},
    ]
    path = tmp_path / "suite.json"
    path.write_text(json.dumps(suite), encoding="utf-8")
    return path


class TestAnswerQuestion:
    def test_golden_program(self, plate_model, test_cfg, tmp_path):
        program = tmp_path / "p.cadq"
        program.write_text('solution = count(search("hole"));', encoding="utf-8")
        answer, category, note = answer_question(
            "How many holes?", plate_model, OracleProvider(plate_model),
            test_cfg, reference_program=str(program))
        assert category is None and note is None
        from cadqa.query import value_to_python
        assert value_to_python(answer.value) == 4.0

    def test_syntax_category(self, plate_model, test_cfg, tmp_path):
        write_replay(tmp_path, "Qs", "```\nsolution = = 1;\n```")
        answer, category, _ = answer_question(
            "Qs", plate_model, OracleProvider(plate_model), test_cfg,
            endpoint=replay_endpoint(tmp_path))
        assert answer is None and category == "Syntax"

    def test_no_code_block_is_syntax(self, plate_model, test_cfg, tmp_path):
        write_replay(tmp_path, "Qn", "no program, sorry")
        _, category, _ = answer_question(
            "Qn", plate_model, OracleProvider(plate_model), test_cfg,
            endpoint=replay_endpoint(tmp_path))
        assert category == "Syntax"

    def test_reasoning_category(self, plate_model, test_cfg, tmp_path):
        write_replay(tmp_path, "Qr", "```\nsolution = perimeter(model());\n```")
        _, category, _ = answer_question(
            "Qr", plate_model, OracleProvider(plate_model), test_cfg,
            endpoint=replay_endpoint(tmp_path))
        assert category == "Reasoning"

    def test_cad_interface_category(self, plate_model, test_cfg, tmp_path):
        write_replay(tmp_path, "Qc", "```\nsolution = normal(model());\n```")
        _, category, _ = answer_question(
            "Qc", plate_model, OracleProvider(plate_model), test_cfg,
            endpoint=replay_endpoint(tmp_path))
        assert category == "CAD-Interface"


class TestRunBenchmark:
    def test_golden_mode_all_correct(self, fixture_dir, test_cfg, tmp_path):
        suite = load_suite(_mini_suite(fixture_dir, tmp_path))
        report = run_benchmark(suite, "golden", "oracle", test_cfg)
        agg = report.aggregates
        assert agg["Correct"] == 2 and agg["Wrong"] == 0
        assert all(agg[c] == 0 for c in ("Syntax", "Reasoning", "Masks",
                                         "CAD-Interface"))

    def test_corrupted_expected_is_wrong_masks(self, fixture_dir, test_cfg,
                                               tmp_path):
        path = _mini_suite(fixture_dir, tmp_path)
        data = json.loads(path.read_text())
        data[0]["expected"]["value"] = 17
        path.write_text(json.dumps(data))
        report = run_benchmark(load_suite(path), "golden", "oracle", test_cfg)
        agg = report.aggregates
        assert agg["Correct"] == 1 and agg["Wrong"] == 1
        assert agg["Masks"] == 1
        bad = [r for r in report.results if r.outcome == "Wrong"][0]
        assert bad.category == "Masks"

    def test_missing_model_is_suite_error(self, fixture_dir, test_cfg, tmp_path):
        path = _mini_suite(fixture_dir, tmp_path)
        data = json.loads(path.read_text())
        data[1]["model"] = str(fixture_dir / "missing.obj")
        path.write_text(json.dumps(data))
        with pytest.raises(SuiteError):
            load_suite(path)

    def test_replay_mode_mixed_categories(self, fixture_dir, test_cfg, tmp_path):
        replay = tmp_path / "replay"
        questions = [
            ("How many holes does the plate have?",
             '```\nsolution = count(search("hole"));\n```',
             {"type": "count", "value": 4}),
            ("Bad syntax?", "```\nsolution = (;\n```",
             {"type": "count", "value": 1}),
            ("Unknown api?", "```\nsolution = perimeter(model());\n```",
             {"type": "count", "value": 1}),
            ("Unsupported?", "```\nsolution = normal(model());\n```",
             {"type": "count", "value": 1}),
        ]
        suite_data = []
        for i, (q, completion, expected) in enumerate(questions):
            write_replay(replay, q, completion)
            suite_data.append({
                "id": f"r{i}", "model": str(fixture_dir / "plate4.obj"),
                "question": q, "expected": expected,
            })
        suite_path = tmp_path / "replay_suite.json"
        suite_path.write_text(json.dumps(suite_data))
        report = run_benchmark(load_suite(suite_path), "replay", "oracle",
                               test_cfg, endpoint=replay_endpoint(replay))
        by_id = {r.id: r for r in report.results}
        assert by_id["r0"].outcome == "Correct" and by_id["r0"].category is None
        assert by_id["r1"].category == "Syntax"
        assert by_id["r2"].category == "Reasoning"
        assert by_id["r3"].category == "CAD-Interface"
        report.validate()

    def test_replay_missing_fixture_is_suite_error(self, fixture_dir, test_cfg,
                                                   tmp_path):
        suite_path = _mini_suite(fixture_dir, tmp_path)
        with pytest.raises(SuiteError):
            run_benchmark(load_suite(suite_path), "replay", "oracle",
                          test_cfg, endpoint=replay_endpoint(tmp_path / "empty"))

    def test_report_text_and_json(self, fixture_dir, test_cfg, tmp_path):
        suite = load_suite(_mini_suite(fixture_dir, tmp_path))
        report = run_benchmark(suite, "golden", "oracle", test_cfg)
        json_path, text_path = write_report(report, tmp_path / "out")
        data = json.loads(json_path.read_text())
        assert data["aggregates"]["Correct"] == 2
        assert data["aggregates"]["total"] == 2
        text = text_path.read_text()
        for row in ("Correct", "Partial", "Wrong", "Syntax", "Reasoning",
                    "Masks", "CAD-Interface"):
            assert row in text

    def test_aggregates_equal_row_sums(self, fixture_dir, test_cfg, tmp_path):
        suite = load_suite(_mini_suite(fixture_dir, tmp_path))
        report = run_benchmark(suite, "golden", "oracle", test_cfg)
        agg = report.aggregates
        assert agg["total"] == len(report.results)
        assert agg["Correct"] + agg["Partial"] + agg["Wrong"] == agg["total"]

    def test_duplicate_ids_rejected(self, fixture_dir, tmp_path):
        path = _mini_suite(fixture_dir, tmp_path)
        data = json.loads(path.read_text())
        data[1]["id"] = data[0]["id"]
        path.write_text(json.dumps(data))
        with pytest.raises(SuiteError):
            load_suite(path)

    def test_golden_and_replay_are_hermetic(self, fixture_dir, test_cfg,
                                            tmp_path, monkeypatch):
        import socket

        def deny(*args, **kwargs):
            raise AssertionError("network access in a hermetic benchmark mode")

        suite = load_suite(_mini_suite(fixture_dir, tmp_path))
        replay = tmp_path / "hermetic_replay"
        for q in suite:
            write_replay(replay, q.question,
                         f"```\n{Path(q.reference_program).read_text()}\n```")
        monkeypatch.setattr(socket, "socket", deny)
        monkeypatch.setattr(socket, "create_connection", deny)
        golden = run_benchmark(suite, "golden", "oracle", test_cfg)
        replayed = run_benchmark(suite, "replay", "oracle", test_cfg,
                                 endpoint=replay_endpoint(replay))
        assert golden.aggregates["Correct"] == 2
        assert replayed.aggregates["Correct"] == 2

    def test_workers_parallel_same_outcomes(self, fixture_dir, test_cfg, tmp_path):
        suite = load_suite(_mini_suite(fixture_dir, tmp_path))
        serial = run_benchmark(suite, "golden", "oracle", test_cfg, workers=1)
        threaded = run_benchmark(suite, "golden", "oracle", test_cfg, workers=2)
        assert [r.outcome for r in serial.results] \
            == [r.outcome for r in threaded.results]
