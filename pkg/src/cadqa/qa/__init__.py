from .bench import (
    BenchQuestion,
    BenchReport,
    CATEGORIES,
    QuestionResult,
    answer_question,
    load_suite,
    run_benchmark,
    write_report,
)
from .endpoint import (
    ChatEndpointConfig,
    ask,
    completion_for,
    extract_last_code_block,
    replay_key,
)
from .prompt import (
    DEFAULT_EXAMPLES,
    PromptExample,
    PromptTemplate,
    build_prompt,
    default_template,
)
from .scoring import CORRECT, Expected, PARTIAL, WRONG, score_answer

__all__ = [
    "BenchQuestion",
    "BenchReport",
    "CATEGORIES",
    "QuestionResult",
    "answer_question",
    "load_suite",
    "run_benchmark",
    "write_report",
    "ChatEndpointConfig",
    "ask",
    "completion_for",
    "extract_last_code_block",
    "replay_key",
    "DEFAULT_EXAMPLES",
    "PromptExample",
    "PromptTemplate",
    "build_prompt",
    "default_template",
    "CORRECT",
    "Expected",
    "PARTIAL",
    "WRONG",
    "score_answer",
]
