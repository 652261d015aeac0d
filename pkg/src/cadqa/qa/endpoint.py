"""Chat endpoint access: live JSON chat-completion calls or replay fixtures.

Replay mode reads recorded completions from ``<replay_dir>/<key>.txt``
where the key is the question hash (sha256, first 16 hex digits); it never
touches the network. The DSL program is the last fenced code block of the
completion, since chain-of-thought output often contains illustrative
snippets earlier.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import threading
import time
from dataclasses import dataclass
from pathlib import Path

from ..errors import EndpointError, NoCodeBlock
from .prompt import PromptTemplate, build_prompt

DEFAULT_KEY_ENV = "CADQUERY_LLM_KEY"

_CODE_BLOCK_RE = re.compile(r"```[^\n`]*\n(.*?)```", re.DOTALL)


class _RateLimiter:
    """Minimum spacing between live calls, shared across worker threads."""

    def __init__(self):
        self._lock = threading.Lock()
        self._next_allowed = 0.0

    def wait(self, calls_per_s: float) -> None:
        if calls_per_s <= 0:
            return
        interval = 1.0 / calls_per_s
        with self._lock:
            now = time.monotonic()
            delay = self._next_allowed - now
            self._next_allowed = max(now, self._next_allowed) + interval
        if delay > 0:
            time.sleep(delay)


_LIMITER = _RateLimiter()


@dataclass
class ChatEndpointConfig:
    mode: str = "replay"  # "live" | "replay"
    base_url: str = ""
    model_name: str = ""
    api_key_env_var: str = DEFAULT_KEY_ENV
    temperature: float = 0.0
    max_tokens: int = 2048
    timeout_s: float = 120.0
    rate_limit_per_s: float = 0.0  # 0 disables throttling
    replay_dir: str | None = None

    def __post_init__(self):
        if self.mode not in ("live", "replay"):
            raise ValueError("mode must be 'live' or 'replay'")
        if self.mode == "replay" and not self.replay_dir:
            raise ValueError("replay mode needs replay_dir")
        if self.mode == "live" and not self.base_url:
            raise ValueError("live mode needs base_url")

    @staticmethod
    def from_json(path: str | Path) -> "ChatEndpointConfig":
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        return ChatEndpointConfig(**data)


def replay_key(question: str) -> str:
    return hashlib.sha256(question.encode("utf-8")).hexdigest()[:16]


def extract_last_code_block(completion: str) -> str:
    blocks = _CODE_BLOCK_RE.findall(completion)
    if not blocks:
        raise NoCodeBlock("completion contains no fenced code block")
    return blocks[-1].strip()


def _chat_url(base_url: str) -> str:
    base = base_url.rstrip("/")
    if base.endswith("/chat/completions"):
        return base
    return base + "/chat/completions"


def _live_completion(prompt: str, endpoint: ChatEndpointConfig) -> str:
    import requests

    _LIMITER.wait(endpoint.rate_limit_per_s)
    headers = {"Content-Type": "application/json"}
    key = os.environ.get(endpoint.api_key_env_var, "")
    if key:
        headers["Authorization"] = f"Bearer {key}"
    payload = {
        "model": endpoint.model_name,
        "messages": [{"role": "user", "content": prompt}],
        "temperature": endpoint.temperature,
        "max_tokens": endpoint.max_tokens,
    }
    try:
        resp = requests.post(_chat_url(endpoint.base_url), json=payload,
                             headers=headers, timeout=endpoint.timeout_s)
        resp.raise_for_status()
        body = resp.json()
        return body["choices"][0]["message"]["content"]
    except Exception as exc:
        raise EndpointError(f"chat endpoint failed: {exc}") from exc


def completion_for(question: str, endpoint: ChatEndpointConfig,
                   template: PromptTemplate) -> str:
    if endpoint.mode == "replay":
        path = Path(endpoint.replay_dir) / f"{replay_key(question)}.txt"
        if not path.exists():
            raise EndpointError(f"no replay fixture for question (expected {path})")
        return path.read_text(encoding="utf-8")
    prompt = build_prompt(question, template)
    return _live_completion(prompt, endpoint)


def ask(question: str, endpoint: ChatEndpointConfig,
        template: PromptTemplate) -> str:
    """Question -> DSL source text (last code block of the completion)."""
    return extract_last_code_block(completion_for(question, endpoint, template))
