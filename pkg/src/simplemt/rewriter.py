"""Prompt construction and pluggable rewriting backends.

Every prompt variant renders the same line skeleton: one instruction line,
an optional source-language line, an optional machine-translation line (with
target words wrapped in <edit> tags when the variant uses them), and a
terminal cue line the model completes after.
"""

from __future__ import annotations

import enum
import logging
import os
import re
import time
from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

import httpx

from .textproc import EDIT_TAG, strip_tags, tag_words

log = logging.getLogger(__name__)

SOURCE_LINE_PREFIX = "### source language sentence: "
MT_LINE_PREFIX = "### machine-translation: "
HISTORY_LINE_PREFIX = "### previous simplification: "

_TAGGED = re.compile(re.escape(EDIT_TAG) + "(.*?)" + re.escape(EDIT_TAG))


class PromptVariant(enum.Enum):
    PROPOSED = "proposed"
    MULTI_WORD = "multi_word"
    DIRECT_TRANSLATION = "direct_translation"
    NO_INTERMEDIATE = "no_intermediate"
    NO_WORD = "no_word"
    NO_INTERMEDIATE_NO_WORD = "no_intermediate_no_word"


# Variants whose request must not carry target words.
WORDLESS_VARIANTS = frozenset(
    {PromptVariant.DIRECT_TRANSLATION, PromptVariant.NO_WORD, PromptVariant.NO_INTERMEDIATE_NO_WORD}
)
# Variants whose prompt includes the source-language line.
_SOURCED = frozenset(
    {PromptVariant.PROPOSED, PromptVariant.MULTI_WORD, PromptVariant.DIRECT_TRANSLATION, PromptVariant.NO_WORD}
)
# Variants whose prompt includes the machine-translation line.
_WITH_MT = frozenset(set(PromptVariant) - {PromptVariant.DIRECT_TRANSLATION})

_EDIT_INSTRUCTION = (
    "Instruction: Translate the following source language sentence based on the "
    f"machine translation by simplifying the words surrounded by {EDIT_TAG}."
)
_INSTRUCTIONS = {
    PromptVariant.PROPOSED: _EDIT_INSTRUCTION,
    PromptVariant.MULTI_WORD: _EDIT_INSTRUCTION,
    PromptVariant.NO_INTERMEDIATE: (
        "Instruction: Simplify the following machine translation by simplifying "
        f"the words surrounded by {EDIT_TAG}."
    ),
    PromptVariant.NO_WORD: (
        "Instruction: Translate the following source language sentence based on "
        "the machine translation."
    ),
    PromptVariant.NO_INTERMEDIATE_NO_WORD: "Instruction: Simplify the following machine translation.",
}
_SIMPLIFIED_TERMINAL = frozenset(
    {PromptVariant.NO_INTERMEDIATE, PromptVariant.NO_INTERMEDIATE_NO_WORD}
)


class BackendError(Exception):
    """Base class for rewriting-backend failures."""


class BackendTimeout(BackendError):
    pass


class BackendTransportError(BackendError):
    pass


class EmptyCompletion(BackendError):
    pass


@dataclass(frozen=True)
class SimplifyRequest:
    """One rewriting job: translation to post-edit plus optional source context.

    `history` carries earlier simplification attempts; it is empty by default
    and only populated when history feeding is explicitly enabled.
    """

    translation: str
    target_words: tuple[str, ...] = ()
    target_age: float = 10.0
    variant: PromptVariant = PromptVariant.PROPOSED
    source_sentence: str | None = None
    history: tuple[str, ...] = ()

    def validate(self) -> None:
        v = self.variant
        if v in (PromptVariant.PROPOSED, PromptVariant.MULTI_WORD):
            if self.source_sentence is None:
                raise ValueError(f"{v.value} variant requires a source sentence")
            if not self.target_words:
                raise ValueError(f"{v.value} variant requires target words")
        if v is PromptVariant.NO_INTERMEDIATE and not self.target_words:
            raise ValueError("no_intermediate variant requires target words")
        if v in WORDLESS_VARIANTS and self.target_words:
            raise ValueError(f"{v.value} variant must not carry target words")
        if v in _SOURCED and self.source_sentence is None:
            raise ValueError(f"{v.value} variant requires a source sentence")


@runtime_checkable
class RewriterBackend(Protocol):
    """A completion engine; max_in_flight and timeout describe its capacity."""

    max_in_flight: int
    timeout: float | None

    def complete(self, prompt: str) -> str: ...


def build_prompt(req: SimplifyRequest) -> str:
    """Render the exact prompt for the request's variant; deterministic."""
    req.validate()
    v = req.variant
    if v is PromptVariant.DIRECT_TRANSLATION:
        age = req.target_age
        age_text = str(int(age)) if float(age).is_integer() else str(age)
        instruction = (
            f"You are a translator who only generates words that {age_text}-year-old "
            "children can understand.\nOutput the translation only."
        )
    else:
        instruction = _INSTRUCTIONS[v]
    lines = [instruction]
    if v in _SOURCED:
        lines.append(SOURCE_LINE_PREFIX + (req.source_sentence or ""))
    if v in _WITH_MT:
        mt = req.translation
        if req.target_words:
            mt = tag_words(mt, list(req.target_words)).text
        lines.append(MT_LINE_PREFIX + mt)
    for past in req.history:
        lines.append(HISTORY_LINE_PREFIX + past)
    lines.append("### simplified sentence:" if v in _SIMPLIFIED_TERMINAL else "### translation:")
    return "\n".join(lines)


def rewrite(backend: RewriterBackend, req: SimplifyRequest, *, max_retries: int = 2,
            backoff: float = 0.2) -> str:
    """Dispatch the prompt and post-process the completion.

    The completion is whitespace-trimmed, stripped of echoed <edit> tags and
    truncated at the first newline. Transport failures are retried (at most
    max_retries, exponential backoff); timeouts and empty completions are not.
    """
    prompt = build_prompt(req)
    attempt = 0
    while True:
        try:
            completion = backend.complete(prompt)
            break
        except BackendTransportError:
            if attempt >= max_retries:
                raise
            time.sleep(backoff * (2**attempt))
            attempt += 1
    text = strip_tags(completion.strip()).split("\n", 1)[0].strip()
    if not text:
        raise EmptyCompletion("backend returned an empty completion")
    return text


def _prompt_line(prompt: str, prefix: str) -> str | None:
    for line in prompt.splitlines():
        if line.startswith(prefix):
            return line[len(prefix):]
    return None


@dataclass
class MockBackend:
    """Deterministic offline backend: rewrites the prompt's tagged words.

    Each <edit>-tagged word in the machine-translation line is replaced with
    its mapped phrase (identity when unmapped). Prompts without a
    machine-translation line echo the source line instead.
    """

    substitutions: dict[str, str] = field(default_factory=dict)
    max_in_flight: int = 8
    timeout: float | None = None

    def complete(self, prompt: str) -> str:
        sentence = _prompt_line(prompt, MT_LINE_PREFIX)
        if sentence is None:
            return _prompt_line(prompt, SOURCE_LINE_PREFIX) or ""
        return _TAGGED.sub(lambda m: self.substitutions.get(m.group(1), m.group(1)), sentence)


def mock_backend(substitutions: dict[str, str] | None = None) -> MockBackend:
    return MockBackend(substitutions=dict(substitutions or {}))


class OpenAiChatBackend:
    """OpenAI-compatible chat-completions endpoint; bearer token from the environment.

    Sampling is disabled (temperature 0) so runs are as reproducible as the
    remote model allows; generation settings are logged with every request
    batch via the capability descriptor.
    """

    def __init__(
        self,
        base_url: str,
        model: str,
        *,
        api_key_env: str = "OPENAI_API_KEY",
        timeout: float | None = 30.0,
        max_in_flight: int = 4,
        temperature: float = 0.0,
        max_tokens: int = 256,
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.timeout = timeout
        self.max_in_flight = max_in_flight
        self.temperature = temperature
        self.max_tokens = max_tokens
        headers = {}
        token = os.environ.get(api_key_env, "")
        if token:
            headers["Authorization"] = f"Bearer {token}"
        self._client = httpx.Client(base_url=self.base_url, headers=headers, timeout=timeout)

    def describe(self) -> dict:
        return {
            "base_url": self.base_url,
            "model": self.model,
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
            "timeout": self.timeout,
            "max_in_flight": self.max_in_flight,
        }

    def complete(self, prompt: str) -> str:
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
        }
        try:
            resp = self._client.post("/chat/completions", json=payload)
        except httpx.TimeoutException as exc:
            raise BackendTimeout(str(exc)) from exc
        except httpx.HTTPError as exc:
            raise BackendTransportError(str(exc)) from exc
        if resp.status_code != 200:
            raise BackendTransportError(f"HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            return resp.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError) as exc:
            raise BackendTransportError(f"malformed completion response: {exc}") from exc
