"""Generation backends: a chat-completion HTTP client, a replay store, a mock.

Every backend reports token usage alongside its completions; nothing in this
package ever re-tokenizes text locally. The replay store keys recordings by a
stable digest of the request plus a call ordinal, so a run recorded once can
be replayed bit-identically with zero network traffic.
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable

import requests

from .errors import (
    AuthFailure,
    BackendError,
    MalformedResponse,
    RateLimited,
    ReplayMiss,
    Transport,
)

logger = logging.getLogger(__name__)

SAMPLED_TEMPERATURE_DEFAULT = 0.8
SAMPLED_TOP_P_DEFAULT = 0.95
SAMPLED_MAX_NEW_TOKENS_DEFAULT = 300


class DecodeMode(str, Enum):
    SAMPLED = "Sampled"
    GREEDY = "Greedy"


class ReplayMode(str, Enum):
    LIVE = "Live"
    RECORD = "Record"
    REPLAY = "Replay"


@dataclass(frozen=True)
class GenerationRequest:
    """One logical generation call.

    Greedy decode is normalized on construction: temperature forced to 0 and
    n to 1, so greedy requests digest identically however they were built.
    """

    prompt_text: str
    decode: DecodeMode
    temperature: float = SAMPLED_TEMPERATURE_DEFAULT
    top_p: float = SAMPLED_TOP_P_DEFAULT
    n: int = 1
    max_new_tokens: int = SAMPLED_MAX_NEW_TOKENS_DEFAULT
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.decode is DecodeMode.GREEDY:
            object.__setattr__(self, "temperature", 0.0)
            object.__setattr__(self, "n", 1)
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if not 0 < self.top_p <= 1:
            raise ValueError("top_p must be in (0, 1]")
        if self.max_new_tokens < 1:
            raise ValueError("max_new_tokens must be >= 1")


@dataclass(frozen=True)
class GenerationResponse:
    completions: tuple[str, ...]
    prompt_tokens: int
    completion_tokens: tuple[int, ...]
    backend_id: str

    def __post_init__(self) -> None:
        if len(self.completions) != len(self.completion_tokens):
            raise ValueError("completion_tokens must align with completions")
        if self.prompt_tokens < 0 or any(tokens < 0 for tokens in self.completion_tokens):
            raise ValueError("token counts must be nonnegative")


@dataclass(frozen=True)
class BackendConfig:
    endpoint: str
    model_name: str
    auth_token: str = ""
    max_retries: int = 3
    backoff_s: tuple[float, ...] = (1.0, 2.0, 4.0)
    max_in_flight: int = 4
    multi_sample: bool = True
    request_timeout_s: float = 120.0

    def __post_init__(self) -> None:
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")


def request_digest(request: GenerationRequest, model_name: str, call_ordinal: int) -> str:
    """Stable key for record/replay; the same request made twice gets
    distinct ordinals, so repeats are retrievable in order."""
    payload = {
        "prompt_text": request.prompt_text,
        "decode": request.decode.value,
        "temperature": request.temperature,
        "top_p": request.top_p,
        "n": request.n,
        "max_new_tokens": request.max_new_tokens,
        "model_name": model_name,
        "call_ordinal": call_ordinal,
    }
    canonical = json.dumps(payload, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _request_base(request: GenerationRequest, model_name: str) -> str:
    return request_digest(request, model_name, -1)


class ReplayStore:
    """Append-only line-delimited store of (digest, request summary, response).

    Reads are lock-free after load; appends are serialized. The first record
    for a digest wins, which keeps a store appended to after a crash sane.
    """

    def __init__(self, path: str | Path) -> None:
        self._path = Path(path)
        self._lock = threading.Lock()
        self._records: dict[str, dict] = {}
        if self._path.exists():
            with self._path.open(encoding="utf-8") as fh:
                for line in fh:
                    if not line.strip():
                        continue
                    row = json.loads(line)
                    self._records.setdefault(row["key"], row["response"])

    def __len__(self) -> int:
        return len(self._records)

    def record(self, digest: str, request_summary: dict, response: GenerationResponse) -> None:
        serialized = {
            "completions": list(response.completions),
            "prompt_tokens": response.prompt_tokens,
            "completion_tokens": list(response.completion_tokens),
            "backend_id": response.backend_id,
        }
        with self._lock:
            if digest in self._records:
                return
            self._records[digest] = serialized
            self._path.parent.mkdir(parents=True, exist_ok=True)
            with self._path.open("a", encoding="utf-8") as fh:
                fh.write(
                    json.dumps(
                        {"key": digest, "request": request_summary, "response": serialized},
                        ensure_ascii=False,
                    )
                    + "\n"
                )

    def replay(self, digest: str) -> GenerationResponse:
        try:
            row = self._records[digest]
        except KeyError:
            raise ReplayMiss(f"no recording for {digest[:12]}…") from None
        return GenerationResponse(
            completions=tuple(row["completions"]),
            prompt_tokens=row["prompt_tokens"],
            completion_tokens=tuple(row["completion_tokens"]),
            backend_id=row["backend_id"],
        )

    def __contains__(self, digest: str) -> bool:
        return digest in self._records


class MockBackend:
    """Scripted backend for tests and demos.

    Each script entry is consumed by one ``generate`` call and may be a
    GenerationResponse, an exception to raise, a list of completion texts
    (usage synthesized by whitespace count), or a callable taking the
    request. The mock reports its own usage like any serving side would.
    """

    def __init__(self, script: Iterable[object] = (), model_name: str = "mock") -> None:
        self._script: list[object] = list(script)
        self._cursor = 0
        self.model_name = model_name
        self.backend_id = f"mock:{model_name}"
        self.calls: list[GenerationRequest] = []

    def extend(self, entries: Iterable[object]) -> None:
        self._script.extend(entries)

    def generate(self, request: GenerationRequest) -> GenerationResponse:
        self.calls.append(request)
        if self._cursor >= len(self._script):
            raise MalformedResponse(f"mock script exhausted after {self._cursor} calls")
        entry = self._script[self._cursor]
        self._cursor += 1
        if isinstance(entry, BaseException):
            raise entry
        if callable(entry) and not isinstance(entry, GenerationResponse):
            entry = entry(request)
        if isinstance(entry, GenerationResponse):
            response = entry
        else:
            texts = [entry] if isinstance(entry, str) else list(entry)
            response = GenerationResponse(
                completions=tuple(texts),
                prompt_tokens=len(request.prompt_text.split()),
                completion_tokens=tuple(len(text.split()) for text in texts),
                backend_id=self.backend_id,
            )
        if len(response.completions) != request.n:
            raise MalformedResponse(
                f"mock scripted {len(response.completions)} completions for n={request.n}"
            )
        return response


class HttpBackend:
    """Client for a chat-completion-compatible endpoint.

    Sends model, messages, temperature, top_p, n, and max_tokens; expects a
    choice list plus usage. Transient failures (transport, rate limits) are
    retried with the configured backoff schedule; auth failures and malformed
    replies are not. When the service cannot multi-sample, n samples fan out
    into n calls but the prompt is still charged once.
    """

    def __init__(self, config: BackendConfig, session: requests.Session | None = None) -> None:
        self._config = config
        self._session = session or requests.Session()
        self.model_name = config.model_name
        self.backend_id = f"http:{config.model_name}"

    def generate(self, request: GenerationRequest) -> GenerationResponse:
        if request.n == 1 or self._config.multi_sample:
            return self._with_retries(request, request.n)
        # Fan out: n single-sample calls, one logical prompt charge.
        first = self._with_retries(request, 1)
        completions = list(first.completions)
        completion_tokens = list(first.completion_tokens)
        for _ in range(request.n - 1):
            part = self._with_retries(request, 1)
            completions.extend(part.completions)
            completion_tokens.extend(part.completion_tokens)
        return GenerationResponse(
            completions=tuple(completions),
            prompt_tokens=first.prompt_tokens,
            completion_tokens=tuple(completion_tokens),
            backend_id=self.backend_id,
        )

    def _with_retries(self, request: GenerationRequest, n: int) -> GenerationResponse:
        attempts = 0
        while True:
            try:
                return self._call_once(request, n)
            except BackendError as err:
                if not err.retryable or attempts >= self._config.max_retries:
                    raise
                schedule = self._config.backoff_s
                delay = schedule[min(attempts, len(schedule) - 1)] if schedule else 0.0
                logger.warning(
                    "retrying %s after %s (attempt %d, sleeping %.1fs)",
                    self._config.endpoint,
                    type(err).__name__,
                    attempts + 1,
                    delay,
                )
                time.sleep(delay)
                attempts += 1

    def _call_once(self, request: GenerationRequest, n: int) -> GenerationResponse:
        payload: dict[str, object] = {
            "model": self._config.model_name,
            "messages": [{"role": "user", "content": request.prompt_text}],
            "temperature": request.temperature,
            "top_p": request.top_p,
            "n": n,
            "max_tokens": request.max_new_tokens,
        }
        if request.seed is not None:
            payload["seed"] = request.seed
        headers = {}
        if self._config.auth_token:
            headers["Authorization"] = f"Bearer {self._config.auth_token}"
        try:
            reply = self._session.post(
                self._config.endpoint,
                json=payload,
                headers=headers,
                timeout=self._config.request_timeout_s,
            )
        except requests.RequestException as exc:
            raise Transport(str(exc)) from exc
        if reply.status_code in (401, 403):
            raise AuthFailure(f"HTTP {reply.status_code} from {self._config.endpoint}")
        if reply.status_code == 429:
            raise RateLimited("HTTP 429")
        if reply.status_code >= 500:
            raise Transport(f"HTTP {reply.status_code}")
        if reply.status_code != 200:
            raise MalformedResponse(f"HTTP {reply.status_code}: {reply.text[:200]}")
        try:
            body = reply.json()
            choices = body["choices"]
            usage = body["usage"]
            completions = tuple(choice["message"]["content"] for choice in choices)
            prompt_tokens = int(usage["prompt_tokens"])
            total_completion = int(usage["completion_tokens"])
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedResponse(f"unusable reply: {exc!r}") from exc
        if len(completions) != n:
            raise MalformedResponse(f"asked for {n} choices, got {len(completions)}")
        completion_tokens = self._per_choice_usage(choices, total_completion, n)
        if any(tokens > request.max_new_tokens for tokens in completion_tokens):
            raise MalformedResponse("reported completion tokens exceed max_new_tokens")
        return GenerationResponse(
            completions=completions,
            prompt_tokens=prompt_tokens,
            completion_tokens=completion_tokens,
            backend_id=self.backend_id,
        )

    @staticmethod
    def _per_choice_usage(choices: list, total: int, n: int) -> tuple[int, ...]:
        # Some servers report usage per choice; otherwise split the aggregate
        # evenly (sums are preserved exactly, which is all the ledger needs).
        per_choice = []
        for choice in choices:
            usage = choice.get("usage") if isinstance(choice, dict) else None
            if not isinstance(usage, dict) or "completion_tokens" not in usage:
                per_choice = None
                break
            per_choice.append(int(usage["completion_tokens"]))
        if per_choice is not None:
            return tuple(per_choice)
        base, remainder = divmod(total, n)
        return tuple(base + (1 if i < remainder else 0) for i in range(n))


class RecordReplayBackend:
    """Wraps a live backend with a replay store.

    Record mode consults the store first and falls through to the live
    backend on a miss, appending the result; replay mode never goes live and
    raises ReplayMiss on absence. Call ordinals are assigned per distinct
    request, so repeated identical requests replay in their original order.
    """

    def __init__(
        self,
        store: ReplayStore,
        mode: ReplayMode,
        inner: object | None = None,
        model_name: str | None = None,
    ) -> None:
        if mode is ReplayMode.LIVE:
            raise ValueError("LIVE mode needs no record/replay wrapper")
        if mode is ReplayMode.RECORD and inner is None:
            raise ValueError("record mode requires a live backend")
        self._store = store
        self._mode = mode
        self._inner = inner
        self._ordinals: dict[str, int] = {}
        self._lock = threading.Lock()
        self.model_name = model_name or getattr(inner, "model_name", "replay")
        self.backend_id = f"{mode.value.lower()}:{self.model_name}"
        self.live_calls = 0

    def generate(self, request: GenerationRequest) -> GenerationResponse:
        with self._lock:
            base = _request_base(request, self.model_name)
            ordinal = self._ordinals.get(base, 0)
            self._ordinals[base] = ordinal + 1
        digest = request_digest(request, self.model_name, ordinal)
        if digest in self._store:
            return self._store.replay(digest)
        if self._mode is ReplayMode.REPLAY:
            raise ReplayMiss(
                f"no recording for call ordinal {ordinal} of prompt "
                f"{request.prompt_text[:60]!r}…"
            )
        response = self._inner.generate(request)
        summary = {
            "prompt_head": request.prompt_text[:120],
            "decode": request.decode.value,
            "n": request.n,
            "max_new_tokens": request.max_new_tokens,
            "call_ordinal": ordinal,
            "model_name": self.model_name,
        }
        self._store.record(digest, summary, response)
        self.live_calls += 1
        return response
