"""Chat-completion gateway with live, record, and replay modes.

``canonical_key`` fixes the serialization of a request (field order, no
insignificant whitespace, UTF-8) and hashes it, so a request replays to
the exact recorded response on any platform. Cassettes are one JSON file
per key, written atomically; replay mode never opens a socket.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

from llmgeo.gateway.types import (
    Cassette,
    CassetteMissError,
    CassetteStoreError,
    ChatRequest,
    ChatResponse,
    GatewayError,
    Message,
    MissingApiKeyError,
    ProviderConfig,
    ProviderError,
    ProviderTimeoutError,
    MODES,
)

Provider = Callable[[ChatRequest], ChatResponse]


def canonical_request_json(request: ChatRequest) -> str:
    payload = {
        "model": request.model,
        "temperature": request.temperature,
        "max_tokens": request.max_tokens,
        "messages": [{"role": m.role, "content": m.content} for m in request.messages],
    }
    return json.dumps(payload, separators=(",", ":"), ensure_ascii=False)


def canonical_key(request: ChatRequest) -> str:
    """Hex digest of the canonical request serialization (stage_tag excluded)."""
    return hashlib.sha256(canonical_request_json(request).encode("utf-8")).hexdigest()


def _response_to_dict(response: ChatResponse) -> dict:
    usage = None
    if response.usage is not None:
        usage = {"prompt_tokens": response.usage[0], "completion_tokens": response.usage[1]}
    return {"content": response.content, "finish_reason": response.finish_reason, "usage": usage}


def _response_from_dict(data: dict) -> ChatResponse:
    usage = data.get("usage")
    usage_pair = None
    if usage is not None:
        usage_pair = (int(usage["prompt_tokens"]), int(usage["completion_tokens"]))
    return ChatResponse(
        content=data["content"],
        finish_reason=data.get("finish_reason", "stop"),
        usage=usage_pair,
    )


class CassetteStore:
    """Directory of ``<key>.json`` cassettes; human-diffable, atomic writes."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)

    def path_for(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def get(self, key: str) -> Cassette | None:
        path = self.path_for(key)
        if not path.exists():
            return None
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
            request_canonical = json.dumps(data["request"], separators=(",", ":"), ensure_ascii=False)
            return Cassette(
                key=data["key"],
                request_canonical=request_canonical,
                response=_response_from_dict(data["response"]),
                recorded_at=data["recorded_at"],
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise CassetteStoreError(f"unreadable cassette {path}: {exc}") from exc

    def put(self, cassette: Cassette) -> Path:
        digest = hashlib.sha256(cassette.request_canonical.encode("utf-8")).hexdigest()
        if digest != cassette.key:
            raise CassetteStoreError(
                f"cassette key {cassette.key} does not match its request digest {digest}"
            )
        self.directory.mkdir(parents=True, exist_ok=True)
        payload = {
            "key": cassette.key,
            "request": json.loads(cassette.request_canonical),
            "response": _response_to_dict(cassette.response),
            "recorded_at": cassette.recorded_at,
        }
        body = json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
        target = self.path_for(cassette.key)
        fd, tmp_name = tempfile.mkstemp(dir=self.directory, prefix=".cassette-", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(body)
            os.replace(tmp_name, target)
        except BaseException:
            try:
                os.unlink(tmp_name)
            except OSError:
                pass
            raise
        return target


class HttpProvider:
    """POSTs to any chat-completion endpoint taking model/messages/temperature."""

    def __init__(self, config: ProviderConfig):
        self.config = config

    def api_key(self) -> str:
        key = os.environ.get(self.config.api_key_env, "")
        if not key:
            raise MissingApiKeyError(
                f"environment variable {self.config.api_key_env} is not set"
            )
        return key

    def __call__(self, request: ChatRequest) -> ChatResponse:
        import requests

        key = self.api_key()
        body: dict = {
            "model": request.model,
            "messages": [{"role": m.role, "content": m.content} for m in request.messages],
            "temperature": request.temperature,
        }
        if request.max_tokens is not None:
            body["max_tokens"] = request.max_tokens

        policy = self.config.retries
        last_error: GatewayError | None = None
        for attempt in range(1, policy.max_attempts + 1):
            try:
                resp = requests.post(
                    self.config.base_url,
                    json=body,
                    headers={"Authorization": f"Bearer {key}"},
                    timeout=self.config.request_timeout_s,
                )
            except requests.Timeout:
                last_error = ProviderTimeoutError(
                    f"provider timed out after {self.config.request_timeout_s}s"
                )
            except requests.RequestException as exc:
                last_error = ProviderError(f"transport failure: {exc}")
            else:
                if resp.status_code == 429 or resp.status_code >= 500:
                    last_error = ProviderError(
                        f"provider returned {resp.status_code}",
                        status=resp.status_code,
                        body_excerpt=resp.text[:500],
                    )
                elif resp.status_code != 200:
                    raise ProviderError(
                        f"provider returned {resp.status_code}",
                        status=resp.status_code,
                        body_excerpt=resp.text[:500],
                    )
                else:
                    return self._parse(resp)
            if attempt < policy.max_attempts:
                time.sleep(policy.backoff_s * (2 ** (attempt - 1)))
        assert last_error is not None
        raise last_error

    @staticmethod
    def _parse(resp) -> ChatResponse:
        try:
            data = resp.json()
            choice = data["choices"][0]
            content = choice["message"]["content"]
            finish_reason = choice.get("finish_reason", "stop")
            usage = data.get("usage")
            usage_pair = None
            if usage:
                usage_pair = (int(usage.get("prompt_tokens", 0)), int(usage.get("completion_tokens", 0)))
            return ChatResponse(content=content, finish_reason=finish_reason, usage=usage_pair)
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise ProviderError(
                "provider reply is not a chat completion", body_excerpt=resp.text[:500]
            ) from exc


class Gateway:
    """Uniform complete() over a provider, a cassette store, or both.

    ``provider`` may be any callable taking a ChatRequest; tests inject
    in-process stubs, production uses :class:`HttpProvider`.
    """

    def __init__(
        self,
        provider_config: ProviderConfig | None = None,
        cassette_store: CassetteStore | None = None,
        provider: Provider | None = None,
        clock: Callable[[], str] | None = None,
    ):
        self.provider_config = provider_config or ProviderConfig()
        self.store = cassette_store
        self._provider = provider
        self._clock = clock or (lambda: datetime.now(timezone.utc).isoformat())

    def check_ready(self, mode: str) -> None:
        """Raise the configuration error a complete() in this mode would hit."""
        if mode not in MODES:
            raise ValueError(f"unknown gateway mode {mode!r}")
        if mode in ("record", "replay") and self.store is None:
            raise CassetteStoreError(f"{mode} mode needs a cassette store")
        if mode in ("live", "record") and self._provider is None:
            HttpProvider(self.provider_config).api_key()

    def provider(self) -> Provider:
        if self._provider is not None:
            return self._provider
        return HttpProvider(self.provider_config)

    def complete(self, request: ChatRequest, mode: str) -> ChatResponse:
        if mode not in MODES:
            raise ValueError(f"unknown gateway mode {mode!r}")
        if mode == "replay":
            if self.store is None:
                raise CassetteStoreError("replay mode needs a cassette store")
            key = canonical_key(request)
            cassette = self.store.get(key)
            if cassette is None:
                raise CassetteMissError(key=key, stage_tag=request.stage_tag)
            return cassette.response

        response = self.provider()(request)
        if mode == "record":
            if self.store is None:
                raise CassetteStoreError("record mode needs a cassette store")
            self.store.put(
                Cassette(
                    key=canonical_key(request),
                    request_canonical=canonical_request_json(request),
                    response=response,
                    recorded_at=self._clock(),
                )
            )
        return response


def user_request(
    prompt_text: str,
    *,
    model: str,
    stage_tag: str,
    temperature: float = 0.0,
    max_tokens: int | None = None,
) -> ChatRequest:
    """The pipeline's request shape: one user message holding the full prompt."""
    return ChatRequest(
        model=model,
        messages=(Message(role="user", content=prompt_text),),
        temperature=temperature,
        max_tokens=max_tokens,
        stage_tag=stage_tag,
    )
