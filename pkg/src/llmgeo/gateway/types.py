"""Gateway value types and errors."""

from __future__ import annotations

from dataclasses import dataclass, field

from llmgeo.errors import LlmGeoError

ROLES = ("system", "user", "assistant")
MODES = ("live", "record", "replay")


class GatewayError(LlmGeoError):
    code = "GATEWAY_ERROR"


class MissingApiKeyError(GatewayError):
    code = "MISSING_API_KEY"


class ProviderError(GatewayError):
    code = "PROVIDER_ERROR"

    def __init__(self, message: str, status: int | None = None, body_excerpt: str = ""):
        super().__init__(message)
        self.status = status
        self.body_excerpt = body_excerpt


class ProviderTimeoutError(GatewayError):
    code = "TIMEOUT"


class CassetteMissError(GatewayError):
    code = "CASSETTE_MISS"

    def __init__(self, key: str, stage_tag: str):
        super().__init__(f"no cassette for key {key} (stage {stage_tag})")
        self.key = key
        self.stage_tag = stage_tag


class CassetteStoreError(GatewayError):
    code = "CASSETTE_STORE_ERROR"


@dataclass(frozen=True)
class Message:
    role: str
    content: str

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValueError(f"message role must be one of {ROLES}, got {self.role!r}")


@dataclass(frozen=True)
class ChatRequest:
    model: str
    messages: tuple[Message, ...]
    temperature: float = 0.0
    max_tokens: int | None = None
    stage_tag: str = "graph"

    def __post_init__(self) -> None:
        if not self.messages:
            raise ValueError("request needs at least one message")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature must be in [0, 2], got {self.temperature}")


@dataclass(frozen=True)
class ChatResponse:
    content: str
    finish_reason: str = "stop"
    usage: tuple[int, int] | None = None  # (prompt tokens, completion tokens)

    def __post_init__(self) -> None:
        # an empty reply with a normal finish is a provider bug worth surfacing early
        if not self.content and self.finish_reason == "stop":
            raise ValueError("empty content with finish_reason 'stop'")


@dataclass(frozen=True)
class Cassette:
    """One recorded request/response pair, keyed by the request digest."""

    key: str
    request_canonical: str
    response: ChatResponse
    recorded_at: str


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 3
    backoff_s: float = 1.0

    def __post_init__(self) -> None:
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")


@dataclass(frozen=True)
class ProviderConfig:
    base_url: str = "https://api.openai.com/v1/chat/completions"
    api_key_env: str = "LLMGEO_API_KEY"
    model: str = "gpt-4"
    request_timeout_s: float = 120.0
    retries: RetryPolicy = field(default_factory=RetryPolicy)
