"""LLM gateway: chat completion over live/record/replay, plus code extraction."""

from llmgeo.gateway.client import (
    CassetteStore,
    Gateway,
    HttpProvider,
    canonical_key,
    canonical_request_json,
    user_request,
)
from llmgeo.gateway.extract import (
    CodeSnippet,
    MultipleCodeBlocksWarning,
    NoCodeBlockError,
    UnterminatedFenceError,
    extract_fenced_code,
)
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
    RetryPolicy,
)

__all__ = [
    "Cassette",
    "CassetteMissError",
    "CassetteStore",
    "CassetteStoreError",
    "ChatRequest",
    "ChatResponse",
    "CodeSnippet",
    "Gateway",
    "GatewayError",
    "HttpProvider",
    "Message",
    "MissingApiKeyError",
    "MultipleCodeBlocksWarning",
    "NoCodeBlockError",
    "ProviderConfig",
    "ProviderError",
    "ProviderTimeoutError",
    "RetryPolicy",
    "UnterminatedFenceError",
    "canonical_key",
    "canonical_request_json",
    "extract_fenced_code",
    "user_request",
]
