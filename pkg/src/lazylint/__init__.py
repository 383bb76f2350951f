"""Peer-review quality tooling: segment reviews, flag issues, evolve feedback."""

__version__ = "0.1.0"

from .corpus import (
    BioTag,
    CorpusError,
    IssueLabel,
    LabelKind,
    LabelRegistry,
    ReviewRecord,
    Segment,
    Sentence,
    default_registry,
    load_corpus,
    load_label_registry,
)
from .gateway import (
    ChatRequest,
    ChatResponse,
    GatewayConfig,
    GatewayError,
    LlmGateway,
    ReplayBackend,
    fingerprint,
)

__all__ = [
    "__version__",
    "BioTag",
    "ChatRequest",
    "ChatResponse",
    "CorpusError",
    "GatewayConfig",
    "GatewayError",
    "IssueLabel",
    "LabelKind",
    "LabelRegistry",
    "LlmGateway",
    "ReplayBackend",
    "ReviewRecord",
    "Segment",
    "Sentence",
    "default_registry",
    "fingerprint",
    "load_corpus",
    "load_label_registry",
]
