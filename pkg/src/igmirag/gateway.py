"""LLM gateway: chat + embeddings behind one interface, with offline modes.

Modes:
    live    POST to a completion-API-compatible endpoint.
    stub    deterministic canned replies and feature-hash embeddings.
    record  delegate to an inner gateway and write a cassette.
    replay  serve responses from a cassette; miss raises FixtureMissing.

Every call flows through a TokenLedger so evaluation can report token cost.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import FixtureMissing, GatewayError
from .tokens import count_tokens, tokenize

logger = logging.getLogger(__name__)

STUB_EMBED_DIM = 64


@dataclass
class GatewayConfig:
    mode: str = "stub"
    endpoint: str = "https://api.openai.com/v1"
    chat_model: str = "gpt-4o-mini"
    embed_model: str = "text-embedding-3-small"
    temperature: float = 0.0
    timeout: float = 30.0
    retries: int = 2
    fixtures: str | None = None  # stub: path to fixture JSONL
    cassette: str | None = None  # record/replay: path to cassette JSONL
    record_from: str = "stub"  # record: inner gateway mode ("stub" or "live")
    embed_dim: int = STUB_EMBED_DIM

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.retries > 5:
            raise ValueError("retry count must be <= 5")


@dataclass
class ChatResult:
    text: str
    prompt_tokens: int
    completion_tokens: int

    @property
    def tokens(self) -> int:
        return self.prompt_tokens + self.completion_tokens


class TokenLedger:
    """Thread-safe token accounting. Totals are always the sum of entries."""

    def __init__(self):
        self._lock = threading.Lock()
        self.entries: list[tuple[int, int]] = []

    def record(self, prompt_tokens: int, completion_tokens: int) -> None:
        with self._lock:
            self.entries.append((int(prompt_tokens), int(completion_tokens)))

    @property
    def prompt_total(self) -> int:
        with self._lock:
            return sum(p for p, _ in self.entries)

    @property
    def completion_total(self) -> int:
        with self._lock:
            return sum(c for _, c in self.entries)

    @property
    def total(self) -> int:
        with self._lock:
            return sum(p + c for p, c in self.entries)

    def snapshot(self) -> int:
        return self.total


def _request_key(kind: str, payload: dict) -> str:
    canonical = json.dumps({"kind": kind, **payload}, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class Gateway:
    """Base class; subclasses implement _chat and _embed."""

    def __init__(self, config: GatewayConfig):
        self.config = config
        self.ledger = TokenLedger()

    def chat(self, messages: list[dict], temperature: float | None = None) -> ChatResult:
        t = self.config.temperature if temperature is None else temperature
        result = self._chat(messages, t)
        self.ledger.record(result.prompt_tokens, result.completion_tokens)
        return result

    def embed(self, texts: list[str]) -> list[np.ndarray]:
        if not texts:
            raise ValueError("texts must be nonempty")
        vectors = self._embed(texts)
        self.ledger.record(sum(count_tokens(t) for t in texts), 0)
        return vectors

    def _chat(self, messages: list[dict], temperature: float) -> ChatResult:
        raise NotImplementedError

    def _embed(self, texts: list[str]) -> list[np.ndarray]:
        raise NotImplementedError


def _normalize(vec: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        vec = vec.copy()
        vec[0] = 1.0
        norm = 1.0
    return vec / norm


def stub_embedding(text: str, dim: int = STUB_EMBED_DIM) -> np.ndarray:
    """Deterministic feature-hash embedding: token counts scattered over dim
    buckets by sha256, then L2-normalized. Identical texts map to identical
    vectors on every platform."""
    vec = np.zeros(dim, dtype=np.float64)
    for token in tokenize(text.casefold()):
        digest = hashlib.sha256(token.encode("utf-8")).digest()
        bucket = int.from_bytes(digest[:8], "big") % dim
        vec[bucket] += 1.0
    return _normalize(vec)


class StubGateway(Gateway):
    """Offline gateway. Chat replies come from an ordered fixture list; the
    first fixture whose `match` substrings all appear in the concatenated
    conversation text wins. No match returns "[]" (an empty extraction).
    """

    def __init__(self, config: GatewayConfig, fixtures: list[dict] | None = None):
        super().__init__(config)
        self.fixtures: list[dict] = list(fixtures or [])
        if config.fixtures:
            self.fixtures.extend(load_fixtures(config.fixtures))

    def _chat(self, messages: list[dict], temperature: float) -> ChatResult:
        haystack = "\n".join(m.get("content", "") for m in messages)
        reply = "[]"
        for fx in self.fixtures:
            needles = fx.get("match", [])
            if all(n in haystack for n in needles):
                reply = fx["reply"]
                break
        return ChatResult(
            text=reply,
            prompt_tokens=count_tokens(haystack),
            completion_tokens=count_tokens(reply),
        )

    def _embed(self, texts: list[str]) -> list[np.ndarray]:
        return [stub_embedding(t, self.config.embed_dim) for t in texts]


def load_fixtures(path: str | Path) -> list[dict]:
    fixtures = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line:
            fixtures.append(json.loads(line))
    return fixtures


class LiveGateway(Gateway):
    """Completion-API client. Key from IGMIRAG_API_KEY or OPENAI_API_KEY."""

    def _headers(self) -> dict:
        key = os.environ.get("IGMIRAG_API_KEY") or os.environ.get("OPENAI_API_KEY", "")
        return {"Authorization": f"Bearer {key}", "Content-Type": "application/json"}

    def _post(self, path: str, payload: dict) -> dict:
        import requests

        url = self.config.endpoint.rstrip("/") + path
        last_error: Exception | None = None
        for attempt in range(self.config.retries + 1):
            try:
                resp = requests.post(
                    url, json=payload, headers=self._headers(), timeout=self.config.timeout
                )
                resp.raise_for_status()
                return resp.json()
            except Exception as exc:  # noqa: BLE001 - retry any transport failure
                last_error = exc
                logger.warning("gateway attempt %d failed: %s", attempt + 1, exc)
        raise GatewayError(f"exhausted retries against {url}: {last_error}")

    def _chat(self, messages: list[dict], temperature: float) -> ChatResult:
        data = self._post(
            "/chat/completions",
            {"model": self.config.chat_model, "messages": messages, "temperature": temperature},
        )
        usage = data.get("usage", {})
        return ChatResult(
            text=data["choices"][0]["message"]["content"],
            prompt_tokens=int(usage.get("prompt_tokens", 0)),
            completion_tokens=int(usage.get("completion_tokens", 0)),
        )

    def _embed(self, texts: list[str]) -> list[np.ndarray]:
        data = self._post(
            "/embeddings", {"model": self.config.embed_model, "input": texts}
        )
        return [
            _normalize(np.asarray(item["embedding"], dtype=np.float64))
            for item in data["data"]
        ]


class RecordingGateway(Gateway):
    """Delegates to an inner gateway and appends each response to a cassette."""

    def __init__(self, config: GatewayConfig, inner: Gateway, cassette: str | Path):
        super().__init__(config)
        self.inner = inner
        self.path = Path(cassette)
        self._lock = threading.Lock()

    def _append(self, record: dict) -> None:
        with self._lock:
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")

    def _chat(self, messages: list[dict], temperature: float) -> ChatResult:
        result = self.inner._chat(messages, temperature)
        key = _request_key(
            "chat",
            {"messages": messages, "temperature": temperature, "model": self.config.chat_model},
        )
        self._append(
            {
                "kind": "chat",
                "key": key,
                "response": {
                    "text": result.text,
                    "prompt_tokens": result.prompt_tokens,
                    "completion_tokens": result.completion_tokens,
                },
            }
        )
        return result

    def _embed(self, texts: list[str]) -> list[np.ndarray]:
        vectors = self.inner._embed(texts)
        key = _request_key("embed", {"texts": texts, "model": self.config.embed_model})
        self._append(
            {
                "kind": "embed",
                "key": key,
                "response": {"vectors": [v.tolist() for v in vectors]},
            }
        )
        return vectors


class ReplayGateway(Gateway):
    """Serves recorded responses; any unseen request raises FixtureMissing."""

    def __init__(self, config: GatewayConfig, cassette: str | Path):
        super().__init__(config)
        self.records: dict[str, dict] = {}
        path = Path(cassette)
        if not path.exists():
            raise FixtureMissing(f"cassette not found: {cassette}")
        for line in path.read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if line:
                rec = json.loads(line)
                self.records[rec["key"]] = rec["response"]

    def _chat(self, messages: list[dict], temperature: float) -> ChatResult:
        key = _request_key(
            "chat",
            {"messages": messages, "temperature": temperature, "model": self.config.chat_model},
        )
        rec = self.records.get(key)
        if rec is None:
            raise FixtureMissing(f"no recorded chat response for request {key[:12]}")
        return ChatResult(rec["text"], rec["prompt_tokens"], rec["completion_tokens"])

    def _embed(self, texts: list[str]) -> list[np.ndarray]:
        key = _request_key("embed", {"texts": texts, "model": self.config.embed_model})
        rec = self.records.get(key)
        if rec is None:
            raise FixtureMissing(f"no recorded embed response for request {key[:12]}")
        return [np.asarray(v, dtype=np.float64) for v in rec["vectors"]]


def make_gateway(config: GatewayConfig, base_dir: str | Path | None = None) -> Gateway:
    """Build the gateway for config.mode. Relative fixture/cassette paths are
    resolved against base_dir (normally the config file's directory)."""

    def resolve(p: str | None) -> str | None:
        if p is None:
            return None
        path = Path(p)
        if not path.is_absolute() and base_dir is not None:
            path = Path(base_dir) / path
        return str(path)

    cfg = GatewayConfig(**{**config.__dict__, "fixtures": resolve(config.fixtures),
                           "cassette": resolve(config.cassette)})
    if cfg.mode == "stub":
        return StubGateway(cfg)
    if cfg.mode == "live":
        return LiveGateway(cfg)
    if cfg.mode == "record":
        if not cfg.cassette:
            raise ValueError("record mode needs a cassette path")
        inner_cfg = GatewayConfig(**{**cfg.__dict__, "mode": cfg.record_from})
        inner = StubGateway(inner_cfg) if cfg.record_from == "stub" else LiveGateway(inner_cfg)
        return RecordingGateway(cfg, inner, cfg.cassette)
    if cfg.mode == "replay":
        if not cfg.cassette:
            raise ValueError("replay mode needs a cassette path")
        return ReplayGateway(cfg, cfg.cassette)
    raise ValueError(f"unknown gateway mode {config.mode!r}")
