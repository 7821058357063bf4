"""Engine configuration: one JSON document, one section per subsystem.

Unknown sections and unknown fields are rejected rather than ignored so
a typo in a config file cannot silently fall back to defaults.  Paths
inside the gateway section are resolved against the config file's
directory at gateway construction time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from .context import WindowParams
from .dfindex import QuotaParams
from .diffusion import DiffusionParams
from .gateway import GatewayConfig
from .hnsw import HnswParams


@dataclass
class ChunkingConfig:
    chunk_tokens: int = 780
    parallel_width: int = 1

    def validate(self) -> None:
        if self.chunk_tokens < 1:
            raise ValueError("chunk_tokens must be positive")
        if self.parallel_width < 1:
            raise ValueError("parallel_width must be at least 1")


@dataclass
class LexicalConfig:
    k1: float = 1.2
    b: float = 0.75

    def validate(self) -> None:
        if self.k1 <= 0:
            raise ValueError("k1 must be positive")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError("b must be in [0, 1]")


@dataclass
class FusionConfig:
    w: float = 0.5

    def validate(self) -> None:
        if not 0.0 <= self.w <= 1.0:
            raise ValueError("fusion weight must be in [0, 1]")


@dataclass
class AnswerConfig:
    mode: str = "brief"

    def validate(self) -> None:
        if self.mode not in ("brief", "detailed"):
            raise ValueError("answer mode must be brief or detailed")


_SECTIONS = {
    "chunking": ChunkingConfig,
    "quotas": QuotaParams,
    "hnsw": HnswParams,
    "lexical": LexicalConfig,
    "diffusion": DiffusionParams,
    "window": WindowParams,
    "fusion": FusionConfig,
    "answer": AnswerConfig,
    "gateway": GatewayConfig,
}


@dataclass
class EngineConfig:
    chunking: ChunkingConfig = field(default_factory=ChunkingConfig)
    quotas: QuotaParams = field(default_factory=QuotaParams)
    hnsw: HnswParams = field(default_factory=HnswParams)
    lexical: LexicalConfig = field(default_factory=LexicalConfig)
    diffusion: DiffusionParams = field(default_factory=DiffusionParams)
    window: WindowParams = field(default_factory=WindowParams)
    fusion: FusionConfig = field(default_factory=FusionConfig)
    answer: AnswerConfig = field(default_factory=AnswerConfig)
    gateway: GatewayConfig = field(default_factory=GatewayConfig)
    base_dir: Path = field(default_factory=Path.cwd)

    def validate(self) -> None:
        self.chunking.validate()
        self.lexical.validate()
        self.diffusion.validate()
        self.window.validate()
        self.fusion.validate()
        self.answer.validate()

    @classmethod
    def from_dict(cls, raw: dict, base_dir: Path | None = None) -> "EngineConfig":
        unknown = sorted(set(raw) - set(_SECTIONS))
        if unknown:
            raise ValueError(f"unknown config sections: {unknown}")
        kwargs = {}
        for name, section_cls in _SECTIONS.items():
            section = raw.get(name, {})
            if not isinstance(section, dict):
                raise ValueError(f"config section {name!r} must be an object")
            allowed = {f.name for f in fields(section_cls)}
            bad = sorted(set(section) - allowed)
            if bad:
                raise ValueError(f"unknown fields in config section {name!r}: {bad}")
            kwargs[name] = section_cls(**section)
        config = cls(base_dir=base_dir or Path.cwd(), **kwargs)
        config.validate()
        return config

    @classmethod
    def load(cls, path: str | Path) -> "EngineConfig":
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ValueError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ValueError(f"config {path} must hold a JSON object")
        return cls.from_dict(raw, base_dir=path.resolve().parent)
