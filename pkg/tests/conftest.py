"""Shared fixtures: the demo store built once per session, plus gateway
helpers for cassette-based determinism tests."""

import json
from pathlib import Path

import pytest

from igmirag.config import EngineConfig
from igmirag.engine import Engine
from igmirag.extraction import build_index, load_corpus, save_store
from igmirag.gateway import GatewayConfig, make_gateway

DEMO_DIR = Path(__file__).parent.parent / "demo"
CORPUS_PATH = DEMO_DIR / "corpus.jsonl"
FIXTURES_PATH = DEMO_DIR / "fixtures.jsonl"
QA_PATH = DEMO_DIR / "qa.jsonl"


@pytest.fixture(scope="session")
def demo_config() -> EngineConfig:
    return EngineConfig.load(DEMO_DIR / "config.json")


@pytest.fixture(scope="session")
def demo_gateway(demo_config):
    return make_gateway(demo_config.gateway, demo_config.base_dir)


@pytest.fixture(scope="session")
def demo_build(demo_config, demo_gateway):
    corpus = load_corpus(CORPUS_PATH)
    return build_index(corpus, demo_config, demo_gateway)


@pytest.fixture(scope="session")
def demo_store(tmp_path_factory, demo_build) -> Path:
    store = tmp_path_factory.mktemp("store") / "demo_store"
    save_store(demo_build, store)
    return store


@pytest.fixture(scope="session")
def demo_engine(demo_store, demo_config) -> Engine:
    return Engine.load(demo_store, config=demo_config)


@pytest.fixture(scope="session")
def demo_qa() -> list[dict]:
    rows = []
    for line in QA_PATH.read_text(encoding="utf-8").splitlines():
        if line.strip():
            rows.append(json.loads(line))
    return rows


def stub_config(base_dir: Path | None = None) -> EngineConfig:
    """Engine config wired to the demo stub fixtures."""
    config = EngineConfig()
    config.gateway = GatewayConfig(mode="stub", fixtures=str(FIXTURES_PATH))
    if base_dir is not None:
        config.base_dir = base_dir
    return config


def recording_config(cassette: Path) -> EngineConfig:
    config = EngineConfig()
    config.gateway = GatewayConfig(
        mode="record",
        record_from="stub",
        fixtures=str(FIXTURES_PATH),
        cassette=str(cassette),
    )
    return config


def replay_config(cassette: Path) -> EngineConfig:
    config = EngineConfig()
    config.gateway = GatewayConfig(mode="replay", cassette=str(cassette))
    return config
