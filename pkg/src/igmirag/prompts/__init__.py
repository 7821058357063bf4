"""Prompt templates shipped as package data, loaded by short name."""

from functools import lru_cache
from importlib import resources

PROMPT_NAMES = (
    "extract_entities",
    "extract_pair_relations",
    "extract_keywords",
    "extract_associations",
    "strategy_architecture",
    "strategy_goal",
    "answer_brief",
    "answer_detailed",
    "judge",
    "generate_onehop",
    "generate_multihop",
)


@lru_cache(maxsize=None)
def load_prompt(name: str) -> str:
    if name not in PROMPT_NAMES:
        raise KeyError(f"unknown prompt {name!r}")
    return resources.files(__package__).joinpath(f"{name}.txt").read_text(encoding="utf-8")
