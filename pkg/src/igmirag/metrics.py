"""Answer scoring: short-form EM/F1 and the LLM-judge rubric."""

from __future__ import annotations

import logging
import re
import string
from collections import Counter
from dataclasses import dataclass

from .errors import JudgeFailure
from .extraction import parse_json_reply
from .gateway import Gateway
from .prompts import load_prompt

logger = logging.getLogger(__name__)

_ARTICLE_RE = re.compile(r"\b(a|an|the)\b")
_PUNCT = set(string.punctuation)


@dataclass
class ShortFormScore:
    em: int
    f1: float


@dataclass
class JudgeScore:
    em: float
    recall: float
    precision: float
    f1: float


def normalize_answer(text: str) -> str:
    """Standard QA normalization: lowercase, drop punctuation and the
    articles a/an/the, collapse whitespace."""
    text = text.lower()
    text = "".join(ch for ch in text if ch not in _PUNCT)
    text = _ARTICLE_RE.sub(" ", text)
    return " ".join(text.split())


def _token_f1(prediction_tokens: list[str], gold_tokens: list[str]) -> float:
    if not prediction_tokens or not gold_tokens:
        return float(prediction_tokens == gold_tokens)
    common = Counter(prediction_tokens) & Counter(gold_tokens)
    overlap = sum(common.values())
    if overlap == 0:
        return 0.0
    precision = overlap / len(prediction_tokens)
    recall = overlap / len(gold_tokens)
    return 2 * precision * recall / (precision + recall)


def short_form_score(prediction: str, golds: list[str]) -> ShortFormScore:
    """Exact match and best token-level F1 against a list of gold answers.

    >>> short_form_score("Perth.", ["Perth, Australia", "Perth"]).em
    1
    >>> short_form_score("Sir Nicholas Bacon", ["Nicholas Bacon"]).f1
    0.8
    """
    if not golds:
        raise ValueError("golds must be nonempty")
    norm_pred = normalize_answer(prediction)
    pred_tokens = norm_pred.split()
    em = 0
    best_f1 = 0.0
    for gold in golds:
        norm_gold = normalize_answer(gold)
        if norm_pred == norm_gold:
            em = 1
        best_f1 = max(best_f1, _token_f1(pred_tokens, norm_gold.split()))
    return ShortFormScore(em=em, f1=best_f1)


def _parse_judge_reply(text: str) -> JudgeScore:
    data = parse_json_reply(text)
    if not isinstance(data, dict):
        raise ValueError("judge reply is not a JSON object")
    values = {}
    for field in ("Exact Match", "Recall", "Precision"):
        section = data.get(field)
        if not isinstance(section, dict) or "Score" not in section:
            raise ValueError(f"judge reply missing {field!r} score")
        score = float(section["Score"])
        if not 0.0 <= score <= 100.0:
            raise ValueError(f"judge score for {field!r} out of range: {score}")
        values[field] = score
    recall = values["Recall"]
    precision = values["Precision"]
    if recall + precision == 0:
        f1 = 0.0
    else:
        f1 = 2 * recall * precision / (recall + precision)
    return JudgeScore(
        em=values["Exact Match"], recall=recall, precision=precision, f1=f1
    )


def judge_score(
    question: str,
    gold: str,
    prediction: str,
    gateway: Gateway,
    retries: int = 2,
) -> JudgeScore:
    """Grade an answer with the rubric prompt; F1 is the harmonic mean of
    the judged recall and precision."""
    template = load_prompt("judge")
    content = template.format(
        query=question, gold_answer=gold, pre_answer=prediction
    )
    messages = [{"role": "user", "content": content}]
    last_error = "no attempts made"
    for attempt in range(retries + 1):
        result = gateway.chat(messages)
        try:
            return _parse_judge_reply(result.text)
        except ValueError as exc:
            last_error = str(exc)
            logger.warning("judge reply attempt %d unusable: %s", attempt + 1, exc)
    raise JudgeFailure(f"judge reply unusable after {retries + 1} attempts: {last_error}")
