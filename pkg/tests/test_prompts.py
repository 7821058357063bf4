import pytest

from igmirag.prompts import PROMPT_NAMES, load_prompt


def test_all_prompts_load_nonempty():
    for name in PROMPT_NAMES:
        assert load_prompt(name).strip()


def test_unknown_prompt_raises():
    with pytest.raises(KeyError):
        load_prompt("extract_everything")


def test_answer_templates_have_placeholders():
    for name in ("answer_brief", "answer_detailed"):
        text = load_prompt(name)
        assert "{info}" in text
        assert "{query}" in text


def test_judge_template_placeholders_and_braces_escaped():
    text = load_prompt("judge")
    for ph in ("{query}", "{gold_answer}", "{pre_answer}"):
        assert ph in text
    # The literal JSON skeleton in the template must survive str.format.
    filled = text.format(query="q", gold_answer="g", pre_answer="p")
    assert '"Exact Match"' in filled


def test_prompt_cache_returns_same_object():
    assert load_prompt("answer_brief") is load_prompt("answer_brief")
