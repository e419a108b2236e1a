"""Prompt template loading, placeholder filling, and line dropping."""

import pytest

from capsum.bundle import bundle_from_dict
from capsum.errors import TemplateError
from capsum.prompts import (
    CHAIN_OF_DENSITY,
    PERSONALIZED,
    PromptTemplate,
    format_caption_block,
    load_template,
    render_prompt,
)


def make_bundle(title=None, genre=None, query=None, texts=("a boat", "a gull")):
    doc = {
        "schema_version": 1,
        "video_id": "clip",
        "fps": 2.0,
        "n_frames_original": 30,
        "captions": [
            {"frame_index": i, "time_sec": i * 0.5, "text": t}
            for i, t in enumerate(texts)
        ],
    }
    if title is not None:
        doc["title"] = title
    if genre is not None:
        doc["genre"] = genre
    if query is not None:
        doc["query"] = query
    return bundle_from_dict(doc)


def test_load_both_templates():
    for template_id in (CHAIN_OF_DENSITY, PERSONALIZED):
        template = load_template(template_id)
        assert template.template_id == template_id
        assert template.body


def test_unknown_template_id():
    with pytest.raises(TemplateError):
        load_template("no_such_template")


def test_template_contract_placeholder_exactly_once():
    with pytest.raises(TemplateError):
        PromptTemplate(
            template_id=CHAIN_OF_DENSITY,
            body="[TITLE] [TITLE] [GENRE] [QUERY] [CAPTIONS]",
        )


def test_caption_block_numbering():
    block = format_caption_block(["a dog", "a cat"])
    assert block.splitlines() == ["Frame 1: a dog", "Frame 2: a cat"]


def test_render_fills_all_placeholders():
    template = load_template(CHAIN_OF_DENSITY)
    prompt = render_prompt(template, make_bundle(title="Harbor Walk", genre="travel"))
    assert "Harbor Walk" in prompt
    assert "travel" in prompt
    assert "Frame 1: a boat" in prompt
    assert "Frame 2: a gull" in prompt
    assert "[TITLE]" not in prompt
    assert "[CAPTIONS]" not in prompt


def test_render_drops_lines_for_missing_optional_values():
    template = load_template(CHAIN_OF_DENSITY)
    with_title = render_prompt(template, make_bundle(title="T"))
    without = render_prompt(template, make_bundle())
    assert "T" in with_title
    assert len(without.splitlines()) < len(with_title.splitlines())
    assert "[TITLE]" not in without
    assert "[GENRE]" not in without


def test_personalized_requires_user_query():
    template = load_template(PERSONALIZED)
    with pytest.raises(TemplateError):
        render_prompt(template, make_bundle())


def test_personalized_includes_user_query():
    template = load_template(PERSONALIZED)
    prompt = render_prompt(template, make_bundle(), user_query="show me the dog")
    assert "show me the dog" in prompt
    assert "[USER QUERY]" not in prompt


def test_base_template_rejects_user_query():
    template = load_template(CHAIN_OF_DENSITY)
    with pytest.raises(TemplateError):
        render_prompt(template, make_bundle(), user_query="anything")


def test_render_is_deterministic():
    template = load_template(CHAIN_OF_DENSITY)
    bundle = make_bundle(title="T", genre="g", query="q")
    assert render_prompt(template, bundle) == render_prompt(template, bundle)


def test_load_from_custom_dir(tmp_path):
    body = (
        "Summarize [TITLE] ([GENRE], [QUERY]).\n"
        "Captions:\n[CAPTIONS]\n"
    )
    (tmp_path / f"{CHAIN_OF_DENSITY}.txt").write_text(body, encoding="utf-8")
    template = load_template(CHAIN_OF_DENSITY, templates_dir=str(tmp_path))
    prompt = render_prompt(template, make_bundle(title="T", genre="g", query="q"))
    assert prompt.startswith("Summarize T (g, q).")


def test_load_from_custom_dir_missing_file(tmp_path):
    with pytest.raises(TemplateError):
        load_template(CHAIN_OF_DENSITY, templates_dir=str(tmp_path))
