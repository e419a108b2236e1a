"""Prompt templates and rendering.

Templates are plain-text files with bracketed placeholders. The general
summary template takes [TITLE], [GENRE], [QUERY], and [CAPTIONS]; the
personalized template additionally takes [USER QUERY]. Lines whose
placeholder has no value (missing title, genre, or query category) are
dropped whole, so rendered prompts never show empty fields.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from importlib import resources

from .bundle import Bundle
from .errors import TemplateError

CHAIN_OF_DENSITY = "chain_of_density"
PERSONALIZED = "personalized"

# Placeholders each template must contain exactly once.
TEMPLATE_CONTRACTS = {
    CHAIN_OF_DENSITY: ("[TITLE]", "[GENRE]", "[QUERY]", "[CAPTIONS]"),
    PERSONALIZED: ("[TITLE]", "[GENRE]", "[QUERY]", "[CAPTIONS]", "[USER QUERY]"),
}

_ALL_PLACEHOLDERS = ("[TITLE]", "[GENRE]", "[QUERY]", "[CAPTIONS]", "[USER QUERY]")


@dataclass(frozen=True)
class PromptTemplate:
    template_id: str
    body: str

    def __post_init__(self):
        if self.template_id not in TEMPLATE_CONTRACTS:
            raise TemplateError(f"unknown template_id {self.template_id!r}")
        for placeholder in TEMPLATE_CONTRACTS[self.template_id]:
            count = self.body.count(placeholder)
            if count != 1:
                raise TemplateError(
                    f"template {self.template_id!r}: placeholder {placeholder} "
                    f"appears {count} times, expected exactly once"
                )


def load_template(template_id: str, templates_dir: str | None = None) -> PromptTemplate:
    """Load a template by id, from templates_dir or the packaged defaults."""
    filename = f"{template_id}.txt"
    if templates_dir is not None:
        path = os.path.join(templates_dir, filename)
        try:
            with open(path, "r", encoding="utf-8") as fh:
                body = fh.read()
        except OSError as exc:
            raise TemplateError(f"cannot read template file {path}: {exc}") from exc
    else:
        ref = resources.files("capsum").joinpath("templates", filename)
        try:
            body = ref.read_text(encoding="utf-8")
        except (FileNotFoundError, OSError) as exc:
            raise TemplateError(f"no packaged template {template_id!r}") from exc
    return PromptTemplate(template_id=template_id, body=body)


def format_caption_block(texts: list[str]) -> str:
    """One numbered caption line per frame, in chronological order."""
    return "\n".join(f"Frame {i + 1}: {text}" for i, text in enumerate(texts))


def render_prompt(template: PromptTemplate, bundle: Bundle, user_query: str | None = None) -> str:
    """Fill a template from a bundle.

    The personalized template requires user_query; the general template
    forbids it. Optional metadata placeholders drop their whole line when
    the bundle has no value for them.
    """
    if template.template_id == PERSONALIZED and not user_query:
        raise TemplateError("personalized template requires a user query")
    if template.template_id == CHAIN_OF_DENSITY and user_query:
        raise TemplateError("general summary template does not accept a user query")
    if not bundle.captions:
        raise TemplateError("bundle has no captions to summarize")

    values = {
        "[TITLE]": bundle.title,
        "[GENRE]": bundle.genre,
        "[QUERY]": bundle.query,
        "[CAPTIONS]": format_caption_block(bundle.caption_texts()),
        "[USER QUERY]": user_query,
    }

    lines_out = []
    for line in template.body.split("\n"):
        drop = False
        for placeholder, value in values.items():
            if placeholder not in line:
                continue
            if value is None:
                drop = True
                break
            line = line.replace(placeholder, value)
        if not drop:
            lines_out.append(line)
    rendered = "\n".join(lines_out)

    for placeholder in _ALL_PLACEHOLDERS:
        if placeholder in rendered:
            raise TemplateError(f"unresolved placeholder {placeholder} after rendering")
    return rendered
