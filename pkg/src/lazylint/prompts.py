"""Prompt template loading and rendering.

Templates live under ``assets/prompts/*.txt`` and use ``{{name}}`` slots.
Rendering is strict: a slot left unfilled is an error, so a renamed variable
cannot silently ship a literal ``{{...}}`` to the model.
"""

from __future__ import annotations

import re
from importlib import resources
from pathlib import Path

_SLOT = re.compile(r"\{\{(\w+)\}\}")

PROMPT_NAMES = (
    "bio_tag",
    "feature_extraction",
    "feature_qa",
    "planner",
    "feedback_generation",
    "crossover",
)


class PromptError(ValueError):
    pass


class PromptSet:
    """A named collection of prompt templates."""

    def __init__(self, templates: dict[str, str]):
        self.templates = dict(templates)

    @classmethod
    def default(cls) -> "PromptSet":
        templates = {}
        root = resources.files("lazylint.assets").joinpath("prompts")
        for name in PROMPT_NAMES:
            templates[name] = root.joinpath(f"{name}.txt").read_text(encoding="utf-8")
        return cls(templates)

    @classmethod
    def from_dir(cls, path: str | Path) -> "PromptSet":
        templates = {}
        for file in sorted(Path(path).glob("*.txt")):
            templates[file.stem] = file.read_text(encoding="utf-8")
        missing = [n for n in PROMPT_NAMES if n not in templates]
        if missing:
            raise PromptError(f"prompt directory {path} missing templates: {missing}")
        return cls(templates)

    def raw(self, name: str) -> str:
        try:
            return self.templates[name]
        except KeyError:
            raise PromptError(f"unknown prompt template {name!r}") from None

    # name is positional-only so "name" stays usable as a slot
    def render(self, name: str, /, **slots: str) -> str:
        template = self.raw(name)

        def fill(match: re.Match) -> str:
            key = match.group(1)
            if key not in slots:
                raise PromptError(f"prompt {name!r}: slot {{{{{key}}}}} not filled")
            return str(slots[key])

        return _SLOT.sub(fill, template)
