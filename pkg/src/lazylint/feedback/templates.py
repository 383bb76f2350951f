"""Guideline feedback templates, keyed by issue-label key.

Every body quotes the reviewer comment placeholder verbatim; labels without a
dedicated body fall back to the ``__generic__`` one when fallback is enabled.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping

FORMAT_VERSION = "1"
GENERIC_KEY = "__generic__"
COMMENT_SLOT = "[insert reviewer comment here]"


class TemplateError(KeyError):
    pass


@dataclass(frozen=True, slots=True)
class Template:
    label_key: str
    body: str


class TemplateRegistry:
    def __init__(self, bodies: Mapping[str, str]):
        if not bodies:
            raise ValueError("template registry must not be empty")
        self.bodies = dict(bodies)

    @classmethod
    def default(cls) -> "TemplateRegistry":
        ref = resources.files("lazylint.assets").joinpath("templates.json")
        with resources.as_file(ref) as path:
            return cls.from_file(path)

    @classmethod
    def from_file(cls, path: str | Path) -> "TemplateRegistry":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if isinstance(data, Mapping) and "templates" in data:
            declared = data.get("format_version")
            if declared != FORMAT_VERSION:
                raise ValueError(
                    f"unsupported template format_version {declared!r} "
                    f"(expected {FORMAT_VERSION!r})")
            data = data["templates"]
        if not isinstance(data, Mapping) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in data.items()
        ):
            raise ValueError(f"template file {path} must map label keys to bodies")
        return cls(data)

    def __contains__(self, label_key: str) -> bool:
        return label_key in self.bodies

    def get(self, label_key: str, allow_generic: bool = True) -> Template:
        if label_key in self.bodies:
            return Template(label_key=label_key, body=self.bodies[label_key])
        if allow_generic and GENERIC_KEY in self.bodies:
            return Template(label_key=label_key, body=self.bodies[GENERIC_KEY])
        raise TemplateError(f"no template for label {label_key!r} and no generic fallback")
