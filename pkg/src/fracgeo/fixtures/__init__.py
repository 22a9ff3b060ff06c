"""Bundled body descriptions for quick runs and tests."""

from __future__ import annotations

import json
from importlib import resources

from ..geometry import ConvexBody, make_body

FIXTURE_NAMES = ("ball2d", "ball3d", "square", "thinrect", "cube", "icosa")


def fixture_description(name: str) -> dict:
    if name not in FIXTURE_NAMES:
        raise KeyError(f"unknown fixture {name!r}; have {', '.join(FIXTURE_NAMES)}")
    text = resources.files(__package__).joinpath(f"{name}.json").read_text()
    return json.loads(text)


def load_fixture(name: str) -> ConvexBody:
    return make_body(fixture_description(name))
