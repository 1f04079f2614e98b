"""Example projects shipped with the tool.

These stand in for a curated examples gallery: small projects that pair
programs with ready-made tests (initialisation checks, key-driven
movement, edge detection, a boat-race game with a six-test suite and
deliberately broken student variants). Regenerate with
``python tools/make_fixtures.py``.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path


def names() -> list[str]:
    root = resources.files(__package__)
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))


def path(name: str) -> Path:
    p = Path(str(resources.files(__package__) / name))
    if not p.exists():
        raise FileNotFoundError(f"no fixture named {name!r}")
    return p


def load(name: str) -> bytes:
    return path(name).read_bytes()
