"""Hand-written VGDL games shipped with the package."""

from __future__ import annotations

from importlib import resources
from pathlib import Path


def game_paths() -> list[Path]:
    root = resources.files(__name__)
    return sorted(Path(str(p)) for p in root.iterdir() if p.name.endswith(".txt"))


def game_path(stem: str) -> Path:
    for p in game_paths():
        if p.stem == stem:
            return p
    raise KeyError(stem)
