"""Locate the repository-level asset directories (data/, fixtures/,
prompts/, scripts/). Works from a source checkout or editable install;
set TEXT2CHART_ROOT to point elsewhere."""

from __future__ import annotations

import os
from pathlib import Path


def repo_root() -> Path:
    override = os.environ.get("TEXT2CHART_ROOT")
    if override:
        return Path(override)
    return Path(__file__).resolve().parents[2]


def data_dir() -> Path:
    return repo_root() / "data"


def fixtures_dir() -> Path:
    return repo_root() / "fixtures"


def prompts_dir() -> Path:
    return repo_root() / "prompts"
