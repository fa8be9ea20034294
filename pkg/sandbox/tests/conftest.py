from __future__ import annotations

import base64
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parents[2]
DATA_DIR = REPO_ROOT / "data"
SCRIPTS_DIR = REPO_ROOT / "scripts"

PRODUCTS_CSV_B64 = base64.b64encode((DATA_DIR / "products.csv").read_bytes()).decode()


def make_request(script: str, timeout_s: int = 30, alias: str = "df") -> dict:
    return {
        "script": script,
        "csv_b64": PRODUCTS_CSV_B64,
        "alias": alias,
        "timeout_s": timeout_s,
    }
