"""Execute sanitized plotting scripts in an isolated subprocess.

``execute`` is the parent side: it creates a fresh private working
directory, spawns the runner with a scrubbed environment, speaks the
JSON-over-stdio protocol and kills the child at the timeout. The runner
(``plotsandbox.runner``, reachable as ``python -m plotsandbox``) loads the
dataset, runs the script behind a write guard and reports the rendered PNG.
"""

from __future__ import annotations

import json
import os
import subprocess
import sys
import tempfile
import time
from pathlib import Path

from .runner import STDERR_TAIL_BYTES, main, run_request

__all__ = ["execute", "main", "run_request", "DEFAULT_TIMEOUT_S"]

DEFAULT_TIMEOUT_S = 30

_STATUSES = {"ok", "script_error", "timeout", "denied", "harness_error"}


def _minimal_env(workdir: Path) -> dict[str, str]:
    """Fresh environment: paths the child needs, nothing it does not.

    No proxy variables, no credentials. Temp and matplotlib config dirs live
    inside the private workdir.
    """
    tmp = workdir / "tmp"
    mpl = workdir / ".mplconfig"
    tmp.mkdir(exist_ok=True)
    mpl.mkdir(exist_ok=True)
    package_root = str(Path(__file__).resolve().parents[1])
    return {
        "PATH": os.environ.get("PATH", "/usr/local/bin:/usr/bin:/bin"),
        "HOME": str(workdir),
        "TMPDIR": str(tmp),
        "TEMP": str(tmp),
        "TMP": str(tmp),
        "LANG": os.environ.get("LANG", "C.UTF-8"),
        "MPLBACKEND": "Agg",
        "MPLCONFIGDIR": str(mpl),
        "PYTHONDONTWRITEBYTECODE": "1",
        "PYTHONPATH": package_root,
    }


def execute(request: dict) -> dict:
    """Run one script against one dataset in a fresh subprocess.

    ``request`` follows the wire schema: ``script``, ``csv_b64``, ``alias``
    and ``timeout_s``. Never raises for script problems; everything surfaces
    through ``status``.
    """
    timeout_s = int(request.get("timeout_s", DEFAULT_TIMEOUT_S))
    if timeout_s <= 0:
        raise ValueError("timeout_s must be positive")
    started = time.monotonic()
    with tempfile.TemporaryDirectory(prefix="plotsandbox-") as tmp:
        workdir = Path(tmp) / "run"
        workdir.mkdir()
        proc = subprocess.Popen(
            [sys.executable, "-m", "plotsandbox"],
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            cwd=workdir,
            env=_minimal_env(workdir),
            text=True,
        )
        try:
            out, err = proc.communicate(
                json.dumps(request) + "\n", timeout=timeout_s
            )
        except subprocess.TimeoutExpired:
            proc.kill()
            proc.communicate()
            return {
                "status": "timeout",
                "stderr_tail": f"killed after {timeout_s}s",
                "duration_ms": int((time.monotonic() - started) * 1000),
            }
    duration_ms = int((time.monotonic() - started) * 1000)
    if proc.returncode != 0:
        return {
            "status": "harness_error",
            "stderr_tail": (err or out)[-STDERR_TAIL_BYTES:],
            "duration_ms": duration_ms,
        }
    try:
        response = json.loads(out.strip().splitlines()[-1])
        if response.get("status") not in _STATUSES:
            raise ValueError(f"bad status {response.get('status')!r}")
    except (ValueError, IndexError, AttributeError):
        return {
            "status": "harness_error",
            "stderr_tail": (err or out)[-STDERR_TAIL_BYTES:],
            "duration_ms": duration_ms,
        }
    response.setdefault("stderr_tail", "")
    response.setdefault("duration_ms", duration_ms)
    return response
