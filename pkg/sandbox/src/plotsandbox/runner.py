"""In-subprocess side of the sandbox.

Reads one JSON request line from stdin:

    {"script": str, "csv_b64": str, "alias": str, "timeout_s": int}

loads the CSV into a pandas frame bound to the alias, executes the script
with a write guard confined to the working directory, appends a directive
saving the current figure to out.png, and writes one JSON response line to
stdout:

    {"status": ..., "png_b64"?: str, "stderr_tail": str, "duration_ms": int}

Exit code is 0 whenever a response was produced, regardless of the script's
fate; the wall-clock timeout is enforced by the parent, which kills this
process.
"""

from __future__ import annotations

import base64
import builtins
import io
import json
import os
import pathlib
import struct
import sys
import time
import traceback
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

STDERR_TAIL_BYTES = 4096

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"

_SAVE_DIRECTIVE = (
    "\n"
    "import matplotlib.pyplot as _plotsandbox_plt\n"
    "_plotsandbox_plt.gcf().savefig('out.png')\n"
)

_WRITE_FLAGS = os.O_WRONLY | os.O_RDWR | os.O_APPEND | os.O_CREAT | os.O_TRUNC


def _png_ok(data: bytes) -> bool:
    if len(data) < 24 or not data.startswith(_PNG_MAGIC) or data[12:16] != b"IHDR":
        return False
    width, height = struct.unpack(">II", data[16:24])
    return width > 0 and height > 0


def _within(path: Path, root: Path) -> bool:
    try:
        path.resolve().relative_to(root)
    except ValueError:
        return False
    return True


def install_write_guard(workdir: Path) -> None:
    """Confine file writes to the working directory.

    Patches the common write paths (builtins.open, io.open, os.open). This
    backs up the deny-list screening done upstream; it is containment for
    accidents, not a security boundary against a determined adversary.
    """
    root = workdir.resolve()
    real_open = builtins.open
    real_os_open = os.open

    def _deny(target) -> None:
        raise PermissionError(
            f"sandboxed script may not write outside its workdir: {target!r}"
        )

    def guarded_open(file, mode="r", *args, **kwargs):
        if isinstance(file, (str, bytes, os.PathLike)) and any(
            flag in mode for flag in ("w", "a", "x", "+")
        ):
            path = Path(os.fsdecode(file))
            if not _within(path, root):
                _deny(file)
        return real_open(file, mode, *args, **kwargs)

    def guarded_os_open(path, flags, *args, **kwargs):
        if isinstance(path, (str, bytes, os.PathLike)) and flags & _WRITE_FLAGS:
            if not _within(Path(os.fsdecode(path)), root):
                _deny(path)
        return real_os_open(path, flags, *args, **kwargs)

    builtins.open = guarded_open
    io.open = guarded_open
    os.open = guarded_os_open
    # pathlib on 3.10 captured io.open at import time; later versions look
    # it up dynamically and need no patch
    accessor = getattr(pathlib, "_normal_accessor", None)
    if accessor is not None:
        accessor.open = guarded_open


def run_request(request: dict) -> dict:
    import matplotlib

    matplotlib.use("Agg", force=True)
    import pandas as pd

    workdir = Path.cwd()
    alias = request.get("alias", "df")
    csv_bytes = base64.b64decode(request["csv_b64"])
    frame = pd.read_csv(io.BytesIO(csv_bytes))

    script = request["script"] + _SAVE_DIRECTIVE
    exec_globals: dict = {"__name__": "__main__", alias: frame}
    captured_out = io.StringIO()
    captured_err = io.StringIO()

    install_write_guard(workdir)
    started = time.monotonic()
    failed = False
    try:
        with redirect_stdout(captured_out), redirect_stderr(captured_err):
            exec(compile(script, "<script>", "exec"), exec_globals)
    except BaseException:
        failed = True
        captured_err.write(traceback.format_exc())
    duration_ms = int((time.monotonic() - started) * 1000)

    stderr_tail = captured_err.getvalue()[-STDERR_TAIL_BYTES:]
    if failed:
        return {
            "status": "script_error",
            "stderr_tail": stderr_tail,
            "duration_ms": duration_ms,
        }

    png_path = workdir / "out.png"
    if not png_path.is_file():
        return {
            "status": "script_error",
            "stderr_tail": stderr_tail + "\nno figure was written to out.png",
            "duration_ms": duration_ms,
        }
    png = png_path.read_bytes()
    if not _png_ok(png):
        return {
            "status": "script_error",
            "stderr_tail": stderr_tail + "\nout.png is not a valid PNG",
            "duration_ms": duration_ms,
        }
    return {
        "status": "ok",
        "png_b64": base64.b64encode(png).decode("ascii"),
        "stderr_tail": stderr_tail,
        "duration_ms": duration_ms,
    }


def main() -> int:
    line = sys.stdin.readline()
    try:
        request = json.loads(line)
        if not isinstance(request, dict) or "script" not in request:
            raise ValueError("request must be an object with a script")
        response = run_request(request)
    except Exception:
        response = {
            "status": "harness_error",
            "stderr_tail": traceback.format_exc()[-STDERR_TAIL_BYTES:],
            "duration_ms": 0,
        }
    sys.stdout.write(json.dumps(response) + "\n")
    sys.stdout.flush()
    return 0
