"""Turn a raw model completion into an executable plotting script.

Fixed pipeline order: extract_code -> strip_file_load -> truncate_at_stop ->
prefix_code_prompt -> safety_screen. The composed pipeline is idempotent on
its own output, and it only ever deletes whole lines or prepends the code
prompt: lines it keeps are untouched.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .errors import NoCodeFound
from .gateway import COMPLETION, DEFAULT_STOP
from .prompting import CodePrompt

DENIAL_CATEGORIES = (
    "process-spawn",
    "network",
    "filesystem-write",
    "env-secret",
    "import-denied",
)


@dataclass(frozen=True)
class DenialReason:
    category: str
    matched_text: str


@dataclass(frozen=True)
class SanitizedScript:
    text: str
    removed_load_lines: tuple[str, ...]
    extracted_from_fence: bool
    truncated_at_stop: bool
    denied: Optional[DenialReason] = None


# (category, regex). Rules are checked per line, in order; the first match
# denies the script. Screening is defense-in-depth on top of the sandbox.
DEFAULT_POLICY: tuple[tuple[str, str], ...] = (
    ("process-spawn", r"\bsubprocess\b"),
    ("process-spawn", r"\bos\.system\("),
    ("process-spawn", r"\bos\.popen\("),
    ("process-spawn", r"\bos\.exec\w*\("),
    ("process-spawn", r"\bos\.spawn\w*\("),
    ("process-spawn", r"\bpty\.spawn"),
    ("network", r"\bimport\s+socket\b"),
    ("network", r"\bsocket\.socket\b"),
    ("network", r"\burllib\b"),
    ("network", r"\bhttp\.client\b"),
    ("network", r"\brequests\.\w+\("),
    ("network", r"\bhttpx\b"),
    ("network", r"\bftplib\b"),
    ("network", r"\bsmtplib\b"),
    ("filesystem-write", r"\bshutil\.\w+\("),
    ("filesystem-write", r"\bos\.(remove|unlink|rename|rmdir|chmod|chown|makedirs|mkdir)\("),
    ("filesystem-write", r"open\(\s*['\"](/|~)"),
    ("env-secret", r"\bos\.environ\b"),
    ("env-secret", r"\bgetenv\("),
    ("import-denied", r"\bimport\s+(ctypes|importlib|pickle|marshal|pty)\b"),
    ("import-denied", r"__import__"),
    ("import-denied", r"(?<![\w.])eval\("),
    ("import-denied", r"(?<![\w.])exec\("),
)


def load_policy(path: str | Path) -> tuple[tuple[str, str], ...]:
    """Parse a deny-list file: one ``<category> <regex>`` rule per line,
    '#' starts a comment."""
    rules = []
    for raw_line in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        category, _, pattern = line.partition(" ")
        pattern = pattern.strip()
        if category not in DENIAL_CATEGORIES or not pattern:
            raise ValueError(f"bad policy line: {raw_line!r}")
        re.compile(pattern)
        rules.append((category, pattern))
    return tuple(rules)


_FENCE_RE = re.compile(r"```[^\n]*\n(.*?)```", re.DOTALL)

_CODE_LINE_RE = re.compile(
    r"^(\s+"                                        # indented continuation
    r"|#"                                           # comment
    r"|(import|from|if|for|while|with|try|except|finally|else|elif|def|class|return|pass|raise|print)\b"
    r"|[A-Za-z_][\w.]*\("                           # call
    r"|[\w.,\s\[\]()'\"]+[+\-*/%]?=[^=]"            # assignment target(s)
    r"|[)\]}]"                                      # closes an open bracket
    r")"
)


def _is_code_like(line: str) -> bool:
    return not line.strip() or bool(_CODE_LINE_RE.match(line))


def has_fence(raw: str) -> bool:
    return _FENCE_RE.search(raw) is not None


def extract_code(raw: str, model_kind: str) -> str:
    """Pull the script out of a reply.

    Completion-kind output is already bare code and passes through. A chat
    reply yields the first fenced block if any fence exists; with no fences,
    leading and trailing prose lines are dropped.
    """
    if model_kind == COMPLETION:
        return raw
    match = _FENCE_RE.search(raw)
    if match is not None:
        block = match.group(1)
        if not block.strip():
            raise NoCodeFound("fenced block is empty")
        return block.strip("\n")
    if "```" in raw:
        raise NoCodeFound("fence with no completed code block")
    lines = raw.split("\n")
    code_indices = [
        i for i, line in enumerate(lines) if line.strip() and _is_code_like(line)
    ]
    if not code_indices:
        return raw
    kept = lines[code_indices[0] : code_indices[-1] + 1]
    return "\n".join(kept) + "\n"


def strip_file_load(
    script: str, expected_file_name: str
) -> tuple[str, list[str]]:
    """Drop every line mentioning the anticipated data file name.

    The prompt promises the frame is pre-loaded, so a line referencing the
    expected file is a load we must not execute. Matching on the bare name
    is deliberately broad: removing a stray comment is harmless, leaving a
    read in is not.
    """
    kept: list[str] = []
    removed: list[str] = []
    for line in script.splitlines(keepends=True):
        if expected_file_name in line:
            removed.append(line.rstrip("\r\n"))
        else:
            kept.append(line)
    return "".join(kept), removed


def truncate_at_stop(
    text: str, stop: tuple[str, ...] = DEFAULT_STOP
) -> tuple[str, bool]:
    """Cut immediately before the first occurrence of any stop string."""
    positions = [idx for s in stop if (idx := text.find(s)) != -1]
    if not positions:
        return text, False
    return text[: min(positions)], True


def prefix_code_prompt(code_prompt: CodePrompt, completion_body: str) -> str:
    """Re-attach the code prompt, never duplicating it."""
    if completion_body.startswith(code_prompt.text):
        return completion_body
    return code_prompt.text + completion_body


def safety_screen(
    script: str,
    policy: tuple[tuple[str, str], ...] = DEFAULT_POLICY,
) -> Optional[DenialReason]:
    """Return the first deny-list match, or None when the script is allowed."""
    for line in script.split("\n"):
        for category, pattern in policy:
            match = re.search(pattern, line)
            if match is not None:
                return DenialReason(category=category, matched_text=match.group(0))
    return None


def sanitize(
    raw: str,
    model_kind: str,
    code_prompt: CodePrompt,
    expected_file_name: str = "data_file.csv",
    stop: tuple[str, ...] = DEFAULT_STOP,
    policy: tuple[tuple[str, str], ...] = DEFAULT_POLICY,
) -> SanitizedScript:
    """Run the full pipeline in its fixed order."""
    from_fence = model_kind != COMPLETION and has_fence(raw)
    body = extract_code(raw, model_kind)
    body, removed = strip_file_load(body, expected_file_name)
    body, truncated = truncate_at_stop(body, stop)
    text = prefix_code_prompt(code_prompt, body)
    denied = safety_screen(text, policy)
    return SanitizedScript(
        text=text,
        removed_load_lines=tuple(removed),
        extracted_from_fence=from_fence,
        truncated_at_stop=truncated,
        denied=denied,
    )
