"""Per-model pipeline: profile -> prompt -> complete -> sanitize -> execute.

Execution is pluggable. An executor is any callable taking the execution
request mapping and returning the result mapping of the sandbox runner's
JSON-over-stdio protocol:

    request:  {"script": str, "csv_b64": str, "alias": str, "timeout_s": int}
    response: {"status": "ok"|"script_error"|"timeout"|"denied"|"harness_error",
               "png_b64": str?, "stderr_tail": str, "duration_ms": int}

The sandbox package provides the real executor; everything in this module
runs without it.
"""

from __future__ import annotations

import base64
import struct
from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import Text2ChartError
from .gateway import CompletionRequest, CompletionResult, ModelId, Provider, complete
from .ingest import TableFrame, to_csv_bytes
from .profiling import profile_table
from .prompting import EngineeredPrompt, PromptConfig, build_prompt
from .sanitize import SanitizedScript, sanitize

Executor = Callable[[dict], dict]

EXECUTION_STATUSES = ("ok", "script_error", "timeout", "denied", "harness_error")

DEFAULT_EXECUTION_TIMEOUT_S = 30

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def png_dimensions(data: bytes) -> tuple[int, int]:
    """Width and height of a PNG byte stream; raises ValueError otherwise."""
    if len(data) < 24 or not data.startswith(_PNG_MAGIC) or data[12:16] != b"IHDR":
        raise ValueError("not a PNG stream")
    width, height = struct.unpack(">II", data[16:24])
    if width <= 0 or height <= 0:
        raise ValueError("PNG has non-positive dimensions")
    return width, height


def execution_image(execution: Optional[dict]) -> Optional[bytes]:
    """Decode the PNG bytes out of an execution result, if any."""
    if not execution or not execution.get("png_b64"):
        return None
    return base64.b64decode(execution["png_b64"])


@dataclass
class ModelOutcome:
    model: ModelId
    prompt: Optional[EngineeredPrompt] = None
    raw_completion: Optional[CompletionResult] = None
    sanitized: Optional[SanitizedScript] = None
    execution: Optional[dict] = None
    error: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "model": {"kind": self.model.kind, "wire_name": self.model.wire_name},
            "prompt_full_text": self.prompt.full_text if self.prompt else None,
            "boundary_offset": self.prompt.boundary_offset if self.prompt else None,
            "raw_completion": (
                self.raw_completion.raw_text if self.raw_completion else None
            ),
            "finish_reason": (
                self.raw_completion.finish_reason if self.raw_completion else None
            ),
            "sanitized_script": self.sanitized.text if self.sanitized else None,
            "removed_load_lines": (
                list(self.sanitized.removed_load_lines) if self.sanitized else None
            ),
            "denied": (
                {
                    "category": self.sanitized.denied.category,
                    "matched_text": self.sanitized.denied.matched_text,
                }
                if self.sanitized and self.sanitized.denied
                else None
            ),
            "execution": self.execution,
            "error": self.error,
        }


@dataclass
class PipelineOptions:
    config: PromptConfig = field(default_factory=PromptConfig)
    executor: Optional[Executor] = None
    execution_timeout_s: int = DEFAULT_EXECUTION_TIMEOUT_S


def run_model_pipeline(
    frame: TableFrame,
    query: str,
    model: ModelId,
    provider: Provider,
    options: Optional[PipelineOptions] = None,
) -> ModelOutcome:
    """Run one model through the full pipeline.

    Failures never escape: they are recorded on the outcome so sibling
    models keep rendering side by side.
    """
    options = options or PipelineOptions()
    outcome = ModelOutcome(model=model)
    try:
        profile = profile_table(frame, options.config.categorical_threshold)
        prompt = build_prompt(profile, query, options.config)
        outcome.prompt = prompt
        request = CompletionRequest(model=model, prompt_text=prompt.full_text)
        outcome.raw_completion = complete(request, provider)
        outcome.sanitized = sanitize(
            outcome.raw_completion.raw_text,
            model.kind,
            prompt.code,
            expected_file_name=options.config.expected_file_name,
        )
        if outcome.sanitized.denied is not None:
            outcome.execution = {
                "status": "denied",
                "stderr_tail": (
                    f"blocked by safety screen: "
                    f"{outcome.sanitized.denied.category} "
                    f"({outcome.sanitized.denied.matched_text!r})"
                ),
                "duration_ms": 0,
            }
        elif options.executor is not None:
            outcome.execution = options.executor(
                {
                    "script": outcome.sanitized.text,
                    "csv_b64": base64.b64encode(to_csv_bytes(frame)).decode(
                        "ascii"
                    ),
                    "alias": options.config.frame_alias,
                    "timeout_s": options.execution_timeout_s,
                }
            )
    except Text2ChartError as exc:
        outcome.error = f"{type(exc).__name__}: {exc}"
    except Exception as exc:  # noqa: BLE001 - outcomes must stay independent
        outcome.error = f"unexpected {type(exc).__name__}: {exc}"
    return outcome
