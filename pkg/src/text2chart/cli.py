"""One-shot pipeline run from the command line.

Writes prompt.txt, raw.txt, script.txt and (unless --no-exec) chart.png to
the output directory. Exit codes: 0 success, 1 pipeline error, 2 usage
error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import Text2ChartError
from .gateway import (
    KNOWN_MODELS,
    HttpProvider,
    ProviderConfig,
    ReplayProvider,
    Secret,
)
from .ingest import load_csv, load_sqlite
from .paths import fixtures_dir
from .pipeline import (
    PipelineOptions,
    execution_image,
    run_model_pipeline,
)
from .prompting import PromptConfig

USAGE_ERROR = 2
PIPELINE_ERROR = 1


def _fail_usage(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return USAGE_ERROR


def _fail_pipeline(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return PIPELINE_ERROR


def _load_frame(path: Path, table: str | None):
    if path.suffix.lower() in (".sqlite", ".db", ".sqlite3"):
        frames = load_sqlite(path)
        if table:
            for frame in frames:
                if frame.name == table:
                    return frame
            raise Text2ChartError(f"table {table!r} not found in {path}")
        if len(frames) == 1:
            return frames[0]
        names = ", ".join(f.name for f in frames)
        raise Text2ChartError(
            f"{path} holds {len(frames)} tables ({names}); pick one with --table"
        )
    return load_csv(path.read_bytes(), path.stem)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="text2chart",
        description="Turn a text query over a dataset into a chart via an LLM.",
    )
    parser.add_argument("--dataset", required=True, help="CSV or SQLite file")
    parser.add_argument("--query", required=True, help="free-form text query")
    parser.add_argument(
        "--model",
        default="text-davinci-003",
        choices=sorted(KNOWN_MODELS),
    )
    parser.add_argument("--provider", default="replay", choices=["replay", "live"])
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument(
        "--no-exec", action="store_true", help="skip sandbox execution"
    )
    parser.add_argument(
        "--fixtures", default=None, help="replay fixture store directory"
    )
    parser.add_argument("--table", default=None, help="table name for SQLite input")
    parser.add_argument("--api-key", default=None, help="provider API key (live)")
    parser.add_argument("--timeout", type=int, default=30, help="execution timeout")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_ERROR

    dataset_path = Path(args.dataset)
    if not dataset_path.is_file():
        return _fail_usage(f"dataset path does not exist: {dataset_path}")
    if args.timeout <= 0:
        return _fail_usage("--timeout must be positive")

    if args.provider == "replay":
        store = Path(args.fixtures) if args.fixtures else fixtures_dir()
        if not store.is_dir():
            return _fail_usage(f"fixture store does not exist: {store}")
        provider = ReplayProvider(store)
    else:
        import os

        key = args.api_key or os.environ.get("OPENAI_API_KEY", "")
        if not key:
            return _fail_usage("live provider needs --api-key or OPENAI_API_KEY")
        base_url = os.environ.get("OPENAI_BASE_URL", "https://api.openai.com/v1")
        provider = HttpProvider(
            ProviderConfig(base_url=base_url, api_key=Secret(key))
        )

    executor = None
    if not args.no_exec:
        try:
            from plotsandbox import execute as executor
        except ImportError:
            return _fail_pipeline(
                "execution requested but the plotsandbox package is not "
                "installed; rerun with --no-exec or install sandbox/"
            )

    try:
        frame = _load_frame(dataset_path, args.table)
    except Text2ChartError as exc:
        return _fail_pipeline(str(exc))

    model = KNOWN_MODELS[args.model]
    options = PipelineOptions(
        config=PromptConfig(),
        executor=executor,
        execution_timeout_s=args.timeout,
    )
    outcome = run_model_pipeline(frame, args.query, model, provider, options)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if outcome.prompt is not None:
        (out_dir / "prompt.txt").write_text(
            outcome.prompt.full_text, encoding="utf-8"
        )
    if outcome.raw_completion is not None:
        (out_dir / "raw.txt").write_text(
            outcome.raw_completion.raw_text, encoding="utf-8"
        )
    if outcome.sanitized is not None:
        (out_dir / "script.txt").write_text(
            outcome.sanitized.text, encoding="utf-8"
        )

    if outcome.error is not None:
        return _fail_pipeline(outcome.error)
    if outcome.sanitized is not None and outcome.sanitized.denied is not None:
        denial = outcome.sanitized.denied
        message = f"script denied: {denial.category} ({denial.matched_text!r})"
        if args.no_exec:
            print(f"warning: {message}", file=sys.stderr)
        else:
            return _fail_pipeline(message)

    if not args.no_exec:
        image = execution_image(outcome.execution)
        status = (outcome.execution or {}).get("status")
        if status != "ok" or not image:
            tail = (outcome.execution or {}).get("stderr_tail", "")
            return _fail_pipeline(f"execution failed ({status}): {tail}")
        (out_dir / "chart.png").write_bytes(image)

    return 0


if __name__ == "__main__":
    sys.exit(main())
