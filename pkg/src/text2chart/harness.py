"""Replay the recorded case studies and check structural properties of the
resulting scripts (and charts, when an executor is supplied).

Fixture layout::

    fixtures/
      index.json            {content hash -> fixture path, "cases" -> names}
      <case_id>/
        meta.json           dataset, query, expectations
        <wire_name>.txt     recorded completion per model

Checks are static by design: chart family comes from a fixed table of
plotting-call names, so the whole suite runs without executing anything.
Divergences that are recorded in the fixtures themselves (a model that
ignored part of the query) are expected: they report as "known-miss" and do
not fail the suite.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import HarnessError
from .gateway import KNOWN_MODELS, ModelId, ReplayProvider, fixture_key
from .ingest import TableFrame, load_csv
from .paths import data_dir, fixtures_dir
from .pipeline import (
    Executor,
    ModelOutcome,
    PipelineOptions,
    execution_image,
    png_dimensions,
    run_model_pipeline,
)
from .profiling import profile_table
from .prompting import PromptConfig, build_prompt

CHART_FAMILIES = ("bar", "line", "scatter", "box", "histogram", "any")

# (regex, family). The kind= form wins over a bare .plot( at the same spot.
_KIND_RE = re.compile(r"\.plot\s*\(\s*kind\s*=\s*['\"](\w+)['\"]")
_KIND_FAMILIES = {
    "bar": "bar",
    "barh": "bar",
    "line": "line",
    "scatter": "scatter",
    "box": "box",
    "hist": "histogram",
}
_CALL_FAMILIES: tuple[tuple[str, str], ...] = (
    (r"\.bar\(", "bar"),
    (r"\.barh\(", "bar"),
    (r"\bsns\.barplot\(", "bar"),
    (r"\.scatter\(", "scatter"),
    (r"\bsns\.scatterplot\(", "scatter"),
    (r"\.boxplot\(", "box"),
    (r"\bsns\.boxplot\(", "box"),
    (r"\.hist\(", "histogram"),
    (r"\bsns\.histplot\(", "histogram"),
    (r"\bsns\.lineplot\(", "line"),
    (r"\.plot\(", "line"),
)


def static_chart_family(script: str) -> str:
    """Classify the first recognized plotting call; unknown -> "any"."""
    candidates: list[tuple[int, int, str]] = []
    for match in _KIND_RE.finditer(script):
        family = _KIND_FAMILIES.get(match.group(1))
        if family:
            candidates.append((match.start(), 0, family))
    for pattern, family in _CALL_FAMILIES:
        match = re.search(pattern, script)
        if match:
            candidates.append((match.start(), 1, family))
    if not candidates:
        return "any"
    return min(candidates)[2]


@dataclass(frozen=True)
class CaseExpectations:
    chart_family: str
    per_model_family: dict[str, str]
    must_reference_columns: tuple[str, ...]
    filter_patterns: tuple[str, ...]
    known_misses: dict[str, tuple[str, ...]]

    def family_for(self, wire_name: str) -> str:
        return self.per_model_family.get(wire_name, self.chart_family)


@dataclass(frozen=True)
class CaseFixture:
    case_id: str
    title: str
    dataset_path: Path
    frame_name: str
    query: str
    models: tuple[ModelId, ...]
    expectations: CaseExpectations
    case_dir: Path

    def completion_path(self, wire_name: str) -> Path:
        return self.case_dir / f"{wire_name}.txt"


@dataclass
class CheckResult:
    name: str
    status: str  # pass | fail | known-miss

    @property
    def hard_failure(self) -> bool:
        return self.status == "fail"


@dataclass
class ModelReport:
    wire_name: str
    prompt_ok: bool = False
    sanitize_ok: bool = False
    static_checks: list[CheckResult] = field(default_factory=list)
    exec_ok: Optional[bool] = None
    error: Optional[str] = None
    outcome: Optional[ModelOutcome] = None

    @property
    def hard_failures(self) -> list[str]:
        failures = [c.name for c in self.static_checks if c.hard_failure]
        if not self.prompt_ok:
            failures.append("prompt")
        if not self.sanitize_ok:
            failures.append("sanitize")
        if self.exec_ok is False:
            failures.append("execution")
        return failures


@dataclass
class CaseReport:
    case_id: str
    models: list[ModelReport]

    @property
    def ok(self) -> bool:
        return not any(m.hard_failures for m in self.models)

    def summary(self) -> str:
        lines = [f"{self.case_id}: {'ok' if self.ok else 'FAILED'}"]
        for m in self.models:
            checks = ", ".join(f"{c.name}={c.status}" for c in m.static_checks)
            exec_note = "" if m.exec_ok is None else f", exec={'ok' if m.exec_ok else 'FAIL'}"
            err_note = f", error={m.error}" if m.error else ""
            lines.append(f"  {m.wire_name}: {checks}{exec_note}{err_note}")
        return "\n".join(lines)


@dataclass
class SuiteReport:
    reports: list[CaseReport]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.reports)

    def summary(self) -> str:
        return "\n".join(r.summary() for r in self.reports)


def _resolve_model(wire_name: str) -> ModelId:
    model = KNOWN_MODELS.get(wire_name)
    if model is None:
        raise HarnessError(f"unknown model wire name {wire_name!r}")
    return model


def load_fixture(case_dir: str | Path, datasets: str | Path | None = None) -> CaseFixture:
    case_dir = Path(case_dir)
    meta_path = case_dir / "meta.json"
    if not meta_path.is_file():
        raise HarnessError(f"missing {meta_path}")
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    datasets = Path(datasets) if datasets else data_dir()
    dataset_path = datasets / meta["dataset"]
    expectations = meta["expectations"]
    fixture = CaseFixture(
        case_id=meta["case_id"],
        title=meta.get("title", meta["case_id"]),
        dataset_path=dataset_path,
        frame_name=meta["frame_name"],
        query=meta["query"],
        models=tuple(_resolve_model(name) for name in meta["models"]),
        expectations=CaseExpectations(
            chart_family=expectations["chart_family"],
            per_model_family=dict(expectations.get("per_model_family", {})),
            must_reference_columns=tuple(
                expectations.get("must_reference_columns", [])
            ),
            filter_patterns=tuple(expectations.get("filter_patterns", [])),
            known_misses={
                k: tuple(v)
                for k, v in expectations.get("known_misses", {}).items()
            },
        ),
        case_dir=case_dir,
    )
    if not dataset_path.is_file():
        raise HarnessError(f"{fixture.case_id}: dataset missing: {dataset_path}")
    for model in fixture.models:
        if not fixture.completion_path(model.wire_name).is_file():
            raise HarnessError(
                f"{fixture.case_id}: completion fixture missing for "
                f"{model.wire_name}"
            )
    return fixture


def load_frame(fixture: CaseFixture) -> TableFrame:
    return load_csv(fixture.dataset_path.read_bytes(), fixture.frame_name)


def _static_checks(
    fixture: CaseFixture, wire_name: str, script: str
) -> list[CheckResult]:
    exp = fixture.expectations
    misses = exp.known_misses.get(wire_name, ())
    checks = []

    expected_family = exp.family_for(wire_name)
    family = static_chart_family(script)
    family_ok = expected_family == "any" or family == expected_family
    checks.append(
        _check(f"family:{expected_family}", family_ok, "family" in misses)
    )
    for column in exp.must_reference_columns:
        checks.append(
            _check(
                f"column:{column}",
                column in script,
                f"column:{column}" in misses,
            )
        )
    for pattern in exp.filter_patterns:
        checks.append(
            _check(
                f"filter:{pattern}",
                re.search(pattern, script) is not None,
                f"filter:{pattern}" in misses,
            )
        )
    return checks


def _check(name: str, passed: bool, known_miss: bool) -> CheckResult:
    if passed:
        return CheckResult(name, "pass")
    if known_miss:
        return CheckResult(name, "known-miss")
    return CheckResult(name, "fail")


def run_case(
    fixture: CaseFixture,
    with_execution: bool = False,
    store: str | Path | None = None,
    executor: Optional[Executor] = None,
    config: Optional[PromptConfig] = None,
) -> CaseReport:
    """Replay one case across its models and evaluate every expectation."""
    provider = ReplayProvider(store or fixtures_dir())
    frame = load_frame(fixture)
    config = config or PromptConfig()
    if with_execution and executor is None:
        executor = _load_sandbox_executor()
    options = PipelineOptions(
        config=config, executor=executor if with_execution else None
    )
    report = CaseReport(case_id=fixture.case_id, models=[])
    for model in fixture.models:
        outcome = run_model_pipeline(frame, fixture.query, model, provider, options)
        model_report = ModelReport(wire_name=model.wire_name, outcome=outcome)
        model_report.error = outcome.error
        model_report.prompt_ok = outcome.prompt is not None and (
            outcome.raw_completion is not None
        )
        model_report.sanitize_ok = (
            outcome.sanitized is not None and outcome.sanitized.denied is None
        )
        if outcome.sanitized is not None:
            model_report.static_checks = _static_checks(
                fixture, model.wire_name, outcome.sanitized.text
            )
        if with_execution:
            model_report.exec_ok = _execution_ok(outcome.execution)
        report.models.append(model_report)
    return report


def _execution_ok(execution: Optional[dict]) -> bool:
    if not execution or execution.get("status") != "ok":
        return False
    image = execution_image(execution)
    if not image:
        return False
    try:
        png_dimensions(image)
    except ValueError:
        return False
    return True


def _load_sandbox_executor() -> Executor:
    try:
        from plotsandbox import execute
    except ImportError as exc:
        raise HarnessError(
            "execution requested but the plotsandbox package is not installed"
        ) from exc
    return execute


def run_all(
    with_execution: bool = False,
    store: str | Path | None = None,
    datasets: str | Path | None = None,
    executor: Optional[Executor] = None,
) -> SuiteReport:
    """Run every fixture case, sorted by case id."""
    store = Path(store or fixtures_dir())
    case_dirs = sorted(
        p for p in store.iterdir() if p.is_dir() and (p / "meta.json").is_file()
    )
    if not case_dirs:
        raise HarnessError(f"no case fixtures under {store}")
    reports = []
    for case_dir in case_dirs:
        fixture = load_fixture(case_dir, datasets)
        reports.append(
            run_case(
                fixture,
                with_execution=with_execution,
                store=store,
                executor=executor,
            )
        )
    return SuiteReport(reports)


def rebuild_index(
    store: str | Path | None = None,
    datasets: str | Path | None = None,
    config: Optional[PromptConfig] = None,
) -> dict[str, str]:
    """Recompute index.json from the fixture metas and shipped datasets.

    The index keys are content hashes of (wire name, prompt text); prompts
    are rebuilt from the datasets, so the index follows any dataset or
    template change.
    """
    store = Path(store or fixtures_dir())
    config = config or PromptConfig()
    index: dict[str, str] = {}
    case_dirs = sorted(
        p for p in store.iterdir() if p.is_dir() and (p / "meta.json").is_file()
    )
    for case_dir in case_dirs:
        fixture = load_fixture(case_dir, datasets)
        frame = load_frame(fixture)
        profile = profile_table(frame, config.categorical_threshold)
        prompt = build_prompt(profile, fixture.query, config)
        for model in fixture.models:
            key = fixture_key(model.wire_name, prompt.full_text)
            index[key] = f"{fixture.case_id}/{model.wire_name}.txt"
    (store / "index.json").write_text(
        json.dumps(index, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return index
