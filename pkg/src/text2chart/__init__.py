"""text2chart: free-form text queries over tabular data, answered with
LLM-generated plotting scripts that run in an isolated sandbox."""

from .errors import (
    AuthFailed,
    ContextOverflow,
    DatasetNotFound,
    DuplicateColumn,
    EmptyInput,
    EmptyQuery,
    FixtureMissing,
    GatewayError,
    HarnessError,
    IngestError,
    InvalidFrame,
    NoCodeFound,
    NotADatabase,
    ProviderTimeout,
    ProviderUnavailable,
    RaggedRows,
    RateLimited,
    Text2ChartError,
    UnreadableFile,
)
from .gateway import (
    CHATGPT,
    CODEX,
    GPT3,
    KNOWN_MODELS,
    CompletionRequest,
    CompletionResult,
    HttpProvider,
    ModelId,
    ProviderConfig,
    ReplayProvider,
    Secret,
    complete,
    fixture_key,
    replay_provider,
)
from .harness import (
    CaseFixture,
    CaseReport,
    SuiteReport,
    load_fixture,
    rebuild_index,
    run_all,
    run_case,
    static_chart_family,
)
from .ingest import (
    ColumnData,
    DatasetRegistry,
    SourceMeta,
    TableFrame,
    load_csv,
    load_sqlite,
    to_csv_bytes,
)
from .pipeline import (
    ModelOutcome,
    PipelineOptions,
    execution_image,
    png_dimensions,
    run_model_pipeline,
)
from .profiling import (
    ColumnProfile,
    SchemaProfile,
    distinct_values,
    infer_dtype,
    profile_table,
)
from .prompting import (
    CodePrompt,
    DescriptionPrompt,
    EngineeredPrompt,
    PromptConfig,
    assemble,
    build_code_prompt,
    build_description,
    build_prompt,
)
from .sanitize import (
    DEFAULT_POLICY,
    DenialReason,
    SanitizedScript,
    extract_code,
    load_policy,
    prefix_code_prompt,
    safety_screen,
    sanitize,
    strip_file_load,
    truncate_at_stop,
)

__version__ = "0.1.0"
