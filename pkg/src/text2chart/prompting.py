"""Assemble the two-part prompt sent to the language models.

The description part is a docstring that tells the model what frame it has
(schema lines, enumerated category values, labelling instructions, runtime
version) and embeds the user query verbatim. The code part is a script
preamble (imports, fixed-size single subplot, frame-copy assignment) that
both steers the model and is re-prefixed onto its completion.

The exact wording is frozen; the files under prompts/ are the byte-exact
record of these templates and the tests compare against them.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EmptyQuery
from .profiling import DEFAULT_CATEGORICAL_THRESHOLD, OBJECT, SchemaProfile

DOCSTRING_DELIMITER = '"""'

_USE_FRAME_LINE = "Use a dataframe called {alias} from {file_name}."
_PLAIN_COLUMN_LINE = "The column '{name}' has dtype {dtype}."
_CATEGORICAL_COLUMN_LINE = (
    "The column '{name}' has dtype {dtype} "
    "and contains the categorical values {values}."
)
_LABEL_LINE = (
    "Label the x and y axes appropriately. Add a title. "
    "Set the fig suptitle as empty."
)
_CREATE_SCRIPT_LINE = (
    "Using {version}, create a script using the dataframe {alias} "
    "to graph the following: {query}"
)
_CODE_PROMPT_TEMPLATE = (
    "import pandas as pd\n"
    "import matplotlib.pyplot as plt\n"
    "fig, ax = plt.subplots(1, 1, figsize=({width}, {height}))\n"
    "{alias} = {alias}.copy()\n"
)


@dataclass(frozen=True)
class PromptConfig:
    frame_alias: str = "df"
    expected_file_name: str = "data_file.csv"
    runtime_version_label: str = "Python version 3.9"
    figure_width: float = 10.0
    figure_height: float = 4.0
    categorical_threshold: int = DEFAULT_CATEGORICAL_THRESHOLD

    def __post_init__(self) -> None:
        if not self.frame_alias.isidentifier():
            raise ValueError(f"frame_alias {self.frame_alias!r} is not an identifier")
        if self.figure_width <= 0 or self.figure_height <= 0:
            raise ValueError("figure dimensions must be positive")
        if self.categorical_threshold < 1:
            raise ValueError("categorical_threshold must be positive")


@dataclass(frozen=True)
class DescriptionPrompt:
    text: str


@dataclass(frozen=True)
class CodePrompt:
    text: str


@dataclass(frozen=True)
class EngineeredPrompt:
    description: DescriptionPrompt
    code: CodePrompt
    full_text: str
    boundary_offset: int


def _schema_line(name: str, dtype: str, values: tuple[str, ...] | None) -> str:
    if dtype == OBJECT and values:
        rendered = ", ".join(repr(v) for v in values)
        return _CATEGORICAL_COLUMN_LINE.format(
            name=name, dtype=dtype, values=rendered
        )
    return _PLAIN_COLUMN_LINE.format(name=name, dtype=dtype)


def _dimension(value: float) -> str:
    return f"{value:g}"


def build_description(
    profile: SchemaProfile,
    query: str,
    config: PromptConfig | None = None,
) -> DescriptionPrompt:
    """Build the docstring part. The query is embedded verbatim: no
    trimming, spelling correction or normalization of any kind."""
    config = config or PromptConfig()
    if not query.strip():
        raise EmptyQuery("query is empty")
    lines = [DOCSTRING_DELIMITER]
    lines.append(
        _USE_FRAME_LINE.format(
            alias=config.frame_alias, file_name=config.expected_file_name
        )
    )
    for column in profile.columns:
        lines.append(
            _schema_line(column.name, column.dtype, column.categorical_values)
        )
    lines.append(_LABEL_LINE)
    lines.append(
        _CREATE_SCRIPT_LINE.format(
            version=config.runtime_version_label,
            alias=config.frame_alias,
            query=query,
        )
    )
    lines.append(DOCSTRING_DELIMITER)
    return DescriptionPrompt("\n".join(lines) + "\n")


def build_code_prompt(config: PromptConfig | None = None) -> CodePrompt:
    """Build the script preamble. Depends only on the config, never on the
    dataset."""
    config = config or PromptConfig()
    return CodePrompt(
        _CODE_PROMPT_TEMPLATE.format(
            width=_dimension(config.figure_width),
            height=_dimension(config.figure_height),
            alias=config.frame_alias,
        )
    )


def assemble(description: DescriptionPrompt, code: CodePrompt) -> EngineeredPrompt:
    """Concatenate the two parts, recording where the code part begins."""
    full_text = description.text + code.text
    return EngineeredPrompt(
        description=description,
        code=code,
        full_text=full_text,
        boundary_offset=len(description.text),
    )


def build_prompt(
    profile: SchemaProfile,
    query: str,
    config: PromptConfig | None = None,
) -> EngineeredPrompt:
    """Description + code prompt in one step."""
    config = config or PromptConfig()
    return assemble(
        build_description(profile, query, config), build_code_prompt(config)
    )
