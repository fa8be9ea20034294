from __future__ import annotations

import random

import pytest

from text2chart import (
    DEFAULT_POLICY,
    NoCodeFound,
    build_code_prompt,
    extract_code,
    load_policy,
    prefix_code_prompt,
    safety_screen,
    sanitize,
    strip_file_load,
    truncate_at_stop,
)

from conftest import FIXTURES_DIR

CODE = build_code_prompt()


# -- extract_code ---------------------------------------------------------


def test_fence_extraction():
    raw = "Here is the code:\n```\nX\n```\nHope this helps"
    assert extract_code(raw, "chat") == "X"


def test_fence_with_language_marker():
    raw = "```python\nax.bar(x, y)\n```"
    assert extract_code(raw, "chat") == "ax.bar(x, y)"


def test_completion_kind_is_identity():
    assert extract_code("plt.bar(x, y)", "completion") == "plt.bar(x, y)"


def test_first_of_two_fences_wins():
    raw = "```\nfirst()\n```\nor alternatively\n```\nsecond()\n```"
    assert extract_code(raw, "chat") == "first()"


def test_empty_fence_raises():
    with pytest.raises(NoCodeFound):
        extract_code("```\n\n```", "chat")


def test_unfenced_chat_prose_stripped():
    raw = (
        "Sure, here is a script.\n"
        "import pandas as pd\n"
        "counts = df['a'].value_counts()\n"
        "ax.bar(counts.index, counts.values)\n"
        "Let me know if you need anything else."
    )
    assert extract_code(raw, "chat") == (
        "import pandas as pd\n"
        "counts = df['a'].value_counts()\n"
        "ax.bar(counts.index, counts.values)\n"
    )


def test_unfenced_all_prose_passes_through():
    raw = "I cannot help with that request."
    assert extract_code(raw, "chat") == raw


# -- strip_file_load --------------------------------------------------------


def test_strip_removes_read_line():
    script = "df = pd.read_csv('data_file.csv')\nax.bar(df['a'], df['b'])\n"
    stripped, removed = strip_file_load(script, "data_file.csv")
    assert stripped == "ax.bar(df['a'], df['b'])\n"
    assert removed == ["df = pd.read_csv('data_file.csv')"]


def test_strip_without_match_is_identity():
    script = "ax.bar(df['a'], df['b'])\n"
    stripped, removed = strip_file_load(script, "data_file.csv")
    assert stripped == script
    assert removed == []


def test_strip_is_idempotent():
    script = "df = pd.read_csv('data_file.csv')\nax.plot(df)\n"
    once, _ = strip_file_load(script, "data_file.csv")
    twice, removed = strip_file_load(once, "data_file.csv")
    assert twice == once
    assert removed == []


def test_strip_preserves_untouched_lines_exactly():
    script = "a = 1\ndf = pd.read_csv('data_file.csv')\n  b = 2 # keep indent\n"
    stripped, _ = strip_file_load(script, "data_file.csv")
    assert stripped == "a = 1\n  b = 2 # keep indent\n"


# -- truncate_at_stop -------------------------------------------------------


def test_truncate_cuts_before_marker():
    text, truncated = truncate_at_stop("A\nplt.show()\nB", ("plt.show()",))
    assert text == "A\n"
    assert truncated is True


def test_truncate_without_marker():
    text, truncated = truncate_at_stop("A\nB", ("plt.show()",))
    assert text == "A\nB"
    assert truncated is False


def test_truncate_idempotent():
    once, _ = truncate_at_stop("A\nplt.show()\nB", ("plt.show()",))
    twice, truncated = truncate_at_stop(once, ("plt.show()",))
    assert twice == once
    assert truncated is False


def test_truncate_earliest_of_multiple_stops():
    text, _ = truncate_at_stop("abcSTOPdefHALTghi", ("HALT", "STOP"))
    assert text == "abc"


# -- prefix_code_prompt -------------------------------------------------------


def test_prefix_prepends():
    assert prefix_code_prompt(CODE, "body()\n") == CODE.text + "body()\n"


def test_prefix_never_duplicates():
    body = CODE.text + "body()\n"
    assert prefix_code_prompt(CODE, body) == body


# -- safety_screen ------------------------------------------------------------


@pytest.mark.parametrize(
    "snippet,category",
    [
        ("import subprocess\nsubprocess.run(['rm'])", "process-spawn"),
        ("os.system('ls')", "process-spawn"),
        ("import socket\ns = socket.socket()", "network"),
        ("from urllib import request", "network"),
        ("shutil.rmtree('/tmp/x')", "filesystem-write"),
        ("f = open('/etc/passwd')", "filesystem-write"),
        ("key = os.environ['OPENAI_API_KEY']", "env-secret"),
        ("import ctypes", "import-denied"),
        ("eval('1+1')", "import-denied"),
    ],
)
def test_screen_denies(snippet, category):
    denial = safety_screen(snippet)
    assert denial is not None
    assert denial.category == category
    assert denial.matched_text in snippet


def test_screen_allows_plotting_code():
    script = (
        "import pandas as pd\n"
        "import matplotlib.pyplot as plt\n"
        "vals = df.groupby('t')['p'].max()\n"
        "ax.bar(vals.index, vals.values)\n"
        "result = df.eval('p * 2')\n"  # pandas .eval is not bare eval(
    )
    assert safety_screen(script) is None


def test_screen_frozen_case1_script_allowed():
    script = (FIXTURES_DIR.parent / "scripts" / "case1_sanitized.txt").read_text()
    assert safety_screen(script) is None


def test_policy_file_roundtrip(tmp_path):
    policy_file = tmp_path / "denylist.txt"
    policy_file.write_text(
        "# custom rules\n"
        "network \\bpycurl\\b\n"
        "process-spawn \\bpexpect\\b  # spawning through a pty wrapper\n"
        "\n"
    )
    policy = load_policy(policy_file)
    assert policy == (("network", r"\bpycurl\b"), ("process-spawn", r"\bpexpect\b"))
    assert safety_screen("import pycurl", policy).category == "network"


def test_policy_file_rejects_bad_lines(tmp_path):
    policy_file = tmp_path / "denylist.txt"
    policy_file.write_text("made-up-category \\bfoo\\b\n")
    with pytest.raises(ValueError):
        load_policy(policy_file)


# -- composed pipeline ---------------------------------------------------------


def test_pipeline_chat_reply_end_to_end():
    raw = (
        "Here you go:\n\n"
        "```python\n"
        "import pandas as pd\n"
        "df = pd.read_csv('data_file.csv')\n"
        "ax.bar(df['a'], df['b'])\n"
        "plt.show()\n"
        "```\n\n"
        "Enjoy!"
    )
    clean = sanitize(raw, "chat", CODE)
    assert clean.text.startswith(CODE.text)
    assert "data_file.csv" not in clean.text
    assert "plt.show()" not in clean.text[len(CODE.text):]
    assert clean.extracted_from_fence is True
    assert clean.truncated_at_stop is True
    assert clean.removed_load_lines == ("df = pd.read_csv('data_file.csv')",)
    assert clean.denied is None


def test_pipeline_completion_end_to_end():
    raw = "vals = df['a']\nax.plot(vals)\n"
    clean = sanitize(raw, "completion", CODE)
    assert clean.text == CODE.text + raw
    assert clean.extracted_from_fence is False
    assert clean.truncated_at_stop is False


def test_pipeline_denies_subprocess():
    clean = sanitize("import subprocess\n", "completion", CODE)
    assert clean.denied is not None
    assert clean.denied.category == "process-spawn"


def test_pipeline_idempotent_on_own_output():
    raw = (
        "Some prose\n```\nimport pandas as pd\n"
        "df = pd.read_csv('data_file.csv')\nax.plot(df)\nplt.show()\nrest\n```\n"
    )
    first = sanitize(raw, "chat", CODE)
    second = sanitize(first.text, "completion", CODE)
    assert second.text == first.text
    assert second.removed_load_lines == ()
    assert second.truncated_at_stop is False


_FIXTURE_SCRIPTS = sorted(FIXTURES_DIR.glob("case*/**/*.txt"))


def _mutate(rng: random.Random, base: str) -> tuple[str, str]:
    """Randomly splice load lines, stop markers and prose around a fixture."""
    lines = base.splitlines()
    kind = rng.choice(["load", "stop", "prose", "plain", "combo"])
    insertions = {
        "load": ["df = pd.read_csv('data_file.csv')"],
        "stop": ["plt.show()", "print('after')"],
        "prose": [],
        "plain": [],
        "combo": [
            "data = pd.read_csv('data_file.csv')",
            "plt.show()",
        ],
    }[kind]
    for chunk in insertions:
        lines.insert(rng.randint(0, len(lines)), chunk)
    text = "\n".join(lines) + "\n"
    model_kind = rng.choice(["completion", "chat"])
    if model_kind == "chat" and rng.random() < 0.5:
        text = "Sure thing!\n```python\n" + text + "```\nAnything else?"
    return text, model_kind


def test_pipeline_properties_over_randomized_mutations():
    rng = random.Random(987654321)
    bases = [p.read_text() for p in _FIXTURE_SCRIPTS]
    assert bases, "fixture scripts must exist"
    for i in range(1000):
        raw, model_kind = _mutate(rng, rng.choice(bases))
        clean = sanitize(raw, model_kind, CODE)
        # code prompt exactly once, at the start
        assert clean.text.startswith(CODE.text)
        assert clean.text.count(CODE.text) == 1
        # the anticipated file never survives
        assert "data_file.csv" not in clean.text
        # no stop marker after sanitization
        assert "plt.show()" not in clean.text
        # idempotence on own output
        again = sanitize(clean.text, "completion", CODE)
        assert again.text == clean.text
        # only whole-line deletions plus the prefix: every kept line is a
        # source line
        source_lines = set(raw.split("\n"))
        prompt_lines = set(CODE.text.split("\n"))
        for line in clean.text.split("\n"):
            assert line in source_lines or line in prompt_lines


def test_extract_never_crashes_on_junk():
    rng = random.Random(24)
    alphabet = "abc`\n #()='\"\\"
    for _ in range(300):
        junk = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 60)))
        try:
            extract_code(junk, "chat")
        except NoCodeFound:
            pass


def test_default_policy_categories_are_valid():
    from text2chart.sanitize import DENIAL_CATEGORIES

    assert set(c for c, _ in DEFAULT_POLICY) <= set(DENIAL_CATEGORIES)
