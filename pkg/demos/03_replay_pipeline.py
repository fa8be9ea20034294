"""Run the full pipeline offline against recorded completions.

The replay provider is a pure function from (model, prompt) to a recorded
transcript, which makes the whole pipeline reproducible without network
access or API keys.
"""

from pathlib import Path

from text2chart import (
    CHATGPT,
    CODEX,
    GPT3,
    ReplayProvider,
    load_csv,
    run_model_pipeline,
)

ROOT = Path(__file__).resolve().parents[1]

frame = load_csv((ROOT / "data" / "movies.csv").read_bytes(), "movies")
provider = ReplayProvider(ROOT / "fixtures")

# the misspelled query from the recorded case studies, forwarded verbatim
query = "draw the numbr of movie by gener"

for model in (GPT3, CODEX, CHATGPT):
    outcome = run_model_pipeline(frame, query, model, provider)
    print(f"=== {model.wire_name} ===")
    if outcome.error:
        print("error:", outcome.error)
        continue
    print(outcome.sanitized.text)
