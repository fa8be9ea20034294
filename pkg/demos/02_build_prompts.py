"""Assemble the two-part prompt that goes to the language model.

Part one is a docstring describing the frame and embedding the user query
verbatim; part two is the script preamble the completion continues from.
The assembly is byte-deterministic: the files under prompts/ are the frozen
record of this exact text.
"""

from pathlib import Path

from text2chart import build_prompt, load_csv, profile_table

ROOT = Path(__file__).resolve().parents[1]

frame = load_csv((ROOT / "data" / "products.csv").read_bytes(), "products")
query = (
    "What is the highest price of product, grouped by product type? "
    "Show a bar chart, and display by the names in desc."
)

prompt = build_prompt(profile_table(frame), query)
print(prompt.full_text)
print(f"boundary at byte {prompt.boundary_offset}: the code prompt starts there")

golden = (ROOT / "prompts" / "case1_full.txt").read_text(encoding="utf-8")
print("matches the frozen golden:", prompt.full_text == golden)
