"""What the sanitizer does to a messy chat reply.

Chat models wrap code in prose and fences, sometimes reload the data file
and usually end with an interactive show call. The sanitizer extracts the
code, drops the file load, truncates at the stop marker, re-prefixes the
code prompt and screens for unsafe operations.
"""

from text2chart import build_code_prompt, sanitize

REPLY = """\
Sure! Here is a script that draws your chart:

```python
import pandas as pd
import matplotlib.pyplot as plt

df = pd.read_csv('data_file.csv')

counts = df['Genre'].value_counts()

fig, ax = plt.subplots(1, 1, figsize=(10, 4))
ax.bar(counts.index, counts.values)
plt.show()
```

Let me know if you would like different colours.
"""

code_prompt = build_code_prompt()
clean = sanitize(REPLY, "chat", code_prompt)

print("extracted from fence:", clean.extracted_from_fence)
print("removed load lines:  ", list(clean.removed_load_lines))
print("truncated at stop:   ", clean.truncated_at_stop)
print("denied:              ", clean.denied)
print("--- executable script ---")
print(clean.text)

# anything touching processes, sockets or the environment is refused
hostile = sanitize("import subprocess\nsubprocess.run(['curl', 'evil'])\n",
                   "completion", code_prompt)
print("hostile script denied:", hostile.denied)
