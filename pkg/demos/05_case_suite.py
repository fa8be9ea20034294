"""Replay all six recorded case studies and print the structural report.

Static checks only: chart family from a fixed call-name table, column
references and filter terms. Pass --exec to also execute each script in the
sandbox (requires the plotsandbox package from sandbox/).
"""

import sys

from text2chart import run_all

with_execution = "--exec" in sys.argv
suite = run_all(with_execution=with_execution)
print(suite.summary())
print()
print("suite:", "ok" if suite.ok else "FAILED")
sys.exit(0 if suite.ok else 1)
