"""Count what each scheme actually spends: exponentiations, messages, bytes.

The counters come from instrumented honest runs, not from reading the
protocol description. The headline figures ride along as annotations in the
right-hand column; the two-party measurements are the numbers that bind.
"""

import sys

from pakelab.core import TOY_PARAMS, generate_params
from pakelab.harness import compare_efficiency

table = compare_efficiency(TOY_PARAMS, trials=50, seed=0)
print("toy group, 50 honest runs per scheme:\n")
print(table.render_text())

# same shape on a 16-bit group, to show the counts are size-independent
params = generate_params(16, seed=7)
print(f"\n16-bit group q={params.q}, 20 runs per scheme:\n")
print(compare_efficiency(params, trials=20, seed=1).render_text())

if "--csv" in sys.argv:
    print("\n" + table.render_csv())
