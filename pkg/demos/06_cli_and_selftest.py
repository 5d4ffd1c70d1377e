# ---
# jupyter:
#   jupytext:
#     text_representation:
#       extension: .py
#       format_name: light
#       format_version: '1.5'
#   kernelspec:
#     display_name: Python 3
#     name: python3
# ---

# # Command line and acceptance suite
#
# The `zamint` command exposes every check.  This script drives it in
# process through `main` and reads back the JSON records.

# +
import contextlib
import io
import json

from zamint.cli import main
from zamint.selftest import run_criterion
# -


def zamint(*argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf), contextlib.redirect_stderr(io.StringIO()):
        code = main(list(argv))
    return code, [json.loads(line) for line in buf.getvalue().splitlines() if line.startswith("{")]


# One check, two parameter points.  Complex values use an `i` suffix.

code, recs = zamint("verify", "thm1", "--sigma", "1,1,1", "--sigma", "1.2,1.1+0.3i,1.3")
print(code)
for r in recs:
    print(r["lhs"]["value"], r["rhs"], r["rel_error"])

# A divergent point exits with code 3 and a status record.

print(zamint("verify", "thm1", "--sigma", "0.4,1,1"))

# A sweep ends with a summary record.

code, recs = zamint("sweep", "thm1", "--grid", "0.8,1.2")
print(code, recs[-1])

# The acceptance criteria are also library routines.  Criterion 7 is the
# chordal gate and criterion 3 the deterministic grid.

for n in (3, 7):
    print(run_criterion(n, quick=True).summary_line())

# The full suite: `zamint selftest`, or `zamint selftest --quick` for reduced
# budgets.  Its stdout is byte-identical across worker counts.

code, recs = zamint("selftest", "--quick", "--criteria", "7")
print(code, recs[-1])
