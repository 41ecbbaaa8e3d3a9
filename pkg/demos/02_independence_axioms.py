# %% [markdown]
# Axiom checks for five independence relations
#
# Each relation is sampled inside its default saturated approximant.  The
# mutated relations should fail somewhere, and the harness hands back a
# shrunk witness.

# %%
import time

from fraisse_lab.katetov import default_approximant
from fraisse_lab.sir import (COMPLETE_GRAPH, FREE_GRAPH, MIN_METRIC, MUTANT_DESCRIPTIONS, POSET_AMALGAM,
                             NGonStrong, check_axioms, mutant)

TRIALS = 100

# %%
for kind in (FREE_GRAPH, COMPLETE_GRAPH, POSET_AMALGAM, MIN_METRIC, NGonStrong(3)):
    t0 = time.time()
    M = default_approximant(kind, seed=7)
    rep = check_axioms(kind, M, trials=TRIALS, seed=7)
    bad = check_axioms(kind, M, trials=TRIALS, seed=7, relation=mutant(kind))
    caught = {ax: t.violations for ax, t in bad.tallies.items() if t.violations}
    print(f"{str(kind):16} |M|={len(M):4}  violations={rep.violations}  "
          f"mutant ({MUTANT_DESCRIPTIONS[kind.name]}) caught by {caught}  {time.time() - t0:.1f}s")

# %% one witness in full
M = default_approximant(FREE_GRAPH, seed=7)
bad = check_axioms(FREE_GRAPH, M, trials=TRIALS, seed=7, relation=mutant(FREE_GRAPH))
print(bad["SIR5"].witness)
