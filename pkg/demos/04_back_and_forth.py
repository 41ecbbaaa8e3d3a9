# %% [markdown]
# Two random saturations look alike
#
# Independently seeded saturations of the empty graph differ as labelled
# graphs but survive short back-and-forth games.  Adding a universal vertex
# kills the "non-neighbour" type and the spoiler wins in two moves.

# %%
import numpy as np

from fraisse_lab.core import graph
from fraisse_lab.katetov import back_and_forth_iso, saturate
from fraisse_lab.sir import FREE_GRAPH

chains = [saturate(FREE_GRAPH, graph([]), 1, 3, seed=s) for s in (11, 12)]
A, B = chains[0][-1], chains[1][-1]
for name, G in (("A", A), ("B", B)):
    deg = np.array([len(G.adj[v]) for v in G.vertices])
    print(name, len(G), "vertices, degree sequence", np.sort(deg))

# %%
for depth in (1, 2, 3):
    print("depth", depth, back_and_forth_iso(A, B, depth).to_json())

# %%
u = max(A.vertices) + 1
C = graph(list(A.vertices) + [u], set(A.edges) | {(v, u) for v in A.vertices})
print(back_and_forth_iso(A, C, 2).to_json())
