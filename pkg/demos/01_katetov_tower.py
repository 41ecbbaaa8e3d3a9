# %% [markdown]
# Katětov towers over a small graph
#
# Start from two non-adjacent vertices, realize every one-point type once,
# and repeat.  Then push the swap of the two base vertices up the tower.

# %%
from fraisse_lab.core import graph
from fraisse_lab.katetov import build_tower, check_richness, finite_determination_witness, lift_automorphism
from fraisse_lab.sir import FREE_GRAPH

X = graph([0, 1])
tower = build_tower(FREE_GRAPH, X, m=1, k=2, bound=20)
print("level sizes:", [len(L) for L in tower.levels])
print("catalog sizes:", [len(s.catalog) for s in tower.steps])

# %% every one-point problem over level j is solved in level j+1
rep = check_richness(tower)
for lv in rep.levels:
    print(f"level {lv['level']}: {lv['solved']}/{lv['probes']} solved")

# %% lift the swap
swap = {0: 1, 1: 0}
lift = lift_automorphism(FREE_GRAPH, tower, swap)
E1 = tower.levels[1]
for v in E1.vertices[2:]:
    nbrs = sorted(E1.adj[v])
    print(f"vertex {v} (neighbours {nbrs}) -> {lift[1][v]}")

# %% how much of the base decides where a vertex goes
for v in E1.vertices:
    w = finite_determination_witness(FREE_GRAPH, tower, swap, [v])
    print(v, "determined by", sorted(w.C), f"({w.checked} automorphisms agree there)")
