# %% [markdown]
# Free completion of n-gon fragments
#
# A path of five vertices closes into a hexagon, the smallest generalized
# 3-gon.  Larger seeds keep growing; each added path is neutral for the
# relative characteristic, so the seed stays strong in its completion.

# %%
from fraisse_lab.core import NGon, induced, path
from fraisse_lab.io import to_dot
from fraisse_lab.ngon import diameter, free_completion, girth, is_free_completion_of, is_n_strong, rel_chi

rep = free_completion(3, path(5, NGon(3)), depth=3)
H = rep.fragment
print(f"rounds={rep.rounds} fixpoint={rep.fixpoint} |V|={len(H)} girth={girth(H)} diameter={diameter(H)}")

# %% a seed that does not close up
seed = path(7, NGon(3))
for d in range(4):
    r = free_completion(3, seed, d)
    print(f"depth {d}: {len(r.fragment)} vertices, fixpoint {r.fixpoint}")

# %% each new path has relative characteristic zero over its endpoints
r = free_completion(3, seed, 3)
for paths in r.added:
    print([rel_chi(3, induced(r.fragment, (x, y) + p), [x, y]) for (x, y), p in paths.items()])

# %%
D = r.fragment
print("seed strong in completion:", is_n_strong(3, seed, D).verdict)
print("recognised as its free completion:", is_free_completion_of(3, seed, D, r.rounds))
print("a sparse subset:", is_n_strong(3, {0, 6}, D))

# %% DOT with rounds as colours
print(to_dot(D, r.vertex_round))
