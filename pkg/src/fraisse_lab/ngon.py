"""Generalized n-gon machinery: graph metric, the functions f_k, the weighted
characteristic chi_n, n-strong subgraphs and free n-completion.

Fragments are finite bipartite graphs of girth >= 2n standing in for their
free completion.  Fragment distances below n+1 are exact; larger ones are
only upper bounds on the completed distance, so anything depending on them
is flagged rather than silently answered.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from . import _bfs
from .core import FinStructure, induced, is_embedding, ngon
from .errors import DepthCaveat, DepthInsufficient, InternalInvariantViolation, SearchBoundExceeded

INF = _bfs.INF
STRONG_BOUND = 20


def graph_metric(G: FinStructure, x, y):
    return G.graph_distance(x, y)


def girth(G: FinStructure):
    return _bfs.girth(G.adj)


def diameter(G: FinStructure):
    if not len(G):
        return 0
    return max(_bfs.eccentricities(G.adj).values())


def is_generalized_ngon(G: FinStructure, n: int) -> bool:
    return diameter(G) == n and girth(G) == 2 * n


def eval_fk(G: FinStructure, k: int, x, y):
    """f_k(x, y): the k-th vertex on the unique shortest x-y path, else x.

    Pairs beyond fragment distance n have an unknown completed distance; they
    fall back to x and emit a DepthCaveat warning.
    """
    n = G.tag.n
    if not 0 <= k <= n:
        raise ValueError(f"k={k} outside 0..{n}")
    if k == 0:
        return x
    d = G.graph_distance(x, y)
    if d > n:
        warnings.warn(DepthCaveat(f"f_{k}({x},{y}): fragment distance {d} > {n}"), stacklevel=2)
        return x
    if d == n or k > d:
        return x
    paths = _bfs.shortest_paths(G.adj, x, y, limit=2, dist=G.distances_from(y))
    if len(paths) != 1:
        raise InternalInvariantViolation(f"{len(paths)} shortest paths of length {d} < {n}")
    return paths[0][k]


# -- Euler-type characteristic ---------------------------------------------------

def chi(n: int, H: FinStructure) -> int:
    return (n - 1) * len(H.vertices) - (n - 2) * len(H.edges)


def rel_chi(n: int, H: FinStructure, X: Iterable[int]) -> int:
    """chi_n(H / H cap X), with H cap X the subgraph of H induced on the shared vertices."""
    return chi(n, H) - chi(n, induced(H, set(X) & H.vset))


@dataclass(frozen=True)
class StrongCertificate:
    verdict: bool
    witness: frozenset
    value: int

    def to_json(self):
        return {"strong": self.verdict, "witness": sorted(self.witness), "min_rel_chi": self.value}


def _check_sub(X, Y):
    xs = set(X.vertices) if isinstance(X, FinStructure) else set(X)
    if not xs <= Y.vset:
        raise ValueError("X is not a subgraph of Y")
    if isinstance(X, FinStructure):
        if X.edges != induced(Y, xs).edges:
            raise ValueError("X is not an induced subgraph of Y")
    return xs


def _masks(Y, order):
    idx = {v: i for i, v in enumerate(order)}
    out = [0] * len(order)
    for u, v in Y.edges:
        if u in idx and v in idx:
            out[idx[u]] |= 1 << idx[v]
            out[idx[v]] |= 1 << idx[u]
    return out


def _subset_tables(k, adjmask, extra=None):
    """Vertex count, internal edge count and summed ``extra`` weight for all 2^k subsets."""
    size = np.zeros(1 << k, dtype=np.int64)
    inner = np.zeros(1 << k, dtype=np.int64)
    weight = np.zeros(1 << k, dtype=np.int64)
    for i in range(k):
        lo = 1 << i
        low = np.arange(lo, dtype=np.int64)
        size[lo:2 * lo] = size[:lo] + 1
        inner[lo:2 * lo] = inner[:lo] + np.bitwise_count(low & (adjmask[i] & (lo - 1)))
        if extra is not None:
            weight[lo:2 * lo] = weight[:lo] + extra[i]
    return size, inner, weight


def is_n_strong(n: int, X, Y: FinStructure, bound: int = STRONG_BOUND) -> StrongCertificate:
    """Exact test of X <=_n Y by minimizing the relative characteristic.

    A minimizer may be taken to contain all of X (adding an X-vertex changes
    the relative characteristic by -(n-2) times its edges into H outside X),
    so only subsets of the vertices outside X are searched.
    """
    xs = _check_sub(X, Y)
    new = [v for v in Y.vertices if v not in xs]
    k = len(new)
    if k > bound:
        raise SearchBoundExceeded(f"{k} vertices outside X > bound {bound}")
    adjmask = _masks(Y, new)
    to_x = [sum(1 for w in Y.adj[v] if w in xs) for v in new]
    size, inner, ex = _subset_tables(k, adjmask, to_x)
    vals = (n - 1) * size - (n - 2) * (inner + ex)
    best = int(np.argmin(vals))
    value = int(vals[best])
    witness = frozenset(xs) | frozenset(v for i, v in enumerate(new) if best >> i & 1)
    return StrongCertificate(value >= 0, witness, value)


def min_rel_chi_bruteforce(n: int, X, Y: FinStructure) -> tuple:
    """Unreduced minimum of chi_n(H / H cap X) over every induced H of Y: (value, H)."""
    xs = _check_sub(X, Y)
    order = list(Y.vertices)
    k = len(order)
    if k > 16:
        raise SearchBoundExceeded(f"{k} vertices > 16 for the unreduced search")
    adjmask = _masks(Y, order)
    size, inner, _ = _subset_tables(k, adjmask)
    xmask = sum(1 << i for i, v in enumerate(order) if v in xs)
    allm = np.arange(1 << k, dtype=np.int64)
    inx = allm & xmask
    vals = (n - 1) * (size - size[inx]) - (n - 2) * (inner - inner[inx])
    best = int(np.argmin(vals))
    return int(vals[best]), frozenset(v for i, v in enumerate(order) if best >> i & 1)


# -- free completion -----------------------------------------------------------------

@dataclass(frozen=True)
class CompletionFrontier:
    pending: tuple
    round: int


def frontier(G: FinStructure) -> CompletionFrontier:
    """Pairs at fragment distance exactly n+1: the next completion round patches them."""
    n = G.tag.n
    pending = []
    for x in G.vertices:
        dx = G.distances_from(x)
        for y, d in dx.items():
            if x < y and d == n + 1:
                pending.append((x, y))
    return CompletionFrontier(tuple(sorted(pending)), G.depth)


def completion_round(G: FinStructure) -> tuple:
    """One simultaneous round: (new fragment, {pair: interior vertices of its new path})."""
    n = G.tag.n
    pairs = frontier(G).pending
    nxt = max(G.vertices, default=-1) + 1
    vs = list(G.vertices)
    es = set(G.edges)
    part = dict(G.parts)
    paths = {}
    for x, y in pairs:
        interior = tuple(range(nxt, nxt + n - 2))
        nxt += n - 2
        walk = (x,) + interior + (y,)
        for i, w in enumerate(interior, start=1):
            vs.append(w)
            part[w] = (part[x] + i) % 2
        for a, b in zip(walk, walk[1:]):
            es.add((min(a, b), max(a, b)))
        paths[(x, y)] = interior
    out = ngon(n, vs, es, part, depth=G.depth + 1)
    # a short cycle would have to run through a new path, so a local search suffices
    fresh = [w for p in paths.values() for w in p]
    if _bfs.has_short_cycle_near(out.adj, fresh, 2 * n):
        raise InternalInvariantViolation(f"completion round produced girth {girth(out)} < {2 * n}")
    return out, paths


def free_completion_step(n: int, G: FinStructure) -> FinStructure:
    if G.tag.n != n:
        raise ValueError(f"fragment is an ngon({G.tag.n}) fragment, not ngon({n})")
    return completion_round(G)[0]


@dataclass
class CompletionReport:
    fragment: FinStructure
    rounds: int
    fixpoint: bool
    added: list = field(default_factory=list)
    vertex_round: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "rounds": self.rounds,
            "fixpoint": self.fixpoint,
            "vertices": len(self.fragment),
            "frontier": [list(p) for p in frontier(self.fragment).pending],
            "added_paths": [[[x, y, list(p)] for (x, y), p in sorted(a.items())] for a in self.added],
        }


def free_completion(n: int, G: FinStructure, depth: int, max_vertices: int = 100_000) -> CompletionReport:
    if depth < 0:
        raise ValueError("depth must be >= 0")
    cur = G
    added = []
    vround = {v: 0 for v in G.vertices}
    for r in range(depth):
        if not frontier(cur).pending:
            break
        cur, paths = completion_round(cur)
        added.append(paths)
        for interior in paths.values():
            for w in interior:
                vround[w] = r + 1
        if len(cur) > max_vertices:
            raise SearchBoundExceeded(f"completion exceeded {max_vertices} vertices")
    fix = not frontier(cur).pending
    return CompletionReport(cur, len(added), fix, added, vround)


def extend_through_completion(G: FinStructure, fmap: dict, depth: int) -> tuple:
    """Carry an automorphism of G through ``depth`` completion rounds.

    Each new path p_{x,y} goes to p_{f(x),f(y)}, reversed when f swaps the
    endpoints' order.  Returns (completed fragment, extended map).
    """
    f = dict(fmap)
    cur = G
    for _ in range(depth):
        if not frontier(cur).pending:
            break
        nxt, paths = completion_round(cur)
        for (x, y), interior in paths.items():
            fx, fy = f[x], f[y]
            if fx < fy:
                target = paths[(fx, fy)]
            else:
                target = tuple(reversed(paths[(fy, fx)]))
            for a, b in zip(interior, target):
                f[a] = b
        cur = nxt
    if not is_embedding(cur, cur, f):
        raise InternalInvariantViolation("extended map is not an automorphism of the completion")
    return cur, f


def _paths_of_length(Delta, x, y, length):
    d = Delta.graph_distance(x, y)
    if d != length:
        return d, None
    return d, _bfs.shortest_paths(Delta.adj, x, y, limit=1, dist=Delta.distances_from(y))[0]


def is_free_completion_of(n: int, X, Delta: FinStructure, depth: int) -> bool:
    """Replay the completion rounds of X inside Delta and test whether they tile it.

    False as soon as a required path reuses old vertices, shortcuts, or the
    rounds stall before covering Delta; DepthInsufficient when ``depth``
    rounds are spent while progress is still possible.
    """
    F = set(X.vertices) if isinstance(X, FinStructure) else set(X)
    if not F <= Delta.vset:
        raise ValueError("X is not inside Delta")
    for r in range(depth + 1):
        if F == Delta.vset:
            return True
        G = induced(Delta, F).with_depth(0)
        pairs = frontier(G).pending
        new = set()
        new_edges = 0
        for x, y in pairs:
            d, p = _paths_of_length(Delta, x, y, n - 1)
            if d < n - 1:
                return False
            if p is None:
                continue
            interior = set(p[1:-1])
            if interior & F or interior & new:
                return False
            new |= interior
            new_edges += n - 1
        if not new:
            return False
        if r == depth:
            raise DepthInsufficient(f"completion of X not exhausted within {depth} rounds")
        grown = F | new
        if len(induced(Delta, grown).edges) != len(G.edges) + new_edges:
            return False
        F = grown
    return F == Delta.vset
