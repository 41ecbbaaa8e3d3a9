"""Type catalogs, Katětov towers, the automorphism lift, saturation and back-and-forth."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import _bfs
from . import amalgam as am_
from . import ngon as _ngon
from . import sir
from .core import (SEARCH_BOUND, ClassTag, Embedding, FinStructure, are_isomorphic, automorphisms,
                   cycle, empty, find_embeddings, graph, induced, is_embedding, metric, ngon, poset,
                   transitive_closure, validate)
from .errors import DepthInsufficient, InternalInvariantViolation, MenuRequired, SearchBoundExceeded

DEFAULT_MENU = (Fraction(1), Fraction(2))


def _kind_of(kind_or_tag, X) -> sir.SirKind:
    if isinstance(kind_or_tag, sir.SirKind):
        return kind_or_tag
    if isinstance(kind_or_tag, ClassTag):
        return sir.default_kind(kind_or_tag)
    return sir.default_kind(X.tag)


@dataclass(frozen=True)
class TypeCatalog:
    base: FinStructure
    m: int
    entries: tuple

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def index_of(self, key: str) -> int:
        return self._by_key[key]

    @property
    def _by_key(self):
        d = self.__dict__.get("_keys")
        if d is None:
            d = {e.key: i for i, e in enumerate(self.entries)}
            object.__setattr__(self, "_keys", d)
        return d

    def to_json(self):
        return {"base": list(self.base.vertices), "m": self.m, "entries": len(self.entries),
                "new_vertices": [list(e.new) for e in self.entries]}


# -- enumeration ---------------------------------------------------------------------

def _graph_exts(X, new):
    pairs = [(x, v) for v in new for x in X.vertices] + list(itertools.combinations(new, 2))
    vs = list(X.vertices) + list(new)
    for bits in itertools.product((0, 1), repeat=len(pairs)):
        yield graph(vs, list(X.edges) + [p for p, b in zip(pairs, bits) if b])


def _poset_exts(X, new):
    pairs = [(x, v) for v in new for x in X.vertices] + list(itertools.combinations(new, 2))
    vs = list(X.vertices) + list(new)
    for choice in itertools.product((0, 1, 2), repeat=len(pairs)):
        rel = set(X.order)
        for (u, v), c in zip(pairs, choice):
            if c == 1:
                rel.add((u, v))
            elif c == 2:
                rel.add((v, u))
        if transitive_closure(vs, rel) != frozenset(rel) or any((v, u) in rel for u, v in rel):
            continue
        yield poset(vs, rel)


def _metric_exts(X, new, menu):
    pairs = [(x, v) for v in new for x in X.vertices] + list(itertools.combinations(new, 2))
    vs = list(X.vertices) + list(new)
    base = {(u, v): d for u, v, d in X.dist}
    for choice in itertools.product(menu, repeat=len(pairs)):
        dist = dict(base)
        dist.update(zip(pairs, choice))
        try:
            s = metric(vs, dist)
        except ValueError:
            continue
        if validate(s) is None:
            yield s


def _ngon_exts(X, new):
    # a new vertex adjacent to two base vertices would be the unique midpoint of
    # a pair at distance 2 < n, so the base would not be closed; one neighbour at most
    (v,) = new
    n = X.tag.n
    parts = X.parts
    for side in (0, 1):
        nbrs = [()] + [(x,) for x in X.vertices if parts[x] != side]
        for N in nbrs:
            part = dict(parts)
            part[v] = side
            s = ngon(n, list(X.vertices) + [v], list(X.edges) + [(x, v) for x in N], part, X.depth)
            if not _bfs.has_short_cycle_near(s.adj, [v], 2 * n):
                yield s


def labelled_extensions(X: FinStructure, j: int, menu=None):
    """Every valid structure on X plus j fresh vertices that restricts to X."""
    new = tuple(range(max(X.vertices, default=-1) + 1, max(X.vertices, default=-1) + 1 + j))
    kind = X.tag.kind
    if kind == "graph":
        yield from _graph_exts(X, new)
    elif kind == "poset":
        yield from _poset_exts(X, new)
    elif kind == "metric":
        yield from _metric_exts(X, new, menu)
    elif j == 1:
        yield from _ngon_exts(X, new)


def enum_types(kind, X: FinStructure, m: int, menu=None, bound: int = SEARCH_BOUND) -> TypeCatalog:
    """All extensions of X by 1..m new vertices, one per isomorphism class over X, ordered by key."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if len(X) + m > bound:
        raise SearchBoundExceeded(f"|X| + m = {len(X) + m} > bound {bound}")
    if X.tag.kind == "metric" and not menu:
        raise MenuRequired("metric extensions need a finite distance menu")
    if X.tag.kind == "ngon":
        m = 1
    seen = {}
    for j in range(1, m + 1):
        for ext in labelled_extensions(X, j, menu):
            t = am_.ExtensionType(X, ext)
            if am_.visibly_closed(ext, X.vertices):
                seen.setdefault(t.key, t)
    entries = tuple(seen[k] for k in sorted(seen))
    return TypeCatalog(X, m, entries)


# -- Katětov step and tower ------------------------------------------------------------

@dataclass
class KatetovStep:
    E1: FinStructure
    catalog: TypeCatalog
    amalgam: am_.Amalgam
    factors: tuple            # catalog indices in fold order

    def __iter__(self):
        return iter((self.E1, self.catalog, self.amalgam))


def katetov_step(kind, X: FinStructure, m: int, menu=None, order: Optional[Sequence[int]] = None,
                 bound: int = SEARCH_BOUND, catalog: Optional[TypeCatalog] = None) -> KatetovStep:
    """E_1(X): the SI-amalgam over X of every catalogued type, each realized once.

    For n-gon fragments one free-completion round is applied to the amalgam.
    """
    kind = _kind_of(kind, X)
    cat = catalog or enum_types(kind, X, m, menu, bound)
    idx = tuple(range(len(cat))) if order is None else tuple(order)
    if sorted(idx) != list(range(len(cat))):
        raise ValueError("order must be a permutation of the catalog indices")
    fam = am_.si_amalgam_family(kind, X, [cat.entries[i] for i in idx], check=len(cat) <= 64)
    E1 = fam.result
    if X.tag.kind == "ngon":
        E1 = _ngon.completion_round(fam.result)[0]
    return KatetovStep(E1, cat, fam, idx)


@dataclass
class Tower:
    kind: sir.SirKind
    m: int
    levels: list
    steps: list = field(default_factory=list)

    @property
    def inclusions(self):
        return [Embedding(a, b, {v: v for v in a.vertices}) for a, b in zip(self.levels, self.levels[1:])]

    def to_json(self):
        return {"kind": str(self.kind), "m": self.m, "sizes": [len(L) for L in self.levels],
                "catalog_sizes": [len(s.catalog) for s in self.steps]}


class PartialTower(SearchBoundExceeded):
    def __init__(self, msg, tower):
        super().__init__(msg)
        self.partial = tower


def build_tower(kind, X: FinStructure, m: int, k: int, menu=None, bound: int = SEARCH_BOUND) -> Tower:
    kind = _kind_of(kind, X)
    tower = Tower(kind, m, [X])
    for _ in range(k):
        try:
            step = katetov_step(kind, tower.levels[-1], m, menu, bound=bound)
        except SearchBoundExceeded as e:
            raise PartialTower(f"stopped at level {len(tower.levels) - 1}: {e}", tower) from e
        tower.levels.append(step.E1)
        tower.steps.append(step)
    return tower


# -- the lift ----------------------------------------------------------------------------

@dataclass
class LiftedAutomorphism:
    maps: list        # maps[j] is a dict, an automorphism of level j

    def __getitem__(self, j):
        return self.maps[j]

    def to_json(self):
        return [[[v, w] for v, w in sorted(f.items())] for f in self.maps]


def _entry_iso(e_src, e_dst, fbase):
    """Isomorphism e_src.ext -> e_dst.ext extending fbase; lexicographically least on new vertices."""
    new = sorted(e_src.new)
    best = None
    for emb in find_embeddings(e_src.ext, e_dst.ext, dict(fbase), bound=max(SEARCH_BOUND, len(new))):
        if emb.image() != e_dst.ext.vset:
            continue
        sig = tuple(emb.map[v] for v in new)
        if best is None or sig < best[0]:
            best = (sig, emb.map)
    if best is None:
        raise InternalInvariantViolation("catalog entries share a key but are not isomorphic")
    return best[1]


def _push(e: am_.ExtensionType, f: dict) -> am_.ExtensionType:
    mapping = {v: f.get(v, v) for v in e.ext.vertices}
    return am_.ExtensionType(e.base, e.ext.relabel(mapping))


def lift_step(kind, step: KatetovStep, f: dict) -> tuple:
    """(automorphism of E_1 extending f, catalog permutation sigma_f)."""
    cat, X = step.catalog, step.catalog.base
    if not is_embedding(X, X, f):
        raise ValueError("f is not an automorphism of the base")
    perm = {}
    fs_by_entry = {}
    for i, e in enumerate(cat.entries):
        j = cat.index_of(_push(e, f).key)
        perm[i] = j
        fs_by_entry[i] = _entry_iso(e, cat.entries[j], {x: f[x] for x in X.vertices})
    if sorted(perm.values()) != list(range(len(cat))):
        raise InternalInvariantViolation("f does not permute the catalog")
    pos = {entry: p for p, entry in enumerate(step.factors)}
    sigma = [pos[perm[entry]] for entry in step.factors]
    fs = [fs_by_entry[entry] for entry in step.factors]
    g = am_.glue_automorphisms(kind, step.amalgam, sigma, fs, base_map=f).map
    if X.tag.kind == "ngon":
        _, g = _ngon.extend_through_completion(step.amalgam.result, g, 1)
    if any(g[x] != f[x] for x in X.vertices) or not is_embedding(step.E1, step.E1, g):
        raise InternalInvariantViolation("lift does not restrict to f")
    return g, perm


def lift_automorphism(kind, tower: Tower, f) -> LiftedAutomorphism:
    f = dict(f.map if isinstance(f, Embedding) else f)
    maps = [f]
    for step in tower.steps:
        g, _ = lift_step(tower.kind, step, maps[-1])
        maps.append(g)
    return LiftedAutomorphism(maps)


def _supports(kind, step: KatetovStep) -> dict:
    """Support in X of each new vertex's factor, keyed by vertex of E_1."""
    X = step.catalog.base
    out = {}
    for emb in step.amalgam.factor_embeddings:
        A = emb.image() - X.vset
        M = induced(step.amalgam.result, X.vset | A)
        try:
            C = sir.find_support(kind, M, A, X.vset)
        except DepthInsufficient:
            C = None
        if C is None:
            C = X.vset
        for v in A:
            out[v] = C
    return out


@dataclass
class DeterminationWitness:
    C: frozenset
    checked: int          # automorphisms g tested


def finite_determination_witness(kind, tower: Tower, f, a, verify: bool = True,
                                 auts: Optional[list] = None) -> DeterminationWitness:
    """A subset C of E_0 such that agreeing with f on C forces the lift to agree on a."""
    kind = tower.kind
    step = tower.steps[0]
    X, E1 = tower.levels[0], tower.levels[1]
    f = dict(f.map if isinstance(f, Embedding) else f)
    a = frozenset(a)
    if not a <= E1.vset:
        raise ValueError("a must lie in level 1")
    sup = _supports(kind, step)
    C = set(a & X.vset)
    for v in a - X.vset:
        # completion vertices (n-gon case) hang off two earlier vertices; fall back to X
        C |= sup.get(v, X.vset)
    C = frozenset(C)
    checked = 0
    if verify:
        fl = lift_step(kind, step, f)[0]
        for g in auts if auts is not None else automorphisms(X, bound=max(SEARCH_BOUND, len(X))):
            gm = g.map if isinstance(g, Embedding) else g
            if any(gm[c] != f[c] for c in C):
                continue
            checked += 1
            gl = lift_step(kind, step, gm)[0]
            if any(gl[v] != fl[v] for v in a):
                raise InternalInvariantViolation(f"witness {sorted(C)} does not determine the lift on a")
    return DeterminationWitness(C, checked)


# -- saturation ------------------------------------------------------------------------------

def _problems(kind, L, m, base_bound, menu):
    lo = 1 if kind.local else 0
    for r in range(lo, min(base_bound, len(L)) + 1):
        for S in itertools.combinations(L.vertices, r):
            base = induced(L, S)
            for t in enum_types(kind, base, m, menu, bound=max(SEARCH_BOUND, r + m)):
                yield S, t


def _solved(t: am_.ExtensionType, L: FinStructure) -> bool:
    fix = {v: v for v in t.base.vertices}
    return bool(find_embeddings(t.ext, L, fix, limit=1))


def _randomize(L: FinStructure, fam: am_.Amalgam, bases: list, rng: random.Random) -> FinStructure:
    """Random adjacency for new vertices outside their problem's base."""
    old = set(L.vertices)
    es = set(fam.result.edges)
    owner = {}
    for emb, S in zip(fam.factor_embeddings, bases):
        for v in emb.image() - old:
            owner[v] = set(S), emb.image()
    new = sorted(owner)
    for v in new:
        S, own = owner[v]
        for w in sorted(fam.result.vset - own):
            if w in old and w in S:
                continue
            if w not in old and w < v:
                continue
            if w not in old and v in owner[w][0]:
                continue
            e = (min(v, w), max(v, w))
            if rng.random() < 0.5:
                es.add(e)
            else:
                es.discard(e)
    return graph(fam.result.vertices, es)


def saturate(kind, X: FinStructure, m: int = 1, rounds: int = 3, base_bound: int = 2,
             seed: Optional[int] = None, menu=None, max_vertices: int = 5000) -> list:
    """Chain L_0 = X, L_1, ...: each round solves every unsolved extension problem
    (a type with <= m new vertices over a <= base_bound subset) via the SI-amalgam.

    With a seed, graph classes get random adjacency between new vertices and
    everything outside their problem's base, which keeps each problem solved.
    n-gon fragments saturate by Katětov steps (m = 1 over the whole level).
    """
    kind = _kind_of(kind, X)
    if X.tag.kind == "metric" and menu is None:
        menu = DEFAULT_MENU
    rng = random.Random(seed)
    chain = [X]
    for _ in range(rounds):
        L = chain[-1]
        if X.tag.kind == "ngon":
            chain.append(katetov_step(kind, L, 1, bound=len(L) + 1).E1)
            continue
        exts, bases = [], []
        for S, t in _problems(kind, L, m, base_bound, menu):
            if _solved(t, L):
                continue
            exts.append(am_.extend_type(kind, t, L))
            bases.append(S)
        if not exts:
            chain.append(L)
            continue
        fam = am_.si_amalgam_family(kind, L, exts, check=False)
        nxt = fam.result
        if seed is not None and X.tag.kind == "graph":
            nxt = _randomize(L, fam, bases, rng)
        if len(nxt) > max_vertices:
            raise SearchBoundExceeded(f"saturation exceeded {max_vertices} vertices")
        chain.append(nxt)
    return chain


def default_approximant(kind: sir.SirKind, rounds: int = 3, seed: Optional[int] = 0) -> FinStructure:
    """The ambient used by the axiom harness when none is given."""
    tag = kind.tag
    if tag.kind == "graph":
        return saturate(kind, empty(tag), 1, rounds, seed=seed)[-1]
    if tag.kind == "poset":
        return saturate(kind, empty(tag), 1, rounds)[-1]
    if tag.kind == "metric":
        return saturate(kind, metric([0], {}), 1, rounds)[-1]
    return saturate(kind, cycle(2 * tag.n, tag), 1, min(rounds, 2))[-1]


# -- back and forth -------------------------------------------------------------------------

@dataclass
class BnFResult:
    equivalent: bool
    depth: int
    witness: Optional[dict] = None

    def __bool__(self):
        return self.equivalent

    def to_json(self):
        return {"equivalent": self.equivalent, "depth": self.depth, "witness": self.witness}


def _sig(S, pos, v):
    return (S.label(v),) + tuple((v == p, S.rel(v, p) if v != p else None) for p in pos)


def back_and_forth_iso(A: FinStructure, B: FinStructure, depth: int, max_depth: int = 4) -> BnFResult:
    """Ehrenfeucht-Fraïssé game with ``depth`` pebble moves.

    The last move is decided by comparing the sets of realized one-point
    signatures over the current position, so only depth - 1 levels are searched.
    """
    if depth > max_depth:
        raise SearchBoundExceeded(f"depth {depth} > {max_depth}")
    if A.tag != B.tag:
        return BnFResult(False, depth, {"reason": "class mismatch"})
    memo = {}

    def spoiler_wins(pa, pb, r):
        """None if the duplicator survives r more moves, else a winning spoiler line."""
        if r == 0:
            return None
        key = (pa, pb, r)
        if key in memo:
            return memo[key]
        out = None
        for S, T, ps, pt, side in ((A, B, pa, pb, "A"), (B, A, pb, pa, "B")):
            sigs_t = {}
            for w in T.vertices:
                sigs_t.setdefault(_sig(T, pt, w), []).append(w)
            for v in S.vertices:
                replies = sigs_t.get(_sig(S, ps, v), [])
                if not replies:
                    out = [(side, v)]
                    break
                if r == 1:
                    continue
                lines = []
                for w in replies:
                    na, nb = (ps + (v,), pt + (w,)) if side == "A" else (pt + (w,), ps + (v,))
                    sub = spoiler_wins(na, nb, r - 1)
                    if sub is None:
                        break
                    lines.append(sub)
                else:
                    out = [(side, v)] + lines[0]
                    break
            if out:
                break
        memo[key] = out
        return out

    line = spoiler_wins((), (), depth)
    if line is None:
        return BnFResult(True, depth)
    return BnFResult(False, depth, {"spoiler_moves": [[s, v] for s, v in line]})


# -- richness -----------------------------------------------------------------------------------

@dataclass
class RichnessReport:
    levels: list = field(default_factory=list)     # per level j: counts of probes over level j
    failures: list = field(default_factory=list)

    @property
    def solved_ratio(self):
        return [lv["solved"] / lv["probes"] if lv["probes"] else 1.0 for lv in self.levels]

    @property
    def complete(self) -> bool:
        return all(lv["unsolved"] == 0 for lv in self.levels)

    def to_json(self):
        return {"levels": self.levels, "failures": self.failures[:10]}


def _graph_one_point(L, Lnext, max_base):
    """Count one-point graph probes over subsets of L solved in Lnext, by bitmask."""
    idx = {v: i for i, v in enumerate(L.vertices)}
    k = len(idx)
    masks = np.array([sum(1 << idx[w] for w in Lnext.adj[v] if w in idx) for v in Lnext.vertices],
                     dtype=np.int64)
    inL = np.array([1 << idx[v] if v in idx else 0 for v in Lnext.vertices], dtype=np.int64)
    probes = solved = 0
    fails = []
    for r in range(min(max_base, k) + 1):
        for S in itertools.combinations(range(k), r):
            A = sum(1 << i for i in S)
            outside = (inL & A) == 0
            got = np.unique(masks[outside] & A)
            probes += 1 << r
            solved += len(got)
            if len(got) < 1 << r and len(fails) < 10:
                fails.append({"base": [L.vertices[i] for i in S], "realized": len(got)})
    return probes, solved, fails


def check_richness(chain, probes=None, m: int = 1, max_base: Optional[int] = None,
                   kind=None, menu=None) -> RichnessReport:
    """Whether each extension problem over level j is solved in level j+1.

    ``probes`` is a list of (j, ExtensionType); without it every one-point
    problem over every subset of each level (up to ``max_base`` vertices) is probed.
    """
    levels = chain.levels if isinstance(chain, Tower) else list(chain)
    rep = RichnessReport()
    if probes is None:
        for j in range(len(levels) - 1):
            L, Ln = levels[j], levels[j + 1]
            mb = len(L) if max_base is None else max_base
            if L.tag.kind == "graph":
                p, s, fails = _graph_one_point(L, Ln, mb)
            else:
                kd = _kind_of(kind, L)
                p = s = 0
                fails = []
                for S, t in _problems(kd, L, 1, mb, menu or DEFAULT_MENU):
                    p += 1
                    if _solved(t, Ln):
                        s += 1
                    elif len(fails) < 10:
                        fails.append({"base": list(S), "new": list(t.new)})
            rep.levels.append({"level": j, "probes": p, "solved": s, "unsolved": p - s, "out_of_bound": 0})
            rep.failures += [dict(f, level=j) for f in fails]
        return rep
    by_level = {}
    for j, t in probes:
        lv = by_level.setdefault(j, {"level": j, "probes": 0, "solved": 0, "unsolved": 0, "out_of_bound": 0})
        lv["probes"] += 1
        if len(t.new) > m or j + 1 >= len(levels):
            lv["out_of_bound"] += 1
        elif _solved(t, levels[j + 1]):
            lv["solved"] += 1
        else:
            lv["unsolved"] += 1
            rep.failures.append({"level": j, "base": list(t.base.vertices), "new": list(t.new)})
    rep.levels = [by_level[j] for j in sorted(by_level)]
    return rep
