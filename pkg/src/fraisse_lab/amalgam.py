"""Canonical independent amalgams, SI-amalgams of families, and automorphism gluing."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

from . import ngon as _ngon
from . import sir
from . import _bfs
from .core import (SEARCH_BOUND, Embedding, FinStructure, are_isomorphic, canonical_key, graph,
                   induced, is_embedding, metric, ngon, poset, validate)
from .errors import BaseMismatch, ClassMismatch, EmptyBase, InternalInvariantViolation


def visibly_closed(ext: FinStructure, S) -> bool:
    """For n-gon fragments: every pair of S at distance < n has its shortest path inside S."""
    if ext.tag.kind != "ngon":
        return True
    S = set(S)
    n = ext.tag.n
    # only outside vertices of degree >= 2 can sit inside a path between members of S
    if all(len(ext.adj[v]) < 2 for v in ext.vset - S):
        return True
    for x, y in itertools.combinations(sorted(S), 2):
        d = ext.graph_distance(x, y)
        if 1 < d < n:
            (p,) = _bfs.shortest_paths(ext.adj, x, y, limit=1, dist=ext.distances_from(y))
            if not set(p) <= S:
                return False
    return True


def same_data(s: FinStructure, t: FinStructure) -> bool:
    """Equal as labelled structures, ignoring vertex order and completion depth."""
    return (s.tag == t.tag and s.vset == t.vset and s.edges == t.edges and s.order == t.order
            and s.dist == t.dist and s.part == t.part)


@dataclass(frozen=True, eq=False)
class ExtensionType:
    """An extension ext of base, identified up to isomorphism fixing the base."""
    base: FinStructure
    ext: FinStructure

    def __post_init__(self):
        if self.base.tag != self.ext.tag:
            raise ClassMismatch(f"{self.base.tag} base in a {self.ext.tag} extension")
        if not self.base.vset <= self.ext.vset or not same_data(induced(self.ext, self.base.vertices), self.base):
            raise BaseMismatch("base is not an induced substructure of the extension")
        if not visibly_closed(self.ext, self.base.vertices):
            raise BaseMismatch("base is not closed in the extension")

    @cached_property
    def key(self) -> str:
        return canonical_key(self.ext, self.base.vertices, bound=max(SEARCH_BOUND, len(self.ext)))

    @property
    def new(self) -> tuple:
        return tuple(v for v in self.ext.vertices if v not in self.base.vset)

    def __repr__(self):
        return f"ExtensionType(base={list(self.base.vertices)}, new={list(self.new)})"


def trivial_type(base: FinStructure) -> ExtensionType:
    return ExtensionType(base, base)


@dataclass(frozen=True)
class Amalgam:
    result: FinStructure
    base_embedding: Embedding
    factor_embeddings: tuple

    @property
    def factors(self):
        return [e.dom for e in self.factor_embeddings]

    def to_json(self):
        from .io import to_json
        return {
            "result": to_json(self.result),
            "base_embedding": [[k, v] for k, v in sorted(self.base_embedding.map.items())],
            "factor_embeddings": [[[k, v] for k, v in sorted(e.map.items())] for e in self.factor_embeddings],
        }


def _base_map(a: ExtensionType, b: ExtensionType, base_map=None) -> dict:
    """Map from b's base ids to a's base ids."""
    if base_map is not None:
        m = dict(base_map)
        if not is_embedding(b.base, a.base, m) or len(a.base) != len(b.base):
            raise BaseMismatch("supplied base identification is not an isomorphism")
        return m
    if a.base.vertices == b.base.vertices and is_embedding(b.base, a.base, {v: v for v in b.base.vertices}):
        return {v: v for v in b.base.vertices}
    iso = are_isomorphic(b.base, a.base, bound=max(SEARCH_BOUND, len(a.base)))
    if iso is None:
        raise BaseMismatch("the two extensions have non-isomorphic bases")
    return iso.map


def _assemble(kind, X, parts):
    """Glue structures pairwise sharing exactly the vertex set X, new parts independent over X."""
    tag = parts[0].tag
    vs = sorted(set().union(*(p.vset for p in parts)))
    news = [p.vset - X for p in parts]
    cross = [(i, j) for i, j in itertools.combinations(range(len(parts)), 2) if news[i] and news[j]]
    if tag.kind == "graph":
        es = set().union(*(p.edges for p in parts))
        if kind.name == "complete-graph":
            for i, j in cross:
                es |= {(min(x, y), max(x, y)) for x in news[i] for y in news[j]}
        return graph(vs, es)
    if tag.kind == "poset":
        rel = set().union(*(p.order for p in parts))
        for i, j in cross:
            P, Q = parts[i], parts[j]
            for x in news[i]:
                for y in news[j]:
                    if any(P.leq(x, c) and Q.leq(c, y) for c in X):
                        rel.add((x, y))
                    if any(Q.leq(y, c) and P.leq(c, x) for c in X):
                        rel.add((y, x))
        return poset(vs, rel)
    if tag.kind == "metric":
        if not X and cross:
            raise EmptyBase("metric amalgam over the empty base is undefined")
        dist = {}
        for p in parts:
            for u, v, q in p.dist:
                dist[(u, v)] = q
        for i, j in cross:
            P, Q = parts[i], parts[j]
            for x in news[i]:
                for y in news[j]:
                    dist[(x, y)] = min(P.d(x, c) + Q.d(c, y) for c in X)
        return metric(vs, dist)
    part = {}
    for p in parts:
        part.update(p.parts)
    return ngon(tag.n, vs, set().union(*(p.edges for p in parts)), part, depth=0)


def _check_result(result: FinStructure, new):
    """Class validity of a glued structure; for n-gons only cycles through new vertices can be short."""
    if result.tag.kind == "ngon":
        if any(result.label(u) == result.label(v) for u, v in result.edges):
            raise InternalInvariantViolation("amalgam edge joins two vertices of the same side")
        if _bfs.has_short_cycle_near(result.adj, new, 2 * result.tag.n):
            raise InternalInvariantViolation("free amalgam has girth below 2n")
        return
    bad = validate(result)
    if bad is not None:
        raise InternalInvariantViolation(f"amalgam is not in the class: {bad}")


def canonical_amalgam(kind: sir.SirKind, a: ExtensionType, b: ExtensionType, base_map=None,
                      fresh: Optional[int] = None, check: bool = True) -> Amalgam:
    """Glue a and b over their common base with the new parts independent.

    a's vertex ids are kept; b's base is identified with a's and b's new
    vertices get fresh ids counting up from ``fresh`` (default: past every id
    of a).
    """
    if kind.tag != a.ext.tag or kind.tag != b.ext.tag:
        raise ClassMismatch(f"{kind} cannot amalgamate {a.ext.tag} with {b.ext.tag}")
    bm = _base_map(a, b, base_map)
    nxt = max(a.ext.vertices, default=-1) + 1 if fresh is None else fresh
    emb_b = dict(bm)
    for v in b.new:
        emb_b[v] = nxt
        nxt += 1
    b_moved = b.ext.relabel(emb_b)
    result = _assemble(kind, a.base.vset, [a.ext, b_moved])
    _check_result(result, sorted(result.vset - a.base.vset))
    base_emb = Embedding(a.base, result, {v: v for v in a.base.vertices})
    fa = Embedding(a.ext, result, {v: v for v in a.ext.vertices})
    fb = Embedding(b.ext, result, emb_b)
    am = Amalgam(result, base_emb, (fa, fb))
    if check:
        certify(kind, am)
    return am


def certify(kind, am: Amalgam):
    """Post-construction checks: factors embed, agree on the base, and are independent over it."""
    X = am.base_embedding.image()
    for e in am.factor_embeddings:
        if not e.is_valid():
            raise InternalInvariantViolation("factor map is not an embedding")
    imgs = [e.image() for e in am.factor_embeddings]
    for A, B in itertools.combinations(imgs, 2):
        if kind.name == "ngon-strong":
            # the free amalgam itself: factors meet in the base, no cross edges
            if A & B != X or any(am.result.adj[v] & (B - X) for v in A - X):
                raise InternalInvariantViolation("n-gon amalgam is not free over the base")
        elif (A - X) and (B - X) and not (kind.local and not X):
            if not sir.indep(kind, am.result, A, B, X):
                raise InternalInvariantViolation("amalgamated factors are not independent over the base")


def si_amalgam_family(kind: sir.SirKind, base: FinStructure, exts: Sequence[ExtensionType],
                      check: bool = True) -> Amalgam:
    """The SI-amalgam of a family over base, equal to the left fold ((A_0 * A_1) * A_2) * ...

    Cross relations in every class only pass through the base, so the fold can
    be assembled in one pass; fresh ids are allocated in fold order.
    """
    if kind.tag != base.tag:
        raise ClassMismatch(f"{kind} cannot amalgamate over a {base.tag} base")
    if not exts:
        return Amalgam(base, Embedding(base, base, {v: v for v in base.vertices}), ())
    own = trivial_type(base)
    nxt = max(base.vertices, default=-1) + 1
    maps, moved = [], []
    for e in exts:
        m = dict(_base_map(own, e))
        for v in e.new:
            m[v] = nxt
            nxt += 1
        maps.append(m)
        moved.append(e.ext.relabel(m))
    result = _assemble(kind, base.vset, moved)
    _check_result(result, sorted(result.vset - base.vset))
    fam = Amalgam(result, Embedding(base, result, {v: v for v in base.vertices}),
                  tuple(Embedding(e.ext, result, m) for e, m in zip(exts, maps)))
    if check:
        certify(kind, fam)
    return fam


def fold_amalgam(kind: sir.SirKind, base: FinStructure, exts: Sequence[ExtensionType]) -> FinStructure:
    """The literal left fold of canonical_amalgam, kept as a cross-check."""
    acc = trivial_type(base)
    for e in exts:
        acc = ExtensionType(base, canonical_amalgam(kind, acc, e, check=False).result)
    return acc.ext


def extend_type(kind: sir.SirKind, a: ExtensionType, X: FinStructure) -> ExtensionType:
    """The extension of a (over C) to X containing C, with the new part independent from X over C."""
    C = a.base
    if not C.vset <= X.vset or not same_data(induced(X, C.vertices), C):
        raise BaseMismatch("the type's base is not a substructure of X")
    am = canonical_amalgam(kind, ExtensionType(C, X), a,
                           base_map={v: v for v in C.vertices})
    return ExtensionType(X, am.result)


def glue_automorphisms(kind: sir.SirKind, am: Amalgam, sigma: Sequence[int],
                       fs: Sequence, base_map=None) -> Embedding:
    """Glue isomorphisms f_i : factor_i -> factor_sigma(i) agreeing on the base into Aut(result).

    ``base_map`` only matters for an empty family, where no factor carries it.
    """
    k = len(am.factor_embeddings)
    sigma = list(sigma)
    if sorted(sigma) != list(range(k)) or len(fs) != k:
        raise ValueError("sigma must be a permutation of the factor indices with one map per factor")
    emb = am.factor_embeddings
    out = {}
    for i, f in enumerate(fs):
        fmap = f.map if isinstance(f, Embedding) else dict(f)
        j = sigma[i]
        if not is_embedding(emb[i].dom, emb[j].dom, fmap):
            raise ValueError(f"map {i} is not an isomorphism onto factor {j}")
        for u, w in fmap.items():
            v, t = emb[i][u], emb[j][w]
            if out.setdefault(v, t) != t:
                raise ValueError(f"maps disagree on the base vertex {v}")
    if not fs:
        out = dict(base_map) if base_map is not None else {v: v for v in am.base_embedding.image()}
    if set(out) != am.result.vset:
        missing = am.result.vset - set(out)
        raise ValueError(f"glued map is not total (missing {sorted(missing)[:5]})")
    if not is_embedding(am.result, am.result, out):
        raise InternalInvariantViolation("glued map is not an automorphism of the amalgam")
    if kind.name == "ngon-strong" and am.result.depth == 0:
        # the free amalgam generates its completion; carry the map one round through it
        _ngon.extend_through_completion(am.result, out, 1)
    return Embedding(am.result, am.result, out)
