"""Finite structures in the four supported classes, embeddings and canonical forms.

Every structure is an immutable value with opaque integer vertex ids.  The
four classes are graphs, partial orders, rational metric spaces and
fragments of generalized n-gons (bipartite graphs of girth at least 2n).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Optional

from . import _bfs
from .errors import ClassMismatch, DepthInsufficient, SearchBoundExceeded

SEARCH_BOUND = 10


@dataclass(frozen=True)
class ClassTag:
    kind: str
    n: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("graph", "poset", "metric", "ngon"):
            raise ValueError(f"unknown class {self.kind!r}")
        if self.kind == "ngon":
            if self.n is None or self.n < 3:
                raise ValueError("ngon class needs n >= 3")
        elif self.n is not None:
            raise ValueError(f"class {self.kind} takes no parameter")

    @property
    def graphlike(self):
        return self.kind in ("graph", "ngon")

    def __str__(self):
        return f"ngon({self.n})" if self.kind == "ngon" else self.kind


GRAPH = ClassTag("graph")
POSET = ClassTag("poset")
METRIC = ClassTag("metric")


def NGon(n: int) -> ClassTag:
    return ClassTag("ngon", n)


def _pair(u, v):
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class FinStructure:
    """A finite structure.

    ``edges`` holds normalized pairs (u < v) for graphs and n-gon fragments,
    ``order`` the strict part of a transitively closed partial order,
    ``dist`` triples (u, v, d) with u < v and d an exact positive Fraction,
    ``part`` the bipartition label of every n-gon vertex, and ``depth`` the
    number of free-completion rounds that produced an n-gon fragment.
    """

    tag: ClassTag
    vertices: tuple
    edges: frozenset = frozenset()
    order: frozenset = frozenset()
    dist: frozenset = frozenset()
    part: frozenset = frozenset()
    depth: int = 0

    # -- lookups -----------------------------------------------------------

    @cached_property
    def vset(self) -> frozenset:
        return frozenset(self.vertices)

    @cached_property
    def adj(self) -> dict:
        out = {v: set() for v in self.vertices}
        for u, v in self.edges:
            out[u].add(v)
            out[v].add(u)
        return {v: frozenset(ws) for v, ws in out.items()}

    @cached_property
    def _dmap(self) -> dict:
        return {(u, v): d for u, v, d in self.dist}

    @cached_property
    def parts(self) -> dict:
        return dict(self.part)

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def __contains__(self, v):
        return v in self.vset

    def has_edge(self, u, v) -> bool:
        return v in self.adj[u]

    def leq(self, u, v) -> bool:
        return u == v or (u, v) in self.order

    def d(self, u, v) -> Fraction:
        if u == v:
            return Fraction(0)
        return self._dmap[_pair(u, v)]

    def label(self, v):
        """Unary data of a vertex: the bipartition side for n-gons, else None."""
        if self.tag.kind == "ngon":
            return self.parts[v]
        return None

    def rel(self, u, v):
        """Atomic relation between u and v, comparable across structures of one class."""
        k = self.tag.kind
        if k == "poset":
            return (self.leq(u, v), self.leq(v, u))
        if k == "metric":
            return self.d(u, v)
        return v in self.adj[u]

    @cached_property
    def index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def _bfs_cache(self) -> dict:
        return {}

    def distances_from(self, u) -> dict:
        """Breadth-first distances from u (graph-like classes only), cached per source."""
        cache = self._bfs_cache
        if u not in cache:
            cache[u] = _bfs.distances_from(self.adj, u)
        return cache[u]

    def graph_distance(self, u, v):
        return self.distances_from(u).get(v, _bfs.INF)

    # -- derived structures -------------------------------------------------

    def relabel(self, mapping: Mapping) -> "FinStructure":
        m = mapping.__getitem__
        return FinStructure(
            self.tag,
            tuple(m(v) for v in self.vertices),
            frozenset(_pair(m(u), m(v)) for u, v in self.edges),
            frozenset((m(u), m(v)) for u, v in self.order),
            frozenset(_pair(m(u), m(v)) + (d,) for u, v, d in self.dist),
            frozenset((m(v), p) for v, p in self.part),
            self.depth,
        )

    def with_depth(self, depth: int) -> "FinStructure":
        return FinStructure(self.tag, self.vertices, self.edges, self.order,
                            self.dist, self.part, depth)

    def __repr__(self):
        bits = [str(self.tag), f"V={list(self.vertices)}"]
        if self.edges:
            bits.append(f"E={sorted(self.edges)}")
        if self.order:
            bits.append(f"<={sorted(self.order)}")
        if self.dist:
            bits.append("d={" + ", ".join(f"{u}-{v}:{d}" for u, v, d in sorted(self.dist)) + "}")
        if self.part:
            bits.append(f"P={dict(sorted(self.part))}")
        if self.depth:
            bits.append(f"depth={self.depth}")
        return "FinStructure(" + ", ".join(bits) + ")"


# -- constructors --------------------------------------------------------------

def graph(vertices: Iterable[int], edges: Iterable = ()) -> FinStructure:
    return FinStructure(GRAPH, tuple(vertices), frozenset(_pair(u, v) for u, v in edges))


def transitive_closure(vertices, pairs) -> frozenset:
    up = {v: set() for v in vertices}
    for u, v in pairs:
        if u != v:
            up[u].add(v)
    for k in vertices:
        for i in vertices:
            if k in up[i]:
                up[i] |= up[k]
    return frozenset((u, v) for u in vertices for v in up[u] if u != v)


def poset(vertices: Iterable[int], pairs: Iterable = ()) -> FinStructure:
    """Partial order from generating pairs (u, v) meaning u <= v; closed transitively."""
    vs = tuple(vertices)
    return FinStructure(POSET, vs, order=transitive_closure(vs, pairs))


def metric(vertices: Iterable[int], dist: Mapping) -> FinStructure:
    vs = tuple(vertices)
    data = {}
    for (u, v), d in dist.items():
        if u != v:
            data[_pair(u, v)] = Fraction(d)
    return FinStructure(METRIC, vs, dist=frozenset(k + (d,) for k, d in data.items()))


def ngon(n: int, vertices: Iterable[int], edges: Iterable = (), part: Optional[Mapping] = None,
         depth: int = 0) -> FinStructure:
    """An n-gon fragment.  Without ``part``, sides are inferred by 2-colouring each component."""
    vs = tuple(vertices)
    es = frozenset(_pair(u, v) for u, v in edges)
    if part is None:
        part = _two_colour(vs, es)
    return FinStructure(NGon(n), vs, edges=es, part=frozenset((v, int(part[v])) for v in vs),
                        depth=depth)


def _two_colour(vs, es):
    adj = {v: [] for v in vs}
    for u, v in es:
        adj[u].append(v)
        adj[v].append(u)
    side = {}
    for v in vs:
        if v in side:
            continue
        side[v] = 0
        stack = [v]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in side:
                    side[w] = 1 - side[u]
                    stack.append(w)
    return side


def cycle(k: int, tag: ClassTag = GRAPH) -> FinStructure:
    es = [(i, (i + 1) % k) for i in range(k)]
    if tag.kind == "ngon":
        return ngon(tag.n, range(k), es, {i: i % 2 for i in range(k)})
    return graph(range(k), es)


def path(k: int, tag: ClassTag = GRAPH) -> FinStructure:
    """Path on k vertices 0..k-1."""
    es = [(i, i + 1) for i in range(k - 1)]
    if tag.kind == "ngon":
        return ngon(tag.n, range(k), es, {i: i % 2 for i in range(k)})
    return graph(range(k), es)


def complete_graph(k: int) -> FinStructure:
    return graph(range(k), itertools.combinations(range(k), 2))


def empty(tag: ClassTag) -> FinStructure:
    return FinStructure(tag, ())


# -- validation ------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    message: str
    witness: tuple = ()

    def __str__(self):
        return self.message


def validate(s: FinStructure) -> Optional[Violation]:
    """None when every class invariant holds, else the first violation with a witness."""
    vs = s.vset
    if len(vs) != len(s.vertices):
        return Violation("duplicate vertex ids")
    k = s.tag.kind
    if k in ("graph", "ngon"):
        for u, v in sorted(s.edges):
            if u == v:
                return Violation(f"self-loop at {u}", (u,))
            if u not in vs or v not in vs:
                return Violation(f"edge {u}-{v} mentions an unknown vertex", (u, v))
    if s.order and k != "poset" or s.dist and k != "metric" or s.part and k != "ngon":
        return Violation(f"relation data does not belong to class {s.tag}")
    if k == "poset":
        for u, v in sorted(s.order):
            if u not in vs or v not in vs or u == v:
                return Violation(f"bad order pair {u}<={v}", (u, v))
            if (v, u) in s.order:
                return Violation(f"antisymmetry fails for {u}, {v}", (u, v))
        for u, v in sorted(s.order):
            for w in s.vertices:
                if (v, w) in s.order and u != w and (u, w) not in s.order:
                    return Violation(f"transitivity fails for {u}<={v}<={w}", (u, v, w))
    elif k == "metric":
        for u, v, d in s.dist:
            if u not in vs or v not in vs:
                return Violation(f"distance {u}-{v} mentions an unknown vertex", (u, v))
            if not isinstance(d, Fraction) or d <= 0:
                return Violation(f"distance {u}-{v} is not a positive rational", (u, v))
        for u, v in itertools.combinations(s.vertices, 2):
            if _pair(u, v) not in s._dmap:
                return Violation(f"distance {u}-{v} missing", (u, v))
        for u, v, w in itertools.permutations(s.vertices, 3):
            if u < w and s.d(u, w) > s.d(u, v) + s.d(v, w):
                return Violation(f"triangle inequality fails: d({u},{w}) > d({u},{v}) + d({v},{w})",
                                 (u, v, w))
    elif k == "ngon":
        n = s.tag.n
        parts = s.parts
        for v in s.vertices:
            if parts.get(v) not in (0, 1):
                return Violation(f"vertex {v} has no bipartition label", (v,))
        for u, v in sorted(s.edges):
            if parts[u] == parts[v]:
                return Violation(f"edge {u}-{v} joins two vertices of side {parts[u]}", (u, v))
        g = _bfs.girth(s.adj)
        if g < 2 * n:
            return Violation(f"girth {g} < {2 * n}", (short_cycle(s),))
    return None


def short_cycle(s: FinStructure) -> tuple:
    """A shortest cycle of a graph-like structure, as a vertex tuple (empty if acyclic)."""
    best = None
    for u, v in sorted(s.edges):
        adj = {x: set(ws) for x, ws in s.adj.items()}
        adj[u].discard(v)
        adj[v].discard(u)
        p = _bfs.shortest_paths(adj, v, u, limit=1)
        if p and (best is None or len(p[0]) < len(best)):
            best = p[0]
    return best or ()


# -- substructures -----------------------------------------------------------------

def induced(s: FinStructure, S: Iterable[int]) -> FinStructure:
    keep = frozenset(S)
    unknown = keep - s.vset
    if unknown:
        raise KeyError(f"unknown vertices {sorted(unknown)}")
    vs = tuple(v for v in s.vertices if v in keep)
    return FinStructure(
        s.tag, vs,
        frozenset(e for e in s.edges if e[0] in keep and e[1] in keep),
        frozenset(e for e in s.order if e[0] in keep and e[1] in keep),
        frozenset(e for e in s.dist if e[0] in keep and e[1] in keep),
        frozenset(e for e in s.part if e[0] in keep),
        s.depth,
    )


def generated(M: FinStructure, S: Iterable[int]) -> frozenset:
    """Vertex set of the substructure generated by S inside M.

    Relational classes are closed under everything, so S comes back unchanged.
    For n-gon fragments the closure adjoins interior vertices of the unique
    shortest path between members at distance < n.  A pair at fragment distance
    > n has an unknown distance in the completed polygon, so DepthInsufficient
    is raised.
    """
    S = frozenset(S)
    unknown = S - M.vset
    if unknown:
        raise KeyError(f"unknown vertices {sorted(unknown)}")
    if M.tag.kind != "ngon":
        return S
    n = M.tag.n
    closure = set(S)
    todo = list(itertools.combinations(sorted(closure), 2))
    while todo:
        x, y = todo.pop()
        d = M.graph_distance(x, y)
        if d > n:
            raise DepthInsufficient(
                f"vertices {x}, {y} are at fragment distance {d} > {n} "
                f"(completion depth {M.depth}); the closure is not visible")
        if d < n and d > 1:
            (p,) = _bfs.shortest_paths(M.adj, x, y, limit=1, dist=M.distances_from(y))
            for w in p[1:-1]:
                if w not in closure:
                    todo.extend((min(w, z), max(w, z)) for z in closure)
                    closure.add(w)
    return frozenset(closure)


# -- embeddings ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Embedding:
    dom: FinStructure
    cod: FinStructure
    map: dict = field(default_factory=dict)

    def __getitem__(self, v):
        return self.map[v]

    def __call__(self, vs):
        return frozenset(self.map[v] for v in vs)

    def __eq__(self, other):
        return isinstance(other, Embedding) and self.map == other.map

    def __hash__(self):
        return hash(frozenset(self.map.items()))

    def image(self) -> frozenset:
        return frozenset(self.map.values())

    def compose(self, other: "Embedding") -> "Embedding":
        """self after other."""
        return Embedding(other.dom, self.cod, {v: self.map[w] for v, w in other.map.items()})

    def inverse(self) -> "Embedding":
        return Embedding(self.cod, self.dom, {w: v for v, w in self.map.items()})

    def is_valid(self) -> bool:
        return is_embedding(self.dom, self.cod, self.map)

    def __repr__(self):
        return f"Embedding({dict(sorted(self.map.items()))})"


def is_embedding(A: FinStructure, B: FinStructure, f: Mapping) -> bool:
    if A.tag != B.tag or set(f) != A.vset or len(set(f.values())) != len(f):
        return False
    if any(w not in B.vset for w in f.values()):
        return False
    for v in A.vertices:
        if A.label(v) != B.label(f[v]):
            return False
    for u, v in itertools.combinations(A.vertices, 2):
        if A.rel(u, v) != B.rel(f[u], f[v]):
            return False
    return True


def identity(s: FinStructure) -> Embedding:
    return Embedding(s, s, {v: v for v in s.vertices})


def iter_embeddings(A: FinStructure, B: FinStructure, fixing: Optional[Mapping] = None,
                    bound: int = SEARCH_BOUND) -> Iterator[Embedding]:
    """Lazily enumerate embeddings A -> B extending ``fixing`` by backtracking.

    The bound applies to the vertices of A not pinned by ``fixing``.
    """
    if A.tag != B.tag:
        raise ClassMismatch(f"{A.tag} vs {B.tag}")
    fixing = dict(fixing or {})
    free = [v for v in A.vertices if v not in fixing]
    if len(free) > bound:
        raise SearchBoundExceeded(f"{len(free)} free vertices > bound {bound}")
    if len(A) > len(B) or not is_partial_embedding(A, B, fixing):
        return
    # forward checking: every free vertex keeps its live candidate list, and the
    # vertex with the fewest candidates is branched on first
    used = set(fixing.values())
    doms = {}
    for v in free:
        lab = A.label(v)
        doms[v] = [w for w in B.vertices if w not in used and B.label(w) == lab
                   and all(A.rel(u, v) == B.rel(fu, w) for u, fu in fixing.items())]
        if not doms[v]:
            return
    pos = {v: i for i, v in enumerate(free)}
    f = dict(fixing)

    def extend(doms):
        if not doms:
            yield Embedding(A, B, dict(f))
            return
        v = min(doms, key=lambda u: (len(doms[u]), pos[u]))
        rels = {u: A.rel(u, v) for u in doms if u != v}
        for w in doms[v]:
            nxt = {}
            for u, r in rels.items():
                live = [x for x in doms[u] if x != w and B.rel(x, w) == r]
                if not live:
                    break
                nxt[u] = live
            else:
                f[v] = w
                yield from extend(nxt)
                del f[v]

    yield from extend(doms)


def is_partial_embedding(A, B, f) -> bool:
    if len(set(f.values())) != len(f):
        return False
    for v, w in f.items():
        if v not in A.vset or w not in B.vset or A.label(v) != B.label(w):
            return False
    for (u, fu), (v, fv) in itertools.combinations(f.items(), 2):
        if A.rel(u, v) != B.rel(fu, fv):
            return False
    return True


def find_embeddings(A: FinStructure, B: FinStructure, fixing: Optional[Mapping] = None,
                    bound: int = SEARCH_BOUND, limit: Optional[int] = None) -> list:
    it = iter_embeddings(A, B, fixing, bound)
    if limit is not None:
        it = itertools.islice(it, limit)
    return list(it)


def automorphisms(s: FinStructure, bound: int = SEARCH_BOUND) -> list:
    return find_embeddings(s, s, bound=bound)


# -- canonical forms -----------------------------------------------------------------

def _rel_code(s: FinStructure, u, v):
    r = s.rel(u, v)
    if s.tag.kind == "poset":
        return 2 * r[0] + r[1]
    if s.tag.kind == "metric":
        return r
    return int(r)


def _label_code(s, v):
    lab = s.label(v)
    return -1 if lab is None else lab


def _refine(s, colours):
    """Colour refinement; colours are invariant ranks, iterated to a stable partition."""
    vs = s.vertices
    while True:
        sigs = {}
        for v in vs:
            sigs[v] = (colours[v], tuple(sorted((_rel_code(s, u, v), colours[u])
                                                for u in vs if u != v)))
        ranks = {sig: i for i, sig in enumerate(sorted(set(sigs.values())))}
        new = {v: ranks[sigs[v]] for v in vs}
        if len(set(new.values())) == len(set(colours.values())):
            return new
        colours = new


def _twin_classes(s, free):
    rep = {}
    for v in free:
        for u in list(rep):
            if rep[u] != u:
                continue
            if s.label(u) == s.label(v) and s.rel(u, v) == s.rel(v, u) and all(
                    s.rel(x, u) == s.rel(x, v) for x in s.vertices if x != u and x != v):
                rep[v] = u
                break
        else:
            rep[v] = v
    return rep


def canonical_order(A: FinStructure, base: Iterable[int] = (), bound: int = SEARCH_BOUND):
    """Return (encoding, ordering) minimizing the encoded relation data.

    Base vertices are pinned in increasing id order; only the others are
    permuted.  Equal encodings characterize isomorphism over the base.
    """
    base = sorted(set(base))
    bset = set(base)
    missing = bset - A.vset
    if missing:
        raise KeyError(f"base vertices {sorted(missing)} not in structure")
    free = [v for v in A.vertices if v not in bset]
    if len(free) > bound:
        raise SearchBoundExceeded(f"{len(free)} free vertices > bound {bound}")
    twins = _twin_classes(A, free)
    # base vertices carry their own id as an individual colour
    init_sig = {v: ((0, v) if v in bset else (1, _label_code(A, v))) for v in A.vertices}
    ranks = {sig: i for i, sig in enumerate(sorted(set(init_sig.values())))}
    colours = _refine(A, {v: ranks[init_sig[v]] for v in A.vertices})
    best = [None, None]

    def encode(order):
        rows = []
        for i, v in enumerate(order):
            rows.append((_label_code(A, v), tuple(_rel_code(A, u, v) for u in order[:i])))
        return tuple(rows)

    def search(colours):
        cells = {}
        for v in free:
            cells.setdefault(colours[v], []).append(v)
        target = None
        for c in sorted(cells):
            if len(cells[c]) > 1:
                target = cells[c]
                break
        if target is None:
            order = base + sorted(free, key=lambda v: colours[v])
            enc = encode(order)
            if best[0] is None or enc < best[0]:
                best[0], best[1] = enc, order
            return
        seen = set()
        for v in target:
            if twins[v] in seen:
                continue
            seen.add(twins[v])
            c2 = {u: 2 * colours[u] + (0 if u == v else 1) for u in A.vertices}
            search(_refine(A, c2))

    search(colours)
    return best[0], best[1]


def canonical_key(A: FinStructure, base: Iterable[int] = (), bound: int = SEARCH_BOUND) -> str:
    """Deterministic string that is equal for two structures iff they are isomorphic over base."""
    base = sorted(set(base))
    enc, _ = canonical_order(A, base, bound)
    return f"{A.tag}|{len(A)}|{base}|{enc}"


def are_isomorphic(A: FinStructure, B: FinStructure, over: Iterable[int] = (),
                   bound: int = SEARCH_BOUND) -> Optional[Embedding]:
    """A witness isomorphism A -> B fixing ``over`` pointwise, or None."""
    over = sorted(set(over))
    if A.tag != B.tag:
        raise ClassMismatch(f"{A.tag} vs {B.tag}")
    if len(A) != len(B) or not set(over) <= A.vset or not set(over) <= B.vset:
        return None
    ea, oa = canonical_order(A, over, bound)
    eb, ob = canonical_order(B, over, bound)
    if ea != eb:
        return None
    return Embedding(A, B, dict(zip(oa, ob)))
