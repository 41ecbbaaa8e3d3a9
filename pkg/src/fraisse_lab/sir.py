"""Stationary independence relations and a seeded axiom harness.

``indep(kind, M, A, B, C)`` decides A independent from B over C inside the
finite ambient M.  ``check_axioms`` samples instances from a saturated
approximant and tests Invariance, Symmetry, Monotonicity, Existence,
Stationarity and Transitivity, reporting violations with shrunk witnesses.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Optional

from .core import (GRAPH, METRIC, POSET, ClassTag, FinStructure, NGon, find_embeddings,
                   generated, induced, is_partial_embedding, iter_embeddings)
from .errors import ClassMismatch, DepthInsufficient, EmptyBase, SearchBoundExceeded
from . import ngon as _ngon

KIND_NAMES = ("free-graph", "complete-graph", "poset-amalgam", "min-metric", "ngon-strong")


@dataclass(frozen=True)
class SirKind:
    name: str
    n: Optional[int] = None

    def __post_init__(self):
        if self.name not in KIND_NAMES:
            raise ValueError(f"unknown independence relation {self.name!r}")
        if (self.name == "ngon-strong") != (self.n is not None):
            raise ValueError("only ngon-strong takes the parameter n")

    @property
    def tag(self) -> ClassTag:
        return {"free-graph": GRAPH, "complete-graph": GRAPH, "poset-amalgam": POSET,
                "min-metric": METRIC}.get(self.name) or NGon(self.n)

    @property
    def local(self) -> bool:
        return self.name == "min-metric"

    def __str__(self):
        return f"{self.name}:{self.n}" if self.n else self.name

    @classmethod
    def parse(cls, text: str) -> "SirKind":
        name, _, n = text.partition(":")
        return cls(name, int(n) if n else None)


FREE_GRAPH = SirKind("free-graph")
COMPLETE_GRAPH = SirKind("complete-graph")
POSET_AMALGAM = SirKind("poset-amalgam")
MIN_METRIC = SirKind("min-metric")


def NGonStrong(n: int) -> SirKind:
    return SirKind("ngon-strong", n)


def default_kind(tag: ClassTag) -> SirKind:
    return {"graph": FREE_GRAPH, "poset": POSET_AMALGAM, "metric": MIN_METRIC}.get(tag.kind) \
        or NGonStrong(tag.n)


# -- the relations ------------------------------------------------------------------

def _free_graph(M, A, B, C):
    if not A & B <= C:
        return False
    B0 = B - C
    return not any(M.adj[a] & B0 for a in A - C)


def _complete_graph(M, A, B, C):
    if not A & B <= C:
        return False
    B0 = B - C
    return all(B0 <= M.adj[a] for a in A - C)


def _forced_leq(M, x, y, C):
    return any(M.leq(x, c) and M.leq(c, y) for c in C)


def _poset_amalgam(M, A, B, C):
    if not A & B <= C:
        return False
    for a in A - C:
        for b in B - C:
            if M.leq(a, b) != _forced_leq(M, a, b, C) or M.leq(b, a) != _forced_leq(M, b, a, C):
                return False
    return True


def _min_metric(M, A, B, C):
    if not C:
        raise EmptyBase("min-metric independence is local: the base must be nonempty")
    for a in A - C:
        for b in B - C:
            if M.d(a, b) != min(M.d(a, c) + M.d(c, b) for c in C):
                return False
    return True


def _ngon_free_amalgam(M, A, B, C):
    """(free amalgam vertex set, ABC closure) or None when <AC> and <BC> do not meet freely."""
    AC, BC, CC = generated(M, A | C), generated(M, B | C), generated(M, C)
    ABC = generated(M, A | B | C)
    if AC & BC != CC:
        return None
    B0 = BC - CC
    if any(M.adj[a] & B0 for a in AC - CC):
        return None
    return AC | BC, ABC


def _ngon_strong(M, A, B, C):
    got = _ngon_free_amalgam(M, A, B, C)
    if got is None:
        return False
    X, ABC = got
    return _ngon.is_n_strong(M.tag.n, X, induced(M, ABC)).verdict


_RELATIONS = {
    "free-graph": _free_graph,
    "complete-graph": _complete_graph,
    "poset-amalgam": _poset_amalgam,
    "min-metric": _min_metric,
    "ngon-strong": _ngon_strong,
}


def _check_kind(kind: SirKind, M: FinStructure):
    if kind.tag != M.tag:
        raise ClassMismatch(f"relation {kind} does not apply to a {M.tag} structure")


def indep(kind: SirKind, M: FinStructure, A, B, C) -> bool:
    _check_kind(kind, M)
    A, B, C = frozenset(A), frozenset(B), frozenset(C)
    for S in (A, B, C):
        if not S <= M.vset:
            raise KeyError(f"unknown vertices {sorted(S - M.vset)}")
    return _RELATIONS[kind.name](M, A, B, C)


# Deliberately broken relations, one per class, used as mutation controls.

def _mut_free_graph(M, A, B, C):
    B0 = B - C
    return not any(M.adj[a] & B0 for a in A - C)


def _mut_complete_graph(M, A, B, C):
    if not A & B <= C:
        return False
    A0, B0 = A - C, B - C
    return not A0 or not B0 or any(M.adj[a] & B0 for a in A0)


def _mut_poset(M, A, B, C):
    if not A & B <= C:
        return False
    return all((not _forced_leq(M, a, b, C) or M.leq(a, b)) and
               (not _forced_leq(M, b, a, C) or M.leq(b, a)) for a in A - C for b in B - C)


def _mut_metric(M, A, B, C):
    if not C:
        raise EmptyBase("min-metric independence is local: the base must be nonempty")
    return all(M.d(a, b) <= min(M.d(a, c) + M.d(c, b) for c in C) for a in A - C for b in B - C)


def _mut_ngon(M, A, B, C):
    AC, BC = generated(M, A | C), generated(M, B | C)
    ABC = generated(M, A | B | C)
    return _ngon.is_n_strong(M.tag.n, AC | BC, induced(M, ABC)).verdict


_MUTANTS = {
    "free-graph": _mut_free_graph,
    "complete-graph": _mut_complete_graph,
    "poset-amalgam": _mut_poset,
    "min-metric": _mut_metric,
    "ngon-strong": _mut_ngon,
}

MUTANT_DESCRIPTIONS = {
    "free-graph": "free-graph condition without A&B <= C",
    "complete-graph": "some cross edge instead of all cross edges",
    "poset-amalgam": "forced comparabilities required, extra ones tolerated",
    "min-metric": "d(a,b) <= min over the base instead of equality",
    "ngon-strong": "n-strong test on the induced union, free-amalgam check dropped",
}


def mutant(kind: SirKind) -> Callable:
    """A broken variant of ``kind`` with the same call signature as ``indep``."""
    fn = _MUTANTS[kind.name]

    def rel(kind_, M, A, B, C):
        _check_kind(kind, M)
        return fn(M, frozenset(A), frozenset(B), frozenset(C))

    rel.__name__ = f"mutant_{kind.name.replace('-', '_')}"
    return rel


# -- larger bases ------------------------------------------------------------------

def _subsets(X, local=False):
    X = sorted(X)
    for r in range(len(X) + 1):
        for C in itertools.combinations(X, r):
            if C or not local:
                yield frozenset(C)


def support_over_set(kind, M, A, B, X, relation=None):
    """Smallest C <= X with A indep B over every C' between C and X, or None."""
    rel = relation or indep
    X = frozenset(X)
    memo = {}

    def ok(Cp):
        if Cp not in memo:
            memo[Cp] = rel(kind, M, A, B, Cp)
        return memo[Cp]

    for C in _subsets(X, kind.local):
        rest = X - C
        if all(ok(C | frozenset(extra)) for extra in _subsets(rest)):
            return C
    return None


def indep_over_set(kind, M, A, B, X, relation=None) -> bool:
    return support_over_set(kind, M, A, B, X, relation) is not None


def find_support(kind, M, A, X, relation=None):
    """A minimal-by-inclusion C <= X with A indep X over C (hence over C from every D <= X)."""
    rel = relation or indep
    X = frozenset(X)
    for C in _subsets(X, kind.local):
        if rel(kind, M, A, X, C):
            return C
    return None


# -- axiom harness -------------------------------------------------------------------

AXIOMS = ("SIR1", "SIR2", "SIR3", "SIR4", "SIR5", "SIR6")


@dataclass
class AxiomTally:
    axiom: str
    trials: int = 0
    violations: int = 0
    unwitnessed: int = 0
    vacuous: int = 0
    witness: Optional[dict] = None

    def to_json(self):
        return {"axiom": self.axiom, "trials": self.trials, "violations": self.violations,
                "unwitnessed": self.unwitnessed, "vacuous": self.vacuous, "witness": self.witness}


@dataclass
class AxiomReport:
    kind: str
    tallies: dict = field(default_factory=dict)

    def __getitem__(self, axiom) -> AxiomTally:
        return self.tallies[axiom]

    @property
    def violations(self) -> int:
        return sum(t.violations for t in self.tallies.values())

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def merge(self, other: "AxiomReport") -> "AxiomReport":
        out = AxiomReport(self.kind)
        for ax in AXIOMS:
            a, b = self.tallies.get(ax), other.tallies.get(ax)
            if a is None or b is None:
                if a or b:
                    out.tallies[ax] = a or b
                continue
            out.tallies[ax] = AxiomTally(ax, a.trials + b.trials, a.violations + b.violations,
                                         a.unwitnessed + b.unwitnessed, a.vacuous + b.vacuous,
                                         a.witness or b.witness)
        return out

    def to_json(self):
        return [dict(kind=self.kind, **t.to_json()) for t in self.tallies.values()]


class _Unwitnessed(Exception):
    pass


class _Vacuous(Exception):
    pass


def _sorted(S):
    return sorted(S)


class _Harness:
    def __init__(self, kind, M, relation, max_size, embed_limit):
        self.kind = kind
        self.M = M
        self.rel_fn = relation or indep
        self.max_size = max_size
        self.embed_limit = embed_limit

    def rel(self, A, B, C, M=None):
        return self.rel_fn(self.kind, M or self.M, A, B, C)

    def gen(self, S):
        return generated(self.M, S)

    # sampling

    def pool(self, rng):
        M = self.M
        if M.tag.kind != "ngon":
            return list(M.vertices)
        # vertices pairwise within distance n, so closures are usually visible
        n = M.tag.n
        c = rng.choice(M.vertices)
        ball = sorted(v for v, d in M.distances_from(c).items() if 0 < d <= n)
        rng.shuffle(ball)
        pool = [c]
        for v in ball:
            if all(M.graph_distance(v, u) <= n for u in pool):
                pool.append(v)
                if len(pool) >= 8:
                    break
        return sorted(pool)

    def size(self, rng, lo=1):
        return rng.choice([s for s in (1, 1, 1, 2, 2, 3, 4) if lo <= s <= self.max_size] or [lo])

    def pick(self, rng, pool, lo=1):
        k = min(self.size(rng, lo), len(pool))
        return frozenset(rng.sample(pool, k))

    def base(self, rng, pool):
        lo = 1 if self.kind.local else 0
        k = min(rng.choice([lo, 1, 1, 2, 2, 3][lo:]) if lo else rng.choice([0, 1, 1, 2, 2, 3]),
                self.max_size, len(pool))
        return frozenset(rng.sample(pool, k))

    def grow(self, rng, pool, A, C, size):
        """Greedily collect up to ``size`` vertices B with A indep B over C."""
        B = set()
        cand = list(pool)
        rng.shuffle(cand)
        for v in cand:
            if len(B) >= size:
                break
            if self.rel(A, B | {v}, C):
                B.add(v)
        return frozenset(B)

    def other(self, rng, pool, A, C, lo=1):
        k = self.size(rng, lo)
        if rng.random() < 0.75:
            B = self.grow(rng, pool, A, C, k)
            if len(B) >= lo:
                return B
        return self.pick(rng, pool, lo)

    def near(self, S):
        """For n-gon ambients, the vertices within distance n of all of S; else None."""
        M = self.M
        if M.tag.kind != "ngon" or not S:
            return None
        n = M.tag.n
        out = None
        for u in S:
            ball = {v for v, d in M.distances_from(u).items() if d <= n}
            out = ball if out is None else out & ball
        return out

    def realizations(self, A, C, near=None):
        """Maps phi on <AC> fixing <C> pointwise whose image is closed in M.

        ``near`` restricts the images to a region of the ambient.
        """
        M = self.M
        S = self.gen(A | C)
        CC = self.gen(C)
        cod = M if near is None else induced(M, set(near) | CC)
        seen = 0
        for emb in iter_embeddings(induced(M, S), cod, {c: c for c in CC}):
            img = emb.image()
            try:
                if M.tag.kind == "ngon" and self.gen(img) != img:
                    continue
            except DepthInsufficient:
                continue
            yield emb.map
            seen += 1
            if seen >= self.embed_limit:
                return

    def try_rel(self, A, B, C):
        """indep, or None when the closure is not visible in the approximant."""
        try:
            return self.rel(A, B, C)
        except DepthInsufficient:
            return None

    def same_type_over(self, A, phi, B, C):
        """Whether a -> phi(a) on A, identity on <BC>, extends to <ABC> ~= <A'BC>."""
        M = self.M
        BC = self.gen(B | C)
        src = self.gen(A | B | C)
        Ap = frozenset(phi[a] for a in A)
        dst = self.gen(Ap | B | C)
        if len(src) != len(dst):
            return False
        fix = {v: v for v in BC}
        for a in A:
            if fix.get(a, phi[a]) != phi[a]:
                return False
            fix[a] = phi[a]
        S, T = induced(M, src), induced(M, dst)
        if not is_partial_embedding(S, T, fix):
            return False
        return bool(find_embeddings(S, T, fix, limit=1))

    # axioms: each returns a witness dict on violation, None when it holds

    def sir1(self, rng):
        pool = self.pool(rng)
        C = self.base(rng, pool)
        A = self.pick(rng, pool)
        B = self.other(rng, pool, A, C)
        return self._sir1_check(rng, A, B, C)

    def _sir1_check(self, rng, A, B, C):
        M = self.M
        val = self.rel(A, B, C)
        shift = max(M.vertices) + 1
        perm = list(M.vertices)
        rng.shuffle(perm)
        pi = {v: shift + i for v, i in zip(M.vertices, (M.index[w] for w in perm))}
        M2 = M.relabel(pi)
        img = lambda S: frozenset(pi[v] for v in S)
        if self.rel(img(A), img(B), img(C), M2) != val:
            return {"A": _sorted(A), "B": _sorted(B), "C": _sorted(C), "relabeling": "random"}
        S = self.gen(A | B | C)
        src = induced(M, S)
        s0 = min(S)
        targets = [w for w in M.vertices if M.label(w) == M.label(s0)]
        for w in rng.sample(targets, min(4, len(targets))):
            for emb in find_embeddings(src, M, {s0: w}, limit=1):
                phi = emb.map
                im = emb.image()
                if M.tag.kind == "ngon" and self.gen(im) != im:
                    continue
                m = lambda T: frozenset(phi[v] for v in T)
                if self.rel(m(A), m(B), m(C)) != val:
                    return {"A": _sorted(A), "B": _sorted(B), "C": _sorted(C),
                            "image": {"A": _sorted(m(A)), "B": _sorted(m(B)), "C": _sorted(m(C))}}
        return None

    def sir2(self, rng):
        pool = self.pool(rng)
        C = self.base(rng, pool)
        A = self.pick(rng, pool)
        B = self.other(rng, pool, A, C)
        if self.rel(A, B, C) != self.rel(B, A, C):
            return self.shrink({"A": A, "B": B, "C": C},
                               lambda s: self.rel(s["A"], s["B"], s["C"]) != self.rel(s["B"], s["A"], s["C"]))
        return None

    def _sir3_fails(self, s):
        A, B, D, C = s["A"], s["B"], s["D"], s["C"]
        if not self.rel(A, B | D, C):
            return False
        return not (self.rel(A, B, C) and self.rel(A, D, self.gen(B | C)))

    def sir3(self, rng):
        pool = self.pool(rng)
        C = self.base(rng, pool)
        A = self.pick(rng, pool)
        BD = self.other(rng, pool, A, C, lo=2) if len(pool) > 2 else self.pick(rng, pool)
        BD = self.gen(BD) if self.M.tag.kind == "ngon" else BD
        if not self.rel(A, BD, C):
            raise _Vacuous
        items = sorted(BD)
        rng.shuffle(items)
        cut = rng.randint(1, max(1, len(items) - 1))
        s = {"A": A, "B": frozenset(items[:cut]), "D": frozenset(items[cut:]), "C": C}
        if self._sir3_fails(s):
            return self.shrink(s, self._sir3_fails)
        return None

    def sir4(self, rng):
        pool = self.pool(rng)
        C = self.base(rng, pool)
        A = self.pick(rng, pool)
        B = self.pick(rng, pool)
        for phi in self.realizations(A, C, self.near(B | C)):
            if self.try_rel(frozenset(phi[a] for a in A), B, C):
                return None
        raise _Unwitnessed

    def sir5(self, rng):
        pool = self.pool(rng)
        C = self.base(rng, pool)
        A = self.pick(rng, pool)
        B = self.other(rng, pool, A, C)
        if not self.rel(A, B, C):
            raise _Vacuous
        checked = False
        for phi in self.realizations(A, C, self.near(B | C)):
            Ap = frozenset(phi[a] for a in A)
            if Ap == A or not self.try_rel(Ap, B, C):
                continue
            try:
                same = self.same_type_over(A, phi, B, C)
            except DepthInsufficient:
                continue
            checked = True
            if not same:
                return {"A": _sorted(A), "A'": _sorted(Ap), "map": {a: phi[a] for a in sorted(A)},
                        "B": _sorted(B), "C": _sorted(C)}
        if not checked:
            raise _Unwitnessed
        return None

    def _sir6_fails(self, s):
        A, B, D, C = s["A"], s["B"], s["D"], s["C"]
        if not (self.rel(A, B, C) and self.rel(A, D, self.gen(B | C))):
            return False
        return not self.rel(A, self.gen(B | D), C)

    def sir6(self, rng):
        pool = self.pool(rng)
        C = self.base(rng, pool)
        A = self.pick(rng, pool)
        B = self.other(rng, pool, A, C)
        if not self.rel(A, B, C):
            raise _Vacuous
        BC = self.gen(B | C)
        D = self.other(rng, pool, A, BC)
        s = {"A": A, "B": B, "D": D, "C": C}
        if not self.rel(A, D, BC):
            raise _Vacuous
        if self._sir6_fails(s):
            return self.shrink(s, self._sir6_fails)
        return None

    def shrink(self, s, fails):
        """Greedy one-element deletions while the violation persists."""
        s = dict(s)
        changed = True
        while changed:
            changed = False
            for key in list(s):
                for v in sorted(s[key]):
                    t = dict(s)
                    t[key] = s[key] - {v}
                    if key == "C" and self.kind.local and not t[key]:
                        continue
                    try:
                        if fails(t):
                            s, changed = t, True
                            break
                    except (DepthInsufficient, EmptyBase):
                        continue
        return {k: _sorted(v) for k, v in s.items()}


def _draw(fn, rng, redraws):
    # instances whose closure is not visible are redrawn from the same stream
    for _ in range(redraws):
        try:
            return fn(rng)
        except DepthInsufficient:
            continue
    return fn(rng)


def check_axioms(kind: SirKind, ambient: Optional[FinStructure] = None, trials: int = 100,
                 seed: int = 0, relation: Optional[Callable] = None, max_size: int = 4,
                 embed_limit: int = 200, axioms=AXIOMS, redraws: int = 10) -> AxiomReport:
    """Run ``trials`` sampled instances per axiom inside ``ambient``.

    Missing Existence witnesses, premises that do not hold and instances whose
    closure is not visible in the approximant are tallied separately and never
    count as violations.  Each trial draws from its own seeded generator; an
    instance with an invisible closure is redrawn up to ``redraws`` times.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if ambient is None:
        from .katetov import default_approximant
        ambient = default_approximant(kind)
    _check_kind(kind, ambient)
    h = _Harness(kind, ambient, relation, max_size, embed_limit)
    report = AxiomReport(str(kind))
    for ax in axioms:
        tally = AxiomTally(ax)
        fn = getattr(h, ax.lower())
        for t in range(trials):
            rng = random.Random(f"{seed}:{ax}:{t}")
            tally.trials += 1
            try:
                w = _draw(fn, rng, redraws)
            except _Vacuous:
                tally.vacuous += 1
                continue
            except (_Unwitnessed, DepthInsufficient, SearchBoundExceeded):
                tally.unwitnessed += 1
                continue
            if w is not None:
                tally.violations += 1
                if tally.witness is None:
                    tally.witness = dict(w, trial=t, ambient_size=len(ambient))
        report.tallies[ax] = tally
    return report
