"""JSON and DOT serialization of finite structures."""

from __future__ import annotations

import json
from fractions import Fraction

from .core import FinStructure, graph, metric, ngon, poset

_PALETTE = ["black", "red", "blue", "darkgreen", "orange", "purple", "brown"]


def to_json(s: FinStructure) -> dict:
    out = {"class": s.tag.kind}
    if s.tag.n is not None:
        out["n"] = s.tag.n
    out["vertices"] = list(s.vertices)
    if s.tag.kind == "ngon":
        out["part"] = {str(v): p for v, p in sorted(s.part)}
        out["depth"] = s.depth
    if s.tag.kind in ("graph", "ngon"):
        out["edges"] = [list(e) for e in sorted(s.edges)]
    elif s.tag.kind == "poset":
        out["order"] = [list(p) for p in sorted(s.order)]
    else:
        out["dist"] = [[u, v, str(d)] for u, v, d in sorted(s.dist)]
    return out


def from_json(obj) -> FinStructure:
    if isinstance(obj, str):
        obj = json.loads(obj)
    kind = obj.get("class")
    vs = [int(v) for v in obj.get("vertices", [])]
    if kind == "graph":
        return graph(vs, [tuple(e) for e in obj.get("edges", [])])
    if kind == "poset":
        # reflexive pairs are accepted and dropped
        return poset(vs, [tuple(p) for p in obj.get("order", []) if p[0] != p[1]])
    if kind == "metric":
        return metric(vs, {(u, v): Fraction(d) for u, v, d in obj.get("dist", [])})
    if kind == "ngon":
        part = obj.get("part")
        part = {int(k): int(p) for k, p in part.items()} if part else None
        return ngon(int(obj["n"]), vs, [tuple(e) for e in obj.get("edges", [])], part,
                    int(obj.get("depth", 0)))
    raise ValueError(f"unknown class {kind!r}")


def dumps(s: FinStructure) -> str:
    return json.dumps(to_json(s), sort_keys=True)


def load(path) -> FinStructure:
    with open(path) as fh:
        return from_json(json.load(fh))


def save(s: FinStructure, path):
    with open(path, "w") as fh:
        json.dump(to_json(s), fh, sort_keys=True, indent=1)
        fh.write("\n")


def to_dot(s: FinStructure, vertex_round=None, name="G") -> str:
    """DOT text; n-gon sides drawn as circles/boxes, completion rounds as colours."""
    directed = s.tag.kind == "poset"
    lines = [f"{'digraph' if directed else 'graph'} {name} {{"]
    for v in s.vertices:
        attrs = []
        if s.tag.kind == "ngon":
            attrs.append("shape=" + ("box" if s.label(v) else "circle"))
        if vertex_round and vertex_round.get(v):
            r = vertex_round[v]
            attrs.append(f'color="{_PALETTE[r % len(_PALETTE)]}"')
            attrs.append(f'xlabel="r{r}"')
        lines.append(f"  {v}" + (f" [{', '.join(attrs)}]" if attrs else "") + ";")
    if s.tag.kind in ("graph", "ngon"):
        lines += [f"  {u} -- {v};" for u, v in sorted(s.edges)]
    elif directed:
        # Hasse diagram: covering pairs only
        for u, v in sorted(s.order):
            if not any((u, w) in s.order and (w, v) in s.order for w in s.vertices):
                lines.append(f"  {u} -> {v};")
    else:
        lines += [f'  {u} -- {v} [label="{d}"];' for u, v, d in sorted(s.dist)]
    lines.append("}")
    return "\n".join(lines) + "\n"
