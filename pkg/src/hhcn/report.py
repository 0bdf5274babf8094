"""Serialisation helpers shared by the CLI: JSON, tab-delimited text and DOT."""

from __future__ import annotations

import json
from fractions import Fraction

from .prefix import PrefixPlan, render_path


def rational(x: Fraction) -> dict:
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator, "value": float(x)}


def parse_number(value):
    """JSON number or ``"a/b"`` string to an exact Fraction (0.1 -> 1/10)."""
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers")
    if isinstance(value, (int, float, str)):
        return Fraction(str(value))
    raise TypeError(f"expected a number, got {value!r}")


def plain(obj):
    """Recursively turn Fractions into rational dicts and tuples into lists."""
    if isinstance(obj, Fraction):
        return rational(obj)
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    return obj


def to_json(obj) -> str:
    return json.dumps(plain(obj), indent=2) + "\n"


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        if set(obj) == {"num", "den", "value"}:
            yield prefix, str(obj["num"]) if obj["den"] == 1 else f"{obj['num']}/{obj['den']}"
            return
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list):
        if all(not isinstance(v, (dict, list)) for v in obj):
            yield prefix, ",".join(_scalar(v) for v in obj)
            return
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}.{i}" if prefix else str(i))
    else:
        yield prefix, _scalar(obj)


def _scalar(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def to_text(obj) -> str:
    """One ``key<TAB>value`` line per leaf; rationals print as ``num/den`` (or ``num`` when whole)."""
    return "".join(f"{k}\t{v}\n" for k, v in _flatten(plain(obj)))


def _quote(s) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def prefix_plan_dot(plan: PrefixPlan) -> str:
    """Tree of every node on a leader path; leaders are filled boxes."""
    leader_at = {tuple(p): leader for leader, p in plan.paths.items()}
    nodes = {()}
    for path in plan.paths.values():
        for cut in range(1, len(path) + 1):
            nodes.add(tuple(path[:cut]))
    ordered = sorted(nodes, key=lambda p: (len(p), p))
    lines = ["digraph prefix_plan {", '  node [shape=circle];']
    for p in ordered:
        name = _quote("r" + render_path(p, plan.arity))
        if p == ():
            lines.append(f'  {name} [label="root", shape=doublecircle];')
        elif p in leader_at:
            label = f"{leader_at[p]}\\n{render_path(p, plan.arity)}"
            lines.append(f'  {name} [label="{label}", shape=box, style=filled, fillcolor=lightblue];')
        else:
            lines.append(f'  {name} [label={_quote(render_path(p, plan.arity))}];')
    for p in ordered:
        if p:
            parent = _quote("r" + render_path(p[:-1], plan.arity))
            lines.append(f"  {parent} -> {_quote('r' + render_path(p, plan.arity))} [label={p[-1]}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_plan_dot(graph, plan, embedded_children) -> str:
    """MST drawn over the graph's vertices; embedded-tree edges bold, leaders filled."""
    leaders = {v: leader for leader, v in plan.placement.items()}
    kept = {(u, c) for u, kids in embedded_children.items() for c in kids}
    kept |= {(c, u) for u, c in kept}
    lines = ["graph multicast_plan {"]
    for v in graph.vertices:
        if v == plan.root:
            attrs = 'shape=doublecircle, label="' + f"{v}\\nroot" + '"'
        elif v in leaders:
            attrs = f'style=filled, fillcolor=lightblue, label="{v}\\n{leaders[v]}"'
        else:
            attrs = f"label={_quote(v)}"
        lines.append(f"  {_quote(v)} [{attrs}];")
    for u, v, w in plan.mst_edges:
        style = "bold" if (u, v) in kept else "dashed"
        lines.append(f"  {_quote(u)} -- {_quote(v)} [label={_quote(w)}, style={style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
