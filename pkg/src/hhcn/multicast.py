"""Secure multicast planning on arbitrary connected weighted graphs.

The graph is reduced to its minimum spanning tree (Kruskal, total edge
order ``(weight, smaller endpoint, larger endpoint)``), rooted at the global
leader and pruned to a binary tree by keeping the two cheapest child edges
of every vertex.  Leaders are then placed on an antichain of that binary
tree so that the importance-weighted depth is minimal.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable

from .errors import Disconnected, Infeasible, InputError, RootNotInGraph
from .prefix import ImportanceProfile, expected_depth, optimal_depths


def _vertex_key(v):
    # vertex ids are normally all str or all int; fall back to repr for mixes
    return (type(v).__name__, v) if not isinstance(v, (int, float)) else ("", v)


def _edge_key(u, v):
    return (u, v) if _vertex_key(u) <= _vertex_key(v) else (v, u)


@dataclass(frozen=True)
class WeightedGraph:
    vertices: tuple
    edges: tuple  # ((u, v, weight), ...) with u sorted before v

    def __post_init__(self):
        vertices = tuple(sorted(set(self.vertices), key=_vertex_key))
        if len(vertices) != len(self.vertices):
            raise InputError("duplicate vertex ids")
        seen = set()
        edges = []
        for u, v, w in self.edges:
            if u not in vertices or v not in vertices:
                raise InputError(f"edge ({u!r}, {v!r}) references an unknown vertex")
            if u == v:
                raise InputError(f"self-loop at {u!r}")
            if not (isinstance(w, (int, float, Fraction)) and w > 0 and math.isfinite(w)):
                raise InputError(f"edge ({u!r}, {v!r}) needs a positive finite weight, got {w!r}")
            a, b = _edge_key(u, v)
            if (a, b) in seen:
                raise InputError(f"parallel edge between {a!r} and {b!r}")
            seen.add((a, b))
            edges.append((a, b, w))
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "_weights", {(a, b): w for a, b, w in edges})

    def weight(self, u, v):
        return self._weights[_edge_key(u, v)]

    def has_edge(self, u, v) -> bool:
        return _edge_key(u, v) in self._weights


@dataclass(frozen=True)
class SpanningTree:
    vertices: tuple
    edges: tuple  # ((u, v, weight), ...) in Kruskal acceptance order
    total_weight: float


@dataclass
class RootedSpanningTree:
    root: Hashable
    parent: dict
    depth: dict
    children: dict
    total_weight: float


@dataclass
class EmbeddedBinaryTree:
    root: Hashable
    children: dict
    depth: dict
    uncovered: frozenset = frozenset()

    def parent_map(self) -> dict:
        return {c: v for v, kids in self.children.items() for c in kids}

    def path_to(self, vertex) -> tuple:
        parent = self.parent_map()
        path = [vertex]
        while path[-1] != self.root:
            path.append(parent[path[-1]])
        return tuple(reversed(path))


@dataclass
class DoublyOptimalPlan:
    root: Hashable
    profile: ImportanceProfile
    paths: dict  # leader -> (root, ..., vertex)
    mst_edges: tuple
    mst_weight: float
    realized_expected_depth: Fraction
    ideal_expected_depth: Fraction
    uncovered: frozenset = field(default_factory=frozenset)

    @property
    def placement(self) -> dict:
        return {leader: path[-1] for leader, path in self.paths.items()}


def total_weight(weights) -> float:
    weights = list(weights)
    if all(isinstance(w, (int, Fraction)) for w in weights):
        return sum(weights, 0)
    return math.fsum(weights)


def minimum_spanning_tree(graph: WeightedGraph) -> SpanningTree:
    parent = {v: v for v in graph.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    chosen = []
    ordered = sorted(graph.edges, key=lambda e: (e[2], _vertex_key(e[0]), _vertex_key(e[1])))
    for u, v, w in ordered:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            chosen.append((u, v, w))
            if len(chosen) == len(graph.vertices) - 1:
                break
    if len(chosen) != len(graph.vertices) - 1:
        raise Disconnected("graph is not connected; no spanning tree exists")
    return SpanningTree(graph.vertices, tuple(chosen), total_weight(w for _, _, w in chosen))


def root_tree(mst: SpanningTree, root) -> RootedSpanningTree:
    if root not in mst.vertices:
        raise RootNotInGraph(f"root {root!r} is not a vertex")
    adj = {v: [] for v in mst.vertices}
    for u, v, _ in mst.edges:
        adj[u].append(v)
        adj[v].append(u)
    parent, depth = {}, {root: 0}
    children = {v: [] for v in mst.vertices}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in sorted(adj[u], key=_vertex_key):
            if v not in depth:
                depth[v] = depth[u] + 1
                parent[v] = u
                children[u].append(v)
                queue.append(v)
    if len(depth) != len(mst.vertices):
        raise Disconnected("edge set does not span all vertices")
    return RootedSpanningTree(root, parent, depth, children, mst.total_weight)


def embed_binary_tree(tree: RootedSpanningTree, graph: WeightedGraph) -> EmbeddedBinaryTree:
    """Keep at most two children per vertex, preferring light edges then small ids."""
    children, depth = {}, {tree.root: 0}
    queue = deque([tree.root])
    while queue:
        u = queue.popleft()
        kids = sorted(tree.children.get(u, ()), key=lambda c: (graph.weight(u, c), _vertex_key(c)))[:2]
        children[u] = sorted(kids, key=_vertex_key)
        for c in children[u]:
            depth[c] = depth[u] + 1
            queue.append(c)
    uncovered = frozenset(v for v in tree.depth if v not in depth)
    return EmbeddedBinaryTree(tree.root, children, depth, uncovered)


def place_leaders(tree: EmbeddedBinaryTree, profile: ImportanceProfile) -> tuple[Fraction, dict]:
    """Minimum-cost antichain placement of the profile's leaders.

    ``best(v, S)`` is the cheapest way to put the leader subset ``S`` into
    the subtree of ``v`` without any leader above another: either a single
    leader sits on ``v`` (nothing below it), or ``S`` is split between the
    children.  Subsets are bitmasks over the leaders, so the cost is
    ``O(V * 3**M)``.  The root is never a leader.
    """
    leaders = profile.ids
    weights = [profile.as_dict()[leader] for leader in leaders]
    M = len(leaders)
    full = (1 << M) - 1

    order = []
    stack = [tree.root]
    while stack:
        v = stack.pop()
        order.append(v)
        stack.extend(tree.children.get(v, ()))

    # best[v][mask] = (cost, choice) where choice describes how to rebuild
    best = {}
    for v in reversed(order):
        kids = tree.children.get(v, [])
        table = {0: (Fraction(0), None)}
        if len(kids) == 1:
            table = {m: (c, ("down",)) for m, (c, _) in best[kids[0]].items()}
        elif len(kids) == 2:
            left, right = best[kids[0]], best[kids[1]]
            for lm, (lc, _) in left.items():
                rest = full & ~lm
                rm = rest
                while True:
                    if rm in right:
                        rc = right[rm][0]
                        m = lm | rm
                        cost = lc + rc
                        if m not in table or cost < table[m][0]:
                            table[m] = (cost, ("split", lm, rm))
                    if rm == 0:
                        break
                    rm = (rm - 1) & rest
        if v != tree.root:
            d = tree.depth[v]
            for i in range(M):
                m = 1 << i
                cost = weights[i] * d
                if m not in table or cost < table[m][0]:
                    table[m] = (cost, ("here", i))
        best[v] = table

    if full not in best[tree.root]:
        raise Infeasible(
            f"no antichain of {M} vertices below the root in the embedded binary tree"
        )

    placement = {}

    def rebuild(v, mask):
        if mask == 0:
            return
        _, choice = best[v][mask]
        kids = tree.children[v]
        if choice[0] == "down":
            rebuild(kids[0], mask)
        elif choice[0] == "here":
            placement[leaders[choice[1]]] = v
        else:
            rebuild(kids[0], choice[1])
            rebuild(kids[1], choice[2])

    rebuild(tree.root, full)
    return best[tree.root][full][0], placement


def plan_doubly_optimal(graph: WeightedGraph, root, profile: ImportanceProfile) -> DoublyOptimalPlan:
    mst = minimum_spanning_tree(graph)
    rooted = root_tree(mst, root)
    embedded = embed_binary_tree(rooted, graph)
    cost, placement = place_leaders(embedded, profile)
    paths = {leader: embedded.path_to(placement[leader]) for leader in profile.ids}
    ideal = expected_depth(optimal_depths(profile, 2), profile)
    return DoublyOptimalPlan(
        root=root,
        profile=profile,
        paths=paths,
        mst_edges=mst.edges,
        mst_weight=mst.total_weight,
        realized_expected_depth=cost,
        ideal_expected_depth=ideal,
        uncovered=embedded.uncovered,
    )


def verify_plan(plan: DoublyOptimalPlan, graph: WeightedGraph) -> bool:
    """Recheck a plan against a freshly computed spanning tree."""
    try:
        mst = minimum_spanning_tree(graph)
    except Disconnected:
        return False
    mst_edges = {_edge_key(u, v) for u, v, _ in mst.edges}
    if {_edge_key(u, v) for u, v, _ in plan.mst_edges} != mst_edges:
        return False
    if plan.mst_weight != mst.total_weight:
        return False
    if set(plan.paths) != set(plan.profile.ids):
        return False

    targets = {}
    for leader, path in plan.paths.items():
        if len(path) < 2 or path[0] != plan.root:
            return False
        if len(set(path)) != len(path):
            return False
        if any(_edge_key(a, b) not in mst_edges for a, b in zip(path, path[1:])):
            return False
        targets[leader] = path[-1]
    if len(set(targets.values())) != len(targets):
        return False
    for leader, path in plan.paths.items():
        others = {v for other, v in targets.items() if other != leader}
        if others.intersection(path):
            return False

    weights = plan.profile.as_dict()
    realized = sum((weights[leader] * (len(path) - 1) for leader, path in plan.paths.items()), Fraction(0))
    if realized != plan.realized_expected_depth:
        return False
    ideal = expected_depth(optimal_depths(plan.profile, 2), plan.profile)
    return ideal == plan.ideal_expected_depth
