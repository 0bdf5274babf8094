"""Prefix-free leader paths in a D-ary tree.

A leader placed at depth ``n`` is reached from the root along a path of
``n`` branch indices.  Paths are secure when no leader sits on the path to
another one, i.e. the set of paths is prefix-free.  Such a placement exists
exactly when the Kraft sum of the depths is at most one, and the placement
with minimum mean depth for given leader importances is a D-ary Huffman
code.  All sums are exact rationals.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Mapping

from .errors import IdMismatch, InputError, KraftViolated

Path = tuple  # tuple[int, ...] of branch indices


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        # 0.1 -> 1/10 rather than the binary expansion
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class DepthAssignment:
    arity: int
    entries: tuple  # ((leader_id, depth), ...)

    def __post_init__(self):
        if int(self.arity) != self.arity or self.arity < 2:
            raise InputError(f"arity must be an integer >= 2, got {self.arity!r}")
        entries = tuple((leader, int(depth)) for leader, depth in self.entries)
        ids = [leader for leader, _ in entries]
        if len(set(ids)) != len(ids):
            raise InputError("duplicate leader ids in depth assignment")
        for leader, depth in entries:
            if depth < 1:
                raise InputError(f"leader {leader!r} has depth {depth}; local leaders need depth >= 1")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_depths(cls, depths, arity: int = 2) -> "DepthAssignment":
        """Assignment with leader ids ``0..M-1`` taken from a depth sequence."""
        return cls(arity, tuple(enumerate(depths)))

    def as_dict(self) -> dict:
        return dict(self.entries)

    @property
    def depths(self) -> list[int]:
        return [d for _, d in self.entries]


@dataclass(frozen=True)
class ImportanceProfile:
    entries: tuple  # ((leader_id, Fraction), ...)

    def __post_init__(self):
        entries = tuple((leader, _as_fraction(p)) for leader, p in self.entries)
        if not entries:
            raise InputError("importance profile needs at least one leader")
        ids = [leader for leader, _ in entries]
        if len(set(ids)) != len(ids):
            raise InputError("duplicate leader ids in importance profile")
        if any(p < 0 for _, p in entries):
            raise InputError("importances must be non-negative")
        total = sum(p for _, p in entries)
        if total != 1:
            raise InputError(f"importances must sum to 1, got {total}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_mapping(cls, mapping: Mapping) -> "ImportanceProfile":
        return cls(tuple(mapping.items()))

    @classmethod
    def from_weights(cls, weights) -> "ImportanceProfile":
        """Normalise non-negative integer/rational weights; ids are ``0..M-1``."""
        weights = [_as_fraction(w) for w in weights]
        total = sum(weights)
        if total <= 0:
            raise InputError("weights must have a positive sum")
        return cls(tuple((i, w / total) for i, w in enumerate(weights)))

    def as_dict(self) -> dict:
        return dict(self.entries)

    @property
    def ids(self) -> list:
        return [leader for leader, _ in self.entries]


@dataclass(frozen=True)
class PrefixPlan:
    arity: int
    paths: Mapping  # leader_id -> Path

    def rendered(self) -> dict:
        return {leader: render_path(path, self.arity) for leader, path in self.paths.items()}


def render_path(path: Path, arity: int = 2) -> str:
    """Branch-index string, e.g. ``"10"``; dot separated when ``arity > 10``."""
    if arity > 10:
        return ".".join(str(b) for b in path)
    return "".join(str(b) for b in path)


def parse_path(text: str, arity: int = 2) -> Path:
    if arity > 10:
        path = tuple(int(b) for b in text.split(".")) if text else ()
    else:
        path = tuple(int(c) for c in text)
    if any(not 0 <= b < arity for b in path):
        raise InputError(f"path {text!r} has branch index outside [0, {arity - 1}]")
    return path


def kraft_sum(assignment: DepthAssignment) -> Fraction:
    D = assignment.arity
    return sum((Fraction(1, D ** n) for n in assignment.depths), Fraction(0))


def kraft_holds(assignment: DepthAssignment) -> bool:
    return kraft_sum(assignment) <= 1


def consecutive_depth_sum(D: int, n_1: int, M: int) -> Fraction:
    """Kraft sum of the depths ``n_1, n_1 + 1, ..., n_1 + M - 1`` in closed form."""
    if D < 2 or n_1 < 1 or M < 1:
        raise InputError("need D >= 2, n_1 >= 1, M >= 1")
    inv = Fraction(1, D)
    return inv ** n_1 * ((inv ** M - 1) / (inv - 1))


def _rank_keys(ids) -> dict:
    try:
        ordered = sorted(ids)
    except TypeError:
        ordered = sorted(ids, key=repr)
    return {leader: rank for rank, leader in enumerate(ordered)}


def optimal_depths(profile: ImportanceProfile, D: int = 2) -> DepthAssignment:
    """D-ary Huffman depths minimising the expected leader depth.

    Zero-importance dummies pad the leaf count to ``1 (mod D - 1)``.  Among
    equal weights the group holding the smallest-ranked leader id is merged
    first; dummies rank after every real leader.  A lone leader gets depth 1
    because the root is reserved for the global leader.
    """
    if D < 2:
        raise InputError("arity must be >= 2")
    ranks = _rank_keys(profile.ids)
    M = len(profile.entries)
    if M == 1:
        return DepthAssignment(D, ((profile.entries[0][0], 1),))

    pad = (-(M - 1)) % (D - 1)
    # heap items: (weight, smallest member rank, members); ranks are unique so
    # the tuple never compares member lists
    heap = [(p, ranks[leader], [ranks[leader]]) for leader, p in profile.entries]
    heap += [(Fraction(0), M + k, []) for k in range(pad)]
    heapq.heapify(heap)
    depth_by_rank = [0] * M
    while len(heap) > 1:
        weight, key, members = Fraction(0), None, []
        for _ in range(D):
            w, k, mem = heapq.heappop(heap)
            weight += w
            key = k if key is None else min(key, k)
            members += mem
        for r in members:
            depth_by_rank[r] += 1
        heapq.heappush(heap, (weight, key, members))

    return DepthAssignment(D, tuple((leader, depth_by_rank[ranks[leader]]) for leader in profile.ids))


def expected_depth(assignment: DepthAssignment, profile: ImportanceProfile) -> Fraction:
    depths = assignment.as_dict()
    weights = profile.as_dict()
    if set(depths) != set(weights):
        raise IdMismatch("assignment and profile name different leaders")
    return sum((weights[leader] * depths[leader] for leader in weights), Fraction(0))


def entropy_base_D(profile: ImportanceProfile, D: int = 2) -> float:
    return -sum(float(p) * math.log(float(p), D) for _, p in profile.entries if p > 0) + 0.0


def assign_paths(assignment: DepthAssignment) -> PrefixPlan:
    """Canonical prefix-free paths for a Kraft-feasible assignment.

    Leaders are served in ``(depth, id)`` order and each receives the
    lexicographically smallest node at its depth that is not below an
    already allocated leader.  This is the canonical-code construction: the
    next code is the previous one plus one, shifted down to the new depth.
    """
    if not kraft_holds(assignment):
        raise KraftViolated(f"Kraft sum {kraft_sum(assignment)} exceeds 1")
    D = assignment.arity
    ranks = _rank_keys([leader for leader, _ in assignment.entries])
    order = sorted(assignment.entries, key=lambda e: (e[1], ranks[e[0]]))
    paths = {}
    code, prev_depth = None, None
    for leader, depth in order:
        code = 0 if code is None else (code + 1) * D ** (depth - prev_depth)
        prev_depth = depth
        digits = []
        value = code
        for _ in range(depth):
            value, b = divmod(value, D)
            digits.append(b)
        paths[leader] = tuple(reversed(digits))
    return PrefixPlan(D, {leader: paths[leader] for leader, _ in assignment.entries})


def verify_prefix_free(plan: PrefixPlan) -> bool:
    """No path equals or is a prefix of another path.

    In lexicographic order a prefix always sorts directly before some path
    it prefixes, so adjacent pairs suffice.
    """
    ordered = sorted(tuple(p) for p in plan.paths.values())
    return all(b[: len(a)] != a for a, b in zip(ordered, ordered[1:]))


def security_check(plan: PrefixPlan) -> bool:
    """No local leader is a relay on (or shares) another leader's root path."""
    occupied = {}
    for leader, path in plan.paths.items():
        path = tuple(path)
        if path in occupied:
            return False
        occupied[path] = leader
    for path in occupied:
        for cut in range(len(path)):
            if path[:cut] in occupied:
                return False
    return True


def plan_depths(plan: PrefixPlan) -> DepthAssignment:
    return DepthAssignment(plan.arity, tuple((leader, len(p)) for leader, p in plan.paths.items()))
