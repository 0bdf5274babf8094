"""Complete D-ary tree model of a hierarchical hybrid network.

The root is the global leader; local leaders are elected at deeper levels.
Leader probabilities are exact :class:`fractions.Fraction` values.  Two
denominators are supported for the "randomly chosen node" probabilities:

``"paper"``
    ``D**(n_max + 1) - 1``, the default closed form (equal to the node
    count only for ``D == 2``).
``"exact"``
    the true node count ``(D**(n_max + 1) - 1) / (D - 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterator

import numpy as np

from .errors import CountExceedsLevel, DepthOutOfRange, InputError
from .streams import chunked, uniforms

MODES = ("paper", "exact")


@dataclass(frozen=True)
class DaryTree:
    arity: int
    max_depth: int

    def __post_init__(self):
        if int(self.arity) != self.arity or self.arity < 2:
            raise InputError(f"arity must be an integer >= 2, got {self.arity!r}")
        if int(self.max_depth) != self.max_depth or self.max_depth < 0:
            raise InputError(f"max_depth must be an integer >= 0, got {self.max_depth!r}")

    def paths(self, depth: int) -> Iterator[tuple[int, ...]]:
        """All node paths at ``depth`` in lexicographic order."""
        if not 0 <= depth <= self.max_depth:
            raise DepthOutOfRange(f"depth {depth} outside [0, {self.max_depth}]")
        return product(range(self.arity), repeat=depth)


@dataclass(frozen=True)
class LeaderCountProfile:
    """Number of elected local leaders per depth, ``{depth: count}``."""

    counts: dict = field(default_factory=dict)

    def __post_init__(self):
        for depth, count in self.counts.items():
            if int(depth) != depth or depth < 1:
                raise DepthOutOfRange(f"leader depth must be >= 1, got {depth!r}")
            if int(count) != count or count < 0:
                raise InputError(f"leader count must be a non-negative integer, got {count!r}")

    def validate(self, tree: DaryTree):
        for depth, count in self.counts.items():
            if depth > tree.max_depth:
                raise DepthOutOfRange(f"leader depth {depth} exceeds n_max={tree.max_depth}")
            if count > tree.arity ** depth:
                raise CountExceedsLevel(
                    f"{count} leaders requested at depth {depth}, level holds {tree.arity ** depth}"
                )


@dataclass(frozen=True)
class LinkModel:
    q: float

    def __post_init__(self):
        if not 0 <= self.q <= 1:
            raise InputError(f"link failure probability must lie in [0, 1], got {self.q!r}")


def node_count(tree: DaryTree) -> int:
    D, n = tree.arity, tree.max_depth
    return (D ** (n + 1) - 1) // (D - 1)


def nodes_at_depth(tree: DaryTree, j: int) -> int:
    if j < 0 or j > tree.max_depth:
        raise DepthOutOfRange(f"depth {j} outside [0, {tree.max_depth}]")
    return tree.arity ** j


def local_leader_fraction(s_j: int, tree: DaryTree, n_j: int) -> Fraction:
    """Chance that a node at depth ``n_j`` is one of the ``s_j`` leaders there."""
    level = nodes_at_depth(tree, n_j)
    if s_j < 0:
        raise InputError("leader count must be non-negative")
    if s_j > level:
        raise CountExceedsLevel(f"{s_j} leaders exceed {level} nodes at depth {n_j}")
    return Fraction(s_j, level)


def denominator(tree: DaryTree, mode: str = "paper") -> int:
    if mode == "paper":
        return tree.arity ** (tree.max_depth + 1) - 1
    if mode == "exact":
        return node_count(tree)
    raise InputError(f"unknown normalization mode {mode!r}; expected one of {MODES}")


def p_leader_at_level(s_j: int, tree: DaryTree, n_j: int | None = None, mode: str = "paper") -> Fraction:
    """Chance that a uniformly chosen node is a leader at the given level.

    ``n_j`` is only needed to check ``s_j`` against the level size; the
    probability itself is ``s_j`` over the configured denominator.
    """
    if s_j < 0:
        raise InputError("leader count must be non-negative")
    if n_j is not None:
        local_leader_fraction(s_j, tree, n_j)
    elif s_j > node_count(tree):
        raise CountExceedsLevel(f"{s_j} leaders exceed the {node_count(tree)} nodes of the tree")
    return Fraction(s_j, denominator(tree, mode))


def p_any_local_leader(profile: LeaderCountProfile, tree: DaryTree, mode: str = "paper") -> Fraction:
    profile.validate(tree)
    return sum(
        (p_leader_at_level(s, tree, depth, mode) for depth, s in sorted(profile.counts.items())),
        Fraction(0),
    )


def _check_depth(n_j):
    if int(n_j) != n_j or n_j < 1:
        raise DepthOutOfRange(f"path depth must be an integer >= 1, got {n_j!r}")


def _rational(q):
    if isinstance(q, float):
        return Fraction(repr(q))  # decimal literal, not the binary expansion
    return q if isinstance(q, Fraction) else Fraction(q)


def path_reliability(link: LinkModel, n_j: int):
    """Probability that all ``n_j`` links from the root survive.

    Exact when ``link.q`` is a :class:`~fractions.Fraction` or int.
    """
    _check_depth(n_j)
    return (1 - link.q) ** n_j


def last_link_failure_prob(link: LinkModel, n_j: int):
    """Probability that the first ``n_j - 1`` links survive and the last one fails."""
    _check_depth(n_j)
    return (1 - link.q) ** (n_j - 1) * link.q


def failure_position_distribution(link: LinkModel, n_j: int) -> list[Fraction]:
    """Exact probabilities that the first failure is at link 1..n_j, then no failure."""
    _check_depth(n_j)
    q = _rational(link.q)
    dist = [(1 - q) ** (k - 1) * q for k in range(1, n_j + 1)]
    dist.append((1 - q) ** n_j)
    return dist


def simulate_link_failures(q: float, n_j: int, trials: int, seed: int) -> np.ndarray:
    """Index of the first failed link per trial (0-based), or ``n_j`` if none failed."""
    _check_depth(n_j)
    if trials < 1:
        raise InputError("trials must be >= 1")
    out = np.empty(trials, dtype=np.int64)
    for idx in chunked(trials):
        failed = uniforms(seed, idx, n_j) < q
        first = np.where(failed.any(axis=1), failed.argmax(axis=1), n_j)
        out[idx] = first
    return out


def simulate_path_reliability(link: LinkModel, n_j: int, trials: int, seed: int) -> float:
    first_failure = simulate_link_failures(float(link.q), n_j, trials, seed)
    return float(np.mean(first_failure == n_j))


def simulate_last_link_failure(link: LinkModel, n_j: int, trials: int, seed: int) -> float:
    first_failure = simulate_link_failures(float(link.q), n_j, trials, seed)
    return float(np.mean(first_failure == n_j - 1))


def reliability_table(link: LinkModel, max_depth: int, trials: int = 0, seed: int = 0) -> list[dict]:
    """Per-depth reliability rows for depths ``1..max_depth``.

    Monte Carlo columns are present only when ``trials > 0``.
    """
    rows = []
    for n in range(1, max_depth + 1):
        row = {
            "depth": n,
            "path_reliability": path_reliability(link, n),
            "last_link_failure": last_link_failure_prob(link, n),
        }
        if trials > 0:
            first_failure = simulate_link_failures(float(link.q), n, trials, seed)
            row["mc_path_reliability"] = float(np.mean(first_failure == n))
            row["mc_last_link_failure"] = float(np.mean(first_failure == n - 1))
        rows.append(row)
    return rows
