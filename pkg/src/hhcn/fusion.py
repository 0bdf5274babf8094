"""Fault-tolerant fusion of interval estimates.

``n`` abstract sensors each report a closed interval; at most ``f`` of them
may be faulty.  Four classic fusion rules are provided:

* :func:`m_function` -- hull of every point covered by ``n - f`` intervals
  (Marzullo).  Contains the true value but can jump under tiny input changes.
* :func:`omega_function` -- the overlap count profile.
* :func:`n_function` -- the regions where the overlap count is at least
  ``n - f``.
* :func:`s_function` -- ``[(f+1)-th largest left end, (f+1)-th smallest right
  end]`` (Schmid and Schossmaier).

Endpoints may be ints, floats or Fractions; arithmetic never rounds beyond
what the inputs carry.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import InconsistentInputs, InputError, NoAgreement
from .streams import uniforms


@dataclass(frozen=True, order=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise InputError(f"interval lower end {self.lo} exceeds upper end {self.hi}")

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def as_list(self) -> list:
        return [self.lo, self.hi]


@dataclass(frozen=True)
class FusionProblem:
    intervals: tuple
    f: int

    def __post_init__(self):
        intervals = tuple(i if isinstance(i, Interval) else Interval(*i) for i in self.intervals)
        if not intervals:
            raise InputError("at least one interval is required")
        if int(self.f) != self.f or not 0 <= self.f < len(intervals):
            raise InputError(f"fault bound must satisfy 0 <= f < n={len(intervals)}, got {self.f!r}")
        object.__setattr__(self, "intervals", intervals)

    @property
    def n(self) -> int:
        return len(self.intervals)

    @property
    def threshold(self) -> int:
        return self.n - self.f


@dataclass(frozen=True)
class OverlapProfile:
    """Piecewise-constant overlap count.

    ``point_counts[i]`` is the count at ``breakpoints[i]``; ``gap_counts[i]``
    is the count on the open gap ``(breakpoints[i], breakpoints[i + 1])``.
    """

    breakpoints: tuple
    point_counts: tuple
    gap_counts: tuple

    def regions(self):
        """Yield ``(lo, hi, count)`` pieces left to right; points have ``lo == hi``."""
        for i, b in enumerate(self.breakpoints):
            yield b, b, self.point_counts[i]
            if i < len(self.gap_counts):
                yield b, self.breakpoints[i + 1], self.gap_counts[i]


def omega_function(problem: FusionProblem) -> OverlapProfile:
    los = sorted(i.lo for i in problem.intervals)
    his = sorted(i.hi for i in problem.intervals)
    points = sorted(set(los) | set(his))
    # closed intervals: x is covered iff lo <= x and not hi < x
    point_counts = tuple(bisect_right(los, b) - bisect_left(his, b) for b in points)
    gap_counts = tuple(bisect_right(los, b) - bisect_right(his, b) for b in points[:-1])
    return OverlapProfile(tuple(points), point_counts, gap_counts)


def omega_at(profile: OverlapProfile, x) -> int:
    bps = profile.breakpoints
    i = bisect_left(bps, x)
    if i < len(bps) and bps[i] == x:
        return profile.point_counts[i]
    if i == 0 or i == len(bps):
        return 0
    return profile.gap_counts[i - 1]


def n_function(problem: FusionProblem) -> list[Interval]:
    profile = omega_function(problem)
    regions = []
    lo = hi = None
    for a, b, count in profile.regions():
        if count >= problem.threshold:
            if lo is None:
                lo = a
            hi = b
        elif lo is not None:
            regions.append(Interval(lo, hi))
            lo = None
    if lo is not None:
        regions.append(Interval(lo, hi))
    if not regions:
        raise NoAgreement(f"no point is covered by {problem.threshold} of {problem.n} intervals")
    return regions


def m_function(problem: FusionProblem) -> Interval:
    profile = omega_function(problem)
    # the superlevel set is a union of closed pieces, so its extremes are breakpoints
    hits = [b for b, c in zip(profile.breakpoints, profile.point_counts) if c >= problem.threshold]
    if not hits:
        raise NoAgreement(f"no point is covered by {problem.threshold} of {problem.n} intervals")
    return Interval(hits[0], hits[-1])


def s_function(problem: FusionProblem) -> Interval:
    f = problem.f
    a = sorted((i.lo for i in problem.intervals), reverse=True)[f]
    b = sorted(i.hi for i in problem.intervals)[f]
    if a > b:
        raise InconsistentInputs(
            f"(f+1)-th largest left end {a} exceeds (f+1)-th smallest right end {b}; "
            f"more than f={f} inputs are faulty"
        )
    return Interval(a, b)


def m_function_by_subsets(problem: FusionProblem) -> Interval:
    """Reference M: hull of all non-empty ``(n - f)``-subset intersections."""
    lows, highs = [], []
    for subset in combinations(problem.intervals, problem.threshold):
        lo = max(i.lo for i in subset)
        hi = min(i.hi for i in subset)
        if lo <= hi:
            lows.append(lo)
            highs.append(hi)
    if not lows:
        raise NoAgreement("no (n - f)-subset has a common point")
    return Interval(min(lows), max(highs))


def peak_regions(problem: FusionProblem) -> list[Interval]:
    """Maximal closed regions where the overlap count reaches its maximum."""
    profile = omega_function(problem)
    peak = max(profile.point_counts)
    return n_function(FusionProblem(problem.intervals, problem.n - peak))


FUNCTIONS = {
    "m": lambda p: [m_function(p)],
    "omega": peak_regions,
    "n": n_function,
    "s": lambda p: [s_function(p)],
}


def hausdorff(a: list[Interval], b: list[Interval]):
    """Hausdorff distance between two finite unions of closed intervals."""

    def dist_to(x, regions):
        return min(0 if x in r else min(abs(x - r.lo), abs(x - r.hi)) for r in regions)

    def directed(src, dst):
        # the farthest point of a union from another union is an endpoint of
        # src or a midpoint between consecutive dst endpoints lying in src
        candidates = [e for r in src for e in (r.lo, r.hi)]
        ends = sorted(e for r in dst for e in (r.lo, r.hi))
        for lo, hi in zip(ends, ends[1:]):
            mid = (lo + hi) / 2
            if any(mid in r for r in src):
                candidates.append(mid)
        return max(dist_to(x, dst) for x in candidates)

    return max(directed(a, b), directed(b, a))


def perturb(problem: FusionProblem, eps, seed: int, probe: int) -> FusionProblem:
    """Shift every endpoint by exact uniform noise in ``[-eps, eps]``."""
    eps = Fraction(eps)
    u = uniforms(seed, [probe], 2 * problem.n)[0]
    out = []
    for k, iv in enumerate(problem.intervals):
        lo = Fraction(iv.lo) + eps * (2 * Fraction(float(u[2 * k])) - 1)
        hi = Fraction(iv.hi) + eps * (2 * Fraction(float(u[2 * k + 1])) - 1)
        out.append(Interval(min(lo, hi), max(lo, hi)))
    return FusionProblem(tuple(out), problem.f)


def lipschitz_probe(selector: str, problem: FusionProblem, eps, probes: int, seed: int,
                    skip_undefined: bool = False) -> float:
    """Largest output displacement over ``probes`` random perturbations.

    Displacement is the Hausdorff distance between the fused outputs, which
    for single intervals is the larger endpoint shift.  ``"omega"`` is
    compared through its peak regions.  Perturbations are exact rationals so
    the bound is not blurred by rounding.  With ``skip_undefined`` probes on
    which the function has no answer are ignored instead of raising.
    """
    if eps < 0:
        raise InputError("eps must be non-negative")
    fn = FUNCTIONS[selector]
    exact = FusionProblem(tuple(Interval(Fraction(i.lo), Fraction(i.hi)) for i in problem.intervals), problem.f)
    base = fn(exact)
    worst = Fraction(0)
    for k in range(probes):
        try:
            out = fn(perturb(exact, eps, seed, k))
        except (NoAgreement, InconsistentInputs):
            if skip_undefined:
                continue
            raise
        worst = max(worst, hausdorff(base, out))
    return float(worst)
