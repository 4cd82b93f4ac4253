"""Lovasz extension of set functions and its convexity diagnostics.

The extension evaluates a set function at a fractional point m in [0,1]^n
by sorting coordinates in descending order (ties broken by ascending
element index), walking the chain of prefix sets S_0 = {} through S_n = V,
and combining the chain increments fn(S_i) - fn(S_{i-1}) linearly with the
sorted coordinates.  At 0/1 vertices it reproduces the set function, and
it is convex exactly when the set function is submodular -- which is what
makes the extension of the misprediction-domain loss a usable convex
surrogate, and what the seeded probes here witness empirically.

Chain increments are computed exactly for exact-backed functions and only
converted to float in the final accumulation, so vertex agreement can be
asserted with no tolerance at all on the exact path.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence, Union

from .core import SetFunctionHandle, Value
from .errors import CapacityError, PreconditionError

LOVASZ_CAP = 24
VERTEX_CAP = 12

VERTEX_TOLERANCE = 1e-12
CONVEXITY_TOLERANCE = 1e-12
SUBGRADIENT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class RelaxedPoint:
    """A point of the unit cube [0,1]^n; coordinates validated on build."""

    coords: tuple[float, ...]

    def __post_init__(self) -> None:
        coords = tuple(float(c) for c in self.coords)
        for c in coords:
            if not math.isfinite(c) or c < 0.0 or c > 1.0:
                raise PreconditionError(f"coordinate {c!r} outside [0, 1]")
        object.__setattr__(self, "coords", coords)

    def __len__(self) -> int:
        return len(self.coords)


PointLike = Union[RelaxedPoint, Sequence[float]]


def _coerce_point(point: PointLike, n: int) -> RelaxedPoint:
    if not isinstance(point, RelaxedPoint):
        point = RelaxedPoint(tuple(point))
    if len(point) != n:
        raise PreconditionError(
            f"point has {len(point)} coordinates, ground set has {n}"
        )
    return point


@dataclass(frozen=True)
class LovaszResult:
    """Extension value at one point, with the chain that produced it.

    ``permutation`` lists elements in the order they enter the chain;
    ``increments`` are the chain increments in that same order (exact for
    exact-backed functions); ``subgradient`` scatters the increments back
    to element positions; ``base_value`` is fn of the empty set.  The
    value equals base + sum of coordinate * increment along the chain, and
    the subgradient components sum to fn(V) - fn({}).
    """

    value: float
    permutation: tuple[int, ...]
    subgradient: tuple[float, ...]
    increments: tuple[Value, ...]
    base_value: Value


def lovasz_extension(fn: SetFunctionHandle, point: PointLike) -> LovaszResult:
    """Evaluate the extension of ``fn`` at ``point``."""
    n = fn.ground.n
    if n > LOVASZ_CAP:
        raise CapacityError(
            f"the extension is capped at n <= {LOVASZ_CAP}, got n={n}"
        )
    pt = _coerce_point(point, n)
    coords = pt.coords
    order = sorted(range(n), key=lambda i: (-coords[i], i))
    evaluate = fn.evaluator
    base = evaluate(0)
    increments = []
    prev = base
    mask = 0
    for element in order:
        mask |= 1 << element
        cur = evaluate(mask)
        increments.append(cur - prev)
        prev = cur
    subgradient = [0.0] * n
    value = float(base)
    for element, inc in zip(order, increments):
        finc = float(inc)
        subgradient[element] = finc
        value += coords[element] * finc
    return LovaszResult(
        value=value,
        permutation=tuple(order),
        subgradient=tuple(subgradient),
        increments=tuple(increments),
        base_value=base,
    )


def _vertex_value(result: LovaszResult, coords: Sequence[float]) -> Value:
    """Chain value at a 0/1 vertex, accumulated without float rounding."""
    total = result.base_value
    for element, inc in zip(result.permutation, result.increments):
        if coords[element] == 1.0:
            total = total + inc
    return total


def vertex_agreement_check(fn: SetFunctionHandle) -> bool:
    """Does the extension reproduce fn at every 0/1 vertex?

    Exact-backed functions are compared with no tolerance; float-backed
    ones within 1e-12.  True for every set function regardless of
    submodularity, which makes this a pure implementation check.
    """
    n = fn.ground.n
    if n > VERTEX_CAP:
        raise CapacityError(
            f"the vertex sweep is capped at n <= {VERTEX_CAP}, got n={n}"
        )
    for mask in fn.ground.masks():
        coords = [1.0 if mask >> i & 1 else 0.0 for i in range(n)]
        result = lovasz_extension(fn, coords)
        expected = fn.evaluator(mask)
        got = _vertex_value(result, coords)
        if fn.exact:
            if got != expected:
                return False
        elif abs(got - expected) > VERTEX_TOLERANCE:
            return False
    return True


@dataclass(frozen=True)
class ConvexityProbe:
    """Midpoint-convexity sampling report; violations counted against the
    fixed slack tolerance."""

    trials: int
    seed: int
    violations: int
    worst_gap: float
    tolerance: float


def convexity_probe(fn: SetFunctionHandle, trials: int, seed: int) -> ConvexityProbe:
    """Sample point pairs and test LE((u+v)/2) <= (LE(u) + LE(v))/2.

    The slack (LE(u) + LE(v))/2 - LE(mid) is nonnegative for convex
    extensions up to accumulation noise; ``worst_gap`` reports the most
    negative slack seen.  Seeded and sequential, so reruns with the same
    seed reproduce the report bit for bit.
    """
    if trials < 1:
        raise PreconditionError(f"trials must be >= 1, got {trials}")
    n = fn.ground.n
    rng = random.Random(seed)
    violations = 0
    worst = math.inf
    for _ in range(trials):
        u = [rng.random() for _ in range(n)]
        v = [rng.random() for _ in range(n)]
        mid = [(a + b) / 2.0 for a, b in zip(u, v)]
        slack = (
            lovasz_extension(fn, u).value + lovasz_extension(fn, v).value
        ) / 2.0 - lovasz_extension(fn, mid).value
        if slack < worst:
            worst = slack
        if slack < -CONVEXITY_TOLERANCE:
            violations += 1
    return ConvexityProbe(
        trials=trials,
        seed=seed,
        violations=violations,
        worst_gap=worst,
        tolerance=CONVEXITY_TOLERANCE,
    )


@dataclass(frozen=True)
class SubgradientProbe:
    probes: int
    seed: int
    ok: bool
    worst_slack: float
    tolerance: float


def subgradient_probe(fn: SetFunctionHandle, point: PointLike, probes: int, seed: int) -> SubgradientProbe:
    """Test LE(v) >= LE(m) + s . (v - m) at seeded random points v, where
    s is the subgradient returned at m.  Valid whenever fn is submodular;
    at a linear (modular) function the inequality is tight everywhere."""
    if probes < 1:
        raise PreconditionError(f"probes must be >= 1, got {probes}")
    n = fn.ground.n
    pt = _coerce_point(point, n)
    base = lovasz_extension(fn, pt)
    rng = random.Random(seed)
    worst = math.inf
    ok = True
    for _ in range(probes):
        v = [rng.random() for _ in range(n)]
        linear = base.value
        for i in range(n):
            linear += base.subgradient[i] * (v[i] - pt.coords[i])
        slack = lovasz_extension(fn, v).value - linear
        if slack < worst:
            worst = slack
        if slack < -SUBGRADIENT_TOLERANCE:
            ok = False
    return SubgradientProbe(
        probes=probes,
        seed=seed,
        ok=ok,
        worst_slack=worst,
        tolerance=SUBGRADIENT_TOLERANCE,
    )


def subgradient_validity_check(fn: SetFunctionHandle, point: PointLike, probes: int, seed: int) -> bool:
    return subgradient_probe(fn, point, probes, seed).ok
