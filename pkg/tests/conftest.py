"""Shared fixtures and independent reference implementations.

The reference code here deliberately avoids the package's bitmask
machinery: sets are python frozensets and enumeration goes through
itertools, so agreement with the library is a genuine two-route check.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import chain, combinations

import pytest

from submodcert import (
    GroundSet,
    SetFunctionHandle,
    mask_from_elements,
    modular_function,
    tabulated_function,
)


def powerset(elements):
    elements = list(elements)
    return chain.from_iterable(combinations(elements, k) for k in range(len(elements) + 1))


def set_jaccard(truth: set, prediction: set, convention=Fraction(1)) -> Fraction:
    """Reference Jaccard index on python sets."""
    union = truth | prediction
    if not union:
        return Fraction(convention)
    return Fraction(len(truth & prediction), len(union))


def set_misprediction_jaccard(truth: set, mispredicted: set, convention=Fraction(1)) -> Fraction:
    union = truth | mispredicted
    if not union:
        return Fraction(convention)
    return Fraction(len(truth - mispredicted), len(union))


def brute_force_certify(fn: SetFunctionHandle, tau: float = 1e-9):
    """Reference definitional certification via frozensets and itertools.

    Returns (verdict, submodularity_violations, supermodularity_violations).
    """
    n = fn.ground.n
    values = {}
    for subset in powerset(range(n)):
        values[frozenset(subset)] = fn(mask_from_elements(subset))
    tol = 0 if fn.exact else tau
    sub_v = 0
    sup_v = 0
    for b_set in map(frozenset, powerset(range(n))):
        for a_set in map(frozenset, powerset(b_set)):
            for x in range(n):
                if x in b_set:
                    continue
                gain_a = values[a_set | {x}] - values[a_set]
                gain_b = values[b_set | {x}] - values[b_set]
                gap = gain_a - gain_b
                if gap < -tol:
                    sub_v += 1
                elif gap > tol:
                    sup_v += 1
    if sub_v == 0 and sup_v == 0:
        verdict = "modular"
    elif sub_v == 0:
        verdict = "submodular"
    elif sup_v == 0:
        verdict = "supermodular"
    else:
        verdict = "neither"
    return verdict, sub_v, sup_v


def random_tabulated(seed: int, max_n: int = 6) -> SetFunctionHandle:
    """Seeded random set function; even seeds exact, odd seeds float."""
    rng = random.Random(seed)
    n = rng.randint(1, max_n)
    ground = GroundSet(n)
    if seed % 10 == 9:
        # Sprinkle in modular functions so zero-gap paths stay exercised.
        weights = [Fraction(rng.randint(-4, 4), rng.randint(1, 4)) for _ in range(n)]
        return modular_function(ground, weights)
    if seed % 2 == 0:
        values = [
            Fraction(rng.randint(-16, 16), rng.randint(1, 12))
            for _ in range(1 << n)
        ]
    else:
        values = [rng.uniform(-1.0, 1.0) for _ in range(1 << n)]
    return tabulated_function(ground, values)


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
