"""Exhaustive certification of submodularity, supermodularity, modularity.

A set function f is submodular when the marginal gain of any element only
shrinks as the context grows: f(A+{x}) - f(A) >= f(B+{x}) - f(B) for all
nested A <= B and x outside B.  Supermodular is the reversed inequality,
modular is both at once (all gaps zero), and "neither" means both
directions are violated somewhere.

Two independent certifiers are provided on purpose.  The definitional one
enumerates every (A <= B, x) triple, cost about 3^n * n.  The local one
enumerates every (A, {x, y}) quadruple condition, cost about 2^n * n^2,
and is equivalent on finite ground sets; the slow certifier serves as the
oracle for the fast one in the test suite.  Mixing up *which* set function
a check was applied to is exactly the failure mode this redundancy guards
against, so both certifiers also re-verify their reported witnesses.

All reports are deterministic: enumeration order is canonical, violation
counting is per-condition, and the worst witness per direction is the
largest-|gap| one with ties broken by ascending (A, B, x), which makes
parallel chunk merging order-independent.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import _engines
from .core import (
    DEFAULT_FLOAT_TOLERANCE,
    SetFunctionHandle,
    Value,
    format_mask,
    submasks,
    tabulate,
)
from .errors import CapacityError, InfeasibleConfigurationError, PreconditionError
from .jaccard import JaccardFamily, jaccard_index

DEFINITIONAL_CAP = 16
LOCAL_CAP = 24
SEARCH_CAP = 24

SUBMODULARITY = "submodularity"
SUPERMODULARITY = "supermodularity"

_VERDICTS = ("submodular", "supermodular", "modular", "neither")


def _value_str(v: Value) -> str:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return format(v, ".17g")


@dataclass(frozen=True)
class Counterexample:
    """A self-verifiable witness (A, B, x) violating one inequality
    direction: A <= B, x outside B, and gap = gain_at_A - gain_at_B has
    the sign forbidden by ``violated``."""

    A: int
    B: int
    x: int
    gain_at_A: Value
    gain_at_B: Value
    gap: Value
    violated: str

    def __post_init__(self) -> None:
        if self.A & ~self.B:
            raise PreconditionError("witness requires A to be a subset of B")
        if self.B >> self.x & 1:
            raise PreconditionError("witness element x must lie outside B")
        if self.violated not in (SUBMODULARITY, SUPERMODULARITY):
            raise PreconditionError(f"unknown violated property {self.violated!r}")
        if isinstance(self.gap, Fraction):
            if self.gap != self.gain_at_A - self.gain_at_B:
                raise PreconditionError("stored gap does not equal gain_at_A - gain_at_B")
        if self.violated == SUBMODULARITY and not self.gap < 0:
            raise PreconditionError("a submodularity violation needs gap < 0")
        if self.violated == SUPERMODULARITY and not self.gap > 0:
            raise PreconditionError("a supermodularity violation needs gap > 0")

    def reverify(self, fn: SetFunctionHandle, tau: float = DEFAULT_FLOAT_TOLERANCE) -> bool:
        """Recompute both gains from ``fn`` and compare against the stored
        values: exact equality for exact-backed functions, within ``tau``
        otherwise."""
        bit = 1 << self.x
        gain_a = fn(self.A | bit) - fn(self.A)
        gain_b = fn(self.B | bit) - fn(self.B)
        if fn.exact:
            return gain_a == self.gain_at_A and gain_b == self.gain_at_B
        return (
            abs(gain_a - self.gain_at_A) <= tau
            and abs(gain_b - self.gain_at_B) <= tau
        )

    def to_dict(self) -> dict:
        return {
            "A": format_mask(self.A),
            "B": format_mask(self.B),
            "x": self.x,
            "gain_at_A": _value_str(self.gain_at_A),
            "gain_at_B": _value_str(self.gain_at_B),
            "gap": _value_str(self.gap),
            "violated": self.violated,
        }


@dataclass(frozen=True)
class CertificationReport:
    """Outcome of one exhaustive sweep over a set function."""

    verdict: str
    n: int
    checks_performed: int
    submodularity_violations: int
    supermodularity_violations: int
    worst_submodularity_witness: Optional[Counterexample]
    worst_supermodularity_witness: Optional[Counterexample]
    method: str
    arithmetic: str

    @property
    def is_submodular(self) -> bool:
        return self.submodularity_violations == 0

    @property
    def is_supermodular(self) -> bool:
        return self.supermodularity_violations == 0

    @property
    def is_modular(self) -> bool:
        return self.is_submodular and self.is_supermodular

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "n": self.n,
            "checks_performed": self.checks_performed,
            "submodularity_violations": self.submodularity_violations,
            "supermodularity_violations": self.supermodularity_violations,
            "worst_submodularity_witness": (
                self.worst_submodularity_witness.to_dict()
                if self.worst_submodularity_witness
                else None
            ),
            "worst_supermodularity_witness": (
                self.worst_supermodularity_witness.to_dict()
                if self.worst_supermodularity_witness
                else None
            ),
            "method": self.method,
            "arithmetic": self.arithmetic,
        }


def _verdict(sub_violations: int, sup_violations: int) -> str:
    if sub_violations == 0 and sup_violations == 0:
        return "modular"
    if sub_violations == 0:
        return "submodular"
    if sup_violations == 0:
        return "supermodular"
    return "neither"


def _witness(table: _engines.PreparedTable, labels, violated: str) -> Optional[Counterexample]:
    if labels is None:
        return None
    a, b, x = labels
    gain_a = table.gain(a, x)
    gain_b = table.gain(b, x)
    return Counterexample(
        A=a,
        B=b,
        x=x,
        gain_at_A=gain_a,
        gain_at_B=gain_b,
        gap=gain_a - gain_b,
        violated=violated,
    )


def _arithmetic_tag(table: _engines.PreparedTable) -> str:
    if table.exact:
        return "exact"
    return f"float(tau={table.tau:.0e})"


def _assemble(fn: SetFunctionHandle, table, sweep, method: str) -> CertificationReport:
    return CertificationReport(
        verdict=_verdict(sweep.submodularity_violations, sweep.supermodularity_violations),
        n=fn.ground.n,
        checks_performed=sweep.checks,
        submodularity_violations=sweep.submodularity_violations,
        supermodularity_violations=sweep.supermodularity_violations,
        worst_submodularity_witness=_witness(table, sweep.worst_submodularity, SUBMODULARITY),
        worst_supermodularity_witness=_witness(table, sweep.worst_supermodularity, SUPERMODULARITY),
        method=method,
        arithmetic=_arithmetic_tag(table),
    )


def certify_definitional(fn: SetFunctionHandle, threads: int = 1) -> CertificationReport:
    """Certify by enumerating every (A <= B, x outside B) triple."""
    n = fn.ground.n
    if n > DEFINITIONAL_CAP:
        raise CapacityError(
            f"definitional certification is capped at n <= {DEFINITIONAL_CAP}, got n={n}"
        )
    table = _engines.prepare_table(fn)
    sweep = _engines.definitional_sweep(table, threads=max(1, int(threads)))
    return _assemble(fn, table, sweep, "definitional")


def certify_local(fn: SetFunctionHandle, threads: int = 1) -> CertificationReport:
    """Certify via the equivalent pairwise condition
    f(A+{x}) + f(A+{y}) vs f(A+{x,y}) + f(A) over all (A, {x,y})."""
    n = fn.ground.n
    if n > LOCAL_CAP:
        raise CapacityError(
            f"local certification is capped at n <= {LOCAL_CAP}, got n={n}"
        )
    table = _engines.prepare_table(fn)
    sweep = _engines.local_sweep(table, threads=max(1, int(threads)))
    return _assemble(fn, table, sweep, "local")


def find_counterexample(fn: SetFunctionHandle, prop: str) -> Optional[Counterexample]:
    """First violation of ``prop`` in ascending (A, B, x) order, or None.

    ``prop`` is "submodularity" or "supermodularity".  Deterministic given
    the function; float-backed functions use the strict tolerance from
    the certifiers."""
    if prop not in (SUBMODULARITY, SUPERMODULARITY):
        raise PreconditionError(f"unknown property {prop!r}")
    n = fn.ground.n
    if n > SEARCH_CAP:
        raise CapacityError(
            f"counterexample search is capped at n <= {SEARCH_CAP}, got n={n}"
        )
    values = tabulate(fn)
    tol = Fraction(0) if fn.exact else DEFAULT_FLOAT_TOLERANCE
    full = fn.ground.full_mask
    want_sub = prop == SUBMODULARITY
    for a in fn.ground.masks():
        rest = full ^ a
        for extra in submasks(rest):
            b = a | extra
            for x in range(n):
                bx = 1 << x
                if b & bx:
                    continue
                gap = (values[a | bx] - values[a]) - (values[b | bx] - values[b])
                if want_sub:
                    if gap < -tol:
                        return Counterexample(
                            A=a,
                            B=b,
                            x=x,
                            gain_at_A=values[a | bx] - values[a],
                            gain_at_B=values[b | bx] - values[b],
                            gap=gap,
                            violated=SUBMODULARITY,
                        )
                elif gap > tol:
                    return Counterexample(
                        A=a,
                        B=b,
                        x=x,
                        gain_at_A=values[a | bx] - values[a],
                        gain_at_B=values[b | bx] - values[b],
                        gap=gap,
                        violated=SUPERMODULARITY,
                    )
    return None


def _direct_gain(fam: JaccardFamily, context: int, x: int) -> Fraction:
    bit = 1 << x
    return jaccard_index(fam, context | bit) - jaccard_index(fam, context)


def not_supermodular_witness(fam: JaccardFamily) -> Counterexample:
    """Closed-form proof that the direct index is not supermodular.

    Take A empty, B a single element outside the truth, and x inside the
    truth; the gap is exactly 1/|G u A| - 1/|G u B| = 1/|G| - 1/(|G|+1),
    which is strictly positive.  Needs a nonempty truth and at least one
    element outside it; otherwise no configuration of this shape exists.
    """
    g = fam.truth
    outside = fam.ground.full_mask ^ g
    if g == 0 or outside == 0:
        raise InfeasibleConfigurationError(
            "needs a nonempty truth mask and at least one element outside it "
            f"(n={fam.ground.n}, truth={format_mask(g)})"
        )
    b = outside & -outside
    x = (g & -g).bit_length() - 1
    a = 0
    gain_a = _direct_gain(fam, a, x)
    gain_b = _direct_gain(fam, b, x)
    gap = gain_a - gain_b
    closed = Fraction(1, (g | a).bit_count()) - Fraction(1, (g | b).bit_count())
    assert gap == closed, f"construction out of step with closed form: {gap} != {closed}"
    return Counterexample(
        A=a,
        B=b,
        x=x,
        gain_at_A=gain_a,
        gain_at_B=gain_b,
        gap=gap,
        violated=SUPERMODULARITY,
    )


def not_submodular_witness(fam: JaccardFamily) -> Counterexample:
    """Closed-form proof that the direct index is not submodular.

    Take A = {g} for one truth element, B = A plus one element outside the
    truth, and x a second outside element; with k = |G u A| = |G| the gap
    telescopes to 1/(k+1) - 1/k - (1/(k+2) - 1/(k+1)) = -2/(k(k+1)(k+2)),
    strictly negative.  Needs a nonempty truth and at least two elements
    outside it.
    """
    g = fam.truth
    outside = fam.ground.full_mask ^ g
    if g == 0 or outside.bit_count() < 2:
        raise InfeasibleConfigurationError(
            "needs a nonempty truth mask and at least two elements outside it "
            f"(n={fam.ground.n}, truth={format_mask(g)})"
        )
    a = g & -g
    b_low = outside & -outside
    b = a | b_low
    x = ((outside ^ b_low) & -(outside ^ b_low)).bit_length() - 1
    gain_a = _direct_gain(fam, a, x)
    gain_b = _direct_gain(fam, b, x)
    gap = gain_a - gain_b
    k = (g | a).bit_count()
    closed = Fraction(1, k + 1) - Fraction(1, k) - (Fraction(1, k + 2) - Fraction(1, k + 1))
    assert gap == closed, f"construction out of step with closed form: {gap} != {closed}"
    return Counterexample(
        A=a,
        B=b,
        x=x,
        gain_at_A=gain_a,
        gain_at_B=gain_b,
        gap=gap,
        violated=SUBMODULARITY,
    )
