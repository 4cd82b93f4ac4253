"""Ground sets, bitmask subsets, and pure set-function handles.

A set function maps subsets of a finite ground set V = {0, ..., n-1} to
real values.  Subsets are packed into machine words, one bit per element,
so set algebra is branch-free bitwise arithmetic.  Values are exact
rationals (`fractions.Fraction`) or IEEE doubles; a handle is exact-backed
or float-backed as a whole, never mixed.

Handles are immutable and evaluation is pure: the same mask always yields
the same value, repeated runs reproduce results bit for bit, and handles
may be shared freely between concurrent workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional, Sequence, Union

import numpy as np

from .errors import CapacityError, PreconditionError

Value = Union[Fraction, float]

MAX_GROUND_SIZE = 63
TABULATION_CAP = 24

# Comparison tolerance for float-backed functions.  Exact-backed functions
# never use it: their inequalities are decided on integer cross products.
DEFAULT_FLOAT_TOLERANCE = 1e-9

# Exact tables are handed to the int64 kernels only when numerators and
# denominators stay far away from overflow; see _engines for the guard.
_INT64_VALUE_LIMIT = 1 << 62


def mask_from_elements(elements: Iterable[int]) -> int:
    """Pack element indices into a subset mask."""
    mask = 0
    for x in elements:
        if x < 0:
            raise PreconditionError(f"element index must be nonnegative, got {x}")
        mask |= 1 << x
    return mask


def mask_to_elements(mask: int) -> tuple[int, ...]:
    """Unpack a subset mask into the ascending tuple of its elements."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def format_mask(mask: int) -> str:
    """Lowercase hex with ``0x`` prefix; element i corresponds to bit i."""
    return format(mask, "#x")


def parse_mask(text: str) -> int:
    """Parse a hex mask string (``0x`` prefix optional)."""
    try:
        mask = int(text, 16)
    except ValueError as exc:
        raise PreconditionError(f"not a hex mask: {text!r}") from exc
    if mask < 0:
        raise PreconditionError(f"mask must be nonnegative: {text!r}")
    return mask


def submasks(mask: int) -> Iterator[int]:
    """Yield every submask of ``mask`` in ascending integer order."""
    s = 0
    while True:
        yield s
        if s == mask:
            return
        s = (s - mask) & mask


@dataclass(frozen=True)
class GroundSet:
    """The finite universe {0, ..., n-1} that all masks live over."""

    n: int

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or isinstance(self.n, bool):
            raise PreconditionError(f"ground-set size must be an int, got {self.n!r}")
        if not 0 <= self.n <= MAX_GROUND_SIZE:
            raise PreconditionError(
                f"ground-set size must be in [0, {MAX_GROUND_SIZE}], got {self.n}"
            )

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    @property
    def subset_count(self) -> int:
        return 1 << self.n

    def masks(self) -> range:
        """All subset masks in ascending order."""
        return range(1 << self.n)

    def check_mask(self, mask: int) -> int:
        if not isinstance(mask, int) or isinstance(mask, bool):
            raise PreconditionError(f"mask must be an int, got {mask!r}")
        if mask < 0 or mask > self.full_mask:
            raise PreconditionError(
                f"mask {format_mask(mask) if mask >= 0 else mask} has bits outside "
                f"the ground set of size {self.n}"
            )
        return mask

    def check_element(self, x: int) -> int:
        if not isinstance(x, int) or isinstance(x, bool):
            raise PreconditionError(f"element index must be an int, got {x!r}")
        if not 0 <= x < self.n:
            raise PreconditionError(
                f"element index {x} out of range for ground set of size {self.n}"
            )
        return x

    def complement(self, mask: int) -> int:
        return self.check_mask(mask) ^ self.full_mask


@dataclass(frozen=True, eq=False)
class SetFunctionHandle:
    """An evaluatable set function over a fixed ground set.

    ``evaluator`` must be total over all 2^n masks and deterministic.
    ``exact`` declares the codomain: Fraction values when true, floats
    otherwise.  ``bulk_evaluator`` is an optional fast path producing the
    whole value table as numpy arrays ((numerators, denominators) for
    exact handles, a float64 vector otherwise); it may return None when a
    safe bulk table cannot be built, in which case callers fall back to
    per-mask evaluation.
    """

    ground: GroundSet
    kind: str
    exact: bool
    evaluator: Callable[[int], Value] = field(repr=False)
    bulk_evaluator: Optional[Callable[[], object]] = field(default=None, repr=False)

    def __call__(self, mask: int) -> Value:
        self.ground.check_mask(mask)
        return self.evaluator(mask)


def _as_exact(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return Fraction(value)
    raise PreconditionError(f"expected an exact rational value, got {value!r}")


def _exact_bulk_from_table(table: Sequence[Fraction]):
    def bulk():
        for v in table:
            if abs(v.numerator) >= _INT64_VALUE_LIMIT or v.denominator >= _INT64_VALUE_LIMIT:
                return None
        num = np.fromiter((v.numerator for v in table), np.int64, len(table))
        den = np.fromiter((v.denominator for v in table), np.int64, len(table))
        return num, den

    return bulk


def tabulated_function(ground: GroundSet, values: Sequence[Value]) -> SetFunctionHandle:
    """Wrap an explicit value table (ascending mask order) as a handle.

    Tables of ints/Fractions become exact-backed; any float entry makes
    the whole table float-backed (all entries are coerced).  Non-finite
    floats are rejected.
    """
    vals = list(values)
    if len(vals) != 1 << ground.n:
        raise PreconditionError(
            f"table must have exactly 2^{ground.n} = {1 << ground.n} entries, "
            f"got {len(vals)}"
        )
    if any(isinstance(v, float) for v in vals):
        table = tuple(float(v) for v in vals)
        for v in table:
            if not math.isfinite(v):
                raise PreconditionError(f"table values must be finite, got {v!r}")

        def bulk_float():
            return np.asarray(table, dtype=np.float64)

        return SetFunctionHandle(
            ground=ground,
            kind="tabulated",
            exact=False,
            evaluator=table.__getitem__,
            bulk_evaluator=bulk_float,
        )
    exact_table = tuple(_as_exact(v) for v in vals)
    return SetFunctionHandle(
        ground=ground,
        kind="tabulated",
        exact=True,
        evaluator=exact_table.__getitem__,
        bulk_evaluator=_exact_bulk_from_table(exact_table),
    )


def modular_function(ground: GroundSet, weights: Sequence[Value]) -> SetFunctionHandle:
    """Weighted cardinality: value(A) = sum of weights over elements of A.

    Marginal gains are context-independent, so this is both submodular and
    supermodular; it anchors the "modular" verdict in tests.
    """
    ws = list(weights)
    if len(ws) != ground.n:
        raise PreconditionError(
            f"modular function needs {ground.n} weights, got {len(ws)}"
        )
    if any(isinstance(w, float) for w in ws):
        wf = tuple(float(w) for w in ws)
        for w in wf:
            if not math.isfinite(w):
                raise PreconditionError(f"weights must be finite, got {w!r}")

        def eval_float(mask: int) -> float:
            total = 0.0
            m = mask
            while m:
                low = m & -m
                total += wf[low.bit_length() - 1]
                m ^= low
            return total

        return SetFunctionHandle(ground, "modular", False, eval_float)

    we = tuple(_as_exact(w) for w in ws)

    def eval_exact(mask: int) -> Fraction:
        total = Fraction(0)
        m = mask
        while m:
            low = m & -m
            total += we[low.bit_length() - 1]
            m ^= low
        return total

    return SetFunctionHandle(ground, "modular", True, eval_exact)


def coverage_function(ground: GroundSet, cover_sets: Sequence[int]) -> SetFunctionHandle:
    """Union-of-sets cardinality: value(A) = |union of cover_sets[i], i in A|.

    The classical monotone submodular family; cover sets are item masks
    over an arbitrary item universe.
    """
    covers = tuple(cover_sets)
    if len(covers) != ground.n:
        raise PreconditionError(
            f"coverage function needs {ground.n} cover sets, got {len(covers)}"
        )
    for c in covers:
        if not isinstance(c, int) or isinstance(c, bool) or c < 0:
            raise PreconditionError(f"cover sets must be nonnegative ints, got {c!r}")

    def evaluate(mask: int) -> Fraction:
        union = 0
        m = mask
        while m:
            low = m & -m
            union |= covers[low.bit_length() - 1]
            m ^= low
        return Fraction(union.bit_count())

    return SetFunctionHandle(ground, "coverage", True, evaluate)


def negate(fn: SetFunctionHandle) -> SetFunctionHandle:
    """Pointwise negation; submodular and supermodular swap roles."""
    base_bulk = fn.bulk_evaluator
    bulk = None
    if base_bulk is not None:
        if fn.exact:

            def bulk():
                tables = base_bulk()
                if tables is None:
                    return None
                num, den = tables
                return -num, den

        else:

            def bulk():
                vals = base_bulk()
                return None if vals is None else -vals

    base_eval = fn.evaluator
    return SetFunctionHandle(
        ground=fn.ground,
        kind="negated",
        exact=fn.exact,
        evaluator=lambda mask: -base_eval(mask),
        bulk_evaluator=bulk,
    )


def symdiff_transform(fn: SetFunctionHandle, anchor: int) -> SetFunctionHandle:
    """Conjugate by symmetric difference: result(M) = fn(M xor anchor).

    Applying the transform twice with the same anchor returns the original
    values (xor is an involution).  Exactness is preserved.
    """
    fn.ground.check_mask(anchor)
    base_bulk = fn.bulk_evaluator
    bulk = None
    if base_bulk is not None:
        size = fn.ground.subset_count

        def _perm():
            return np.arange(size, dtype=np.int64) ^ anchor

        if fn.exact:

            def bulk():
                tables = base_bulk()
                if tables is None:
                    return None
                num, den = tables
                perm = _perm()
                return num[perm], den[perm]

        else:

            def bulk():
                vals = base_bulk()
                return None if vals is None else vals[_perm()]

    base_eval = fn.evaluator
    return SetFunctionHandle(
        ground=fn.ground,
        kind="transformed",
        exact=fn.exact,
        evaluator=lambda mask: base_eval(mask ^ anchor),
        bulk_evaluator=bulk,
    )


def marginal_gain(fn: SetFunctionHandle, context: int, x: int) -> Value:
    """fn(context + {x}) - fn(context), for an element x outside context."""
    fn.ground.check_mask(context)
    fn.ground.check_element(x)
    bit = 1 << x
    if context & bit:
        raise PreconditionError(
            f"element {x} is already in the context mask {format_mask(context)}"
        )
    return fn.evaluator(context | bit) - fn.evaluator(context)


def tabulate(fn: SetFunctionHandle) -> list[Value]:
    """The full value table, entry i = fn(mask i), ascending mask order."""
    n = fn.ground.n
    if n > TABULATION_CAP:
        raise CapacityError(
            f"tabulation is capped at n <= {TABULATION_CAP}, got n={n}"
        )
    evaluate = fn.evaluator
    return [evaluate(mask) for mask in fn.ground.masks()]
