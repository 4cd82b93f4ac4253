"""Jaccard similarity as a set function, in both of its evaluation domains.

Fix a truth mask G over the ground set.  The direct index scores a
prediction mask A by |G n A| / |G u A|.  Re-parameterizing by the
misprediction mask M = A xor G (the symmetric difference) gives the same
score as |G \\ M| / |G u M|, and the associated loss is one minus that.

The two domains behave very differently: as a function of the prediction
the index is in general neither submodular nor supermodular, while as a
function of the misprediction set it is supermodular (so the loss is
submodular) -- the facts that `certify` establishes exhaustively and that
make the Lovasz-extension surrogate in `lovasz` convex.

Everything here is exact rational arithmetic.  The only convention is the
0/0 case |G u A| = 0 (empty truth, empty prediction), which resolves to
``empty_convention`` -- 1 by default, i.e. an empty prediction of an empty
truth counts as a perfect match.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import GroundSet, SetFunctionHandle, format_mask
from .errors import PreconditionError

__all__ = [
    "JaccardFamily",
    "jaccard_index",
    "misprediction_jaccard",
    "jaccard_loss",
    "direct_handle",
    "misprediction_handle",
    "loss_handle",
    "marginal_difference_direct",
    "marginal_difference_misprediction",
    "chain_inequality_check",
]


@dataclass(frozen=True)
class JaccardFamily:
    """A ground set together with a fixed truth mask and 0/0 convention."""

    ground: GroundSet
    truth: int
    empty_convention: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        self.ground.check_mask(self.truth)
        object.__setattr__(self, "empty_convention", Fraction(self.empty_convention))


def _ratio(fam: JaccardFamily, numerator: int, denominator: int) -> Fraction:
    if denominator == 0:
        return fam.empty_convention
    return Fraction(numerator, denominator)


def jaccard_index(fam: JaccardFamily, prediction: int) -> Fraction:
    """|G n A| / |G u A| for a prediction mask A."""
    fam.ground.check_mask(prediction)
    inter = (fam.truth & prediction).bit_count()
    union = (fam.truth | prediction).bit_count()
    return _ratio(fam, inter, union)


def misprediction_jaccard(fam: JaccardFamily, mispredictions: int) -> Fraction:
    """|G \\ M| / |G u M| for a misprediction mask M.

    Coincides with ``jaccard_index(fam, M xor G)`` for every M: the
    prediction is uniquely recovered from its misprediction set by another
    symmetric difference with the truth.
    """
    fam.ground.check_mask(mispredictions)
    kept = (fam.truth & ~mispredictions).bit_count()
    union = (fam.truth | mispredictions).bit_count()
    return _ratio(fam, kept, union)


def jaccard_loss(fam: JaccardFamily, mispredictions: int) -> Fraction:
    """One minus the misprediction-domain index; the evaluation loss."""
    return 1 - misprediction_jaccard(fam, mispredictions)


def _popcount_tables(fam: JaccardFamily):
    """(intersection, union) cardinalities against the truth, per mask."""
    size = fam.ground.subset_count
    masks = np.arange(size, dtype=np.int64)
    inter = np.bitwise_count(masks & fam.truth).astype(np.int64)
    total = np.bitwise_count(masks).astype(np.int64)
    truth_size = fam.truth.bit_count()
    union = truth_size + total - inter
    return inter, union, truth_size


def _fix_empty(fam: JaccardFamily, num, den):
    # Only mask 0 with an empty truth hits 0/0.
    if fam.truth == 0 and len(den) > 0:
        num[0] = fam.empty_convention.numerator
        den[0] = fam.empty_convention.denominator
    return num, den


def direct_handle(fam: JaccardFamily) -> SetFunctionHandle:
    """Handle for the prediction-domain index A -> |G n A| / |G u A|."""

    def bulk():
        inter, union, _ = _popcount_tables(fam)
        return _fix_empty(fam, inter, union)

    return SetFunctionHandle(
        ground=fam.ground,
        kind="jaccard-direct",
        exact=True,
        evaluator=lambda mask: jaccard_index(fam, mask),
        bulk_evaluator=bulk,
    )


def misprediction_handle(fam: JaccardFamily) -> SetFunctionHandle:
    """Handle for the misprediction-domain index M -> |G \\ M| / |G u M|."""

    def bulk():
        inter, union, truth_size = _popcount_tables(fam)
        return _fix_empty(fam, truth_size - inter, union)

    return SetFunctionHandle(
        ground=fam.ground,
        kind="jaccard-misprediction",
        exact=True,
        evaluator=lambda mask: misprediction_jaccard(fam, mask),
        bulk_evaluator=bulk,
    )


def loss_handle(fam: JaccardFamily) -> SetFunctionHandle:
    """Handle for the loss M -> 1 - |G \\ M| / |G u M|."""

    def bulk():
        inter, union, truth_size = _popcount_tables(fam)
        kept, union = _fix_empty(fam, truth_size - inter, union)
        return union - kept, union.copy()

    return SetFunctionHandle(
        ground=fam.ground,
        kind="jaccard-loss",
        exact=True,
        evaluator=lambda mask: jaccard_loss(fam, mask),
        bulk_evaluator=bulk,
    )


def _check_nested(fam: JaccardFamily, small: int, large: int, x: int) -> int:
    fam.ground.check_mask(small)
    fam.ground.check_mask(large)
    if small & ~large:
        raise PreconditionError(
            f"{format_mask(small)} is not a subset of {format_mask(large)}"
        )
    fam.ground.check_element(x)
    bit = 1 << x
    if large & bit:
        raise PreconditionError(
            f"element {x} must lie outside {format_mask(large)}"
        )
    return bit


def _quad_difference(fam: JaccardFamily, m1: int, m0: int, m3: int, m2: int,
                     kept_domain: bool) -> Fraction:
    """value(m1) - value(m0) - value(m3) + value(m2), exactly.

    ``kept_domain`` picks |G \\ m| (misprediction domain) over |G n m|
    (prediction domain) for the numerator cardinality.
    """
    g = fam.truth
    parts = []
    for m in (m1, m0, m3, m2):
        union = (g | m).bit_count()
        num = (g & ~m).bit_count() if kept_domain else (g & m).bit_count()
        parts.append((num, union))
    (i1, u1), (i0, u0), (i3, u3), (i2, u2) = parts
    if u0 and u1 and u2 and u3:
        numerator = (i1 * u0 - i0 * u1) * u3 * u2 - (i3 * u2 - i2 * u3) * u1 * u0
        return Fraction(numerator, u1 * u0 * u3 * u2)
    # 0/0 conventions only appear with an empty truth; fall back to plain
    # four-term rational arithmetic there.
    v = [_ratio(fam, i, u) for i, u in parts]
    return v[0] - v[1] - v[2] + v[3]


def marginal_difference_direct(fam: JaccardFamily, a: int, b: int, x: int) -> Fraction:
    """Gain of x at context a minus gain of x at the larger context b.

    For nested masks a <= b and x outside b, returns
    J(a+{x}) - J(a) - (J(b+{x}) - J(b)) by direct evaluation.  Two regimes
    have closed forms, and both are re-derived and asserted on every call:
    x inside the truth gives 1/|G u a| - 1/|G u b|; x outside the truth
    with |G n b| = |G n a| = 1 and |b| = |a| + 1 gives the telescoped
    1/(k+1) - 1/k - (1/(k+2) - 1/(k+1)) with k = |G u a|.
    """
    bit = _check_nested(fam, a, b, x)
    value = _quad_difference(fam, a | bit, a, b | bit, b, kept_domain=False)
    g = fam.truth
    if g & bit:
        union_a = (g | a).bit_count()
        union_b = (g | b).bit_count()
        closed = Fraction(1, union_a) - Fraction(1, union_b)
        assert value == closed, (
            f"closed form mismatch (x in truth): {value} != {closed}"
        )
    elif (
        (g & b).bit_count() == 1
        and (g & a).bit_count() == 1
        and b.bit_count() == a.bit_count() + 1
    ):
        k = (g | a).bit_count()
        closed = Fraction(1, k + 1) - Fraction(1, k) - (
            Fraction(1, k + 2) - Fraction(1, k + 1)
        )
        assert value == closed, (
            f"closed form mismatch (single overlap): {value} != {closed}"
        )
    return value


def marginal_difference_misprediction(fam: JaccardFamily, m: int, n: int, x: int) -> Fraction:
    """Misprediction-domain analogue of ``marginal_difference_direct``.

    Returns Jm(m+{x}) - Jm(m) - (Jm(n+{x}) - Jm(n)) for nested masks
    m <= n and x outside n; supermodularity of the misprediction index
    makes this nonpositive.  When x lies inside the truth the value must
    equal -1/|G u m| + 1/|G u n|, asserted on every call.
    """
    bit = _check_nested(fam, m, n, x)
    value = _quad_difference(fam, m | bit, m, n | bit, n, kept_domain=True)
    g = fam.truth
    if g & bit:
        union_m = (g | m).bit_count()
        union_n = (g | n).bit_count()
        closed = -Fraction(1, union_m) + Fraction(1, union_n)
        assert value == closed, (
            f"closed form mismatch (x in truth): {value} != {closed}"
        )
    return value


def chain_inequality_check(fam: JaccardFamily, m: int, n: int) -> bool:
    """Check |G\\n| <= |G\\m| <= |G| <= |G u m| <= |G u n| for m <= n.

    The chain always holds for nested masks; the operation exists as an
    explicit oracle for the exhaustive suites.
    """
    fam.ground.check_mask(m)
    fam.ground.check_mask(n)
    if m & ~n:
        raise PreconditionError(
            f"{format_mask(m)} is not a subset of {format_mask(n)}"
        )
    g = fam.truth
    kept_n = (g & ~n).bit_count()
    kept_m = (g & ~m).bit_count()
    size_g = g.bit_count()
    union_m = (g | m).bit_count()
    union_n = (g | n).bit_count()
    return kept_n <= kept_m <= size_g <= union_m <= union_n
