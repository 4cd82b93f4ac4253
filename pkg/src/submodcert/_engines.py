"""Exhaustive certification sweeps over tabulated set functions.

Two interchangeable backends exist per arithmetic mode: JIT-compiled
kernels for large ground sets and plain-Python sweeps that double as the
readable reference.  Backend choice never changes a result:

* exact tables are decided on integer cross products (no rounding at all;
  the int64 kernels are only used when a magnitude guard proves that no
  intermediate product can overflow, otherwise arbitrary-precision
  Fractions take over);
* float tables share one canonical gap formula and one strict tolerance
  in every backend;
* the worst-witness rule -- largest |gap|, ties broken by ascending
  (A, B, x) -- is a total order, so merging per-chunk partial results is
  associative and the final report is independent of chunking and thread
  count.

Work is split into contiguous chunks of the outer loop (the larger pair
element for the local sweep, the outer superset mask for the definitional
sweep) and merged in fixed chunk order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .core import DEFAULT_FLOAT_TOLERANCE, SetFunctionHandle, tabulate

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


# --------------------------------------------------------------------------
# Table preparation


@dataclass(frozen=True)
class PreparedTable:
    """A set function tabulated for sweeping.

    mode is "exact-int" (int64 numerator/denominator arrays, overflow-safe
    by the guard below), "exact-frac" (list of Fractions), or "float"
    (float64 array with tolerance ``tau``).
    """

    mode: str
    n: int
    num: Optional[np.ndarray] = None
    den: Optional[np.ndarray] = None
    fracs: Optional[list] = None
    vals: Optional[np.ndarray] = None
    tau: float = DEFAULT_FLOAT_TOLERANCE

    @property
    def exact(self) -> bool:
        return self.mode != "float"

    def value(self, mask: int) -> Union[Fraction, float]:
        if self.mode == "exact-int":
            return Fraction(int(self.num[mask]), int(self.den[mask]))
        if self.mode == "exact-frac":
            return self.fracs[mask]
        return float(self.vals[mask])

    def gain(self, context: int, x: int):
        bit = 1 << x
        return self.value(context | bit) - self.value(context)


def _int64_guard_ok(pmax: int, qmax: int) -> bool:
    # Worst intermediates: cross products of gap numerators
    # (<= 4*pmax*qmax^3) against gap denominators (<= qmax^4).
    if qmax <= 0:
        return False
    return 4 * max(pmax, 1) * qmax**7 < 2**62 and qmax**4 < 2**62


def prepare_table(fn: SetFunctionHandle) -> PreparedTable:
    """Tabulate ``fn`` in the representation the sweep engines consume."""
    n = fn.ground.n
    if fn.exact:
        if fn.bulk_evaluator is not None:
            tables = fn.bulk_evaluator()
            if tables is not None:
                num, den = tables
                num = np.ascontiguousarray(num, dtype=np.int64)
                den = np.ascontiguousarray(den, dtype=np.int64)
                pmax = int(np.max(np.abs(num))) if num.size else 0
                qmax = int(np.max(den)) if den.size else 1
                if _int64_guard_ok(pmax, qmax):
                    return PreparedTable("exact-int", n, num=num, den=den)
                fracs = [Fraction(int(p), int(q)) for p, q in zip(num, den)]
                return PreparedTable("exact-frac", n, fracs=fracs)
        fracs = tabulate(fn)
        pmax = max((abs(v.numerator) for v in fracs), default=0)
        qmax = max((v.denominator for v in fracs), default=1)
        if _int64_guard_ok(pmax, qmax):
            num = np.fromiter((v.numerator for v in fracs), np.int64, len(fracs))
            den = np.fromiter((v.denominator for v in fracs), np.int64, len(fracs))
            return PreparedTable("exact-int", n, num=num, den=den)
        return PreparedTable("exact-frac", n, fracs=fracs)
    if fn.bulk_evaluator is not None:
        vals = fn.bulk_evaluator()
        if vals is not None:
            return PreparedTable("float", n, vals=np.ascontiguousarray(vals, dtype=np.float64))
    vals = np.asarray(tabulate(fn), dtype=np.float64)
    return PreparedTable("float", n, vals=vals)


# --------------------------------------------------------------------------
# Sweep results and deterministic merging


@dataclass(frozen=True)
class SweepResult:
    checks: int
    submodularity_violations: int
    supermodularity_violations: int
    # Witness labels (A, B, x) of the largest-|gap| violation per
    # direction, or None; gains are recomputed from the table afterwards.
    worst_submodularity: Optional[tuple[int, int, int]]
    worst_supermodularity: Optional[tuple[int, int, int]]


def _pick(table: PreparedTable, current, labels):
    """Fold one chunk's witness labels into the running best."""
    if labels is None:
        return current
    a, b, x = labels
    gap = table.gain(a, x) - table.gain(b, x)
    absgap = -gap if gap < 0 else gap
    cand = (absgap, a, b, x)
    if current is None:
        return cand
    if cand[0] != current[0]:
        return cand if cand[0] > current[0] else current
    return cand if cand[1:] < current[1:] else current


def _merge(table: PreparedTable, chunks) -> SweepResult:
    checks = 0
    sub_v = 0
    sup_v = 0
    best_sub = None
    best_sup = None
    for res in chunks:
        checks += res.checks
        sub_v += res.submodularity_violations
        sup_v += res.supermodularity_violations
        best_sub = _pick(table, best_sub, res.worst_submodularity)
        best_sup = _pick(table, best_sup, res.worst_supermodularity)
    return SweepResult(
        checks,
        sub_v,
        sup_v,
        best_sub[1:] if best_sub else None,
        best_sup[1:] if best_sup else None,
    )


def _split_range(lo: int, hi: int, parts: int) -> list[tuple[int, int]]:
    span = hi - lo
    parts = max(1, min(parts, span)) if span > 0 else 1
    step, extra = divmod(span, parts)
    bounds = [lo]
    for i in range(parts):
        bounds.append(bounds[-1] + step + (1 if i < extra else 0))
    return [(bounds[i], bounds[i + 1]) for i in range(parts) if bounds[i] < bounds[i + 1]]


def _run_chunks(worker, chunk_args, threads: int):
    if threads <= 1 or len(chunk_args) <= 1:
        return [worker(*args) for args in chunk_args]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda args: worker(*args), chunk_args))


# --------------------------------------------------------------------------
# Local sweep: for every context A and pair {x, y} outside A, compare the
# gain of the larger element y at A against its gain at A + {x}.  The
# canonical witness is (A, B=A+{x}, y); the same unordered pair read the
# other way yields the identical gap, so each pair is checked once.


@njit(cache=True, nogil=True)
def _local_exact_kernel(num, den, n, y_lo, y_hi):  # pragma: no cover - jitted
    size = num.shape[0]
    checks = np.int64(0)
    sub_v = np.int64(0)
    sup_v = np.int64(0)
    sub_found = False
    sub_a = np.int64(0)
    sub_b = np.int64(0)
    sub_x = np.int64(0)
    sub_gn = np.int64(0)
    sub_gd = np.int64(1)
    sup_found = False
    sup_a = np.int64(0)
    sup_b = np.int64(0)
    sup_x = np.int64(0)
    sup_gn = np.int64(0)
    sup_gd = np.int64(1)
    dn = np.empty(size, np.int64)
    dd = np.empty(size, np.int64)
    for y in range(y_lo, y_hi):
        by = np.int64(1) << y
        for m in range(size):
            if m & by == 0:
                my = m | by
                dn[m] = num[my] * den[m] - num[m] * den[my]
                dd[m] = den[my] * den[m]
        for x in range(y):
            bx = np.int64(1) << x
            mask_x = bx - 1
            mask_y = by - 1
            quarter = size >> 2
            for c in range(quarter):
                lx = c & mask_x
                a = ((c ^ lx) << 1) | lx
                ly = a & mask_y
                a = ((a ^ ly) << 1) | ly
                ab = a | bx
                t1 = dn[a] * dd[ab]
                t0 = dn[ab] * dd[a]
                checks += 1
                if t1 == t0:
                    continue
                gd = dd[a] * dd[ab]
                if t1 < t0:
                    sub_v += 1
                    gn = t0 - t1
                    if sub_found:
                        lhs = gn * sub_gd
                        rhs = sub_gn * gd
                        take = lhs > rhs or (
                            lhs == rhs
                            and (a < sub_a or (a == sub_a and (ab < sub_b or (ab == sub_b and y < sub_x))))
                        )
                    else:
                        take = True
                    if take:
                        sub_found = True
                        sub_a = a
                        sub_b = ab
                        sub_x = y
                        sub_gn = gn
                        sub_gd = gd
                else:
                    sup_v += 1
                    gn = t1 - t0
                    if sup_found:
                        lhs = gn * sup_gd
                        rhs = sup_gn * gd
                        take = lhs > rhs or (
                            lhs == rhs
                            and (a < sup_a or (a == sup_a and (ab < sup_b or (ab == sup_b and y < sup_x))))
                        )
                    else:
                        take = True
                    if take:
                        sup_found = True
                        sup_a = a
                        sup_b = ab
                        sup_x = y
                        sup_gn = gn
                        sup_gd = gd
    return (
        checks,
        sub_v,
        sup_v,
        np.int64(1) if sub_found else np.int64(0),
        sub_a,
        sub_b,
        sub_x,
        np.int64(1) if sup_found else np.int64(0),
        sup_a,
        sup_b,
        sup_x,
    )


@njit(cache=True, nogil=True)
def _local_float_kernel(vals, n, y_lo, y_hi, tau):  # pragma: no cover - jitted
    size = vals.shape[0]
    checks = np.int64(0)
    sub_v = np.int64(0)
    sup_v = np.int64(0)
    sub_found = False
    sub_a = np.int64(0)
    sub_b = np.int64(0)
    sub_x = np.int64(0)
    sub_gap = 0.0
    sup_found = False
    sup_a = np.int64(0)
    sup_b = np.int64(0)
    sup_x = np.int64(0)
    sup_gap = 0.0
    dv = np.empty(size, np.float64)
    for y in range(y_lo, y_hi):
        by = np.int64(1) << y
        for m in range(size):
            if m & by == 0:
                dv[m] = vals[m | by] - vals[m]
        for x in range(y):
            bx = np.int64(1) << x
            mask_x = bx - 1
            mask_y = by - 1
            quarter = size >> 2
            for c in range(quarter):
                lx = c & mask_x
                a = ((c ^ lx) << 1) | lx
                ly = a & mask_y
                a = ((a ^ ly) << 1) | ly
                ab = a | bx
                gap = dv[a] - dv[ab]
                checks += 1
                if gap < -tau:
                    sub_v += 1
                    ag = -gap
                    if sub_found:
                        take = ag > sub_gap or (
                            ag == sub_gap
                            and (a < sub_a or (a == sub_a and (ab < sub_b or (ab == sub_b and y < sub_x))))
                        )
                    else:
                        take = True
                    if take:
                        sub_found = True
                        sub_a = a
                        sub_b = ab
                        sub_x = y
                        sub_gap = ag
                elif gap > tau:
                    sup_v += 1
                    if sup_found:
                        take = gap > sup_gap or (
                            gap == sup_gap
                            and (a < sup_a or (a == sup_a and (ab < sup_b or (ab == sup_b and y < sup_x))))
                        )
                    else:
                        take = True
                    if take:
                        sup_found = True
                        sup_a = a
                        sup_b = ab
                        sup_x = y
                        sup_gap = gap
    return (
        checks,
        sub_v,
        sup_v,
        np.int64(1) if sub_found else np.int64(0),
        sub_a,
        sub_b,
        sub_x,
        np.int64(1) if sup_found else np.int64(0),
        sup_a,
        sup_b,
        sup_x,
    )


def _local_python_chunk(table: PreparedTable, n: int, y_lo: int, y_hi: int) -> SweepResult:
    exact = table.exact
    tol = Fraction(0) if exact else table.tau
    values = table.fracs if table.mode == "exact-frac" else None
    if values is None:
        if table.mode == "exact-int":
            values = [Fraction(int(p), int(q)) for p, q in zip(table.num, table.den)]
        else:
            values = [float(v) for v in table.vals]
    size = 1 << n
    checks = 0
    sub_v = 0
    sup_v = 0
    best_sub = None
    best_sup = None
    for y in range(y_lo, y_hi):
        by = 1 << y
        for x in range(y):
            bx = 1 << x
            bits = bx | by
            for a in range(size):
                if a & bits:
                    continue
                ab = a | bx
                gap = (values[a | by] - values[a]) - (values[ab | by] - values[ab])
                checks += 1
                if gap < -tol:
                    sub_v += 1
                    cand = (-gap, a, ab, y)
                    if (
                        best_sub is None
                        or cand[0] > best_sub[0]
                        or (cand[0] == best_sub[0] and cand[1:] < best_sub[1:])
                    ):
                        best_sub = cand
                elif gap > tol:
                    sup_v += 1
                    cand = (gap, a, ab, y)
                    if (
                        best_sup is None
                        or cand[0] > best_sup[0]
                        or (cand[0] == best_sup[0] and cand[1:] < best_sup[1:])
                    ):
                        best_sup = cand
    return SweepResult(
        checks,
        sub_v,
        sup_v,
        best_sub[1:] if best_sub else None,
        best_sup[1:] if best_sup else None,
    )


def _kernel_to_result(raw) -> SweepResult:
    (checks, sub_v, sup_v, sub_f, sub_a, sub_b, sub_x, sup_f, sup_a, sup_b, sup_x) = raw
    return SweepResult(
        int(checks),
        int(sub_v),
        int(sup_v),
        (int(sub_a), int(sub_b), int(sub_x)) if sub_f else None,
        (int(sup_a), int(sup_b), int(sup_x)) if sup_f else None,
    )


def local_sweep(table: PreparedTable, threads: int = 1) -> SweepResult:
    """Check every (A, {x,y} disjoint from A) local condition once."""
    n = table.n
    chunks = _split_range(0, n, threads)
    if table.mode == "exact-int" and HAVE_NUMBA:
        def worker(lo, hi):
            return _kernel_to_result(_local_exact_kernel(table.num, table.den, n, lo, hi))
    elif table.mode == "float" and HAVE_NUMBA:
        def worker(lo, hi):
            return _kernel_to_result(_local_float_kernel(table.vals, n, lo, hi, table.tau))
    else:
        def worker(lo, hi):
            return _local_python_chunk(table, n, lo, hi)
    return _merge(table, _run_chunks(worker, chunks, threads))


# --------------------------------------------------------------------------
# Definitional sweep: every triple (A subset of B, x outside B).


@njit(cache=True, nogil=True)
def _def_exact_kernel(num, den, n, b_lo, b_hi):  # pragma: no cover - jitted
    checks = np.int64(0)
    sub_v = np.int64(0)
    sup_v = np.int64(0)
    sub_found = False
    sub_a = np.int64(0)
    sub_b = np.int64(0)
    sub_x = np.int64(0)
    sub_gn = np.int64(0)
    sub_gd = np.int64(1)
    sup_found = False
    sup_a = np.int64(0)
    sup_b = np.int64(0)
    sup_x = np.int64(0)
    sup_gn = np.int64(0)
    sup_gd = np.int64(1)
    nb = np.empty(n if n > 0 else 1, np.int64)
    db = np.empty(n if n > 0 else 1, np.int64)
    for bm in range(b_lo, b_hi):
        for x in range(n):
            bx = np.int64(1) << x
            if bm & bx == 0:
                bmx = bm | bx
                nb[x] = num[bmx] * den[bm] - num[bm] * den[bmx]
                db[x] = den[bmx] * den[bm]
        a = bm
        while True:
            for x in range(n):
                bx = np.int64(1) << x
                if bm & bx:
                    continue
                ax = a | bx
                na = num[ax] * den[a] - num[a] * den[ax]
                da = den[ax] * den[a]
                t1 = na * db[x]
                t0 = nb[x] * da
                checks += 1
                if t1 == t0:
                    continue
                gd = da * db[x]
                if t1 < t0:
                    sub_v += 1
                    gn = t0 - t1
                    if sub_found:
                        lhs = gn * sub_gd
                        rhs = sub_gn * gd
                        take = lhs > rhs or (
                            lhs == rhs
                            and (a < sub_a or (a == sub_a and (bm < sub_b or (bm == sub_b and x < sub_x))))
                        )
                    else:
                        take = True
                    if take:
                        sub_found = True
                        sub_a = a
                        sub_b = bm
                        sub_x = x
                        sub_gn = gn
                        sub_gd = gd
                else:
                    sup_v += 1
                    gn = t1 - t0
                    if sup_found:
                        lhs = gn * sup_gd
                        rhs = sup_gn * gd
                        take = lhs > rhs or (
                            lhs == rhs
                            and (a < sup_a or (a == sup_a and (bm < sup_b or (bm == sup_b and x < sup_x))))
                        )
                    else:
                        take = True
                    if take:
                        sup_found = True
                        sup_a = a
                        sup_b = bm
                        sup_x = x
                        sup_gn = gn
                        sup_gd = gd
            if a == 0:
                break
            a = (a - 1) & bm
    return (
        checks,
        sub_v,
        sup_v,
        np.int64(1) if sub_found else np.int64(0),
        sub_a,
        sub_b,
        sub_x,
        np.int64(1) if sup_found else np.int64(0),
        sup_a,
        sup_b,
        sup_x,
    )


@njit(cache=True, nogil=True)
def _def_float_kernel(vals, n, b_lo, b_hi, tau):  # pragma: no cover - jitted
    checks = np.int64(0)
    sub_v = np.int64(0)
    sup_v = np.int64(0)
    sub_found = False
    sub_a = np.int64(0)
    sub_b = np.int64(0)
    sub_x = np.int64(0)
    sub_gap = 0.0
    sup_found = False
    sup_a = np.int64(0)
    sup_b = np.int64(0)
    sup_x = np.int64(0)
    sup_gap = 0.0
    gb = np.empty(n if n > 0 else 1, np.float64)
    for bm in range(b_lo, b_hi):
        for x in range(n):
            bx = np.int64(1) << x
            if bm & bx == 0:
                gb[x] = vals[bm | bx] - vals[bm]
        a = bm
        while True:
            for x in range(n):
                bx = np.int64(1) << x
                if bm & bx:
                    continue
                gap = (vals[a | bx] - vals[a]) - gb[x]
                checks += 1
                if gap < -tau:
                    sub_v += 1
                    ag = -gap
                    if sub_found:
                        take = ag > sub_gap or (
                            ag == sub_gap
                            and (a < sub_a or (a == sub_a and (bm < sub_b or (bm == sub_b and x < sub_x))))
                        )
                    else:
                        take = True
                    if take:
                        sub_found = True
                        sub_a = a
                        sub_b = bm
                        sub_x = x
                        sub_gap = ag
                elif gap > tau:
                    sup_v += 1
                    if sup_found:
                        take = gap > sup_gap or (
                            gap == sup_gap
                            and (a < sup_a or (a == sup_a and (bm < sup_b or (bm == sup_b and x < sup_x))))
                        )
                    else:
                        take = True
                    if take:
                        sup_found = True
                        sup_a = a
                        sup_b = bm
                        sup_x = x
                        sup_gap = gap
            if a == 0:
                break
            a = (a - 1) & bm
    return (
        checks,
        sub_v,
        sup_v,
        np.int64(1) if sub_found else np.int64(0),
        sub_a,
        sub_b,
        sub_x,
        np.int64(1) if sup_found else np.int64(0),
        sup_a,
        sup_b,
        sup_x,
    )


def _definitional_python_chunk(table: PreparedTable, n: int, b_lo: int, b_hi: int) -> SweepResult:
    exact = table.exact
    tol = Fraction(0) if exact else table.tau
    if table.mode == "exact-frac":
        values = table.fracs
    elif table.mode == "exact-int":
        values = [Fraction(int(p), int(q)) for p, q in zip(table.num, table.den)]
    else:
        values = [float(v) for v in table.vals]
    checks = 0
    sub_v = 0
    sup_v = 0
    best_sub = None
    best_sup = None
    for bm in range(b_lo, b_hi):
        xs = [x for x in range(n) if not bm >> x & 1]
        gains_b = [values[bm | (1 << x)] - values[bm] for x in xs]
        a = bm
        while True:
            for x, gain_b in zip(xs, gains_b):
                bx = 1 << x
                gap = (values[a | bx] - values[a]) - gain_b
                checks += 1
                if gap < -tol:
                    sub_v += 1
                    cand = (-gap, a, bm, x)
                    if (
                        best_sub is None
                        or cand[0] > best_sub[0]
                        or (cand[0] == best_sub[0] and cand[1:] < best_sub[1:])
                    ):
                        best_sub = cand
                elif gap > tol:
                    sup_v += 1
                    cand = (gap, a, bm, x)
                    if (
                        best_sup is None
                        or cand[0] > best_sup[0]
                        or (cand[0] == best_sup[0] and cand[1:] < best_sup[1:])
                    ):
                        best_sup = cand
            if a == 0:
                break
            a = (a - 1) & bm
    return SweepResult(
        checks,
        sub_v,
        sup_v,
        best_sub[1:] if best_sub else None,
        best_sup[1:] if best_sup else None,
    )


def definitional_sweep(table: PreparedTable, threads: int = 1) -> SweepResult:
    """Check every (A subset of B, x outside B) triple once."""
    n = table.n
    chunks = _split_range(0, 1 << n, threads)
    if table.mode == "exact-int" and HAVE_NUMBA:
        def worker(lo, hi):
            return _kernel_to_result(_def_exact_kernel(table.num, table.den, n, lo, hi))
    elif table.mode == "float" and HAVE_NUMBA:
        def worker(lo, hi):
            return _kernel_to_result(_def_float_kernel(table.vals, n, lo, hi, table.tau))
    else:
        def worker(lo, hi):
            return _definitional_python_chunk(table, n, lo, hi)
    return _merge(table, _run_chunks(worker, chunks, threads))
