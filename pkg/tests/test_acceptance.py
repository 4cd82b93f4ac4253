"""Acceptance suite: one test per criterion, one PASS/FAIL line each.

Every criterion builds a deterministic JSON-able report; the determinism
criterion re-runs the others with a different worker count and compares
serialized bytes.  Reports are cached per (criterion, threads) so the
determinism pass reuses rather than recomputes where a comparison needs
the same configuration twice.
"""

from __future__ import annotations

import json
import random
from fractions import Fraction

from submodcert import (
    GroundSet,
    InfeasibleConfigurationError,
    JaccardFamily,
    certify_definitional,
    certify_local,
    chain_inequality_check,
    convexity_probe,
    coverage_function,
    direct_handle,
    jaccard_index,
    loss_handle,
    lovasz_extension,
    marginal_difference_direct,
    marginal_difference_misprediction,
    misprediction_handle,
    misprediction_jaccard,
    modular_function,
    negate,
    not_submodular_witness,
    not_supermodular_witness,
    subgradient_probe,
    submasks,
    symdiff_transform,
    vertex_agreement_check,
)
from conftest import brute_force_certify, random_tabulated

SAMPLE_SEED = 0x5EED

_CACHE: dict[tuple[int, int], dict] = {}


def report(criterion: int, threads: int) -> dict:
    key = (criterion, threads)
    if key not in _CACHE:
        _CACHE[key] = _RUNNERS[criterion](threads)
    return _CACHE[key]


def emit(criterion: int, rep: dict, detail: str) -> None:
    status = "PASS" if rep["ok"] else "FAIL"
    print(f"[criterion {criterion}] {status} - {detail}")


def expected_misprediction_verdict(n: int, truth: int) -> str:
    # A one- or zero-element ground set admits no nested strict pair, and
    # a full truth mask makes the index a shifted weighted cardinality.
    if n <= 1 or truth == (1 << n) - 1:
        return "modular"
    return "supermodular"


# -- criterion 1: misprediction-domain index is supermodular, exhaustively --


def run_criterion_1(threads: int) -> dict:
    ok = True
    sweeps = []
    for n in range(0, 11):
        certified = 0
        checks = 0
        for truth in range(1 << n):
            rep = certify_local(
                misprediction_handle(JaccardFamily(GroundSet(n), truth)),
                threads=threads,
            )
            good = (
                rep.supermodularity_violations == 0
                and rep.arithmetic == "exact"
                and rep.verdict == expected_misprediction_verdict(n, truth)
            )
            ok = ok and good
            certified += good
            checks += rep.checks_performed
        sweeps.append(
            {"n": n, "ground_truths": 1 << n, "certified": certified, "checks": checks}
        )
    rng = random.Random(SAMPLE_SEED)
    sample_certified = 0
    sample_checks = 0
    for _ in range(1000):
        truth = rng.getrandbits(20)
        rep = certify_local(
            misprediction_handle(JaccardFamily(GroundSet(20), truth)),
            threads=threads,
        )
        good = (
            rep.supermodularity_violations == 0
            and rep.arithmetic == "exact"
            and rep.verdict == expected_misprediction_verdict(20, truth)
        )
        ok = ok and good
        sample_certified += good
        sample_checks += rep.checks_performed
    return {
        "criterion": 1,
        "ok": ok,
        "exhaustive": sweeps,
        "sample_n20": {
            "seed": SAMPLE_SEED,
            "count": 1000,
            "certified": sample_certified,
            "checks": sample_checks,
        },
        "arithmetic": "exact",
    }


def test_criterion_1_misprediction_supermodular():
    rep = report(1, 8)
    emit(1, rep, "supermodularity certified for all n<=10 truths and 1000 seeded truths at n=20, exact")
    assert rep["ok"]
    assert all(s["certified"] == s["ground_truths"] for s in rep["exhaustive"])
    assert rep["sample_n20"]["certified"] == 1000


# -- criterion 2: prediction-domain index is neither, plus degenerate edges --


def run_criterion_2(threads: int) -> dict:
    ok = True
    sweeps = []
    for n in range(3, 11):
        neither = 0
        eligible = 0
        for truth in range(1, 1 << n):
            size = truth.bit_count()
            if not 1 <= size <= n - 2:
                continue
            eligible += 1
            rep = certify_local(
                direct_handle(JaccardFamily(GroundSet(n), truth)), threads=threads
            )
            good = rep.verdict == "neither" and rep.arithmetic == "exact"
            ok = ok and good
            neither += good
        sweeps.append({"n": n, "eligible": eligible, "neither": neither})

    # Degenerate edges, with the expectation derived from first principles:
    # truth = V collapses the index to |A|/n (a weighted cardinality, so
    # modular); an empty truth gives the constant 0 except at the empty
    # prediction, whose value is the 0/0 convention -- convention 0 means
    # constant zero (modular), convention 1 puts the single bump at the
    # bottom, whose removal-gain only relaxes as the context grows
    # (supermodular, strictly so once n >= 2).
    degenerate = []
    for n in range(3, 11):
        cases = [
            ((1 << n) - 1, 1, "modular"),
            (0, 1, "supermodular"),
            (0, 0, "modular"),
        ]
        for truth, convention, expected in cases:
            fn = direct_handle(JaccardFamily(GroundSet(n), truth, Fraction(convention)))
            rep = certify_local(fn, threads=threads)
            good = rep.verdict == expected
            if n <= 8:
                good = good and certify_definitional(fn, threads=threads).verdict == expected
            if n <= 5:
                good = good and brute_force_certify(fn)[0] == expected
            ok = ok and good
            degenerate.append(
                {"n": n, "truth_full": truth != 0, "convention": convention,
                 "expected": expected, "ok": good}
            )
    return {"criterion": 2, "ok": ok, "sweeps": sweeps, "degenerate": degenerate}


def test_criterion_2_direct_index_neither():
    rep = report(2, 8)
    emit(2, rep, "verdict 'neither' for every 1<=|G|<=n-2 at n in [3,10]; degenerate edges match first principles")
    assert rep["ok"]
    assert all(s["neither"] == s["eligible"] for s in rep["sweeps"])


# -- criterion 3: closed-form equality of the marginal differences --


def run_criterion_3(threads: int) -> dict:
    del threads  # single-threaded arithmetic sweep
    ok = True
    truth_cases = 0
    single_overlap_cases = 0
    nonpositive_cases = 0
    for n in range(1, 9):
        ground = GroundSet(n)
        for truth in range(1 << n):
            fam = JaccardFamily(ground, truth)
            for b in range(1 << n):
                outside = [x for x in range(n) if not b >> x & 1]
                for a in submasks(b):
                    union_a = (truth | a).bit_count()
                    for x in outside:
                        bit = 1 << x
                        value_g = marginal_difference_misprediction(fam, a, b, x)
                        nonpositive_cases += 1
                        if value_g > 0:
                            ok = False
                        if truth & bit:
                            union_b = (truth | b).bit_count()
                            expected_f = Fraction(1, union_a) - Fraction(1, union_b)
                            if marginal_difference_direct(fam, a, b, x) != expected_f:
                                ok = False
                            expected_g = -Fraction(1, (truth | a).bit_count()) + Fraction(
                                1, (truth | b).bit_count()
                            )
                            if value_g != expected_g:
                                ok = False
                            truth_cases += 1
                        elif (
                            (truth & b).bit_count() == 1
                            and (truth & a).bit_count() == 1
                            and b.bit_count() == a.bit_count() + 1
                        ):
                            k = union_a
                            expected_f = (
                                Fraction(1, k + 1)
                                - Fraction(1, k)
                                - Fraction(1, k + 2)
                                + Fraction(1, k + 1)
                            )
                            if marginal_difference_direct(fam, a, b, x) != expected_f:
                                ok = False
                            single_overlap_cases += 1
    return {
        "criterion": 3,
        "ok": ok,
        "truth_element_cases": truth_cases,
        "single_overlap_cases": single_overlap_cases,
        "nonpositive_cases": nonpositive_cases,
        "tolerance": "exact",
    }


def test_criterion_3_closed_forms():
    rep = report(3, 8)
    emit(3, rep, f"{rep['truth_element_cases']} truth-element and {rep['single_overlap_cases']} single-overlap closed forms equal, exact")
    assert rep["ok"]
    assert rep["truth_element_cases"] > 0 and rep["single_overlap_cases"] > 0


# -- criterion 4: the cardinality chain inequality --


def run_criterion_4(threads: int) -> dict:
    del threads
    ok = True
    checked = 0
    for n in range(0, 9):
        ground = GroundSet(n)
        for truth in range(1 << n):
            fam = JaccardFamily(ground, truth)
            for big in range(1 << n):
                for small in submasks(big):
                    checked += 1
                    if not chain_inequality_check(fam, small, big):
                        ok = False
    return {"criterion": 4, "ok": ok, "checked": checked, "tolerance": "exact"}


def test_criterion_4_chain_inequality():
    rep = report(4, 8)
    emit(4, rep, f"all four inequalities hold on {rep['checked']} (truth, nested pair) configurations at n<=8")
    assert rep["ok"]


# -- criterion 5: closed-form constructors across every feasible truth --


def run_criterion_5(threads: int) -> dict:
    del threads
    ok = True
    built_i = built_ii = infeasible_i = infeasible_ii = 0
    for n in range(0, 11):
        ground = GroundSet(n)
        for truth in range(1 << n):
            fam = JaccardFamily(ground, truth)
            fn = direct_handle(fam)
            outside = n - truth.bit_count()
            k = truth.bit_count()
            # not-supermodular construction
            try:
                witness = not_supermodular_witness(fam)
            except InfeasibleConfigurationError:
                witness = None
                infeasible_i += 1
                if truth != 0 and outside >= 1:
                    ok = False
            if witness is not None:
                if truth == 0 or outside < 1:
                    ok = False
                good = (
                    witness.violated == "supermodularity"
                    and witness.gap == Fraction(1, k) - Fraction(1, k + 1)
                    and witness.gap > 0
                    and witness.reverify(fn)
                )
                ok = ok and good
                built_i += 1
            # not-submodular construction
            try:
                witness = not_submodular_witness(fam)
            except InfeasibleConfigurationError:
                witness = None
                infeasible_ii += 1
                if truth != 0 and outside >= 2:
                    ok = False
            if witness is not None:
                if truth == 0 or outside < 2:
                    ok = False
                good = (
                    witness.violated == "submodularity"
                    and witness.gap == Fraction(-2, k * (k + 1) * (k + 2))
                    and witness.gap < 0
                    and witness.reverify(fn)
                )
                ok = ok and good
                built_ii += 1
    return {
        "criterion": 5,
        "ok": ok,
        "supermodularity_witnesses": built_i,
        "submodularity_witnesses": built_ii,
        "infeasible_supermodularity": infeasible_i,
        "infeasible_submodularity": infeasible_ii,
    }


def test_criterion_5_constructors_self_verify():
    rep = report(5, 8)
    emit(5, rep, f"{rep['supermodularity_witnesses']}+{rep['submodularity_witnesses']} witnesses self-verified; infeasible configurations raise the named error")
    assert rep["ok"]
    assert rep["supermodularity_witnesses"] > 0 and rep["submodularity_witnesses"] > 0


# -- criterion 6: the two certifiers never disagree --


def named_families():
    ground = GroundSet(6)
    truth = 0b010011
    fam = JaccardFamily(ground, truth)
    rng = random.Random(404)
    families = [
        ("jaccard-direct", direct_handle(fam)),
        ("jaccard-misprediction", misprediction_handle(fam)),
        ("jaccard-loss", loss_handle(fam)),
        ("modular", modular_function(ground, [Fraction(i - 2, 3) for i in range(6)])),
        ("coverage", coverage_function(ground, [rng.getrandbits(10) for _ in range(6)])),
    ]
    return families + [(f"negated {name}", negate(fn)) for name, fn in families]


def run_criterion_6(threads: int) -> dict:
    disagreements = 0
    random_compared = 0
    for seed in range(500):
        fn = random_tabulated(seed)
        local = certify_local(fn, threads=threads)
        definitional = certify_definitional(fn, threads=threads)
        random_compared += 1
        if local.verdict != definitional.verdict:
            disagreements += 1
    named = []
    for name, fn in named_families():
        local = certify_local(fn, threads=threads)
        definitional = certify_definitional(fn, threads=threads)
        if local.verdict != definitional.verdict:
            disagreements += 1
        named.append({"family": name, "verdict": local.verdict})
    return {
        "criterion": 6,
        "ok": disagreements == 0,
        "random_functions": random_compared,
        "named": named,
        "disagreements": disagreements,
    }


def test_criterion_6_certifier_cross_check():
    rep = report(6, 8)
    emit(6, rep, f"0 verdict disagreements on {rep['random_functions']} random tables and {len(rep['named'])} named families")
    assert rep["ok"]
    by_name = {entry["family"]: entry["verdict"] for entry in rep["named"]}
    assert by_name["jaccard-direct"] == "neither"
    assert by_name["jaccard-misprediction"] == "supermodular"
    assert by_name["jaccard-loss"] == "submodular"
    assert by_name["modular"] == "modular"
    assert by_name["coverage"] == "submodular"
    assert by_name["negated jaccard-misprediction"] == "submodular"
    assert by_name["negated coverage"] == "supermodular"


# -- criterion 7: the extension behaves like the convex surrogate it is --


def run_criterion_7(threads: int) -> dict:
    del threads
    ok = True
    rng = random.Random(777)
    vertex_checked = 0
    for _ in range(50):
        n = rng.randint(1, 10)
        truth = rng.getrandbits(n)
        fam = JaccardFamily(GroundSet(n), truth)
        for build in (direct_handle, misprediction_handle, loss_handle):
            vertex_checked += 1
            if not vertex_agreement_check(build(fam)):
                ok = False

    loss = loss_handle(JaccardFamily(GroundSet(8), 0b00000101))
    convex = convexity_probe(loss, trials=10_000, seed=42)
    ok = ok and convex.violations == 0 and convex.worst_gap >= -1e-12

    sub_rng = random.Random(99)
    base_point = [sub_rng.random() for _ in range(6)]
    sub = subgradient_probe(
        loss_handle(JaccardFamily(GroundSet(6), 0b000011)),
        base_point,
        probes=1_000,
        seed=99,
    )
    ok = ok and sub.ok and sub.worst_slack >= -1e-9

    # 1 - direct index (truth nontrivial): the extension must not be convex
    bumpy = symdiff_transform(loss_handle(JaccardFamily(GroundSet(4), 0b0001)), 0b0001)
    nonconvex = convexity_probe(bumpy, trials=10_000, seed=42)
    ok = ok and nonconvex.violations >= 1

    return {
        "criterion": 7,
        "ok": ok,
        "vertex_checks": vertex_checked,
        "convexity": {
            "trials": convex.trials,
            "seed": convex.seed,
            "violations": convex.violations,
            "worst_gap": convex.worst_gap,
        },
        "subgradient": {
            "probes": sub.probes,
            "seed": sub.seed,
            "ok": sub.ok,
            "worst_slack": sub.worst_slack,
        },
        "nonconvex_witness": {
            "trials": nonconvex.trials,
            "seed": nonconvex.seed,
            "violations": nonconvex.violations,
            "worst_gap": nonconvex.worst_gap,
        },
    }


def test_criterion_7_lovasz_suite():
    rep = report(7, 8)
    emit(7, rep, f"{rep['vertex_checks']} exact vertex sweeps; convexity and subgradient probes clean; {rep['nonconvex_witness']['violations']} non-convexity witnesses found")
    assert rep["ok"]
    assert rep["convexity"]["violations"] == 0
    assert rep["subgradient"]["ok"] is True
    assert rep["nonconvex_witness"]["violations"] >= 1


# -- criterion 8: byte-identical reports across runs and thread counts --


def test_criterion_8_determinism():
    ok = True
    for criterion in range(1, 8):
        eight = json.dumps(report(criterion, 8), sort_keys=True)
        one = json.dumps(report(criterion, 1), sort_keys=True)
        if eight != one:
            ok = False
    # independent re-runs of the cheaper criteria, same thread count
    for criterion in (2, 4, 5, 7):
        fresh = json.dumps(_RUNNERS[criterion](8), sort_keys=True)
        if fresh != json.dumps(report(criterion, 8), sort_keys=True):
            ok = False
    rep = {"criterion": 8, "ok": ok}
    emit(8, rep, "criteria 1-7 reports byte-identical across thread counts 1 and 8 and across re-runs")
    assert ok


_RUNNERS = {
    1: run_criterion_1,
    2: run_criterion_2,
    3: run_criterion_3,
    4: run_criterion_4,
    5: run_criterion_5,
    6: run_criterion_6,
    7: run_criterion_7,
}
