"""Command-line front end: certification, counterexamples, tables, and the
extension, all with machine-readable JSON on stdout.

Exit codes: 0 success (or expectation met), 1 usage/validation/capacity
error, 2 expectation mismatch, 3 infeasible construction.  Diagnostics go
to stderr.  Exact values serialize as fraction strings "p/q"; float-backed
values as 17-significant-digit strings; every JSON document re-serializes
byte-identically after parsing (sorted keys, one document per line).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction
from typing import Optional

from . import certify as certify_mod
from . import lovasz as lovasz_mod
from .core import (
    GroundSet,
    SetFunctionHandle,
    Value,
    format_mask,
    mask_from_elements,
    modular_function,
    coverage_function,
    negate,
    parse_mask,
    symdiff_transform,
    tabulate,
    tabulated_function,
)
from .errors import (
    CapacityError,
    InfeasibleConfigurationError,
    PreconditionError,
    SetFunctionError,
)
from .jaccard import JaccardFamily, direct_handle, loss_handle, misprediction_handle

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_EXPECT_MISMATCH = 2
EXIT_INFEASIBLE = 3

JACCARD_FAMILIES = ("jaccard-direct", "jaccard-misprediction", "jaccard-loss")
FAMILIES = JACCARD_FAMILIES + ("modular", "coverage", "table")


class UsageError(SetFunctionError):
    pass


class _Parser(argparse.ArgumentParser):
    # Usage errors must exit 1 (argparse defaults to 2, which is taken by
    # expectation mismatches), so errors are raised and mapped in main().
    def error(self, message):
        raise UsageError(message)


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


def _value_str(v: Value) -> str:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return format(v, ".17g")


def _parse_value_token(token: str):
    token = token.strip()
    if not token:
        raise UsageError("empty value token")
    if "/" in token:
        try:
            return Fraction(token)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad fraction {token!r}: {exc}") from exc
    if any(ch in token for ch in ".eE"):
        try:
            return float(token)
        except ValueError as exc:
            raise UsageError(f"bad decimal {token!r}") from exc
    try:
        return Fraction(int(token))
    except ValueError as exc:
        raise UsageError(f"bad value {token!r}") from exc


def _load_table(path: str, n: int) -> list:
    expected = 1 << n
    values: dict[int, object] = {}
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot open table file {path!r}: {exc}") from exc
    with handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["mask", "value"]:
            raise UsageError(
                f"table file {path!r} must start with header 'mask,value'"
            )
        for row in reader:
            if not row:
                continue
            if len(row) != 2:
                raise UsageError(f"table row must be 'mask,value', got {row!r}")
            mask = parse_mask(row[0].strip())
            if mask >= expected:
                raise UsageError(
                    f"table mask {row[0].strip()} has bits outside the ground set"
                )
            if mask in values:
                raise UsageError(f"duplicate table mask {format_mask(mask)}")
            values[mask] = _parse_value_token(row[1])
    if len(values) != expected:
        missing = next(m for m in range(expected) if m not in values)
        raise UsageError(
            f"table must cover all {expected} masks (totality required); "
            f"first missing: {format_mask(missing)}"
        )
    return [values[m] for m in range(expected)]


def _add_function_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("set function")
    group.add_argument("--family", required=True, choices=FAMILIES)
    group.add_argument("--n", required=True, type=int, help="ground-set size")
    group.add_argument("--ground-truth", help="truth mask, hex (jaccard families)")
    group.add_argument(
        "--ground-truth-elems",
        help="truth as comma-separated element indices, e.g. 0,2,5",
    )
    group.add_argument(
        "--empty-convention",
        type=int,
        choices=(0, 1),
        default=None,
        help="value of the 0/0 Jaccard case (default 1)",
    )
    group.add_argument("--weights", help="comma-separated weights (modular)")
    group.add_argument(
        "--coverage-sets",
        help="comma-separated item masks in hex, one per element (coverage)",
    )
    group.add_argument("--table", help="CSV value table with header mask,value")
    group.add_argument(
        "--negate", action="store_true", help="negate the function pointwise"
    )
    group.add_argument(
        "--transform-by",
        help="conjugate by symmetric difference with this hex mask",
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=max(1, os.cpu_count() or 1),
        help="worker threads for certification sweeps",
    )


def _reject(args, flag_value, flag_name: str) -> None:
    if flag_value not in (None, False):
        raise UsageError(f"family '{args.family}' does not accept {flag_name}")


def _truth_mask(args, ground: GroundSet) -> int:
    if args.ground_truth is not None and args.ground_truth_elems is not None:
        raise UsageError("--ground-truth and --ground-truth-elems are exclusive")
    if args.ground_truth is not None:
        mask = parse_mask(args.ground_truth)
    elif args.ground_truth_elems is not None:
        try:
            elems = [int(tok) for tok in args.ground_truth_elems.split(",") if tok.strip() != ""]
        except ValueError as exc:
            raise UsageError(f"bad element list {args.ground_truth_elems!r}") from exc
        mask = mask_from_elements(elems)
    else:
        raise UsageError(f"family '{args.family}' requires --ground-truth")
    return ground.check_mask(mask)


def _family_from_args(args, ground: GroundSet) -> JaccardFamily:
    _reject(args, args.weights, "--weights")
    _reject(args, args.coverage_sets, "--coverage-sets")
    _reject(args, args.table, "--table")
    convention = Fraction(1 if args.empty_convention is None else args.empty_convention)
    return JaccardFamily(ground, _truth_mask(args, ground), convention)


def build_handle(args) -> SetFunctionHandle:
    """Construct the set function a subcommand operates on."""
    if args.n < 0:
        raise UsageError(f"--n must be nonnegative, got {args.n}")
    ground = GroundSet(args.n)
    family = args.family
    if family in JACCARD_FAMILIES:
        fam = _family_from_args(args, ground)
        handle = {
            "jaccard-direct": direct_handle,
            "jaccard-misprediction": misprediction_handle,
            "jaccard-loss": loss_handle,
        }[family](fam)
    else:
        _reject(args, args.ground_truth, "--ground-truth")
        _reject(args, args.ground_truth_elems, "--ground-truth-elems")
        _reject(args, args.empty_convention, "--empty-convention")
        if family == "modular":
            _reject(args, args.coverage_sets, "--coverage-sets")
            _reject(args, args.table, "--table")
            if args.weights is None:
                raise UsageError("family 'modular' requires --weights")
            weights = [_parse_value_token(tok) for tok in args.weights.split(",")]
            handle = modular_function(ground, weights)
        elif family == "coverage":
            _reject(args, args.weights, "--weights")
            _reject(args, args.table, "--table")
            if args.coverage_sets is None:
                raise UsageError("family 'coverage' requires --coverage-sets")
            covers = [parse_mask(tok.strip()) for tok in args.coverage_sets.split(",")]
            handle = coverage_function(ground, covers)
        else:  # table
            _reject(args, args.weights, "--weights")
            _reject(args, args.coverage_sets, "--coverage-sets")
            if args.table is None:
                raise UsageError("family 'table' requires --table")
            handle = tabulated_function(ground, _load_table(args.table, args.n))
    if args.transform_by is not None:
        handle = symdiff_transform(handle, ground.check_mask(parse_mask(args.transform_by)))
    if args.negate:
        handle = negate(handle)
    return handle


def _cmd_certify(args) -> int:
    handle = build_handle(args)
    methods = ["definitional", "local"] if args.method == "both" else [args.method]
    verdicts = []
    for method in methods:
        if method == "definitional":
            report = certify_mod.certify_definitional(handle, threads=args.threads)
        else:
            report = certify_mod.certify_local(handle, threads=args.threads)
        verdicts.append(report.verdict)
        _emit(report.to_dict())
    if args.expect is not None and any(v != args.expect for v in verdicts):
        print(
            f"expectation mismatch: wanted {args.expect}, got {', '.join(verdicts)}",
            file=sys.stderr,
        )
        return EXIT_EXPECT_MISMATCH
    return EXIT_OK


def _cmd_counterexample(args) -> int:
    handle = build_handle(args)
    if args.constructor == "search":
        if args.property is None:
            raise UsageError("--constructor search requires --property")
        witness = certify_mod.find_counterexample(handle, args.property)
        if witness is None:
            _emit("none")
            return EXIT_OK
    else:
        if args.family != "jaccard-direct":
            raise UsageError(
                f"--constructor {args.constructor} applies to the jaccard-direct family"
            )
        if args.negate or args.transform_by is not None:
            raise UsageError(
                f"--constructor {args.constructor} applies to the untransformed index"
            )
        fam = _family_from_args(args, handle.ground)
        if args.constructor == "paper-case-i":
            witness = certify_mod.not_supermodular_witness(fam)
        else:
            witness = certify_mod.not_submodular_witness(fam)
        if args.property is not None and args.property != witness.violated:
            raise UsageError(
                f"--constructor {args.constructor} produces {witness.violated} "
                f"violations, not {args.property}"
            )
    doc = witness.to_dict()
    doc["verified"] = witness.reverify(handle)
    _emit(doc)
    return EXIT_OK


def _cmd_tabulate(args) -> int:
    handle = build_handle(args)
    values = tabulate(handle)
    rows = [
        (format_mask(mask), mask.bit_count(), _value_str(value))
        for mask, value in enumerate(values)
    ]
    if args.format == "csv":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(["mask", "cardinality", "value"])
        writer.writerows(rows)
    else:
        _emit([
            {"mask": mask, "cardinality": card, "value": value}
            for mask, card, value in rows
        ])
    return EXIT_OK


def _cmd_lovasz(args) -> int:
    handle = build_handle(args)
    try:
        coords = [float(tok) for tok in args.point.split(",")] if args.point else []
    except ValueError as exc:
        raise UsageError(f"bad point {args.point!r}") from exc
    result = lovasz_mod.lovasz_extension(handle, coords)
    doc = {
        "value": result.value,
        "permutation": list(result.permutation),
        "subgradient": list(result.subgradient),
        "increments": [_value_str(v) for v in result.increments],
        "base_value": _value_str(result.base_value),
    }
    probes = {}
    if args.check_vertex:
        probes["vertex_agreement"] = {
            "ok": lovasz_mod.vertex_agreement_check(handle),
            "vertices": handle.ground.subset_count,
        }
    if args.check_convexity:
        probe = lovasz_mod.convexity_probe(handle, args.trials, args.seed)
        probes["convexity"] = {
            "trials": probe.trials,
            "seed": probe.seed,
            "violations": probe.violations,
            "worst_gap": probe.worst_gap,
            "tolerance": probe.tolerance,
        }
    if args.check_subgradient:
        probe = lovasz_mod.subgradient_probe(handle, coords, args.probes, args.seed)
        probes["subgradient"] = {
            "probes": probe.probes,
            "seed": probe.seed,
            "ok": probe.ok,
            "worst_slack": probe.worst_slack,
            "tolerance": probe.tolerance,
        }
    if probes:
        doc["probes"] = probes
    _emit(doc)
    return EXIT_OK


def _build_parser() -> _Parser:
    parser = _Parser(prog="submodcert", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_cert = sub.add_parser("certify", help="exhaustively certify a set function")
    _add_function_args(p_cert)
    p_cert.add_argument(
        "--method", choices=("definitional", "local", "both"), default="local"
    )
    p_cert.add_argument(
        "--expect",
        choices=("submodular", "supermodular", "modular", "neither"),
        help="exit 2 unless every report returns this verdict",
    )
    p_cert.set_defaults(func=_cmd_certify)

    p_ce = sub.add_parser("counterexample", help="find or construct a violation")
    _add_function_args(p_ce)
    p_ce.add_argument("--property", choices=("submodularity", "supermodularity"))
    p_ce.add_argument(
        "--constructor",
        choices=("search", "paper-case-i", "paper-case-ii"),
        default="search",
        help="search enumerates; the other two build the closed-form "
        "supermodularity / submodularity violations of the direct index",
    )
    p_ce.set_defaults(func=_cmd_counterexample)

    p_tab = sub.add_parser("tabulate", help="emit the full value table")
    _add_function_args(p_tab)
    p_tab.add_argument("--format", choices=("json", "csv"), default="json")
    p_tab.set_defaults(func=_cmd_tabulate)

    p_lov = sub.add_parser("lovasz", help="evaluate the extension at a point")
    _add_function_args(p_lov)
    p_lov.add_argument("--point", required=True, help="comma-separated coordinates in [0,1]")
    p_lov.add_argument("--check-vertex", action="store_true")
    p_lov.add_argument("--check-convexity", action="store_true")
    p_lov.add_argument("--check-subgradient", action="store_true")
    p_lov.add_argument("--trials", type=int, default=10000)
    p_lov.add_argument("--probes", type=int, default=1000)
    p_lov.add_argument("--seed", type=int, default=0)
    p_lov.set_defaults(func=_cmd_lovasz)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleConfigurationError as exc:
        print(f"infeasible configuration: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (PreconditionError, CapacityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
