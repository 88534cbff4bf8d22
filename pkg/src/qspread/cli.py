"""Command-line batch runner.

Every subcommand runs one or more named checks and emits one JSON object per
check, either to stdout or to ``--out``.  Exit status: 0 when every check
passes, 1 when any check fails or errors, 2 on usage errors.

The configuration file is a single JSON document; missing keys fall back to
documented defaults (see ``qspread config``).  The environment variable
``QSPREAD_CONFIG`` supplies a default path.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from .partitions import MobiusCache
from .qis import (
    build_block_rep,
    check_increasing_relations,
    classical_point_rep,
    enumerate_increasing,
    extend_to_permutation,
    quantum_extension,
    rep_from_json,
    two_projection_rep,
)
from .qperm import check_magic_unitary, permutation_rep, two_point_rep
from .linalg import projection_pair
from .reports import CheckReport, ResidualTracker, error_report
from .suites import (
    bvalued_checks,
    exchangeable_checks,
    merge_config,
    mobius_checks,
    nc_count_checks,
    psi_checks,
    reconstruction_checks,
    run_all,
    spreadable_checks,
)

CONFIG_ENV_VAR = "QSPREAD_CONFIG"


def load_config(path: str | None) -> dict:
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR)
    overrides = {}
    if path:
        with open(path, "r", encoding="utf-8") as handle:
            overrides = json.load(handle)
    return merge_config(overrides)


def parse_rep_spec(spec: str, tolerance: float | None):
    """Build a representation from 'permutation:2,1', 'projection:theta=0.8',
    'extended:theta=0.8', or a JSON file path."""
    if spec.startswith("permutation:"):
        values = tuple(int(v) for v in spec.split(":", 1)[1].split(","))
        return permutation_rep(values)
    if spec.startswith(("projection", "extended")):
        theta = 0.8
        if ":" in spec:
            body = spec.split(":", 1)[1]
            for part in body.split(","):
                key, _, value = part.partition("=")
                if key == "theta":
                    theta = float(value)
        if spec.startswith("projection"):
            return two_point_rep(projection_pair(theta)[1])
        return quantum_extension(two_projection_rep(theta))
    with open(spec, "r", encoding="utf-8") as handle:
        return rep_from_json(handle.read())


def emit(reports: list[CheckReport], out_path: str | None) -> int:
    lines = [report.to_json() for report in reports]
    if out_path:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write("\n".join(lines) + "\n")
    else:
        for line in lines:
            print(line)
    return 0 if all(r.passed for r in reports) else 1


def cmd_nc(args, config) -> list[CheckReport]:
    cache = MobiusCache()
    if args.sub == "enumerate":
        config = merge_config({**config, "nc": {**config["nc"], "m_max": args.m}})
        return nc_count_checks(config, cache)
    config = merge_config(
        {**config, "nc": {**config["nc"], "mobius_m_max": args.m,
                          "zeta_m_max": min(args.m, config["nc"]["zeta_m_max"]),
                          "column_m_max": max(args.m, config["nc"]["column_m_max"])}}
    )
    return mobius_checks(config, cache)


def cmd_qis_relations(args, config) -> list[CheckReport]:
    tol = config["tolerances"]["relations"]
    if args.rep == "projection":
        if (args.k, args.n) != (2, 4):
            return [error_report("increasing_relations", {"rep": "projection"},
                                 "the two-projection family has k=2, n=4")]
        report = check_increasing_relations(
            two_projection_rep(args.theta), tolerance=tol
        )
        report.params["theta"] = args.theta
        return [report]
    if args.rep == "classical":
        tracker = ResidualTracker(
            "increasing_relations_classical_points", 0,
            params={"k": args.k, "n": args.n},
        )
        for l in enumerate_increasing(args.k, args.n):
            inner = check_increasing_relations(classical_point_rep(l), tolerance=0)
            tracker.add(("point", list(l.values)),
                        0 if inner.max_residual == "exact-zero" else 1)
        return [tracker.report()]
    rep = build_block_rep(args.k, args.n, args.dim, args.seed)
    report = check_increasing_relations(rep, tolerance=tol, seed=args.seed)
    report.check_name = "increasing_relations_block_family"
    report.params.update({"k": args.k, "n": args.n, "dim": args.dim})
    return [report]


def cmd_qis_extend(args, config) -> list[CheckReport]:
    reports = []
    tracker = ResidualTracker(
        "extension_classical_points", 0, params={"k": args.k, "n": args.n},
    )
    for l in enumerate_increasing(args.k, args.n):
        extended = quantum_extension(classical_point_rep(l), tolerance=0)
        expected = permutation_rep(extend_to_permutation(l))
        worst = max(
            abs(extended.gens[key][0, 0] - expected.gens[key][0, 0])
            for key in expected.gens
        )
        tracker.add(("point", list(l.values)), worst)
    reports.append(tracker.report())
    if (args.k, args.n) == (2, 4):
        extended = quantum_extension(two_projection_rep(args.theta))
        report = check_magic_unitary(
            extended, tolerance=config["tolerances"]["magic"]
        )
        report.check_name = "extension_magic_unitary"
        report.params["theta"] = args.theta
        reports.append(report)
    return reports


def cmd_qperm_magic(args, config) -> list[CheckReport]:
    rep = parse_rep_spec(args.rep, None)
    tol = args.tolerance if args.tolerance is not None else config["tolerances"]["magic"]
    report = check_magic_unitary(rep, tolerance=tol)
    report.params["rep"] = args.rep
    return [report]


def cmd_inv(args, config) -> list[CheckReport]:
    cache = MobiusCache()
    if args.sub == "exchangeable":
        return exchangeable_checks(config, cache)
    return spreadable_checks(config, cache) + bvalued_checks(config, cache)


def cmd_wg(args, config) -> list[CheckReport]:
    cache = MobiusCache()
    if args.sub == "psi":
        config = merge_config(
            {**config, "psi": {"k_max": args.k, "n_max": args.n, "m_max": args.mmax}}
        )
        return psi_checks(config, cache)
    return reconstruction_checks(config, cache)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config path (or $QSPREAD_CONFIG)")
    common.add_argument("--out", help="write JSON-lines reports to this path")

    parser = argparse.ArgumentParser(
        prog="qspread",
        description="Exact and numerical checks for non-crossing partition "
        "calculus, free cumulants, and quantum symmetry representations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    nc = sub.add_parser("nc", help="non-crossing partition checks")
    nc_sub = nc.add_subparsers(dest="sub", required=True)
    nc_enum = nc_sub.add_parser("enumerate", parents=[common],
                                help="counts vs Catalan recurrence")
    nc_enum.add_argument("--m", type=int, required=True)
    nc_mob = nc_sub.add_parser("mobius", parents=[common],
                               help="Mobius function identities")
    nc_mob.add_argument("--m", type=int, required=True)

    qis = sub.add_parser("qis", help="quantum increasing sequence checks")
    qis_sub = qis.add_subparsers(dest="sub", required=True)
    qis_rel = qis_sub.add_parser("relations", parents=[common],
                                 help="defining-relation residuals")
    qis_rel.add_argument("--k", type=int, required=True)
    qis_rel.add_argument("--n", type=int, required=True)
    qis_rel.add_argument("--rep", choices=["projection", "classical", "block"],
                         required=True)
    qis_rel.add_argument("--theta", type=float, default=0.8)
    qis_rel.add_argument("--dim", type=int, default=4)
    qis_rel.add_argument("--seed", type=int, default=0)
    qis_ext = qis_sub.add_parser("extend", parents=[common],
                                 help="extension to permutations")
    qis_ext.add_argument("--k", type=int, required=True)
    qis_ext.add_argument("--n", type=int, required=True)
    qis_ext.add_argument("--theta", type=float, default=0.8)

    qperm = sub.add_parser("qperm", help="magic unitary checks")
    qperm_sub = qperm.add_subparsers(dest="sub", required=True)
    qperm_magic = qperm_sub.add_parser("magic", parents=[common])
    qperm_magic.add_argument("--rep", required=True,
                             help="permutation:2,1 | projection:theta=0.8 | "
                                  "extended:theta=0.8 | path.json")
    qperm_magic.add_argument("--tolerance", type=float)

    inv = sub.add_parser("inv", help="distributional invariance checks")
    inv_sub = inv.add_subparsers(dest="sub", required=True)
    inv_sub.add_parser("exchangeable", parents=[common])
    inv_sub.add_parser("spreadable", parents=[common])

    wg = sub.add_parser("wg", help="state moments and reconstruction")
    wg_sub = wg.add_subparsers(dest="sub", required=True)
    wg_psi = wg_sub.add_parser("psi", parents=[common],
                               help="closed form vs freeness oracle")
    wg_psi.add_argument("--k", type=int, default=3)
    wg_psi.add_argument("--n", type=int, default=3)
    wg_psi.add_argument("--mmax", type=int, default=4)
    wg_sub.add_parser("reconstruct", parents=[common])

    suite = sub.add_parser("suite", help="run whole check batteries")
    suite_sub = suite.add_subparsers(dest="sub", required=True)
    suite_sub.add_parser("all", parents=[common])

    sub.add_parser("config", parents=[common],
                   help="print the effective configuration")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = load_config(args.config)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot load config: {exc}", file=sys.stderr)
        return 2

    if args.command == "config":
        print(json.dumps(config, indent=2, sort_keys=True))
        return 0

    try:
        if args.command == "nc":
            reports = cmd_nc(args, config)
        elif args.command == "qis":
            reports = (cmd_qis_relations if args.sub == "relations" else cmd_qis_extend)(
                args, config
            )
        elif args.command == "qperm":
            reports = cmd_qperm_magic(args, config)
        elif args.command == "inv":
            reports = cmd_inv(args, config)
        elif args.command == "wg":
            reports = cmd_wg(args, config)
        elif args.command == "suite":
            reports = run_all(config)
        else:  # pragma: no cover - argparse enforces choices
            return 2
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return emit(reports, args.out)


if __name__ == "__main__":
    raise SystemExit(main())
