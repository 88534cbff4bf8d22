"""Config-driven check batteries behind the command-line runner.

Every function returns a list of CheckReports whose params are sufficient to
re-run that check in isolation.  All randomness is derived from the config
seed with fixed offsets, so identical configs give identical report streams
(up to the runtime fields).
"""
from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from .invariance import (
    check_bvalued_spreadable,
    check_exchangeable,
    check_kernel_sums,
    check_spreadable,
    random_insert_words,
    spot_words,
    suite_words,
)
from .linalg import projection_pair
from .moments import (
    FreeSequence,
    IndependentSequence,
    ScalarLaw,
    Word,
    free_iid_moment,
    moment_cumulant_roundtrip,
    random_matrix_law,
    random_rational_matrix_law,
    semicircular_law,
)
from .partitions import (
    MobiusCache,
    Partition,
    catalan,
    kernel,
    leq,
    mobius_column_oracle,
    zeta_inverse_table,
)
from .qis import (
    build_block_rep,
    check_increasing_relations,
    classical_point_rep,
    enumerate_increasing,
    extend_to_permutation,
    quantum_extension,
    two_projection_rep,
)
from .qperm import check_magic_unitary, permutation_rep, two_point_rep
from .reports import CheckReport, ResidualTracker, error_report
from .weingarten import (
    combinatorial_unit_identity,
    finite_n_reconstruction,
    oracle_equivalence_sweep,
    state_positivity_evidence,
)

DEFAULT_CONFIG: dict = {
    "seed": 20260810,
    "tolerances": {
        "relations": 1e-12,
        "magic": 1e-10,
        "kernel_sums": 1e-10,
        "exchangeable": 1e-9,
        "spreadable": 1e-9,
        "bvalued": 1e-8,
        "roundtrip": 1e-9,
        "positivity": 1e-10,
    },
    "law": {"kind": "semicircular"},
    "nc": {"m_max": 10, "mobius_m_max": 6, "zeta_m_max": 5, "column_m_max": 7},
    "roundtrip": {"scalar_m_max": 5, "matrix_m_max": 4},
    "relations": {"theta_count": 20, "classical_n_max": 6, "block": {"k": 2, "n": 2, "dim": 2}},
    "extension": {"theta_count": 20, "classical_n_max": 6},
    "kernel_sums": {"n_max": 4, "m_max": 4, "quantum_m_max": 3},
    "exchangeable": {"theta": 0.8, "max_word_len": 4, "include_extended": True,
                     "extended_word_len": 2, "spot_length": 5},
    "spreadable": {"theta": 0.9, "max_word_len": 4, "block": {"k": 2, "n": 2, "dim": 2}},
    "bvalued": {"d": 2, "D": 2, "max_word_len": 3, "theta": 0.35},
    "psi": {"k_max": 3, "n_max": 3, "m_max": 4},
    "reconstruction": {"m_max": 3, "n_max": 3, "unit_m_max": 4, "unit_n_max": 4},
    "positivity": {"k": 2, "n": 2, "max_len": 2},
}


def merge_config(overrides: dict | None) -> dict:
    def deep(base, over):
        out = dict(base)
        for key, value in (over or {}).items():
            if isinstance(value, dict) and isinstance(base.get(key), dict):
                out[key] = deep(base[key], value)
            else:
                out[key] = value
        return out

    return deep(DEFAULT_CONFIG, overrides or {})


def _parse_scalar(value):
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, int):
        return Fraction(value)
    return value


def build_law(spec: dict, seed: int):
    kind = spec.get("kind", "semicircular")
    if kind == "semicircular":
        return semicircular_law()
    if kind == "scalar_moments":
        return ScalarLaw([_parse_scalar(v) for v in spec["moments"]])
    if kind == "matrix":
        return random_matrix_law(spec.get("d", 2), spec.get("D", 2), seed)
    if kind == "rational_matrix":
        return random_rational_matrix_law(spec.get("d", 2), spec.get("D", 2), seed)
    raise ValueError(f"unknown law kind {kind!r}")


def build_sequence(spec: dict, seed: int, cache: MobiusCache):
    if spec.get("kind") == "independent":
        lists = {
            int(idx): [_parse_scalar(v) for v in ms]
            for idx, ms in spec["moments"].items()
        }
        return IndependentSequence(lists)
    return FreeSequence(build_law(spec, seed), cache)


def catalan_by_recurrence(m: int) -> int:
    table = [1]
    for size in range(1, m + 1):
        table.append(sum(table[i] * table[size - 1 - i] for i in range(size)))
    return table[m]


def nc_count_checks(config: dict, cache: MobiusCache) -> list[CheckReport]:
    m_max = config["nc"]["m_max"]
    tracker = ResidualTracker("nc_counts", 0, params={"m_max": m_max}, seed=config["seed"])
    counts = {}
    for m in range(0, m_max + 1):
        got = len(cache.nc(m))
        expected = catalan_by_recurrence(m)
        counts[str(m)] = got
        tracker.add(("count", m), abs(got - expected))
        tracker.add(("closed-form", m), abs(got - catalan(m)))
    return [tracker.report(extra_params={"counts": counts})]


def mobius_checks(config: dict, cache: MobiusCache) -> list[CheckReport]:
    cfg = config["nc"]
    seed = config["seed"]
    reports = []

    tracker = ResidualTracker(
        "mobius_identity", 0, params={"m_max": cfg["mobius_m_max"]}, seed=seed
    )
    for m in range(0, cfg["mobius_m_max"] + 1):
        for p in cache.nc(m):
            below_p = cache.below(p)
            for s in below_p:
                total = sum(cache.mobius(s, rho) for rho in below_p if leq(s, rho))
                expected = 1 if s == p else 0
                tracker.add(("pair", m, repr(s), repr(p)), abs(total - expected))
    reports.append(tracker.report())

    tracker = ResidualTracker(
        "mobius_zeta_table", 0, params={"m_max": cfg["zeta_m_max"]}, seed=seed
    )
    for m in range(1, cfg["zeta_m_max"] + 1):
        for (s, p), value in zeta_inverse_table(m, cache).items():
            tracker.add(("entry", m, repr(s), repr(p)), abs(value - cache.mobius(s, p)))
    reports.append(tracker.report())

    tracker = ResidualTracker(
        "mobius_column_oracle", 0, params={"m_max": cfg["column_m_max"]}, seed=seed
    )
    for m in range(1, cfg["column_m_max"] + 1):
        column = mobius_column_oracle(m, cache)
        bottom, top = Partition.singletons(m), Partition.full(m)
        value = cache.mobius(bottom, top)
        tracker.add(("full-interval", m), abs(column[bottom] - value))
        tracker.add(
            ("catalan-sign", m), abs(value - (-1) ** (m - 1) * catalan(m - 1))
        )
    reports.append(tracker.report())
    return reports


def roundtrip_checks(config: dict, cache: MobiusCache) -> list[CheckReport]:
    cfg = config["roundtrip"]
    tol = config["tolerances"]["roundtrip"]
    seed = config["seed"]
    reports = []

    tracker = ResidualTracker(
        "moment_cumulant_roundtrip_scalar", 0,
        params={"m_max": cfg["scalar_m_max"]}, seed=seed,
    )
    rng = np.random.default_rng(seed + 1)
    for m in range(1, cfg["scalar_m_max"] + 1):
        moments = [Fraction(1)] + [
            Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 4)))
            for _ in range(2 * m + 2)
        ]
        ok = moment_cumulant_roundtrip(ScalarLaw(moments), m, seed=seed + m, cache=cache)
        tracker.add(("scalar", m), 0 if ok else 1)
    reports.append(tracker.report())

    tracker = ResidualTracker(
        "moment_cumulant_roundtrip_matrix", tol,
        params={"m_max": cfg["matrix_m_max"], "d": 2, "D": 2}, seed=seed,
    )
    for m in range(1, cfg["matrix_m_max"] + 1):
        law = random_matrix_law(2, 2, seed + 10 + m)
        ok = moment_cumulant_roundtrip(law, m, seed=seed + m, tolerance=tol, cache=cache)
        tracker.add(("matrix", m), 0 if ok else 1)
    reports.append(tracker.report())
    return reports


def _angles(count: int, seed: int) -> list[float]:
    rng = np.random.default_rng(seed)
    return [float(t) for t in rng.uniform(0.05, np.pi / 2 - 0.05, size=count)]


def relations_checks(config: dict, cache: MobiusCache) -> list[CheckReport]:
    cfg = config["relations"]
    tol = config["tolerances"]["relations"]
    seed = config["seed"]
    reports = []

    tracker = ResidualTracker(
        "increasing_relations_projection_family", tol,
        params={"k": 2, "n": 4, "theta_count": cfg["theta_count"]}, seed=seed,
    )
    for theta in _angles(cfg["theta_count"], seed + 2):
        report = check_increasing_relations(two_projection_rep(theta), tolerance=tol)
        tracker.add(("theta", theta), float(report.max_residual)
                    if report.max_residual != "exact-zero" else 0)
    reports.append(tracker.report())

    tracker = ResidualTracker(
        "increasing_relations_classical_points", 0,
        params={"n_max": cfg["classical_n_max"]}, seed=seed,
    )
    for n in range(1, cfg["classical_n_max"] + 1):
        for k in range(1, n + 1):
            for l in enumerate_increasing(k, n):
                report = check_increasing_relations(classical_point_rep(l), tolerance=0)
                tracker.add(("point", k, n, list(l.values)),
                            0 if report.max_residual == "exact-zero" else 1)
    reports.append(tracker.report())

    block = cfg["block"]
    rep = build_block_rep(block["k"], block["n"], block["dim"], seed + 3)
    report = check_increasing_relations(rep, tolerance=tol, seed=seed + 3)
    report.check_name = "increasing_relations_block_family"
    report.params.update(block)
    reports.append(report)
    return reports


def extension_checks(config: dict, cache: MobiusCache) -> list[CheckReport]:
    cfg = config["extension"]
    magic_tol = config["tolerances"]["magic"]
    seed = config["seed"]
    reports = []

    tracker = ResidualTracker(
        "extension_classical_points", 0,
        params={"n_max": cfg["classical_n_max"]}, seed=seed,
    )
    for n in range(1, cfg["classical_n_max"] + 1):
        for k in range(1, n + 1):
            for l in enumerate_increasing(k, n):
                extended = quantum_extension(classical_point_rep(l), tolerance=0)
                expected = permutation_rep(extend_to_permutation(l))
                worst = max(
                    abs(extended.gens[key][0, 0] - expected.gens[key][0, 0])
                    for key in expected.gens
                )
                tracker.add(("point", k, n, list(l.values)), worst)
    reports.append(tracker.report())

    tracker = ResidualTracker(
        "extension_magic_unitary", magic_tol,
        params={"k": 2, "n": 4, "theta_count": cfg["theta_count"]}, seed=seed,
    )
    for theta in _angles(cfg["theta_count"], seed + 4):
        extended = quantum_extension(two_projection_rep(theta))
        report = check_magic_unitary(extended, tolerance=magic_tol)
        tracker.add(("theta", theta), float(report.max_residual)
                    if report.max_residual != "exact-zero" else 0)
    reports.append(tracker.report())
    return reports


def kernel_sum_checks(config: dict, cache: MobiusCache) -> list[CheckReport]:
    cfg = config["kernel_sums"]
    tol = config["tolerances"]["kernel_sums"]
    seed = config["seed"]
    reports = []

    tracker = ResidualTracker(
        "kernel_sums_permutation_reps", 0,
        params={"n_max": cfg["n_max"], "m_max": cfg["m_max"]}, seed=seed,
    )
    for n in range(1, cfg["n_max"] + 1):
        for perm in itertools.permutations(range(1, n + 1)):
            report = check_kernel_sums(
                permutation_rep(perm), cfg["m_max"], tolerance=0, cache=cache
            )
            tracker.add(("perm", list(perm)),
                        0 if report.max_residual == "exact-zero" else float(report.max_residual))
    reports.append(tracker.report())

    extended = quantum_extension(two_projection_rep(0.6))
    report = check_kernel_sums(
        extended, cfg["quantum_m_max"], tolerance=tol, cache=cache, seed=seed
    )
    report.check_name = "kernel_sums_extended_rep"
    reports.append(report)
    return reports


def _broken_sequence(n: int) -> IndependentSequence:
    """Independent but deliberately non-identically-distributed scalars."""
    return IndependentSequence(
        {i: [1, i, 2 * i**2, 4 * i**3, 8 * i**4, 16 * i**5] for i in range(1, n + 1)}
    )


def _negative_control(name: str, inner: CheckReport, seed: int) -> CheckReport:
    """A meta-check that passes exactly when the inner check failed with a
    witness: the checker must be able to reject a broken law."""
    detected = (not inner.passed) and inner.witness is not None
    return CheckReport(
        check_name=name,
        params={
            "expectation": "inner check must fail on the broken law",
            "inner_check": inner.check_name,
            "inner_residual": inner.max_residual
            if isinstance(inner.max_residual, str) else float(inner.max_residual),
            "inner_witness": inner.witness,
            "tolerance": 0.0,
        },
        status="pass" if detected else "fail",
        max_residual=0.0 if detected else 1.0,
        witness=None if detected else ["negative control not detected"],
        seed=seed,
    )


def exchangeable_checks(config: dict, cache: MobiusCache) -> list[CheckReport]:
    cfg = config["exchangeable"]
    tol = config["tolerances"]["exchangeable"]
    seed = config["seed"]
    seq = build_sequence(config["law"], seed + 5, cache)
    reports = []

    scalar_law = seq.law if isinstance(seq, FreeSequence) else semicircular_law()
    words2 = suite_words(scalar_law, max_targets=2, max_len=cfg["max_word_len"])
    if cfg.get("spot_length", 5) > cfg["max_word_len"]:
        words2 += spot_words(scalar_law, 2, cfg.get("spot_length", 5), seed + 17)
    rep = two_point_rep(projection_pair(cfg["theta"])[1])
    report = check_exchangeable(seq, rep, words2, tolerance=tol, seed=seed)
    report.check_name = "exchangeable_projection_rep"
    report.params["theta"] = cfg["theta"]
    report.params["law"] = config["law"].get("kind", "semicircular")
    reports.append(report)

    tracker = ResidualTracker(
        "exchangeable_permutation_reps", 0,
        params={"n": 3, "max_word_len": min(cfg["max_word_len"], 3),
                "law": config["law"].get("kind", "semicircular")},
        seed=seed,
    )
    words3 = suite_words(scalar_law, max_targets=3, max_len=min(cfg["max_word_len"], 3))
    for perm in itertools.permutations((1, 2, 3)):
        rep_p = permutation_rep(perm)
        inner = check_exchangeable(seq, rep_p, words3, tolerance=max(tol, 0), seed=seed)
        tracker.add(("perm", list(perm)),
                    0 if inner.max_residual == "exact-zero" else float(inner.max_residual))
    reports.append(tracker.report())

    if cfg.get("include_extended", True):
        extended = quantum_extension(two_projection_rep(cfg["theta"]))
        words4 = suite_words(scalar_law, max_targets=4, max_len=cfg["extended_word_len"])
        report = check_exchangeable(seq, extended, words4, tolerance=tol, seed=seed)
        report.check_name = "exchangeable_extended_rep"
        report.params["theta"] = cfg["theta"]
        reports.append(report)

    inner = check_exchangeable(
        _broken_sequence(2), rep,
        suite_words(semicircular_law(), 2, 2), tolerance=tol, seed=seed,
    )
    reports.append(_negative_control("exchangeable_negative_control", inner, seed))
    return reports


def spreadable_checks(config: dict, cache: MobiusCache) -> list[CheckReport]:
    cfg = config["spreadable"]
    tol = config["tolerances"]["spreadable"]
    seed = config["seed"]
    seq = build_sequence(config["law"], seed + 6, cache)
    scalar_law = seq.law if isinstance(seq, FreeSequence) else semicircular_law()
    reports = []

    words = suite_words(scalar_law, max_targets=2, max_len=cfg["max_word_len"])
    report = check_spreadable(
        seq, two_projection_rep(cfg["theta"]), words, tolerance=tol, seed=seed
    )
    report.check_name = "spreadable_projection_family"
    report.params["theta"] = cfg["theta"]
    reports.append(report)

    block = cfg["block"]
    rep = build_block_rep(block["k"], block["n"], block["dim"], seed + 7)
    words_k = suite_words(scalar_law, max_targets=block["k"],
                          max_len=min(cfg["max_word_len"], 3))
    report = check_spreadable(seq, rep, words_k, tolerance=tol, seed=seed + 7)
    report.check_name = "spreadable_block_family"
    report.params.update(block)
    reports.append(report)

    pulled = quantum_extension(two_projection_rep(cfg["theta"]))
    report = check_exchangeable(
        seq, pulled, suite_words(scalar_law, 2, min(cfg["max_word_len"], 3)),
        tolerance=tol, seed=seed,
    )
    report.check_name = "spreadable_via_extension_pullback"
    report.params["theta"] = cfg["theta"]
    reports.append(report)

    inner = check_spreadable(
        _broken_sequence(4), two_projection_rep(cfg["theta"]),
        suite_words(semicircular_law(), 2, 2), tolerance=tol, seed=seed,
    )
    reports.append(_negative_control("spreadable_negative_control", inner, seed))
    return reports


def bvalued_checks(config: dict, cache: MobiusCache) -> list[CheckReport]:
    cfg = config["bvalued"]
    tol = config["tolerances"]["bvalued"]
    seed = config["seed"]
    law = random_matrix_law(cfg["d"], cfg["D"], seed + 8)
    seq = FreeSequence(law, cache)
    words = random_insert_words(law, max_targets=2, max_len=cfg["max_word_len"],
                                seed=seed + 9)
    words += [Word.plain(law, (1,) * m) for m in range(1, cfg["max_word_len"] + 1)]
    report = check_bvalued_spreadable(
        seq, two_projection_rep(cfg["theta"]), words, tolerance=tol, seed=seed
    )
    report.check_name = "bvalued_spreadable_matrix_law"
    report.params.update({"d": cfg["d"], "D": cfg["D"]})
    return [report]


def psi_checks(config: dict, cache: MobiusCache) -> list[CheckReport]:
    cfg = config["psi"]
    pos = config["positivity"]
    reports = [
        oracle_equivalence_sweep(cfg["k_max"], cfg["n_max"], cfg["m_max"], cache,
                                 seed=config["seed"]),
        state_positivity_evidence(pos["k"], pos["n"], pos["max_len"],
                                  tolerance=config["tolerances"]["positivity"],
                                  cache=cache, seed=config["seed"]),
    ]
    return reports


def _kernel_pattern_tuples(m: int) -> list[tuple[int, ...]]:
    """One canonical target tuple per set-partition kernel of {1..m}."""
    patterns = []
    seen = set()
    for tup in itertools.product(range(1, m + 1), repeat=m):
        normalized = []
        order = {}
        for v in tup:
            order.setdefault(v, len(order) + 1)
            normalized.append(order[v])
        normalized = tuple(normalized)
        if normalized not in seen:
            seen.add(normalized)
            patterns.append(normalized)
    return patterns


def reconstruction_checks(config: dict, cache: MobiusCache) -> list[CheckReport]:
    cfg = config["reconstruction"]
    seed = config["seed"]
    reports = []

    tracker = ResidualTracker(
        "combinatorial_unit_identity", 0,
        params={"m_max": cfg["unit_m_max"], "n_max": cfg["unit_n_max"]}, seed=seed,
    )
    for m in range(1, cfg["unit_m_max"] + 1):
        for cols in _kernel_pattern_tuples(m):
            ker_cols = kernel(cols)
            for tau in cache.nc(m):
                if not leq(tau, ker_cols):
                    continue
                for n in range(1, cfg["unit_n_max"] + 1):
                    value = combinatorial_unit_identity(tau, cols, n, cache)
                    tracker.add(
                        ("unit", [list(b) for b in tau.blocks], list(cols), n),
                        abs(value - 1),
                    )
    reports.append(tracker.report())

    for label, law in (
        ("scalar", semicircular_law()),
        ("matrix", random_rational_matrix_law(2, 2, seed + 10)),
    ):
        tracker = ResidualTracker(
            f"finite_reconstruction_{label}", 0,
            params={"m_max": cfg["m_max"], "n_max": cfg["n_max"], "law": label},
            seed=seed,
        )
        for m in range(1, cfg["m_max"] + 1):
            for cols in _kernel_pattern_tuples(m):
                word = Word.plain(law, cols)
                direct = free_iid_moment(law, word, cache)
                for n in range(1, cfg["n_max"] + 1):
                    got = finite_n_reconstruction(law, word, n, cache)
                    gap = got - direct
                    if isinstance(gap, np.ndarray):
                        residual = max((abs(x) for x in gap.flat), default=Fraction(0))
                    else:
                        residual = abs(gap)
                    tracker.add(("reconstruction", list(cols), n), residual)
        reports.append(tracker.report())
    return reports


SUITE_SECTIONS = (
    ("nc", nc_count_checks),
    ("mobius", mobius_checks),
    ("roundtrip", roundtrip_checks),
    ("relations", relations_checks),
    ("extension", extension_checks),
    ("kernel_sums", kernel_sum_checks),
    ("exchangeable", exchangeable_checks),
    ("spreadable", spreadable_checks),
    ("bvalued", bvalued_checks),
    ("psi", psi_checks),
    ("reconstruction", reconstruction_checks),
)


def run_section(name: str, config: dict, cache: MobiusCache | None = None) -> list[CheckReport]:
    cache = cache or MobiusCache()
    for section, runner in SUITE_SECTIONS:
        if section == name:
            try:
                return runner(config, cache)
            except Exception as exc:  # surface as a structured report
                return [error_report(f"{name}_suite", {"section": name}, str(exc),
                                     seed=config.get("seed"))]
    raise ValueError(f"unknown suite section {name!r}")


def run_all(config: dict) -> list[CheckReport]:
    import json as _json

    cache = MobiusCache()
    reports: list[CheckReport] = []
    for section, _ in SUITE_SECTIONS:
        reports.extend(run_section(section, config, cache))
    # runtime_ms must stay out of the ordering key so identical configs give
    # identically ordered streams
    return sorted(
        reports,
        key=lambda r: (r.check_name, _json.dumps(r.params, sort_keys=True, default=str)),
    )
