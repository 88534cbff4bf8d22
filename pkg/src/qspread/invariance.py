"""Executable invariance conditions for sequences of noncommutative variables.

A sequence model supplies joint moments; a representation supplies a concrete
family of projections.  Exchangeability (square families) and spreadability
(rectangular families) are both instances of one equation: for every word
with target labels j_1..j_m,

    sum over i in [n]^m of  phi(moment at i) * u_{i_1 j_1} ... u_{i_m j_m}
        =  phi(moment at j) * identity.

The checks compute both sides and report the worst residual over a word
suite.  Their workhorse, and the content of the induction behind the
free-implies-invariant direction, is the kernel-constrained generator sum,
which must collapse to 0 or 1.
"""
from __future__ import annotations

import itertools

import numpy as np

from .linalg import residual_norm
from .moments import Word
from .partitions import MobiusCache, Partition, default_cache, kernel, leq
from .qis import Representation, check_increasing_relations
from .qperm import check_magic_unitary
from .reports import CheckReport, ResidualTracker

DEFAULT_INVARIANCE_TOLERANCE = 1e-9


def _require_valid(rep: Representation, tolerance: float) -> None:
    if rep.kind == "permutation":
        report = check_magic_unitary(rep, tolerance=max(tolerance, rep.tolerance))
    else:
        report = check_increasing_relations(rep, tolerance=max(tolerance, rep.tolerance))
    if not report.passed:
        raise ValueError(
            f"representation fails its defining relations: residual {report.max_residual}"
        )


def _generator_product(rep: Representation, rows, cols) -> np.ndarray:
    out = rep.gen(rows[0], cols[0])
    for i, j in zip(rows[1:], cols[1:]):
        out = out @ rep.gen(i, j)
    return out


def kernel_constrained_sum(
    rep: Representation, part: Partition, targets: tuple[int, ...]
) -> np.ndarray:
    """Sum of u_{i_1 j_1} ... u_{i_m j_m} over tuples i whose kernel refines
    through ``part`` (positions in one block take equal values).

    Contract: the result is the identity when part <= ker(targets) and zero
    otherwise.  Tuples are enumerated blockwise, one free value per block.
    """
    m = part.m
    if len(targets) != m:
        raise ValueError("partition size and target length differ")
    total = rep.zero()
    blocks = part.blocks
    mask = rep.nonzero_mask()
    for assignment in itertools.product(range(1, rep.n + 1), repeat=len(blocks)):
        rows = [0] * m
        for value, block in zip(assignment, blocks):
            for pos in block:
                rows[pos - 1] = value
        if mask is not None and not all(
            mask[(rows[r], targets[r])] for r in range(m)
        ):
            continue  # a factor is identically zero, so is the product
        total = total + _generator_product(rep, rows, targets)
    return total


def check_kernel_sums(
    rep: Representation,
    max_len: int,
    tolerance: float = DEFAULT_INVARIANCE_TOLERANCE,
    cache: MobiusCache | None = None,
    seed: int | None = None,
) -> CheckReport:
    """Sweep the kernel-constrained sums over all non-crossing partitions and
    all target tuples of length up to ``max_len``."""
    _require_valid(rep, tolerance)
    cache = cache or default_cache()
    cols = rep.k
    tracker = ResidualTracker(
        "kernel_constrained_sums",
        tolerance,
        params={"kind": rep.kind, "k": rep.k, "n": rep.n, "max_len": max_len},
        seed=seed if seed is not None else rep.seed,
    )
    one = rep.unit()
    for m in range(1, max_len + 1):
        for part in cache.nc(m):
            for targets in itertools.product(range(1, cols + 1), repeat=m):
                value = kernel_constrained_sum(rep, part, targets)
                expected = one if leq(part, kernel(targets)) else rep.zero()
                tracker.add(
                    ("kernel-sum", [list(b) for b in part.blocks], list(targets)),
                    residual_norm(value - expected),
                )
    return tracker.report()


def _phi_values(seq, word: Word, n: int):
    """phi(moment) for every index tuple in [n]^m, memoized appropriately."""
    m = word.length
    memo: dict = {}
    values: dict[tuple[int, ...], object] = {}
    for tup in itertools.product(range(1, n + 1), repeat=m):
        key = kernel(tup) if getattr(seq, "kernel_invariant", False) else tup
        if key not in memo:
            memo[key] = seq.phi_moment(word.with_indices(tup))
        values[tup] = memo[key]
    return values


def _invariance_residuals(seq, rep: Representation, words, tracker: ResidualTracker):
    one = rep.unit()
    mask = rep.nonzero_mask()
    for word in words:
        targets = word.indices
        if max(targets) > rep.k:
            raise ValueError(
                f"word targets {targets} exceed the {rep.k} columns of the family"
            )
        phi = _phi_values(seq, word, rep.n)
        lhs = rep.zero()
        for tup, coefficient in phi.items():
            if mask is not None and not all(
                mask[(i, j)] for i, j in zip(tup, targets)
            ):
                continue
            lhs = lhs + coefficient * _generator_product(rep, tup, targets)
        rhs = seq.phi_moment(word) * one
        tracker.add(
            ("word", list(word.indices), list(word.powers)),
            residual_norm(lhs - rhs),
        )


def check_exchangeable(
    seq,
    rep: Representation,
    words,
    tolerance: float = DEFAULT_INVARIANCE_TOLERANCE,
    seed: int | None = None,
) -> CheckReport:
    """Invariance of the scalar joint distribution under a square family."""
    if rep.kind != "permutation":
        raise ValueError("exchangeability needs a permutation-kind representation")
    _require_valid(rep, tolerance)
    words = list(words)
    tracker = ResidualTracker(
        "quantum_exchangeable",
        tolerance,
        params={"n": rep.n, "dim": rep.dim, "words": len(words)},
        seed=seed if seed is not None else rep.seed,
    )
    _invariance_residuals(seq, rep, words, tracker)
    return tracker.report()


def check_spreadable(
    seq,
    rep: Representation,
    words,
    tolerance: float = DEFAULT_INVARIANCE_TOLERANCE,
    seed: int | None = None,
) -> CheckReport:
    """Invariance under a rectangular family, plus its classical shadow.

    The classical part substitutes every increasing relabeling of the targets
    and demands equal moments; for kernel-invariant models this holds
    identically, so any nonzero residual there is a real failure.
    """
    from .qis import enumerate_increasing

    if rep.kind != "increasing":
        raise ValueError("spreadability needs an increasing-kind representation")
    _require_valid(rep, tolerance)
    words = list(words)
    tracker = ResidualTracker(
        "quantum_spreadable",
        tolerance,
        params={"k": rep.k, "n": rep.n, "dim": rep.dim, "words": len(words)},
        seed=seed if seed is not None else rep.seed,
    )
    _invariance_residuals(seq, rep, words, tracker)
    for l in enumerate_increasing(rep.k, rep.n):
        for word in words:
            relabeled = word.with_indices(tuple(l.values[j - 1] for j in word.indices))
            gap = seq.phi_moment(relabeled) - seq.phi_moment(word)
            tracker.add(
                ("classical-point", list(l.values), list(word.indices)), abs(gap)
            )
    return tracker.report()


def _max_abs_entry(a: np.ndarray):
    return max((abs(x) for x in a.flat), default=0)


def check_bvalued_spreadable(
    seq,
    rep: Representation,
    words,
    tolerance: float = 1e-8,
    seed: int | None = None,
) -> CheckReport:
    """Operator-valued spreadability: both sides live in B tensor M_dim and
    carry the word's inserts inside the expectations."""
    if rep.kind != "increasing":
        raise ValueError("spreadability needs an increasing-kind representation")
    _require_valid(rep, tolerance)
    words = list(words)
    tracker = ResidualTracker(
        "bvalued_spreadable",
        tolerance,
        params={"k": rep.k, "n": rep.n, "dim": rep.dim, "words": len(words)},
        seed=seed if seed is not None else rep.seed,
    )
    one = rep.unit()
    for word in words:
        targets = word.indices
        if max(targets) > rep.k:
            raise ValueError(f"word targets {targets} exceed {rep.k} columns")
        m = word.length
        memo: dict = {}
        lhs = None
        for tup in itertools.product(range(1, rep.n + 1), repeat=m):
            key = kernel(tup) if getattr(seq, "kernel_invariant", False) else tup
            if key not in memo:
                memo[key] = seq.moment(word.with_indices(tup))
            term = np.kron(memo[key], _generator_product(rep, tup, targets))
            lhs = term if lhs is None else lhs + term
        rhs = np.kron(seq.moment(word), one)
        tracker.add(
            ("word", list(word.indices), list(word.powers)),
            _max_abs_entry(lhs - rhs),
        )
    return tracker.report()


def suite_words(law, max_targets: int, max_len: int, with_powers: bool = True):
    """All plain words with indices in [1..max_targets] up to length max_len,
    plus a leading-square power variant of each length.

    Words of equal length share one insert tuple, so sequence models that
    memoize by (kernel, powers, inserts) reuse values across the suite.
    """
    words = []
    for m in range(1, max_len + 1):
        inserts = tuple(law.unit() for _ in range(m + 1))
        for idx in itertools.product(range(1, max_targets + 1), repeat=m):
            words.append(Word(idx, inserts, (1,) * m))
        if with_powers:
            for idx in itertools.product(range(1, max_targets + 1), repeat=m):
                words.append(Word(idx, inserts, (2,) + (1,) * (m - 1)))
    return words


def spot_words(law, max_targets: int, length: int, seed: int, count: int = 6):
    """Seeded random plain words of one fixed length, for float spot checks
    beyond the exhaustive suite range."""
    rng = np.random.default_rng(seed)
    inserts = tuple(law.unit() for _ in range(length + 1))
    words = []
    for _ in range(count):
        idx = tuple(int(v) for v in rng.integers(1, max_targets + 1, size=length))
        words.append(Word(idx, inserts, (1,) * length))
    return words


def random_insert_words(law, max_targets: int, max_len: int, seed: int, per_length: int = 4):
    """Seeded words with random B-element inserts, for the operator-valued
    checks."""
    rng = np.random.default_rng(seed)
    words = []
    for m in range(1, max_len + 1):
        tuples = list(itertools.product(range(1, max_targets + 1), repeat=m))
        for _ in range(min(per_length, len(tuples))):
            idx = tuples[int(rng.integers(len(tuples)))]
            inserts = tuple(law.random_element(rng) for _ in range(m + 1))
            words.append(Word(idx, inserts, (1,) * m))
    return words
