"""The canonical state on banded projection families, and the exact
finite-size reconstruction identity it induces.

For a rectangular family with k columns and k*n rows, stack one projection-
valued partition of unity per column into disjoint row bands and take the
columns to be freely independent, each projection carrying weight 1/n.  The
induced state has an exact closed form: a double sum over non-crossing
partitions weighted by Mobius values and powers of 1/n.

Two independent routes to the same numbers live here.  ``block_state_moment``
evaluates the closed form; ``free_projection_oracle`` never sees that formula
and instead combines (a) the collapse of same-column products with (b) the
moment-cumulant recursion restricted below the column kernel, which is how
freeness determines mixed moments.  Their exact agreement is an acceptance
gate.

Everything here runs on exact rationals; no floating point enters except in
the positivity evidence, where eigenvalues of a Gram matrix are examined.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .moments import Word, free_iid_moment
from .partitions import (
    MobiusCache,
    OrderError,
    Partition,
    default_cache,
    kernel,
    leq,
    meet,
)
from .reports import CheckReport, ResidualTracker

_weight_memo: dict = {}
_column_memo: dict = {}


@dataclass(frozen=True)
class BlockQuery:
    """A word query against the banded family: rows in {1..k*n}, columns in
    {1..k}, equal length m >= 1."""

    k: int
    n: int
    rows: tuple[int, ...]
    cols: tuple[int, ...]

    def __post_init__(self):
        if self.k < 1 or self.n < 1:
            raise ValueError("k and n must be positive")
        m = len(self.rows)
        if m < 1 or len(self.cols) != m:
            raise ValueError("rows and cols must have equal positive length")
        if any(not 1 <= l <= self.k * self.n for l in self.rows):
            raise ValueError(f"row index out of range 1..{self.k * self.n}")
        if any(not 1 <= j <= self.k for j in self.cols):
            raise ValueError(f"column index out of range 1..{self.k}")

    def in_band(self) -> bool:
        return all(
            (j - 1) * self.n < l <= j * self.n for l, j in zip(self.rows, self.cols)
        )

    def band_offsets(self) -> tuple[int, ...]:
        """The within-band indices i_r = l_r - (j_r - 1) n; requires in_band."""
        if not self.in_band():
            raise ValueError("query leaves the column bands")
        return tuple(l - (j - 1) * self.n for l, j in zip(self.rows, self.cols))


def _kernel_weight(
    col_kernel: Partition, band_kernel: Partition, n: int, cache: MobiusCache
) -> Fraction:
    """Sum over pi <= col_kernel and non-crossing sigma <= pi meet band_kernel
    of mu(sigma, pi) / n^{|sigma|}."""
    key = (col_kernel, band_kernel, n)
    hit = _weight_memo.get(key)
    if hit is not None:
        return hit
    total = Fraction(0)
    for pi in cache.nc(col_kernel.m):
        if not leq(pi, col_kernel):
            continue
        for sigma in cache.below(pi):
            if leq(sigma, band_kernel):
                total += cache.mobius(sigma, pi) * Fraction(1, n ** sigma.size())
    _weight_memo[key] = total
    return total


def block_state_moment(q: BlockQuery, cache: MobiusCache | None = None) -> Fraction:
    """Closed-form moment of the state: zero off the bands, otherwise the
    Mobius-weighted double sum over non-crossing partitions."""
    if not q.in_band():
        return Fraction(0)
    cache = cache or default_cache()
    return _kernel_weight(kernel(q.cols), kernel(q.band_offsets()), q.n, cache)


def _column_cumulant(labels: tuple[int, ...], n: int, cache: MobiusCache) -> Fraction:
    """Free cumulant of one column's projections, from their moments alone:
    the moment of a product is 1/n when all labels agree and 0 otherwise."""
    ker = kernel(labels)
    key = (ker, n)
    hit = _column_memo.get(key)
    if hit is not None:
        return hit
    s = len(labels)
    top = Partition.full(s)
    total = Fraction(0)
    for sigma in cache.nc(s):
        if leq(sigma, ker):
            total += cache.mobius(sigma, top) * Fraction(1, n ** sigma.size())
    _column_memo[key] = total
    return total


def free_projection_oracle(q: BlockQuery, cache: MobiusCache | None = None) -> Fraction:
    """The same moment computed without the closed formula.

    Freeness of the columns says the moment is the sum, over non-crossing
    partitions lying below the column kernel, of the product of one free
    cumulant per block; each block cumulant is recovered from same-column
    moments by Mobius inversion.  Exact rational output.
    """
    cache = cache or default_cache()
    offsets = q.band_offsets()
    col_kernel = kernel(q.cols)
    total = Fraction(0)
    for pi in cache.nc(len(q.rows)):
        if not leq(pi, col_kernel):
            continue
        term = Fraction(1)
        for block in pi.blocks:
            term *= _column_cumulant(tuple(offsets[pos - 1] for pos in block), q.n, cache)
            if term == 0:
                break
        total += term
    return total


def reconstruction_weight(
    cols: tuple[int, ...], band: tuple[int, ...], n: int,
    cache: MobiusCache | None = None,
) -> Fraction:
    """Coefficient attached to one replacement tuple when the state is applied
    to the invariance equation."""
    if len(cols) != len(band):
        raise ValueError("tuples must have equal length")
    cache = cache or default_cache()
    return _kernel_weight(kernel(cols), kernel(band), n, cache)


def combined_kernel(cols: tuple[int, ...], band: tuple[int, ...], n: int) -> Partition:
    """Kernel of the interleaved relabeling r -> (cols_r - 1) n + band_r.

    The relabeling is injective on (column, offset) pairs, so positions agree
    exactly when both coordinates do: the kernel is the meet of the kernels.
    """
    return meet(kernel(cols), kernel(band))


def finite_n_reconstruction(
    law, word: Word, n: int, cache: MobiusCache | None = None
):
    """Average the free joint moments over all band replacements, weighted by
    reconstruction_weight.

    For the free model this reproduces the original moment exactly at every
    finite n; no limit is involved.  Exact backend only.
    """
    if not getattr(law, "exact", False):
        raise ValueError("reconstruction check runs on the exact backend only")
    if n < 1:
        raise ValueError("n must be >= 1")
    cache = cache or default_cache()
    cols = word.indices
    total = law.zero()
    for band in itertools.product(range(1, n + 1), repeat=word.length):
        weight = reconstruction_weight(cols, band, n, cache)
        if weight == 0:
            continue
        shifted = word.with_indices(
            tuple((j - 1) * n + i for j, i in zip(cols, band))
        )
        total = total + free_iid_moment(law, shifted, cache) * weight
    return total


def combinatorial_unit_identity(
    tau: Partition, cols: tuple[int, ...], n: int, cache: MobiusCache | None = None
) -> Fraction:
    """Sum of reconstruction weights over band tuples refined by ``tau``.

    This is the scalar identity that makes the reconstruction exact; the
    contract is that it always equals 1 on its domain (tau non-crossing and
    below the kernel of the columns).
    """
    if not tau.is_noncrossing():
        raise OrderError(f"{tau!r} is crossing")
    if not leq(tau, kernel(cols)):
        raise OrderError(f"{tau!r} is not below the kernel of {cols}")
    cache = cache or default_cache()
    total = Fraction(0)
    for assignment in itertools.product(range(1, n + 1), repeat=tau.size()):
        band = [0] * tau.m
        for value, block in zip(assignment, tau.blocks):
            for pos in block:
                band[pos - 1] = value
        total += reconstruction_weight(cols, tuple(band), n, cache)
    return total


def oracle_equivalence_sweep(
    k_max: int, n_max: int, m_max: int, cache: MobiusCache | None = None,
    seed: int | None = None,
) -> CheckReport:
    """Exact agreement of the closed form with the freeness oracle on every
    in-band query with k <= k_max, n <= n_max, m <= m_max, plus the off-band
    zero pattern on small sizes."""
    cache = cache or default_cache()
    tracker = ResidualTracker(
        "state_oracle_equivalence",
        0,
        params={"k_max": k_max, "n_max": n_max, "m_max": m_max},
        seed=seed,
    )
    for k in range(1, k_max + 1):
        for n in range(1, n_max + 1):
            for m in range(1, m_max + 1):
                for cols in itertools.product(range(1, k + 1), repeat=m):
                    for band in itertools.product(range(1, n + 1), repeat=m):
                        rows = tuple((j - 1) * n + i for j, i in zip(cols, band))
                        q = BlockQuery(k, n, rows, cols)
                        gap = abs(
                            block_state_moment(q, cache) - free_projection_oracle(q, cache)
                        )
                        tracker.add(("query", k, n, list(rows), list(cols)), gap)
    for k in range(1, min(k_max, 3) + 1):
        for n in range(1, min(n_max, 3) + 1):
            for m in range(1, min(m_max, 2) + 1):
                for cols in itertools.product(range(1, k + 1), repeat=m):
                    for rows in itertools.product(range(1, k * n + 1), repeat=m):
                        q = BlockQuery(k, n, rows, cols)
                        if not q.in_band():
                            tracker.add(
                                ("off-band", k, n, list(rows), list(cols)),
                                abs(block_state_moment(q, cache)),
                            )
    return tracker.report()


def state_positivity_evidence(
    k: int, n: int, max_len: int = 2, tolerance: float = 1e-10,
    cache: MobiusCache | None = None, seed: int | None = None,
) -> CheckReport:
    """Positive-semidefiniteness of the Gram matrix [psi(w* w')] over all
    in-band words up to max_len.

    Numerical evidence that the functional is a state, not a proof; reports
    carry an explicit evidence flag.
    """
    cache = cache or default_cache()
    letters = [
        ((j - 1) * n + i, j) for j in range(1, k + 1) for i in range(1, n + 1)
    ]
    words: list[tuple] = [()]
    for length in range(1, max_len + 1):
        words.extend(itertools.product(letters, repeat=length))

    def psi(word: tuple) -> Fraction:
        if not word:
            return Fraction(1)
        rows = tuple(l for l, _ in word)
        cols = tuple(j for _, j in word)
        return block_state_moment(BlockQuery(k, n, rows, cols), cache)

    size = len(words)
    gram = np.empty((size, size), dtype=float)
    for a, wa in enumerate(words):
        for b, wb in enumerate(words):
            # adjoint of a word of projections reverses the order
            gram[a, b] = float(psi(tuple(reversed(wa)) + wb))
    smallest = float(np.linalg.eigvalsh(gram)[0])
    tracker = ResidualTracker(
        "state_positivity_evidence",
        tolerance,
        params={"k": k, "n": n, "max_len": max_len, "gram_size": size,
                "evidence_only": True, "min_eigenvalue": smallest},
        seed=seed,
    )
    tracker.add(("min-eigenvalue",), max(0.0, -smallest))
    return tracker.report()
