from __future__ import annotations

import itertools
from fractions import Fraction

import pytest

from qspread.moments import Word, free_iid_moment, random_rational_matrix_law, semicircular_law
from qspread.partitions import MobiusCache, OrderError, Partition, kernel, leq, meet
from qspread.reports import EXACT_ZERO
from qspread.weingarten import (
    BlockQuery,
    block_state_moment,
    combinatorial_unit_identity,
    combined_kernel,
    finite_n_reconstruction,
    free_projection_oracle,
    oracle_equivalence_sweep,
    reconstruction_weight,
    state_positivity_evidence,
)

CACHE = MobiusCache()


class TestBlockQuery:
    def test_validation(self):
        with pytest.raises(ValueError):
            BlockQuery(2, 2, (5,), (1, 2))  # length mismatch
        with pytest.raises(ValueError):
            BlockQuery(2, 2, (9,), (1,))  # row out of range
        with pytest.raises(ValueError):
            BlockQuery(2, 2, (1,), (3,))  # column out of range

    def test_band_detection(self):
        assert BlockQuery(2, 2, (1, 4), (1, 2)).in_band()
        assert not BlockQuery(2, 2, (3,), (1,)).in_band()
        assert BlockQuery(2, 2, (1, 4), (1, 2)).band_offsets() == (1, 2)


class TestStateMoment:
    def test_single_letter(self):
        for n in (1, 2, 3, 5):
            q = BlockQuery(2, n, (n + 1,), (2,))  # first row of the second band
            assert block_state_moment(q, CACHE) == Fraction(1, n)

    def test_same_column_distinct_rows_vanish(self):
        q = BlockQuery(2, 3, (1, 2), (1, 1))
        assert block_state_moment(q, CACHE) == 0

    def test_same_column_equal_rows_collapse(self):
        q = BlockQuery(2, 3, (2, 2), (1, 1))
        assert block_state_moment(q, CACHE) == Fraction(1, 3)

    def test_off_band_zero_pattern(self):
        for k, n in [(2, 2), (3, 2)]:
            for cols in itertools.product(range(1, k + 1), repeat=2):
                for rows in itertools.product(range(1, k * n + 1), repeat=2):
                    q = BlockQuery(k, n, rows, cols)
                    if not q.in_band():
                        assert block_state_moment(q, CACHE) == 0


class TestOracle:
    def test_single_letter(self):
        q = BlockQuery(3, 4, (5,), (2,))
        assert free_projection_oracle(q, CACHE) == Fraction(1, 4)

    def test_same_column_words(self):
        # products within one column collapse: pick k=2, n=3, column 2
        for rows in itertools.product(range(4, 7), repeat=3):
            q = BlockQuery(2, 3, rows, (2, 2, 2))
            expected = Fraction(1, 3) if len(set(rows)) == 1 else Fraction(0)
            assert free_projection_oracle(q, CACHE) == expected

    def test_alternating_two_column_word(self):
        q = BlockQuery(2, 2, (1, 3, 1, 3), (1, 2, 1, 2))
        psi = block_state_moment(q, CACHE)
        oracle = free_projection_oracle(q, CACHE)
        assert psi == oracle
        # hand value for free projections p, q of trace 1/2: center p = 1/2+a,
        # q = 1/2+b with a^2 = b^2 = 1/4 and vanishing alternating moments, so
        # phi(pqpq) = (1/2)^4 + 2 (1/2)^2 (1/4) = 3/16
        assert psi == Fraction(3, 16)

    def test_off_band_rejected(self):
        with pytest.raises(ValueError):
            free_projection_oracle(BlockQuery(2, 2, (3,), (1,)), CACHE)

    def test_small_sweep_matches(self):
        report = oracle_equivalence_sweep(2, 2, 4, CACHE)
        assert report.passed
        assert report.max_residual == EXACT_ZERO


class TestReconstructionWeight:
    def test_single_position(self):
        for n in (1, 2, 4):
            for i in range(1, n + 1):
                assert reconstruction_weight((3,), (i,), n, CACHE) == Fraction(1, n)

    def test_total_mass_constant_columns(self):
        # n = 2, equal columns: the four weights sum to 1
        total = sum(
            reconstruction_weight((1, 1), band, 2, CACHE)
            for band in itertools.product((1, 2), repeat=2)
        )
        assert total == 1

    def test_distinct_columns_flat_weight(self):
        for band in itertools.product((1, 2, 3), repeat=2):
            assert reconstruction_weight((1, 2), band, 3, CACHE) == Fraction(1, 9)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            reconstruction_weight((1,), (1, 2), 2, CACHE)


class TestCombinedKernel:
    def test_matches_direct_kernel(self):
        for m in (1, 2, 3, 4):
            for cols in itertools.product((1, 2), repeat=m):
                for band in itertools.product((1, 2, 3), repeat=m):
                    shifted = tuple((j - 1) * 3 + i for j, i in zip(cols, band))
                    assert combined_kernel(cols, band, 3) == kernel(shifted)
                    assert combined_kernel(cols, band, 3) == meet(kernel(cols), kernel(band))


class TestUnitIdentity:
    def test_single_position(self):
        assert combinatorial_unit_identity(Partition.full(1), (4,), 3, CACHE) == 1

    def test_pair_block_nine_term_sum(self):
        # literal 9-term filtered sum, independent of the blockwise loop
        tau = Partition.full(2)
        total = Fraction(0)
        for band in itertools.product((1, 2, 3), repeat=2):
            if leq(tau, kernel(band)):
                total += reconstruction_weight((2, 2), band, 3, CACHE)
        assert total == 1
        assert combinatorial_unit_identity(tau, (2, 2), 3, CACHE) == 1

    def test_exhaustive_small(self):
        for m in (1, 2, 3):
            for tau in CACHE.nc(m):
                for cols in itertools.product((1, 2), repeat=m):
                    if not leq(tau, kernel(cols)):
                        continue
                    for n in (1, 2, 3):
                        assert combinatorial_unit_identity(tau, cols, n, CACHE) == 1

    def test_domain_errors(self):
        with pytest.raises(OrderError):
            combinatorial_unit_identity(Partition.full(2), (1, 2), 2, CACHE)
        with pytest.raises(OrderError):
            combinatorial_unit_identity(Partition(4, [[1, 3], [2, 4]]), (1, 1, 1, 1), 2, CACHE)


class TestReconstruction:
    def test_single_position_average(self):
        law = semicircular_law()
        word = Word.plain(law, (2,), powers=(2,))
        for n in (1, 2, 3):
            assert finite_n_reconstruction(law, word, n, CACHE) == free_iid_moment(
                law, word, CACHE
            )

    def test_alternating_semicircular(self):
        law = semicircular_law()
        word = Word.plain(law, (1, 2, 1, 2))
        direct = free_iid_moment(law, word, CACHE)
        assert direct == 0
        for n in (2, 3):
            assert finite_n_reconstruction(law, word, n, CACHE) == direct

    def test_matrix_law_exact(self):
        law = random_rational_matrix_law(2, 2, seed=21)
        for m in (1, 2, 3):
            for cols in itertools.product((1, 2), repeat=m):
                word = Word.plain(law, cols)
                direct = free_iid_moment(law, word, CACHE)
                for n in (1, 2, 3):
                    got = finite_n_reconstruction(law, word, n, CACHE)
                    assert (got == direct).all(), (cols, n)

    def test_n_independence(self):
        law = semicircular_law()
        word = Word.plain(law, (1, 2, 2, 1))
        values = {finite_n_reconstruction(law, word, n, CACHE) for n in (1, 2, 3, 4)}
        assert values == {free_iid_moment(law, word, CACHE)}

    def test_float_law_rejected(self):
        from qspread.moments import random_matrix_law

        law = random_matrix_law(2, 2, seed=5)
        with pytest.raises(ValueError, match="exact"):
            finite_n_reconstruction(law, Word.plain(law, (1,)), 2, CACHE)


class TestPositivityEvidence:
    def test_gram_psd_small(self):
        report = state_positivity_evidence(2, 2, max_len=2, tolerance=1e-10, cache=CACHE)
        assert report.passed, report.params
        assert report.params["evidence_only"] is True
        assert report.params["gram_size"] == 21
