import math
import threading
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from climb.nml import (
    RegretTable,
    conditional_sc,
    delta,
    log_regret,
    plugin_entropy,
    shared_regrets,
    stochastic_complexity,
)
from climb.table import CategoricalTable, group_labels


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def brute_force_log_regret(card, n):
    """Independent oracle: enumerate every count vector of the defining sum."""
    if n == 0 or card == 1:
        return 0.0
    total = 0.0
    for counts in _compositions(n, card):
        coef = math.factorial(n)
        lik = 1.0
        for h in counts:
            coef //= math.factorial(h)
            if h:
                lik *= (h / n) ** h
        total += coef * lik
    return math.log2(total)


class TestLogRegret:
    def test_zero_samples(self):
        assert log_regret(5, 0) == 0.0

    def test_single_sample_is_log_cardinality(self):
        assert log_regret(4, 1) == pytest.approx(2.0, abs=1e-12)

    def test_binary_two_samples(self):
        # brute force over h1 + h2 = 2 gives 1 + 1 + 1/2 = 2.5
        assert log_regret(2, 2) == pytest.approx(math.log2(2.5), abs=1e-12)

    def test_unit_cardinality(self):
        for n in (0, 1, 7, 100):
            assert log_regret(1, n) == 0.0

    @pytest.mark.parametrize("card", [2, 3, 4])
    def test_matches_brute_force(self, card):
        table = RegretTable()
        for n in range(17):
            expected = brute_force_log_regret(card, n)
            got = table.log_regret(card, n)
            assert got == pytest.approx(expected, rel=1e-9, abs=1e-9)

    def test_large_cardinality_single_sample(self):
        assert log_regret(1024, 1) == pytest.approx(10.0, abs=1e-9)

    def test_huge_domain_does_not_overflow(self):
        # far beyond double exponent range if accumulated naively
        val = RegretTable().log_regret(1024, 4096)
        assert math.isfinite(val)
        assert val > 1000.0

    def test_prefix_consistency(self):
        table = RegretTable()
        first = table.log_regret(3, 50)
        assert table.filled_upto(3) == 50
        lows = [table.log_regret(3, i) for i in range(51)]
        assert table.log_regret(3, 50) == first
        again = [table.log_regret(3, i) for i in range(51)]
        assert lows == again

    def test_monotone_in_n(self):
        table = RegretTable()
        vals = table.log_regret_many(3, np.arange(201))
        assert np.all(np.diff(vals[1:]) > 0)

    def test_concave_in_n(self):
        table = RegretTable()
        for card in range(2, 11):
            vals = table.log_regret_many(card, np.arange(1001))
            steps = np.diff(vals)
            assert np.all(np.diff(steps) <= 1e-12)

    def test_concurrent_fill_identical(self):
        table = RegretTable()
        results = [None] * 8

        def worker(slot):
            results[slot] = [table.log_regret(4, n) for n in (500, 123, 499)]

        threads = [threading.Thread(target=worker, args=(i,)) for i in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert all(r == results[0] for r in results)


class TestStochasticComplexity:
    def test_constant_unit_domain(self):
        assert stochastic_complexity(np.zeros(100, dtype=np.int64), 1) == 0.0

    def test_balanced_binary_pair(self):
        got = stochastic_complexity(np.array([0, 1]), 2)
        assert got == pytest.approx(2.0 + math.log2(2.5), abs=1e-12)

    def test_constant_binary_column(self):
        x = np.zeros(4, dtype=np.int64)
        got = stochastic_complexity(x, 2)
        assert got == pytest.approx(brute_force_log_regret(2, 4), abs=1e-12)

    def test_empty(self):
        assert stochastic_complexity(np.zeros(0, dtype=np.int64), 3) == 0.0

    def test_nonnegative_random(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            card = rng.integers(1, 5)
            x = rng.integers(0, card, size=rng.integers(0, 40))
            assert stochastic_complexity(x, int(card)) >= 0.0


class TestConditionalSc:
    def test_empty_conditioning_equals_unconditional(self):
        rng = np.random.default_rng(3)
        x = rng.integers(0, 3, size=60)
        labels = np.zeros(60, dtype=np.int64)
        assert conditional_sc(x, 3, labels) == pytest.approx(
            stochastic_complexity(x, 3), abs=1e-12
        )

    def test_self_conditioning_leaves_only_regret(self):
        x = np.array([0, 1] * 4)
        labels = x.copy()
        expect = 2 * log_regret(2, 4)
        assert conditional_sc(x, 2, labels) == pytest.approx(expect, abs=1e-12)

    def test_exhaustive_small_case(self):
        # 3-valued x grouped by an independent binary z: direct per-group evaluation
        rng = np.random.default_rng(11)
        x = rng.integers(0, 3, size=60)
        z = rng.integers(0, 2, size=60)
        expect = 0.0
        for v in (0, 1):
            grp = x[z == v]
            h = len(grp)
            expect += h * plugin_entropy(np.bincount(grp, minlength=3))
            expect += brute_force_log_regret(3, h)
        assert conditional_sc(x, 3, z) == pytest.approx(expect, rel=1e-9)

    def test_decomposition_exact(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            n = int(rng.integers(1, 50))
            card = int(rng.integers(1, 5))
            x = rng.integers(0, card, size=n)
            z = rng.integers(0, 3, size=n)
            cells = np.zeros((3, max(card, 1)), dtype=np.int64)
            for xv, zv in zip(x, z):
                cells[zv, xv] += 1
            data_term = 0.0
            for row in cells:
                data_term += row.sum() * plugin_entropy(row)
            labels = np.unique(z, return_inverse=True)[1]
            total = conditional_sc(x, card, labels)
            assert total == data_term + delta(card, labels) or total == pytest.approx(
                data_term + delta(card, labels), abs=1e-9
            )


class TestDelta:
    def test_single_sample(self):
        assert delta(2, np.zeros(1, dtype=np.int64)) == pytest.approx(1.0, abs=1e-12)

    def test_unit_cardinality(self):
        assert delta(1, np.array([0, 0, 1, 2])) == 0.0

    def test_split_below_merged(self):
        # two groups of 4 cost at most one group of 8 (sub-additivity)
        merged = delta(3, np.zeros(8, dtype=np.int64))
        split = delta(3, np.array([0, 0, 0, 0, 1, 1, 1, 1]))
        assert merged <= split

    @settings(max_examples=60, deadline=None)
    @given(
        st.integers(min_value=2, max_value=5),
        st.integers(min_value=1, max_value=40),
        st.integers(min_value=1, max_value=4),
        st.integers(min_value=2, max_value=4),
        st.randoms(use_true_random=False),
    )
    def test_monotone_under_refinement(self, card, n, coarse_k, extra_k, rnd):
        coarse = np.array([rnd.randrange(coarse_k) for _ in range(n)])
        refines = np.array([rnd.randrange(extra_k) for _ in range(n)])
        fine = coarse * extra_k + refines
        coarse = np.unique(coarse, return_inverse=True)[1]
        fine = np.unique(fine, return_inverse=True)[1]
        assert delta(card, coarse) <= delta(card, fine) + 1e-9


class TestGroupLabels:
    def test_empty_cols_single_group(self):
        t = CategoricalTable.from_columns([("a", [0, 1, 0], 2)])
        labels, sizes = group_labels(t, [])
        assert labels.tolist() == [0, 0, 0]
        assert sizes.tolist() == [3]

    def test_joint_grouping_realized_only(self):
        t = CategoricalTable.from_columns(
            [("a", [0, 0, 1, 1], 2), ("b", [0, 0, 0, 2], 3)]
        )
        labels, sizes = group_labels(t, [0, 1])
        assert len(sizes) == 3
        assert sizes.sum() == 4
        assert labels[0] == labels[1]
        assert labels[2] != labels[3]

    def test_matches_unique_path(self):
        rng = np.random.default_rng(19)
        cols = [("x%d" % i, rng.integers(0, 3, size=50), 3) for i in range(4)]
        t = CategoricalTable.from_columns(cols)
        labels_small, sizes_small = group_labels(t, [0, 1, 2, 3])
        stacked = np.stack([t.columns[i] for i in range(4)])
        _, expected_labels, expected_sizes = np.unique(
            stacked, axis=1, return_inverse=True, return_counts=True
        )
        assert sizes_small.tolist() == expected_sizes.tolist()
        assert labels_small.tolist() == expected_labels.ravel().tolist()


class TestSharedTable:
    def test_shared_instance_is_reused(self):
        assert shared_regrets() is shared_regrets()
        a = log_regret(2, 10)
        b = log_regret(2, 10)
        assert a == b
