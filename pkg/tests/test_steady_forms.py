import math

import numpy as np
import pytest

from symqfi.collective_basis import GeneratorLabel, generator
from symqfi.dephasing import NoiseParams, steady_state
from symqfi.qfi import qfi_phase
from symqfi.schemes import ProbeFamily, ProbeSpec, SchemeKind, SchemeSpec, build_probe, scheme_qfi
from symqfi.steady_forms import (
    SplitChoice,
    block_probabilities,
    bsd_steady_qfi,
    dfs_piecewise_qfi,
    ghz_bipartite_steady_qfi,
    ghz_qfi_analytic,
    optimize_bsd_split,
    product_steady_qfi,
)

NOISE = NoiseParams(2 * math.pi * 50, 1.0)


def numeric_steady_qfi(n, n1, k1, k2):
    """Steady-state QFI through the full numeric pipeline."""
    probe = build_probe(ProbeSpec(ProbeFamily.BSD, n, n1=n1, k1=k1, k2=k2))
    g = generator(probe.basis, GeneratorLabel.SZ_PARTITION2)
    return qfi_phase(steady_state(probe.density_matrix()), g)


class TestGhzAnalytic:
    def test_zero_time(self):
        for n in (2, 5, 8):
            assert ghz_qfi_analytic(n, 0.0, NOISE) == pytest.approx(n * n)

    def test_matches_pipeline(self):
        probe = build_probe(ProbeSpec(ProbeFamily.GHZ, 8))
        standard = SchemeSpec(SchemeKind.STANDARD, NOISE)
        for T in np.logspace(-5, 0, 10):
            got = scheme_qfi(probe, standard, float(T))[0]
            assert got == pytest.approx(ghz_qfi_analytic(8, float(T), NOISE),
                                        rel=1e-9, abs=1e-12)

    def test_monotone_decreasing(self):
        times = np.logspace(-5, 1, 30)
        values = [ghz_qfi_analytic(6, float(t), NOISE) for t in times]
        assert all(b <= a for a, b in zip(values, values[1:]))


class TestProductSteady:
    def test_half_split(self):
        assert product_steady_qfi(8, 4) == pytest.approx(2.0)  # n/4

    def test_empty_partition(self):
        assert product_steady_qfi(8, 0) == 0.0

    def test_uneven_split(self):
        assert product_steady_qfi(8, 3) == pytest.approx(15 / 8)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            product_steady_qfi(8, 9)


class TestGhzBipartiteSteady:
    def test_values(self):
        assert ghz_bipartite_steady_qfi(8) == pytest.approx(8.0)
        assert ghz_bipartite_steady_qfi(4) == pytest.approx(2.0)

    def test_odd_rejected(self):
        with pytest.raises(ValueError):
            ghz_bipartite_steady_qfi(7)

    def test_matches_pipeline(self):
        probe = build_probe(ProbeSpec(ProbeFamily.GHZ_BIPARTITE, 8, n1=4))
        g = generator(probe.basis, GeneratorLabel.SZ_PARTITION2)
        numeric = qfi_phase(steady_state(probe.density_matrix()), g)
        assert numeric == pytest.approx(ghz_bipartite_steady_qfi(8), abs=1e-10)


class TestDfsPiecewise:
    def test_balanced_maximum(self):
        assert dfs_piecewise_qfi(8, 4, 4) == 16.0  # n^2/4

    def test_no_excitations(self):
        assert dfs_piecewise_qfi(8, 4, 0) == 0.0

    def test_middle_branch(self):
        assert dfs_piecewise_qfi(8, 2, 3) == 4.0  # n1^2 branch

    def test_mirror_branch(self):
        assert dfs_piecewise_qfi(8, 6, 3) == 4.0  # (n - n1)^2 branch

    def test_high_excitation_branch(self):
        assert dfs_piecewise_qfi(8, 4, 7) == 1.0  # (n - k)^2

    def test_every_branch_consistent(self):
        for n in (5, 8):
            for n1 in range(n + 1):
                for k in range(n + 1):
                    value = dfs_piecewise_qfi(n, n1, k)
                    lo, hi = min(n1, n - n1), max(n1, n - n1)
                    if k <= lo:
                        assert value == k * k
                    elif k > hi:
                        assert value == (n - k) ** 2
                    else:
                        assert value == lo * lo


class TestSplitChoice:
    def test_valid(self):
        c = SplitChoice(8, 4, 2, 4)
        assert c.n2 == 4 and c.k2 == 2

    def test_invalid(self):
        with pytest.raises(ValueError):
            SplitChoice(8, 4, 5, 5)   # k1 > n1
        with pytest.raises(ValueError):
            SplitChoice(8, 4, 3, 2)   # k1 > k
        with pytest.raises(ValueError):
            SplitChoice(8, 6, 0, 4)   # k2 > n2


class TestBlockProbabilities:
    def test_product_case_is_binomial(self):
        for n, n1 in ((6, 2), (8, 4)):
            p = block_probabilities(SplitChoice(n, n1, 0, 0))
            ref = np.array([math.comb(n, kp) for kp in range(n + 1)]) / 2 ** n
            np.testing.assert_allclose(p, ref, atol=1e-13)

    def test_trivial_partition_is_rotated_column(self):
        from symqfi.collective_basis import wigner_d_matrix
        n, k = 6, 2
        p = block_probabilities(SplitChoice(n, n, k, k))
        column = wigner_d_matrix(n, math.pi / 2)[:, k] ** 2
        np.testing.assert_allclose(p, column, atol=1e-13)

    def test_normalized_random_choices(self):
        rng = np.random.default_rng(47)
        for _ in range(50):
            n = int(rng.integers(2, 21))
            n1 = int(rng.integers(0, n + 1))
            k1 = int(rng.integers(0, n1 + 1))
            k2 = int(rng.integers(0, n - n1 + 1))
            p = block_probabilities(SplitChoice(n, n1, k1, k1 + k2))
            assert abs(p.sum() - 1.0) < 1e-12
            assert np.all(p >= -1e-15)


class TestBsdSteady:
    def test_optimal_probe_value(self):
        assert bsd_steady_qfi(SplitChoice(8, 4, 2, 4)) == pytest.approx(6.0, rel=1e-12)

    def test_product_reduction(self):
        for n, n1 in ((6, 2), (8, 4), (8, 3), (7, 5)):
            got = bsd_steady_qfi(SplitChoice(n, n1, 0, 0))
            assert got == pytest.approx(product_steady_qfi(n, n1), rel=1e-11)

    def test_matches_numeric_pipeline_randomized(self):
        rng = np.random.default_rng(53)
        for _ in range(40):
            n = int(rng.integers(2, 9))
            n1 = int(rng.integers(1, n))
            k1 = int(rng.integers(0, n1 + 1))
            k2 = int(rng.integers(0, n - n1 + 1))
            closed = bsd_steady_qfi(SplitChoice(n, n1, k1, k1 + k2))
            numeric = numeric_steady_qfi(n, n1, k1, k2)
            assert closed == pytest.approx(numeric, rel=1e-9, abs=1e-12)

    def test_identity_for_balanced_quarter_filling(self):
        for n in range(4, 68, 4):
            got = bsd_steady_qfi(SplitChoice(n, n // 2, n // 4, n // 2))
            assert got == pytest.approx(n * (n + 4) / 16, rel=1e-9)

    def test_noiseless_is_twice_steady(self):
        # halving under dephasing, for the product and GHZ-pair probes
        di = SchemeSpec(SchemeKind.DI_IDEAL, NOISE)
        for family, kwargs, steady in (
                (ProbeFamily.PRODUCT_PLUS, dict(n1=4), 2.0),
                (ProbeFamily.GHZ_BIPARTITE, dict(n1=4), 8.0)):
            probe = build_probe(ProbeSpec(family, 8, **kwargs))
            noiseless = scheme_qfi(probe, di, 0.0)[0]
            assert noiseless == pytest.approx(2 * steady, rel=1e-9)


class TestOptimizeSplit:
    def test_small_case(self):
        table = optimize_bsd_split(8)
        best = max(table, key=lambda r: r.max_qfi)
        assert best.max_qfi == pytest.approx(6.0, rel=1e-9)
        assert (4, 2) in table[4].argmax

    def test_global_structure_n50(self):
        table = optimize_bsd_split(50)
        overall = max(r.max_qfi for r in table)
        # the symmetric-excitation record attains the global optimum
        assert table[25].max_qfi == pytest.approx(overall, rel=1e-9)
        assert (25, 12) in table[25].argmax

    def test_symmetry_in_total_excitation_n50(self):
        table = optimize_bsd_split(50)
        for k in range(51):
            assert table[k].max_qfi == pytest.approx(table[50 - k].max_qfi, rel=1e-9)

    def test_excitation_argmax_symmetry_n50(self):
        table = optimize_bsd_split(50)
        for k in range(26):
            assert any(k1 == k // 2 for _, k1 in table[k].argmax)
        for k in range(25, 51):
            assert any(n1 - k1 == (50 - k) // 2 for n1, k1 in table[k].argmax)

    def test_odd_k_keeps_ties(self):
        table = optimize_bsd_split(50)
        assert len(table[25].argmax) > 1
        assert table[25].argmax == tuple(sorted(table[25].argmax))
