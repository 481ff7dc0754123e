"""Tests for inner products, Gram reports, Parseval mass, transfer iteration."""

import numpy as np
import pytest

from fractal_onb.basis_builder import gen_fractal_onb, pure_exponential
from fractal_onb.cycle_finder import find_extreme_cycles
from fractal_onb.errors import GridTooCoarse, MixedSystems
from fractal_onb.ifs_measure import AffineIFS1D
from fractal_onb.verifier import (
    TransferGrid,
    dump_gram_csv,
    dump_transfer_csv,
    gram_matrix,
    inner_product,
    inner_product_mc,
    parseval_curve,
    parseval_h,
    transfer_grid,
    transfer_iterate,
)

CANTOR = AffineIFS1D(3, [0, 2])
DOUBLING = AffineIFS1D(2, [0, 1])
CANTOR_L = [0.0, 0.75]

CANTOR_CYCLES = find_extreme_cycles([0, 2], CANTOR_L, 3, p_max=8)
CANTOR_BASIS_8 = gen_fractal_onb(CANTOR, CANTOR_L, CANTOR_CYCLES, 3)


class TestInnerProduct:
    def test_constant_norm_one(self):
        e0 = pure_exponential(CANTOR, 0.0)
        assert inner_product(CANTOR, e0, e0) == 1.0

    def test_spectrum_orthogonality(self):
        a = pure_exponential(CANTOR, 0.75)
        b = pure_exponential(CANTOR, 0.0)
        assert abs(inner_product(CANTOR, a, b)) < 1e-8

    def test_orthogonality_of_distinct_words(self):
        one, two = CANTOR_BASIS_8[1], CANTOR_BASIS_8[2]
        assert abs(inner_product(CANTOR, one, two)) < 1e-8

    def test_hermitian_exactly(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            p = pure_exponential(CANTOR, float(rng.uniform(-4, 4)))
            q = pure_exponential(CANTOR, float(rng.uniform(-4, 4)))
            assert inner_product(CANTOR, p, q) == np.conj(inner_product(CANTOR, q, p))

    def test_mixed_systems_rejected(self):
        with pytest.raises(MixedSystems):
            inner_product(CANTOR, pure_exponential(CANTOR, 0.0),
                          pure_exponential(DOUBLING, 0.0))

    def test_against_monte_carlo(self):
        a = pure_exponential(CANTOR, 0.75)
        b = pure_exponential(CANTOR, 0.0)
        exact = inner_product(CANTOR, a, b)
        est, stderr = inner_product_mc(CANTOR, a, b, samples=10 ** 6, seed=17)
        assert abs(exact - est) <= 3.0 * stderr

    def test_random_pairs_product_vs_monte_carlo(self):
        rng = np.random.default_rng(8)
        els = CANTOR_BASIS_8
        for _ in range(20):
            i, j = rng.integers(0, len(els), 2)
            if i == j:
                continue
            exact = inner_product(CANTOR, els[i], els[j])
            est, stderr = inner_product_mc(CANTOR, els[i], els[j],
                                           samples=10 ** 6, seed=int(rng.integers(1 << 30)))
            assert abs(exact - est) <= 3.0 * stderr


class TestGramMatrix:
    def test_single_element(self):
        report = gram_matrix(CANTOR, [pure_exponential(CANTOR, 0.0)])
        assert report.max_diag_dev < 1e-8
        assert report.passed

    def test_small_basis_orthonormal(self):
        report = gram_matrix(CANTOR, CANTOR_BASIS_8)
        assert report.size == 8
        assert report.passed
        assert report.max_offdiag < 1e-8

    def test_duplicate_detected(self):
        els = [CANTOR_BASIS_8[0], CANTOR_BASIS_8[1], CANTOR_BASIS_8[1]]
        report = gram_matrix(CANTOR, els)
        assert not report.passed
        assert report.max_offdiag == pytest.approx(1.0, abs=1e-10)

    def test_reorder_invariance(self):
        rng = np.random.default_rng(12)
        perm = rng.permutation(len(CANTOR_BASIS_8))
        a = gram_matrix(CANTOR, CANTOR_BASIS_8)
        b = gram_matrix(CANTOR, [CANTOR_BASIS_8[k] for k in perm])
        assert b.max_offdiag == pytest.approx(a.max_offdiag, abs=1e-12)
        np.testing.assert_allclose(b.matrix, a.matrix[np.ix_(perm, perm)], atol=1e-12)

    def test_monte_carlo_method_agrees(self):
        els = CANTOR_BASIS_8[:4]
        exact = gram_matrix(CANTOR, els)
        mc = gram_matrix(CANTOR, els, method="monte-carlo", samples=10 ** 5, seed=2)
        assert mc.method == "monte-carlo"
        np.testing.assert_allclose(mc.matrix, exact.matrix, atol=2e-2)


class TestParseval:
    def test_probe_on_basis_element(self):
        h = parseval_h(CANTOR, CANTOR_BASIS_8, 0.0)
        assert 1.0 - 1e-8 <= h <= 1.0 + len(CANTOR_BASIS_8) * 1e-8

    def test_monotone_in_horizon(self):
        els = gen_fractal_onb(CANTOR, CANTOR_L, CANTOR_CYCLES, 6)
        curve = parseval_curve(CANTOR, els, 0.3)
        values = [v for _, v in curve]
        assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
        assert values[-1] <= 1.0 + 1e-6

    def test_lebesgue_mass_close_to_one(self):
        cycles = find_extreme_cycles([0, 1], [0, 1], 2, p_max=6)
        els = gen_fractal_onb(DOUBLING, [0, 1], cycles, 6)
        assert parseval_h(DOUBLING, els, 0.5) >= 0.99

    def test_bessel_bound(self):
        els = gen_fractal_onb(CANTOR, CANTOR_L, CANTOR_CYCLES, 6)
        for t in (0.1, 0.3, 0.7, 1.9):
            assert parseval_h(CANTOR, els, t) <= 1.0 + len(els) * 1e-10


class TestTransferOperator:
    def test_constant_is_fixed(self):
        g = transfer_grid(CANTOR_L, 3)
        out = transfer_iterate(CANTOR, CANTOR_L, g, 50)
        assert np.max(np.abs(out.values - 1.0)) < 1e-12

    def test_bump_contracts_to_constant(self):
        g = transfer_grid(CANTOR_L, 3)
        bump = 1.0 + np.exp(-((g.points - 0.2) / 0.02) ** 2)
        out = transfer_iterate(CANTOR, CANTOR_L, TransferGrid(g.points, bump), 50)
        assert np.max(np.abs(out.values - 1.0)) < 1e-3

    def test_random_pinned_converges(self):
        rng = np.random.default_rng(0)
        g = transfer_grid(CANTOR_L, 3)
        vals = rng.uniform(0.0, 2.0, g.points.size)
        vals[np.argmin(np.abs(g.points))] = 1.0
        out = transfer_iterate(CANTOR, CANTOR_L, TransferGrid(g.points, vals), 100)
        assert np.max(np.abs(out.values - 1.0)) < 1e-3

    def test_preserves_nonnegativity(self):
        rng = np.random.default_rng(5)
        g = transfer_grid(CANTOR_L, 3)
        vals = rng.uniform(0.0, 5.0, g.points.size)
        out = transfer_iterate(CANTOR, CANTOR_L, TransferGrid(g.points, vals), 3)
        assert np.all(out.values >= 0.0)

    def test_grid_must_cover_interval(self):
        pts = np.linspace(0.0, 0.2, 64)  # cycle interval reaches 0.375
        with pytest.raises(GridTooCoarse):
            transfer_iterate(CANTOR, CANTOR_L, TransferGrid(pts, np.ones(64)), 1)

    def test_rejects_negative_values(self):
        with pytest.raises(ValueError):
            TransferGrid(np.linspace(0, 1, 8), -np.ones(8))


class TestDumps:
    def test_gram_csv(self, tmp_path):
        report = gram_matrix(CANTOR, CANTOR_BASIS_8[:3])
        path = tmp_path / "gram.csv"
        dump_gram_csv(path, report)
        lines = path.read_text().splitlines()
        assert lines[0] == "# fractal-onb v1"
        assert len(lines) == 4
        first = [float(v) for v in lines[1].split(",")]
        assert first[0] == pytest.approx(1.0, abs=1e-8)

    def test_transfer_csv(self, tmp_path):
        g = transfer_grid(CANTOR_L, 3, size=16)
        path = tmp_path / "transfer.csv"
        dump_transfer_csv(path, g)
        lines = path.read_text().splitlines()
        assert lines[1] == "t,h"
        assert len(lines) == 18
