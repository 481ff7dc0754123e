"""Tests for conditional expectations, QMF checks, spectra, and the matrix link."""

import numpy as np
import pytest

from fractal_onb.errors import NonIntegerInput, NotUnitary, WrongArity
from fractal_onb.filters import (
    ExponentialFilter,
    QMFBasis,
    StepFilter,
    UnitaryMatrix,
    basis_to_matrix,
    conditional_expectation,
    decompose,
    exponential_basis,
    is_hadamard_pair,
    is_qmf,
    is_qmf_basis,
    is_spectrum,
    matrix_to_basis,
    random_unitary,
    unitarity_defect,
)
from fractal_onb.ifs_measure import AffineIFS1D, attractor_grid

CANTOR = AffineIFS1D(3, [0, 2])
DOUBLING = AffineIFS1D(2, [0, 1])

CANTOR_BASIS = exponential_basis([0.0, 0.75])
HAAR_BASIS = QMFBasis([StepFilter([1, 1]), StepFilter([1, -1])])

PAPER_4X4 = np.array([
    [0.5, 0.5, 0.5, 0.5],
    [np.sqrt(2) / 2, -np.sqrt(2) / 2, 0, 0],
    [0, 0, np.sqrt(2) / 2, -np.sqrt(2) / 2],
    [0.5, 0.5, -0.5, -0.5],
])


class TestConditionalExpectation:
    def test_constant(self):
        grid = attractor_grid(CANTOR, 64)
        np.testing.assert_allclose(
            conditional_expectation(CANTOR, lambda w: np.ones_like(w), grid), 1.0)

    def test_exponential_averages_to_zero(self):
        grid = attractor_grid(DOUBLING, 64)
        vals = conditional_expectation(DOUBLING, ExponentialFilter(1.0), grid)
        np.testing.assert_allclose(vals, 0.0, atol=1e-14)

    def test_qmf_basis_orthonormality_pointwise(self):
        grid = attractor_grid(CANTOR, 128)
        for i, mi in enumerate(CANTOR_BASIS):
            for j, mj in enumerate(CANTOR_BASIS):
                vals = conditional_expectation(
                    CANTOR, lambda w: mi(w) * np.conj(mj(w)), grid)
                np.testing.assert_allclose(vals, 1.0 if i == j else 0.0, atol=1e-12)


class TestIsQMF:
    def test_constant_one(self):
        assert is_qmf(CANTOR, ExponentialFilter(0.0)).passed

    def test_spectrum_exponentials(self):
        for l in (0.0, 0.75):
            assert is_qmf(CANTOR, ExponentialFilter(l)).passed

    def test_constant_two_fails_with_deviation_three(self):
        check = is_qmf(CANTOR, lambda x: 2.0 * np.ones_like(np.asarray(x)))
        assert not check.passed
        assert check.max_deviation == pytest.approx(3.0, abs=1e-12)


class TestIsQMFBasis:
    def test_haar_pair(self):
        assert is_qmf_basis(DOUBLING, HAAR_BASIS).passed

    def test_cantor_exponentials(self):
        assert is_qmf_basis(CANTOR, CANTOR_BASIS).passed

    def test_repeated_filter_fails(self):
        check = is_qmf_basis(CANTOR, exponential_basis([0.0, 0.0]))
        assert not check.passed
        assert check.max_deviation == pytest.approx(1.0, abs=1e-12)

    def test_wrong_arity(self):
        with pytest.raises(WrongArity):
            is_qmf_basis(CANTOR, exponential_basis([0.0, 0.75, 1.5]))

    def test_fiber_matrix_unitary(self):
        # the proof device: (1/sqrt(N)) [m_i(tau_b z)] is unitary at every z
        for basis, ifs in ((CANTOR_BASIS, CANTOR), (HAAR_BASIS, DOUBLING)):
            for z in np.asarray(attractor_grid(ifs, 512))[::31]:
                w = (z + ifs.digit_array) / ifs.R
                M = np.stack([np.asarray(m(w), dtype=complex) for m in basis])
                assert unitarity_defect(M / np.sqrt(ifs.N)) < 1e-10


class TestIsSpectrum:
    def test_cantor_spectrum(self):
        check = is_spectrum([0, 2], 3, [0, 0.75])
        assert check.passed
        # matrix is the normalized sign matrix: e^{2 pi i (2/3)(3/4)} = -1
        assert np.exp(2j * np.pi * (2 * 0.75) / 3) == pytest.approx(-1.0, abs=1e-14)

    def test_quarter_spectrum(self):
        assert is_spectrum([0, 2], 4, [0, 1]).passed

    def test_failure_reports_defect(self):
        check = is_spectrum([0, 2], 3, [0, 0.5])
        assert not check.passed
        assert check.defect > 1e-3

    def test_wrong_arity(self):
        with pytest.raises(WrongArity):
            is_spectrum([0, 2], 3, [0, 0.25, 0.75])

    def test_translation_and_permutation_invariance(self):
        base = np.array([0.0, 0.75])
        rng = np.random.default_rng(0)
        for _ in range(10):
            shift = rng.uniform(-3, 3)
            perm = rng.permutation(2)
            assert is_spectrum([0, 2], 3, (base + shift)[perm]).passed

    def test_two_dimensional_pair(self):
        B = [[0, 0], [1, 0], [0, 1], [1, 1]]
        L = [[0, 0], [1, 0], [0, 1], [1, 1]]
        R = [[2, 0], [0, 2]]
        assert is_spectrum(B, R, L).passed


class TestIsHadamardPair:
    def test_quarter_pair(self):
        assert is_hadamard_pair([0, 2], [0, 1], 4)

    def test_doubling_pair(self):
        assert is_hadamard_pair([0, 1], [0, 1], 2)

    def test_coincident_rows_fail(self):
        assert not is_hadamard_pair([0, 1], [0, 2], 2)

    def test_non_integer_rejected(self):
        with pytest.raises(NonIntegerInput):
            is_hadamard_pair([0, 2], [0, 0.75], 3)


class TestUnitaryMatrix:
    def test_example_4x4_valid(self):
        A = UnitaryMatrix(PAPER_4X4)
        assert A.first_row_constant
        assert A.defect < 1e-12

    def test_not_unitary(self):
        with pytest.raises(NotUnitary):
            UnitaryMatrix(np.array([[1.0, 0.1], [0.0, 1.0]]))

    def test_json_roundtrip(self):
        A = UnitaryMatrix(PAPER_4X4)
        B = UnitaryMatrix.from_json(A.to_json())
        np.testing.assert_array_equal(A.entries, B.entries)

    def test_first_row_flag(self):
        A = UnitaryMatrix(np.eye(2))
        assert not A.first_row_constant


class TestBasisToMatrix:
    def test_same_basis_gives_identity(self):
        z = 2.0 / 3.0
        A = basis_to_matrix(CANTOR, CANTOR_BASIS, CANTOR_BASIS, z)
        np.testing.assert_allclose(A.entries, np.eye(2), atol=1e-12)

    def test_swap_gives_permutation(self):
        swapped = exponential_basis([0.75, 0.0])
        for z in attractor_grid(CANTOR, 16):
            A = basis_to_matrix(CANTOR, swapped, CANTOR_BASIS, float(z))
            np.testing.assert_allclose(A.entries, [[0, 1], [1, 0]], atol=1e-12)

    def test_invalid_basis_raises(self):
        broken = exponential_basis([0.0, 0.5])
        with pytest.raises(NotUnitary):
            basis_to_matrix(CANTOR, broken, CANTOR_BASIS, 0.25)


class TestMatrixToBasis:
    def test_identity_matrix_preserves_basis(self):
        out = matrix_to_basis(CANTOR, CANTOR_BASIS, np.eye(2))
        grid = attractor_grid(CANTOR, 64)
        for new, old in zip(out, CANTOR_BASIS):
            np.testing.assert_allclose(new(grid), old(grid), atol=1e-14)

    def test_hadamard_on_haar_is_qmf_basis(self):
        H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
        out = matrix_to_basis(DOUBLING, HAAR_BASIS, H)
        assert is_qmf_basis(DOUBLING, out).passed

    def test_round_trip_both_ways(self):
        rng = np.random.default_rng(123)
        grid = attractor_grid(CANTOR, 128)
        for _ in range(3):
            A = random_unitary(2, rng)
            derived = matrix_to_basis(CANTOR, CANTOR_BASIS, A)
            # matrix -> basis -> matrix
            for z in grid[::17]:
                rec = basis_to_matrix(CANTOR, derived, CANTOR_BASIS, float(z))
                np.testing.assert_allclose(rec.entries, A.entries, atol=1e-10)
            # basis -> matrix -> basis
            rec0 = basis_to_matrix(CANTOR, derived, CANTOR_BASIS, float(grid[0]))
            rebuilt = matrix_to_basis(CANTOR, CANTOR_BASIS, rec0)
            for f, g in zip(rebuilt, derived):
                np.testing.assert_allclose(f(grid), g(grid), atol=1e-10)

    def test_step_valued_matrix(self):
        H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)

        # A(0) == A(1): the tie-broken boundary fiber point r(1/2) = 1 then
        # sees the same matrix as z = 0, keeping the grid identity exact
        def A(z):
            return H if 0.25 <= z < 0.75 else np.eye(2)

        out = matrix_to_basis(DOUBLING, HAAR_BASIS, A)
        assert is_qmf_basis(DOUBLING, out, tol=1e-10).passed

    def test_non_unitary_rejected(self):
        with pytest.raises(NotUnitary):
            matrix_to_basis(CANTOR, CANTOR_BASIS, np.array([[1, 0], [0, 2.0]]))


class TestDecompose:
    def test_basis_element_reproduces_itself(self):
        z = 2.0 / 9.0
        got = decompose(CANTOR, CANTOR_BASIS[0], CANTOR_BASIS, z)
        assert got == pytest.approx(complex(CANTOR_BASIS[0](z)), abs=1e-12)

    def test_exponential_on_cantor(self):
        f = ExponentialFilter(1.3)
        for z in attractor_grid(CANTOR, 32):
            assert decompose(CANTOR, f, CANTOR_BASIS, float(z)) == pytest.approx(
                complex(f(float(z))), abs=1e-10)

    def test_step_function_on_walsh_system(self):
        f = StepFilter([0.3, -1.0, 2.5, 0.0])
        for z in attractor_grid(DOUBLING, 16):
            assert decompose(DOUBLING, f, HAAR_BASIS, float(z)) == pytest.approx(
                complex(f(float(z))), abs=1e-10)
