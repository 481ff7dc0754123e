"""Filter functions on the attractor and quadrature-mirror-filter machinery.

A filter is any callable mapping attractor points to complex values; the
concrete kinds used here are exponentials ``exp(2*pi*i*lam*x)``, step
functions with N values on ``[j/N, (j+1)/N)``, and piecewise exponentials
(defined in :mod:`fractal_onb.basis_builder`).

A single filter ``m`` is a QMF when the branch average of ``|m|**2`` is
identically 1; N filters form a QMF basis when the branch averages of the
pairwise products reproduce the identity matrix.  These conditions are checked
numerically on an attractor grid.  The module also hosts the spectrum /
Hadamard-pair test for digit sets and the two mutually inverse constructions
linking QMF bases to unitary-matrix-valued maps.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import NonIntegerInput, NotUnitary, WrongArity
from .ifs_measure import AffineIFS1D, attractor_grid

#: default tolerance for unitarity checks on small dense matrices
UNITARITY_TOL = 1e-10

#: default tolerance for pointwise identities on verification grids
POINTWISE_TOL = 1e-10


# ----------------------------------------------------------------------
# concrete filters
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ExponentialFilter:
    """``x -> exp(2*pi*i*frequency*x)``."""

    frequency: float

    def __call__(self, x):
        return np.exp(2j * np.pi * self.frequency * np.asarray(x, dtype=float))


class StepFilter:
    """Step function on [0, 1] taking ``values[j]`` on ``[j/N, (j+1)/N)``.

    The right endpoint 1 is folded into the last step.
    """

    def __init__(self, values: Sequence[complex]):
        self.values = np.asarray(values, dtype=complex)
        self.values.setflags(write=False)

    @property
    def N(self) -> int:
        return self.values.size

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.clip(np.floor(x * self.N).astype(int), 0, self.N - 1)
        out = self.values[idx]
        return complex(out) if out.ndim == 0 else out

    def __repr__(self):
        return f"StepFilter({list(self.values)})"


class MatrixModulatedFilter:
    """Row of a matrix applied to a reference filter family.

    For a constant matrix ``A`` this evaluates ``sum_j A[row, j] * m_j(x)``;
    for a point-dependent matrix the row is read off at ``r(x)``.
    """

    def __init__(self, ifs: AffineIFS1D, base: Sequence[Callable], row: int,
                 matrix: np.ndarray | None = None,
                 matrix_fn: Callable[[float], np.ndarray] | None = None):
        if (matrix is None) == (matrix_fn is None):
            raise ValueError("provide exactly one of matrix, matrix_fn")
        self.ifs = ifs
        self.base = tuple(base)
        self.row = row
        self.matrix = None if matrix is None else np.asarray(matrix, dtype=complex)
        self.matrix_fn = matrix_fn

    def _row_at(self, z: float) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix[self.row]
        A = self.matrix_fn(z)
        entries = A.entries if isinstance(A, UnitaryMatrix) else np.asarray(A, dtype=complex)
        return entries[self.row]

    def __call__(self, x):
        if np.ndim(x) == 0:
            if self.matrix is not None:
                row = self.matrix[self.row]
            else:
                row = self._row_at(self.ifs.expanding_map(float(x)))
            return complex(sum(c * f(x) for c, f in zip(row, self.base)))
        flat = np.asarray(x, dtype=float).ravel()
        out = np.array([self(float(v)) for v in flat])
        return out.reshape(np.shape(x))


@dataclass(frozen=True)
class QMFBasis:
    """Ordered family of N filters intended to satisfy the QMF-basis identity."""

    filters: tuple

    def __init__(self, filters: Sequence[Callable]):
        object.__setattr__(self, "filters", tuple(filters))

    def __len__(self):
        return len(self.filters)

    def __iter__(self):
        return iter(self.filters)

    def __getitem__(self, i):
        return self.filters[i]


def exponential_basis(frequencies: Sequence[float]) -> QMFBasis:
    """The family ``{exp(2*pi*i*l*x) : l in frequencies}``, in the given order."""
    return QMFBasis([ExponentialFilter(float(l)) for l in frequencies])


# ----------------------------------------------------------------------
# unitary matrices
# ----------------------------------------------------------------------

class UnitaryMatrix:
    """Small dense unitary matrix with an optional constant-first-row flag.

    Raises :class:`NotUnitary` when ``A @ A*`` strays from the identity by more
    than ``unitarity_tol``.  ``first_row_constant`` records whether every
    first-row entry equals ``1/sqrt(N)`` to within ``first_row_tol``.
    """

    def __init__(self, entries, unitarity_tol: float = UNITARITY_TOL,
                 first_row_tol: float = 1e-12):
        A = np.asarray(entries, dtype=complex)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {A.shape}")
        defect = unitarity_defect(A)
        if defect > unitarity_tol:
            raise NotUnitary(f"unitarity defect {defect:.3e} exceeds {unitarity_tol:.1e}")
        A.setflags(write=False)
        self.entries = A
        self.defect = defect
        self.first_row_constant = bool(
            np.max(np.abs(A[0] - 1.0 / np.sqrt(A.shape[0]))) <= first_row_tol)

    @property
    def N(self) -> int:
        return self.entries.shape[0]

    def __getitem__(self, key):
        return self.entries[key]

    @classmethod
    def from_json(cls, source) -> "UnitaryMatrix":
        """Parse ``{"N": n, "rows": [[[re, im], ...], ...]}`` from dict, str, or path."""
        if isinstance(source, (str, Path)):
            path = Path(source)
            try:
                is_file = path.exists()
            except OSError:
                is_file = False
            obj = json.loads(path.read_text() if is_file else str(source))
        else:
            obj = source
        rows = obj["rows"]
        n = int(obj.get("N", len(rows)))
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ValueError("matrix rows do not match declared size")
        entries = np.array([[complex(re, im) for re, im in row] for row in rows])
        return cls(entries)

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "rows": [[[z.real, z.imag] for z in row] for row in self.entries],
        }


def unitarity_defect(A: np.ndarray) -> float:
    A = np.asarray(A, dtype=complex)
    eye = np.eye(A.shape[0])
    return float(max(np.max(np.abs(A @ A.conj().T - eye)),
                     np.max(np.abs(A.conj().T @ A - eye))))


def random_unitary(n: int, rng: np.random.Generator) -> UnitaryMatrix:
    """Haar-style random unitary from the QR factorization of a complex Gaussian."""
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    q = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
    return UnitaryMatrix(q)


# ----------------------------------------------------------------------
# conditional expectation and QMF checks
# ----------------------------------------------------------------------

def conditional_expectation(ifs: AffineIFS1D, f: Callable, z):
    """Average of ``f`` over the N preimages of ``z``: ``(1/N) sum_b f(tau_b(z))``."""
    z = np.asarray(z, dtype=float)
    total = None
    for b in ifs.digits:
        val = np.asarray(f((z + b) / ifs.R), dtype=complex)
        total = val if total is None else total + val
    out = total / ifs.N
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class QMFCheck:
    """Outcome of a QMF or QMF-basis grid check."""

    passed: bool
    max_deviation: float
    grid_size: int
    tol: float

    def __bool__(self):
        return self.passed

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "max_deviation": self.max_deviation,
            "grid_size": self.grid_size,
            "tol": self.tol,
        }


def is_qmf(ifs: AffineIFS1D, m: Callable, grid=None,
           tol: float = POINTWISE_TOL) -> QMFCheck:
    """Check ``(1/N) sum_b |m(tau_b z)|**2 == 1`` on the grid."""
    if grid is None:
        grid = attractor_grid(ifs)
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("grid must be nonempty")
    avg = conditional_expectation(ifs, lambda w: np.abs(m(w)) ** 2, grid)
    dev = float(np.max(np.abs(avg - 1.0)))
    return QMFCheck(dev <= tol, dev, grid.size, tol)


def is_qmf_basis(ifs: AffineIFS1D, filters, grid=None,
                 tol: float = POINTWISE_TOL) -> QMFCheck:
    """Check the full orthonormality identity for a family of N filters."""
    fs = tuple(filters)
    if len(fs) != ifs.N:
        raise WrongArity(f"need exactly {ifs.N} filters, got {len(fs)}")
    if grid is None:
        grid = attractor_grid(ifs)
    grid = np.asarray(grid, dtype=float)
    branch_vals = [np.stack([np.asarray(m((grid + b) / ifs.R), dtype=complex)
                             for b in ifs.digits]) for m in fs]
    dev = 0.0
    for i in range(len(fs)):
        for j in range(len(fs)):
            avg = (branch_vals[i] * branch_vals[j].conj()).mean(axis=0)
            target = 1.0 if i == j else 0.0
            dev = max(dev, float(np.max(np.abs(avg - target))))
    return QMFCheck(dev <= tol, dev, grid.size, tol)


# ----------------------------------------------------------------------
# spectra and Hadamard pairs
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class SpectrumCheck:
    passed: bool
    defect: float

    def __bool__(self):
        return self.passed

    def to_dict(self) -> dict:
        return {"pass": self.passed, "unitarity_defect": self.defect}


def _pair_matrix(B, R, candidate) -> np.ndarray:
    B = np.asarray(B, dtype=float)
    lam = np.asarray(candidate, dtype=float)
    if B.ndim == 1:
        B = B[:, None]
    if lam.ndim == 1:
        lam = lam[:, None]
    if np.ndim(R) == 0:
        scaled = (B @ lam.T) / float(R)
    else:
        scaled = np.linalg.solve(np.asarray(R, dtype=float), B.T).T @ lam.T
    return np.exp(2j * np.pi * scaled) / np.sqrt(B.shape[0])


def is_spectrum(B, R, candidate, tol: float = UNITARITY_TOL) -> SpectrumCheck:
    """Is ``candidate`` a spectrum for ``R**-1 B``?

    True when the normalized exponential matrix
    ``(1/sqrt(N)) [exp(2*pi*i*(R^-1 b) . lam)]`` is unitary within ``tol``.
    Accepts scalars (d = 1) or d-vectors for the digits and frequencies.
    """
    B = np.asarray(B, dtype=float)
    lam = np.asarray(candidate, dtype=float)
    if lam.shape[0] != B.shape[0]:
        raise WrongArity(f"candidate has {lam.shape[0]} entries, digits have {B.shape[0]}")
    defect = unitarity_defect(_pair_matrix(B, R, lam))
    return SpectrumCheck(defect <= tol, defect)


def is_hadamard_pair(B, L, R, tol: float = UNITARITY_TOL) -> bool:
    """Integer digit sets B, L form a Hadamard pair for the integer scale R."""
    B = np.asarray(B)
    L = np.asarray(L)
    for name, arr in (("B", B), ("L", L), ("R", np.asarray(R))):
        if not np.allclose(arr, np.round(arr), atol=0):
            raise NonIntegerInput(f"{name} must consist of integers")
    return bool(is_spectrum(B, R, L, tol=tol).passed)


# ----------------------------------------------------------------------
# the basis <-> matrix correspondence
# ----------------------------------------------------------------------

def basis_to_matrix(ifs: AffineIFS1D, new_basis, ref_basis, z: float,
                    tol: float = UNITARITY_TOL) -> UnitaryMatrix:
    """Change-of-basis matrix between two QMF bases at the point ``z``.

    ``A[i, j] = (1/N) sum_b m'_i(tau_b z) conj(m_j(tau_b z))``.  Raises
    :class:`NotUnitary` when the result is not unitary, which signals that one
    of the inputs is not a valid QMF basis.
    """
    new_f = tuple(new_basis)
    ref_f = tuple(ref_basis)
    if len(new_f) != ifs.N or len(ref_f) != ifs.N:
        raise WrongArity("both bases must have N filters")
    w = (z + ifs.digit_array) / ifs.R
    new_vals = np.stack([np.asarray(m(w), dtype=complex) for m in new_f])
    ref_vals = np.stack([np.asarray(m(w), dtype=complex) for m in ref_f])
    A = new_vals @ ref_vals.conj().T / ifs.N
    return UnitaryMatrix(A, unitarity_tol=tol)


def matrix_to_basis(ifs: AffineIFS1D, ref_basis, A, grid=None,
                    tol: float = UNITARITY_TOL) -> QMFBasis:
    """New QMF basis ``m'_i(z) = sum_j A[i, j](r(z)) m_j(z)``.

    ``A`` may be a constant matrix (:class:`UnitaryMatrix` or array) or a
    callable ``z -> matrix`` (piecewise constant in practice).  Callables are
    validated for unitarity on the verification grid.
    """
    ref_f = tuple(ref_basis)
    if len(ref_f) != ifs.N:
        raise WrongArity("reference basis must have N filters")
    if callable(A) and not isinstance(A, (UnitaryMatrix, np.ndarray)):
        if grid is None:
            grid = attractor_grid(ifs, 64)
        for z in np.asarray(grid, dtype=float):
            val = A(float(z))
            entries = val.entries if isinstance(val, UnitaryMatrix) else np.asarray(val)
            if unitarity_defect(entries) > tol:
                raise NotUnitary(f"A({z}) is not unitary within {tol:.1e}")
        filters = [MatrixModulatedFilter(ifs, ref_f, i, matrix_fn=A)
                   for i in range(ifs.N)]
        return QMFBasis(filters)
    entries = A.entries if isinstance(A, UnitaryMatrix) else np.asarray(A, dtype=complex)
    if unitarity_defect(entries) > tol:
        raise NotUnitary(f"matrix is not unitary within {tol:.1e}")
    filters = [MatrixModulatedFilter(ifs, ref_f, i, matrix=entries)
               for i in range(ifs.N)]
    return QMFBasis(filters)


def decompose(ifs: AffineIFS1D, f: Callable, basis, z: float) -> complex:
    """Reconstruct ``f(z)`` from its QMF-basis coefficients at ``z``.

    The coefficients are branch averages over the fiber of ``r(z)`` (the fiber
    containing ``z`` itself), so the reconstruction is exact for any f.
    """
    y = ifs.expanding_map(float(z))
    out = 0.0 + 0.0j
    for m in basis:
        coeff = conditional_expectation(
            ifs, lambda w, m=m: np.asarray(f(w), dtype=complex) * np.conj(m(w)), y)
        out += coeff * complex(m(z))
    return out
