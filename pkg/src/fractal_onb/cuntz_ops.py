"""Isometries built from a QMF basis and verification of their algebra.

For a QMF basis ``m_0..m_{N-1}`` the operators ``S_i f = m_i * (f o r)`` on
L2 of the invariant measure are isometries satisfying the defining relations
of the algebra generated by N isometries with orthogonal ranges:
``S_i* S_j = delta_ij`` and ``sum_i S_i S_i* = I``.  The adjoint averages over
the branch preimages: ``S_i* f (z) = (1/N) sum_b conj(m_i(tau_b z)) f(tau_b z)``.

Applications dispatch on the representation of ``f``: piecewise exponentials
and Walsh step functions are transformed symbolically (exact frequency and
value bookkeeping), anything else is wrapped in a pointwise closure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .basis_builder import (
    PiecewiseExp,
    StepWalsh,
    adjoint_step,
    extend_by_isometry,
    unit_interval_ifs,
    walsh_filters,
)
from .filters import (
    ExponentialFilter,
    QMFBasis,
    StepFilter,
    UnitaryMatrix,
    is_qmf_basis,
    QMFCheck,
)
from .ifs_measure import AffineIFS1D, attractor_grid


@dataclass(frozen=True)
class CuntzRep:
    """An IFS together with the QMF basis driving the isometries."""

    ifs: AffineIFS1D
    basis: QMFBasis

    def validate(self, grid=None, tol: float = 1e-10) -> QMFCheck:
        return is_qmf_basis(self.ifs, self.basis, grid, tol)


def exponential_rep(ifs: AffineIFS1D, L: Sequence[float]) -> CuntzRep:
    """Representation with filters ``exp(2*pi*i*l*x)`` for ``l in L``."""
    return CuntzRep(ifs, QMFBasis([ExponentialFilter(float(l)) for l in L]))


def walsh_rep(A: UnitaryMatrix) -> CuntzRep:
    """Representation on [0, 1] with the step filters of the matrix."""
    return CuntzRep(unit_interval_ifs(A.N), walsh_filters(A))


def _is_unit_interval(ifs: AffineIFS1D) -> bool:
    return ifs.digits == tuple(float(j) for j in range(ifs.N)) and ifs.R == ifs.N


def apply_isometry(rep: CuntzRep, i: int, f) -> Callable:
    """``S_i f = m_i * (f o r)``; symbolic when the representation allows.

    A piecewise exponential hit with an exponential filter stays piecewise
    exponential with cylinder depth + 1; a Walsh step function hit with a step
    filter stays a step function one level finer.
    """
    m = rep.basis[i]
    if isinstance(f, PiecewiseExp) and isinstance(m, ExponentialFilter) \
            and f.ifs == rep.ifs:
        return extend_by_isometry(f, m.frequency)
    if isinstance(f, StepWalsh) and isinstance(m, StepFilter) \
            and f.N == rep.ifs.N and _is_unit_interval(rep.ifs):
        return StepWalsh(f.N, np.kron(m.values, f.values), (i,) + f.word)
    ifs = rep.ifs

    def applied(x):
        y = ifs.expanding_map(x)
        return np.asarray(m(x), dtype=complex) * np.asarray(f(y), dtype=complex)

    return applied


def apply_adjoint(rep: CuntzRep, i: int, f) -> Callable:
    """``S_i* f``: the branch average against the conjugated filter."""
    m = rep.basis[i]
    if isinstance(f, PiecewiseExp) and isinstance(m, ExponentialFilter) \
            and f.ifs == rep.ifs:
        out = adjoint_step(f, m.frequency)
        if out is not None:
            return out
    if isinstance(f, StepWalsh) and isinstance(m, StepFilter) \
            and f.N == rep.ifs.N and _is_unit_interval(rep.ifs):
        v = f.values if f.depth >= 1 else np.repeat(f.values, f.N)
        blocks = v.reshape(f.N, -1)
        return StepWalsh(f.N, np.conj(m.values) @ blocks / f.N, ())
    ifs = rep.ifs

    def applied(z):
        z = np.asarray(z, dtype=float)
        total = None
        for b in ifs.digits:
            w = (z + b) / ifs.R
            val = np.conj(np.asarray(m(w), dtype=complex)) * np.asarray(f(w), dtype=complex)
            total = val if total is None else total + val
        out = total / ifs.N
        return complex(out) if out.ndim == 0 else out

    return applied


def apply_word(rep: CuntzRep, word: Sequence[int], f) -> Callable:
    """Composition ``S_{w_1} S_{w_2} ... S_{w_n} f``; the empty word returns f."""
    for i in reversed(list(word)):
        f = apply_isometry(rep, int(i), f)
    return f


@dataclass(frozen=True)
class CuntzReport:
    """Worst-case deviations of the two defining relations on a grid."""

    passed: bool
    max_relation_dev: float
    max_completeness_dev: float
    tol: float
    grid_size: int
    n_test_functions: int

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "max_relation_dev": self.max_relation_dev,
            "max_completeness_dev": self.max_completeness_dev,
            "tol": self.tol,
            "grid_size": self.grid_size,
            "n_test_functions": self.n_test_functions,
        }


def _grid_digits(ifs: AffineIFS1D, grid: np.ndarray) -> np.ndarray:
    depth = ifs.membership_depth
    rows = np.empty((grid.size, depth), dtype=np.uint8)
    for k, z in enumerate(grid):
        rows[k] = ifs.digit_expansion(float(z), depth)
    return rows


def _eval_on(f, grid: np.ndarray, digit_rows: np.ndarray) -> np.ndarray:
    if isinstance(f, PiecewiseExp):
        return f.eval_on_digits(grid, digit_rows)
    return np.asarray(f(grid), dtype=complex)


def verify_cuntz(rep: CuntzRep, test_functions: Sequence, grid=None,
                 tol: float = 1e-10) -> CuntzReport:
    """Check ``S_i* S_j = delta_ij`` and ``sum_i S_i S_i* = I`` numerically.

    Both relations are applied to every test function and evaluated on the
    grid; the report carries the worst deviations.  A family that is not a
    QMF basis fails with a defect of the order of its QMF deviation.
    """
    if not test_functions:
        raise ValueError("need at least one test function")
    ifs = rep.ifs
    if grid is None:
        grid = attractor_grid(ifs)
    grid = np.asarray(grid, dtype=float)
    digit_rows = _grid_digits(ifs, grid)
    n = ifs.N
    rel_dev = 0.0
    comp_dev = 0.0
    for f in test_functions:
        f_vals = _eval_on(f, grid, digit_rows)
        lifted = [apply_isometry(rep, j, f) for j in range(n)]
        for i in range(n):
            for j in range(n):
                g = apply_adjoint(rep, i, lifted[j])
                g_vals = _eval_on(g, grid, digit_rows)
                target = f_vals if i == j else 0.0
                rel_dev = max(rel_dev, float(np.max(np.abs(g_vals - target))))
        total = np.zeros_like(f_vals)
        for i in range(n):
            back = apply_isometry(rep, i, apply_adjoint(rep, i, f))
            total += _eval_on(back, grid, digit_rows)
        comp_dev = max(comp_dev, float(np.max(np.abs(total - f_vals))))
    passed = rel_dev <= tol and comp_dev <= tol
    return CuntzReport(passed=passed, max_relation_dev=rel_dev,
                       max_completeness_dev=comp_dev, tol=tol,
                       grid_size=grid.size, n_test_functions=len(test_functions))
