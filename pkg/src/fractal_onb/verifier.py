"""Numerical verification: inner products, Gram matrices, completeness.

Inner products of piecewise exponentials are computed exactly (up to product
truncation) from the cylinder decomposition: the integral of
``exp(2*pi*i*f*x)`` over a depth-n cylinder is ``N**-n * exp(2*pi*i*f*t_w) *
muhat(R**-n * f)`` where ``t_w`` is the cylinder translate and ``muhat`` the
measure transform.  A seeded Monte-Carlo estimator provides an independent
route for cross-checks.

Completeness is probed two ways: the Parseval function ``t -> sum_e
|<e_{-t}, e>|**2`` over a truncated basis (bounded by 1, and equal to 1 in
the limit exactly when the family is complete), and iteration of the transfer
operator ``h -> sum_l |mask((t+l)/R)|**2 h((t+l)/R)`` whose normalized fixed
points collapse to the constant function for complete systems.  Both are
diagnostics: they can falsify completeness, not certify it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .basis_builder import PiecewiseExp, pure_exponential
from .cycle_finder import candidate_interval
from .errors import GridTooCoarse, MixedSystems
from .ifs_measure import AffineIFS1D, MeasureFT, mask, sample_measure_digits

#: default truncation epsilon for the measure transform inside inner products
INNER_EPS = 1e-10

#: default Gram tolerance (cylinder sums accumulate roundoff linearly)
GRAM_TOL = 1e-6


def _check_same_system(ifs: AffineIFS1D, *elements: PiecewiseExp) -> None:
    for el in elements:
        if el.ifs != ifs:
            raise MixedSystems("elements belong to a different system")


def inner_product(ifs: AffineIFS1D, p: PiecewiseExp, q: PiecewiseExp,
                  eps: float = INNER_EPS) -> complex:
    """L2 inner product ``int p * conj(q) dmu`` via the cylinder formula.

    Both elements are refined to a common depth and the per-cylinder
    contributions are summed in index order.  Hermitian by construction:
    swapping the arguments conjugates the result exactly.
    """
    _check_same_system(ifs, p, q)
    depth = max(p.depth, q.depth)
    pr, qr = p.refine(depth), q.refine(depth)
    translates = ifs.cylinder_translates(depth) if depth > 0 else np.zeros(1)
    df = pr.freqs - qr.freqs
    mft = MeasureFT(ifs, eps)
    terms = (pr.coeffs * qr.coeffs.conj()
             * np.exp(2j * np.pi * df * translates)
             * mft(df * ifs.R ** -depth))
    return complex(terms.sum() / ifs.N ** depth)


def inner_product_mc(ifs: AffineIFS1D, p: PiecewiseExp, q: PiecewiseExp,
                     samples: int = 10 ** 6, seed: int = 0) -> tuple[complex, float]:
    """Monte-Carlo estimate of the inner product and its standard error."""
    _check_same_system(ifs, p, q)
    xs, digs = sample_measure_digits(ifs, samples, seed)
    vals = p.eval_on_digits(xs, digs) * q.eval_on_digits(xs, digs).conj()
    est = vals.mean()
    stderr = float(np.sqrt(np.mean(np.abs(vals - est) ** 2) / samples))
    return complex(est), stderr


@dataclass(frozen=True)
class GramReport:
    """Deviation of a pairwise inner-product matrix from the identity."""

    size: int
    max_offdiag: float
    max_diag_dev: float
    tol: float
    method: str
    matrix: np.ndarray = field(repr=False, compare=False)

    @property
    def passed(self) -> bool:
        return self.max_offdiag <= self.tol and self.max_diag_dev <= self.tol

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "size": self.size,
            "max_offdiag": self.max_offdiag,
            "max_diag_dev": self.max_diag_dev,
            "tol": self.tol,
            "method": self.method,
        }


def gram_matrix(ifs: AffineIFS1D, elements: Sequence[PiecewiseExp],
                eps: float = INNER_EPS, tol: float = GRAM_TOL,
                method: str = "product-formula",
                samples: int = 10 ** 6, seed: int = 0) -> GramReport:
    """All pairwise inner products of the elements, reported against identity."""
    els = list(elements)
    if not els:
        raise ValueError("need at least one element")
    k = len(els)
    G = np.zeros((k, k), dtype=complex)
    if method == "product-formula":
        for i in range(k):
            for j in range(i, k):
                v = inner_product(ifs, els[i], els[j], eps)
                G[i, j] = v
                G[j, i] = np.conj(v)
    elif method == "monte-carlo":
        xs, digs = sample_measure_digits(ifs, samples, seed)
        vals = np.stack([el.eval_on_digits(xs, digs) for el in els])
        G = vals @ vals.conj().T / len(xs)
    else:
        raise ValueError(f"unknown method {method!r}")
    off = G - np.diag(np.diagonal(G))
    max_off = float(np.max(np.abs(off))) if k > 1 else 0.0
    max_diag = float(np.max(np.abs(np.diagonal(G) - 1.0)))
    return GramReport(size=k, max_offdiag=max_off, max_diag_dev=max_diag,
                      tol=tol, method=method, matrix=G)


def parseval_h(ifs: AffineIFS1D, elements: Sequence[PiecewiseExp], t: float,
               eps: float = INNER_EPS) -> float:
    """Squared projection mass ``sum_e |<e_{-t}, e>|**2`` of a probe exponential.

    Bounded by 1 for an orthonormal family (Bessel); values approaching 1 as
    the truncation grows are evidence of completeness.
    """
    probe = pure_exponential(ifs, -float(t))
    return float(sum(abs(inner_product(ifs, probe, el, eps)) ** 2
                     for el in elements))


def parseval_curve(ifs: AffineIFS1D, elements: Sequence[PiecewiseExp], t: float,
                   eps: float = INNER_EPS) -> list[tuple[int, float]]:
    """Parseval mass as a function of the operator-word-length horizon.

    Elements are grouped by the length of their generating word, so entry
    ``(K, h)`` uses exactly the elements with words of length at most K.
    """
    probe = pure_exponential(ifs, -float(t))
    by_len: dict[int, float] = {}
    for el in elements:
        contrib = abs(inner_product(ifs, probe, el, eps)) ** 2
        k = len(el.word)
        by_len[k] = by_len.get(k, 0.0) + contrib
    curve = []
    total = 0.0
    for k in sorted(by_len):
        total += by_len[k]
        curve.append((k, total))
    return curve


# ----------------------------------------------------------------------
# transfer operator
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class TransferGrid:
    """Sampled nonnegative function on an interval, for transfer iteration."""

    points: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if pts.shape != vals.shape or pts.ndim != 1 or pts.size < 2:
            raise ValueError("points and values must be matching 1-d arrays")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("points must be strictly increasing")
        if not np.all(np.isfinite(vals)) or np.any(vals < 0):
            raise ValueError("values must be finite and nonnegative")
        pts.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)

    @property
    def interval(self) -> tuple[float, float]:
        return float(self.points[0]), float(self.points[-1])


def transfer_grid(L: Sequence[float], R: float, size: int = 2048,
                  widen: float = 0.1, values=None) -> TransferGrid:
    """Uniform grid over the cycle-trapping interval, widened on both sides."""
    lo, hi = candidate_interval(L, R)
    pad = widen * max(hi - lo, 1.0)
    pts = np.linspace(lo - pad, hi + pad, size)
    vals = np.ones(size) if values is None else np.asarray(values, dtype=float)
    return TransferGrid(points=pts, values=vals)


def transfer_iterate(ifs: AffineIFS1D, L: Sequence[float], grid: TransferGrid,
                     iters: int) -> TransferGrid:
    """Apply ``h -> sum_l |mask((t+l)/R)|**2 h((t+l)/R)`` the given number of times.

    Off-grid arguments are linearly interpolated.  Constants are exact fixed
    points when L is a spectrum (the mask weights then sum to one), and
    nonnegativity is preserved since the weights are nonnegative.
    """
    if iters < 1:
        raise ValueError("iters must be at least 1")
    lo, hi = grid.interval
    clo, chi = candidate_interval(L, ifs.R)
    if lo > clo or hi < chi:
        raise GridTooCoarse("grid does not cover the cycle-trapping interval")
    t = grid.points
    images = [(t + float(l)) / ifs.R for l in L]
    for y in images:
        if y.min() < lo or y.max() > hi:
            raise GridTooCoarse("a contraction maps grid points outside the grid")
    weights = [np.abs(mask(ifs, y)) ** 2 for y in images]
    h = grid.values
    for _ in range(iters):
        h = sum(w * np.interp(y, t, h) for w, y in zip(weights, images))
    return TransferGrid(points=t, values=h)


# ----------------------------------------------------------------------
# CSV dumps
# ----------------------------------------------------------------------

def dump_gram_csv(path: str | Path, report: GramReport) -> None:
    """Write the entry moduli of a Gram matrix, one row per matrix row."""
    lines = ["# fractal-onb v1"]
    lines += [",".join(f"{abs(v):.17g}" for v in row) for row in report.matrix]
    Path(path).write_text("\n".join(lines) + "\n")


def dump_transfer_csv(path: str | Path, grid: TransferGrid) -> None:
    """Write a transfer grid as ``t,h`` rows for plotting."""
    lines = ["# fractal-onb v1", "t,h"]
    lines += [f"{t:.17g},{h:.17g}" for t, h in zip(grid.points, grid.values)]
    Path(path).write_text("\n".join(lines) + "\n")
