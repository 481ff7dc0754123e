#!/usr/bin/env python3
"""Operator-level diagnostics: isometry relations, invariance, transfer operator.

The basis constructions rest on three numerical facts that this demo checks
directly:

1. the filter-induced operators satisfy the isometry relations
   S_i* S_j = delta_ij and sum_i S_i S_i* = I on a verification grid;
2. the invariant measure is strongly invariant for the expanding map
   (sampled both ways by Monte Carlo);
3. the transfer operator fixes constants and flattens perturbations, which
   is the mechanism behind the completeness of the generated bases.
"""

import numpy as np

from fractal_onb import (
    AffineIFS1D,
    TransferGrid,
    check_strong_invariance,
    exponential_rep,
    pure_exponential,
    transfer_grid,
    transfer_iterate,
    verify_cuntz,
)

ifs = AffineIFS1D(3, [0, 2])
L = [0.0, 0.75]

print("=== isometry relations on the Cantor system ===")
rep = exponential_rep(ifs, L)
fns = [pure_exponential(ifs, t) for t in (0.1, 1.0, 2.7)]
report = verify_cuntz(rep, fns, tol=1e-10)
print(f"  max relation deviation     {report.max_relation_dev:.2e}")
print(f"  max completeness deviation {report.max_completeness_dev:.2e}")
print(f"  grid size {report.grid_size}, pass: {report.passed}")

broken = exponential_rep(ifs, [0.0, 0.5])
bad = verify_cuntz(broken, fns[:1], tol=1e-10)
print(f"  a non-spectrum letter set fails loudly: deviation {bad.max_relation_dev:.2e}")
print()

print("=== strong invariance of the measure (Monte Carlo) ===")
inv = check_strong_invariance(ifs, [0.5, 0.75, 2.0], samples=400_000, seed=3)
for chk in inv.checks:
    print(f"  frequency {chk.frequency}: gap {chk.gap:.2e} "
          f"(3-sigma allowance {chk.stat_error:.2e})")
print()

print("=== transfer operator ===")
grid = transfer_grid(L, 3)
flat = transfer_iterate(ifs, L, grid, 50)
print(f"  constants stay fixed: drift {np.max(np.abs(flat.values - 1)):.2e}")

bump = 1.0 + np.exp(-((grid.points - 0.2) / 0.02) ** 2)
for iters in (1, 5, 10, 25):
    out = transfer_iterate(ifs, L, TransferGrid(grid.points, bump), iters)
    print(f"  bump after {iters:3d} iterations: sup deviation "
          f"{np.max(np.abs(out.values - 1)):.2e}")
print("the perturbation dies geometrically; only constants survive, which is")
print("exactly the property that upgrades orthonormality to completeness.")
