#!/usr/bin/env python3
"""Generalized Walsh bases on [0, 1] from unitary matrices.

Any NxN unitary matrix with constant first row 1/sqrt(N) induces N step
filters on [0, 1] and a family of isometries; the orbit of the constant
function is an orthonormal basis of step functions.  The 2x2 sign matrix
reproduces the classical Walsh functions; a 4x4 example produces a
genuinely different basis.  Value tables are tensor-power entries of the
matrix, which makes the analysis/synthesis transform exact.
"""

from pathlib import Path

import numpy as np

from fractal_onb import (
    UnitaryMatrix,
    gen_walsh_basis,
    tensor_power,
    walsh_value,
)
from fractal_onb.cli import write_step_svg

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

H2 = UnitaryMatrix(np.full((2, 2), 1 / np.sqrt(2)) * np.array([[1, 1], [1, -1]]))
A4 = UnitaryMatrix(np.array([
    [0.5, 0.5, 0.5, 0.5],
    [np.sqrt(2) / 2, -np.sqrt(2) / 2, 0, 0],
    [0, 0, np.sqrt(2) / 2, -np.sqrt(2) / 2],
    [0.5, 0.5, -0.5, -0.5],
]))

print("=== classical case: 2x2 sign matrix ===")
for el in gen_walsh_basis(H2, 3):
    vals = "".join("+" if v.real > 0 else "-" for v in el.refine(3))
    print(f"  word {el.word!s:12} values on the 8-cell grid: {vals}")
print("these are exactly the first eight Walsh functions (Rademacher products)")
print()

print("=== a 4x4 example with zeros in the matrix ===")
els = gen_walsh_basis(A4, 2)
print(f"words of length <= 2 give {len(els)} functions; each value is a")
print("tensor-power entry of the matrix scaled by sqrt(N^n):")
word = (1, 2)
row = [walsh_value(A4, word, k) for k in range(16)]
print(f"  word {word}: " + " ".join(f"{v.real:+.2f}" for v in row))

T2 = tensor_power(A4, 2)
k = 5
j0, j1 = k // 4, k % 4
print(f"  check cell {k}: 4 * A2[{word[0] + 4 * word[1]}, {j0 + 4 * j1}] = "
      f"{4 * T2[word[0] + 4 * word[1], j0 + 4 * j1]:.2f}")
print()

V = np.stack([el.refine(2) for el in els])
G = V @ V.conj().T / 16
print(f"grid Gram deviation from identity: {np.max(np.abs(G - np.eye(16))):.2e}")

for idx, el in enumerate(els):
    write_step_svg(OUT / f"walsh4_{idx:02d}.svg", el.refine(2),
                   title=f"word {el.word}")
print(f"wrote {len(els)} step plots to {OUT}/walsh4_*.svg")
print()

print("=== exact analysis/synthesis transform ===")
rng = np.random.default_rng(1)
signal = rng.standard_normal(4 ** 3)
els3 = gen_walsh_basis(A4, 3)
tables = np.stack([el.refine(3) for el in els3])
coeffs = tables.conj() @ signal / signal.size
recon = coeffs @ tables
print(f"random signal of length {signal.size}: round-trip error "
      f"{np.max(np.abs(recon - signal)):.2e}")
