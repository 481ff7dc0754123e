#!/usr/bin/env python3
"""Spectra, Hadamard pairs, and extreme cycles.

A digit set B scaled by 1/R admits a "spectrum" L when the normalized
exponential matrix between the two sets is unitary.  Such a pair determines
contractions g_l(t) = (t + l)/R, and the points they cycle through with unit
mask modulus ("extreme cycle points") seed the Fourier-type bases built in
the other demos.
"""

import numpy as np

from fractal_onb import (
    AffineIFS1D,
    candidate_interval,
    find_extreme_cycles,
    is_hadamard_pair,
    is_spectrum,
    mask,
)

SYSTEMS = [
    ("middle-third Cantor", [0, 2], 3, [0, 0.75]),
    ("unit interval (binary)", [0, 1], 2, [0, 1]),
    ("sparse quarter system", [0, 2], 4, [0, 1]),
]

print("=== spectrum checks ===")
for name, B, R, L in SYSTEMS:
    check = is_spectrum(B, R, L)
    print(f"{name}: B={B}, R={R}, L={L}")
    print(f"  unitarity defect {check.defect:.3e} -> {'spectrum' if check.passed else 'NOT a spectrum'}")

print()
print("integer pairs can also be tested directly:")
print(f"  (B={{0,2}}, L={{0,1}}, R=4) Hadamard pair: {is_hadamard_pair([0, 2], [0, 1], 4)}")
print(f"  (B={{0,1}}, L={{0,2}}, R=2) Hadamard pair: {is_hadamard_pair([0, 1], [0, 2], 2)}")

print()
print("a bad candidate fails with a visible defect:")
bad = is_spectrum([0, 2], 3, [0, 0.5])
print(f"  L={{0, 1/2}} for the Cantor digits: defect {bad.defect:.3e}")

print()
print("=== extreme cycles ===")
for name, B, R, L in SYSTEMS:
    lo, hi = candidate_interval(L, R)
    cycles = find_extreme_cycles(B, L, R, p_max=12)
    print(f"{name}: every cycle lies in [{lo:.4g}, {hi:.4g}]")
    for cyc in cycles:
        pts = ", ".join(f"{c:.6g}" for c in cyc.points)
        print(f"  period {cyc.period}: points ({pts}) letters {cyc.letters}")

print()
print("why { 0.375 } is not extreme for the Cantor pair: the mask modulus")
ifs = AffineIFS1D(3, [0, 2])
for c in (0.0, 0.375):
    print(f"  |mask({c})| = {abs(mask(ifs, c)):.6f}")
print("only points with modulus 1 qualify, and 3/8 falls short.")
