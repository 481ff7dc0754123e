"""Enumeration of extreme cycle points for a digit set and its spectrum.

A point ``c`` is an extreme cycle point for ``(B, L)`` when some letters
``l_0..l_{p-1}`` from L cycle it under the contractions
``g_l(t) = (t + l)/R`` and the digit mask has unit modulus at every point of
the orbit.  These points seed the basis generation: each contributes the
exponential ``exp(-2*pi*i*c*x)``.

The search is exhaustive over letter words up to a period horizon, which is
affordable because all cycles live in a fixed compact interval and words are
cheap to scan (|L|**p_max in total).  Output is canonicalized so each cycle is
reported once, as the lexicographically smallest rotation of its primitive
letter word.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .errors import NotASpectrum
from .filters import is_spectrum
from .ifs_measure import AffineIFS1D, mask

DEFAULT_P_MAX = 12
DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class ExtremeCycle:
    """Cycle ``c_{k+1} = (c_k + l_k)/R`` with unit mask modulus everywhere."""

    points: tuple[float, ...]
    letters: tuple[float, ...]

    @property
    def period(self) -> int:
        return len(self.points)

    def to_dict(self) -> dict:
        return {
            "points": list(self.points),
            "letters": list(self.letters),
            "period": self.period,
        }


def candidate_interval(L: Sequence[float], R: float) -> tuple[float, float]:
    """Interval ``[min(L), max(L)] / (R - 1)`` that traps every cycle.

    The contractions ``g_l`` map it into itself, so all periodic orbits of
    words over L lie inside.
    """
    if not R > 1:
        raise ValueError("scale factor must exceed 1")
    return (min(L) / (R - 1.0), max(L) / (R - 1.0))


def cycle_fixed_point(letters: Sequence[float], R: float) -> float:
    """Starting point of the cycle driven by the given letter word.

    Solving ``c = g_{l_{p-1}}(... g_{l_0}(c))`` gives
    ``c = sum_j l_j R**j / (R**p - 1)``.
    """
    letters = list(letters)
    if not letters:
        raise ValueError("letter word must be nonempty")
    num = 0.0
    for l in reversed(letters):
        num = num * R + l
    return num / (R ** len(letters) - 1.0)


def cycle_orbit(letters: Sequence[float], R: float) -> list[float]:
    """All points of the cycle, starting from :func:`cycle_fixed_point`."""
    c = cycle_fixed_point(letters, R)
    orbit = [c]
    for l in list(letters)[:-1]:
        orbit.append((orbit[-1] + l) / R)
    return orbit


def _primitive_root(word: tuple) -> tuple | None:
    """The word's primitive repeating block, or None if already primitive."""
    p = len(word)
    for d in range(1, p):
        if p % d == 0 and word == word[:d] * (p // d):
            return word[:d]
    return None


def _canonical_rotation(word: tuple) -> tuple:
    return min(word[k:] + word[:k] for k in range(len(word)))


def find_extreme_cycles(B: Sequence[float], L: Sequence[float], R: float,
                        p_max: int = DEFAULT_P_MAX,
                        tol: float = DEFAULT_TOL) -> list[ExtremeCycle]:
    """All extreme cycles of ``(B, L)`` with period up to ``p_max``.

    Requires L to be a spectrum for ``R**-1 B`` (raises
    :class:`NotASpectrum` otherwise).  Every word over L of length at most
    ``p_max`` is tried; a cycle is kept when the mask modulus stays above
    ``1 - tol`` along the whole orbit (the modulus never exceeds 1, so the
    one-sided test suffices).  Rotations and period-multiples are reported
    once.  The cycle through 0 is always present since ``0 in L``.
    """
    if p_max < 1:
        raise ValueError("p_max must be at least 1")
    check = is_spectrum(B, R, L)
    if not check.passed:
        raise NotASpectrum(
            f"L is not a spectrum for the scaled digits (defect {check.defect:.3e})")
    ifs = AffineIFS1D(R, B)
    letters_of = [float(l) for l in L]
    found: dict[tuple, ExtremeCycle] = {}
    for p in range(1, p_max + 1):
        for idx_word in itertools.product(range(len(letters_of)), repeat=p):
            if _primitive_root(idx_word) is not None:
                continue
            canon = _canonical_rotation(idx_word)
            if canon in found:
                continue
            letters = tuple(letters_of[j] for j in canon)
            orbit = cycle_orbit(letters, float(R))
            if all(abs(mask(ifs, c)) >= 1.0 - tol for c in orbit):
                found[canon] = ExtremeCycle(points=tuple(orbit), letters=letters)
    return sorted(found.values(), key=lambda cyc: (cyc.period, cyc.points))
