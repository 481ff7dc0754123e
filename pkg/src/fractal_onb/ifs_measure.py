"""One-dimensional affine iterated function systems and their invariant measures.

The system is given by a scale ``R > 1`` and a finite digit set ``B`` with
``0 in B``.  The maps ``tau_b(x) = (x + b) / R`` contract the line onto a
compact attractor, and the unique balanced (Hutchinson) probability measure
``mu`` on the attractor assigns mass ``N**-n`` to every depth-``n`` cylinder.
When the cylinders do not overlap, the inverse branches glue into an N-to-1
expanding map ``r`` with ``r(tau_b(x)) = x``, and ``mu`` is strongly invariant
for ``r``: integrating a function equals integrating the average of its values
over the N preimages.

This module provides the system itself, digit/cylinder bookkeeping, seeded
sampling from ``mu``, the digit mask ``(1/N) * sum_b exp(2*pi*i*b*x)``, and the
Fourier transform of ``mu`` as a truncated infinite product of masks.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import OutsideAttractor

#: absolute tolerance used for attractor membership and branch resolution
MEMBERSHIP_TOL = 1e-12

#: tail bound used when truncating random digit expansions
SAMPLE_TAIL = 1e-12

_SAMPLE_CHUNK = 1 << 17


@dataclass(frozen=True)
class AffineIFS1D:
    """Affine IFS ``tau_b(x) = (x + b) / R`` on the line.

    Digits are stored sorted ascending; ties in branch resolution are broken
    toward the smaller digit.
    """

    R: float
    digits: tuple[float, ...]

    def __init__(self, R: float, digits: Iterable[float]):
        ds = tuple(sorted(float(b) for b in digits))
        object.__setattr__(self, "R", float(R))
        object.__setattr__(self, "digits", ds)
        if not self.R > 1.0:
            raise ValueError(f"scale factor must exceed 1, got {self.R}")
        if len(ds) < 2:
            raise ValueError("need at least two digits")
        if len(set(ds)) != len(ds):
            raise ValueError("digits must be distinct")
        if 0.0 not in ds:
            raise ValueError("digit set must contain 0")

    @property
    def N(self) -> int:
        return len(self.digits)

    @cached_property
    def digit_array(self) -> np.ndarray:
        a = np.array(self.digits, dtype=float)
        a.setflags(write=False)
        return a

    @cached_property
    def hull(self) -> tuple[float, float]:
        """Smallest interval containing the attractor."""
        return (self.digits[0] / (self.R - 1.0), self.digits[-1] / (self.R - 1.0))

    @cached_property
    def membership_depth(self) -> int:
        """Expansion depth at which cylinders are narrower than the tolerance."""
        lo, hi = self.hull
        width = max(hi - lo, 1.0)
        return max(1, math.ceil(math.log(width / MEMBERSHIP_TOL) / math.log(self.R)))

    # ------------------------------------------------------------------
    # maps
    # ------------------------------------------------------------------
    def branch(self, b: float, x):
        """Contraction ``tau_b(x) = (x + b) / R`` for a digit ``b`` of the system."""
        if b not in self.digits:
            raise ValueError(f"{b} is not a digit of this system")
        return (x + b) / self.R

    def digit_expansion(self, x: float, depth: int | None = None,
                        tol: float = MEMBERSHIP_TOL) -> tuple[int, ...]:
        """Digit-index expansion of ``x`` down to ``depth`` levels.

        Searches the cylinder tree depth-first, trying smaller digits first, so
        points on a shared cylinder boundary resolve to the smaller digit.
        Raises :class:`OutsideAttractor` when ``x`` is farther than ``tol``
        from every depth-``depth`` cylinder.
        """
        if depth is None:
            depth = self.membership_depth
        lo, hi = self.hull
        digits = self.digits
        scales = self.R ** -np.arange(1, depth + 1)
        path: list[int] = []

        def descend(k: int, t: float) -> bool:
            if k == depth:
                return True
            s = scales[k]
            for j, b in enumerate(digits):
                t2 = t + b * s
                if t2 + s * lo - tol <= x <= t2 + s * hi + tol:
                    path.append(j)
                    if descend(k + 1, t2):
                        return True
                    path.pop()
            return False

        if not descend(0, 0.0):
            raise OutsideAttractor(f"{x} is not within {tol} of the attractor")
        return tuple(path)

    def contains(self, x: float, tol: float = MEMBERSHIP_TOL) -> bool:
        try:
            self.digit_expansion(x, tol=tol)
        except OutsideAttractor:
            return False
        return True

    def expanding_map(self, x):
        """The N-to-1 map ``r``: inverse of the branch whose cylinder holds ``x``.

        Accepts a scalar or an array; raises :class:`OutsideAttractor` for
        points in a gap of the attractor.
        """
        if np.ndim(x) > 0:
            flat = np.asarray(x, dtype=float).ravel()
            out = np.array([self.expanding_map(float(v)) for v in flat])
            return out.reshape(np.shape(x))
        j = self.digit_expansion(float(x))[0]
        return self.R * float(x) - self.digits[j]

    def expanding_orbit(self, x: float, steps: int) -> list[float]:
        """``[x, r(x), r^2(x), ..., r^steps(x)]``."""
        orbit = [float(x)]
        for _ in range(steps):
            orbit.append(self.expanding_map(orbit[-1]))
        return orbit

    # ------------------------------------------------------------------
    # cylinders and points
    # ------------------------------------------------------------------
    def attractor_point(self, digit_values: Sequence[float]) -> float:
        """Point ``sum_k R**-k * b_k`` for a finite prefix of digit values."""
        x = 0.0
        for b in reversed(list(digit_values)):
            if b not in self.digits:
                raise ValueError(f"{b} is not a digit of this system")
            x = (x + b) / self.R
        return x

    def cylinder_data(self, word: Sequence[int]) -> tuple[float, float]:
        """Translate and measure of the cylinder for a word of digit indices.

        The cylinder ``tau_{b_1} ... tau_{b_n}(X)`` is the attractor scaled by
        ``R**-n`` and shifted by ``t_w = sum_k R**-k b_k``; its measure is
        ``N**-n``.  The empty word gives ``(0.0, 1.0)``.
        """
        t = 0.0
        for j in reversed(list(word)):
            t = (t + self.digits[j]) / self.R
        return t, float(self.N) ** -len(word)

    def cylinder_translates(self, depth: int) -> np.ndarray:
        """Translates of all depth-``depth`` cylinders in lexicographic order."""
        count = self.N ** depth
        t = np.zeros(count)
        for k in range(depth):
            idx = (np.arange(count) // self.N ** (depth - 1 - k)) % self.N
            t += self.digit_array[idx] * self.R ** -(k + 1)
        return t

    def word_rank(self, word: Sequence[int]) -> int:
        """Lexicographic rank of a digit-index word among words of its length."""
        rank = 0
        for j in word:
            rank = rank * self.N + j
        return rank


def attractor_grid(ifs: AffineIFS1D, size: int = 512) -> np.ndarray:
    """Evaluation grid of ``size`` attractor points (cylinder translates).

    Uses the shallowest depth with at least ``size`` cylinders and, if there
    are more, keeps an evenly spaced subset.  Points are sorted ascending.
    """
    depth = 1
    while ifs.N ** depth < size:
        depth += 1
    pts = ifs.cylinder_translates(depth)
    if pts.size > size:
        keep = np.round(np.linspace(0, pts.size - 1, size)).astype(int)
        pts = pts[keep]
    return pts


# ----------------------------------------------------------------------
# digit mask and measure transform
# ----------------------------------------------------------------------

def mask(ifs: AffineIFS1D, x):
    """Digit mask ``(1/N) * sum_b exp(2*pi*i*b*x)``; scalar or array ``x``."""
    x = np.asarray(x, dtype=float)
    phases = np.exp(2j * np.pi * np.multiply.outer(x, ifs.digit_array))
    out = phases.mean(axis=-1)
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class MeasureFT:
    """Fourier transform of the invariant measure, ``t -> int exp(2*pi*i*t*x) dmu``.

    Evaluated as the finite product ``prod_{k<=K} mask(R**-k * t)`` where K is
    the smallest truncation level with ``2*pi*R**-K*|t|*max|B| < truncation_eps``;
    the dropped tail then deviates from 1 by less than the requested epsilon
    per factor.
    """

    ifs: AffineIFS1D
    truncation_eps: float = 1e-10

    def __post_init__(self):
        if not self.truncation_eps > 0:
            raise ValueError("truncation_eps must be positive")

    def truncation_level(self, t: float) -> int:
        bmax = max(abs(b) for b in self.ifs.digits)
        target = 2.0 * np.pi * abs(t) * bmax / self.truncation_eps
        if target <= 1.0:
            return 0
        return math.ceil(math.log(target) / math.log(self.ifs.R))

    def __call__(self, t):
        if np.ndim(t) == 0:
            K = self.truncation_level(float(t))
            out = 1.0 + 0.0j
            for k in range(1, K + 1):
                out *= mask(self.ifs, float(t) * self.ifs.R ** -k)
            return out
        t = np.asarray(t, dtype=float)
        levels = np.array([self.truncation_level(v) for v in t.ravel()]).reshape(t.shape)
        out = np.ones(t.shape, dtype=complex)
        for k in range(1, int(levels.max(initial=0)) + 1):
            factor = mask(self.ifs, t * self.ifs.R ** -k)
            out = np.where(levels >= k, out * factor, out)
        return out


# ----------------------------------------------------------------------
# sampling
# ----------------------------------------------------------------------

def _sample_depth(ifs: AffineIFS1D) -> int:
    bmax = max(abs(b) for b in ifs.digits)
    tail0 = bmax / (ifs.R - 1.0)
    return max(1, math.ceil(math.log(tail0 / SAMPLE_TAIL) / math.log(ifs.R)))


def _chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(chunk,))
    return np.random.Generator(np.random.Philox(ss))


def sample_measure_digits(ifs: AffineIFS1D, count: int, seed: int,
                          depth: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Draws from the invariant measure along with their digit-index rows.

    Sampling goes through uniform random digit expansions truncated once the
    remaining tail is below ``SAMPLE_TAIL``.  Work is split into fixed-size
    chunks, each driven by a counter-based generator derived from ``(seed,
    chunk index)``, so the output is reproducible and independent of how the
    chunks might be scheduled.
    """
    if count < 1:
        raise ValueError("count must be positive")
    if depth is None:
        depth = _sample_depth(ifs)
    weights = ifs.R ** -np.arange(1, depth + 1)
    xs = np.empty(count)
    digs = np.empty((count, depth), dtype=np.uint8)
    done = 0
    chunk = 0
    while done < count:
        m = min(_SAMPLE_CHUNK, count - done)
        rng = _chunk_rng(seed, chunk)
        d = rng.integers(0, ifs.N, size=(m, depth), dtype=np.uint8)
        digs[done:done + m] = d
        xs[done:done + m] = ifs.digit_array[d] @ weights
        done += m
        chunk += 1
    return xs, digs


def sample_measure(ifs: AffineIFS1D, count: int, seed: int) -> np.ndarray:
    """``count`` seeded draws from the invariant measure."""
    xs, _ = sample_measure_digits(ifs, count, seed)
    return xs


# ----------------------------------------------------------------------
# strong invariance diagnostic
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class InvarianceCheck:
    frequency: float
    lhs: complex
    rhs: complex
    gap: float
    stat_error: float

    @property
    def passed(self) -> bool:
        return self.gap <= self.stat_error

    def to_dict(self) -> dict:
        return {
            "frequency": self.frequency,
            "lhs": [self.lhs.real, self.lhs.imag],
            "rhs": [self.rhs.real, self.rhs.imag],
            "gap": self.gap,
            "stat_error_3sigma": self.stat_error,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class InvarianceReport:
    checks: tuple[InvarianceCheck, ...]
    samples: int
    seed: int

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def max_gap(self) -> float:
        return max(c.gap for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "samples": self.samples,
            "seed": self.seed,
            "checks": [c.to_dict() for c in self.checks],
        }


def check_strong_invariance(ifs: AffineIFS1D, test_freqs: Sequence[float],
                            samples: int = 10 ** 6, seed: int = 0) -> InvarianceReport:
    """Monte-Carlo check of the invariance identity on exponentials.

    For each frequency ``t`` both sides are estimated from the same draws:
    the plain average of ``exp(2*pi*i*t*x)`` against the average of the
    branch-mean ``(1/N) * sum_b exp(2*pi*i*t*(x+b)/R)``.  The reported
    statistical error is three standard errors of the per-sample difference,
    so a correct system should pass every check with large probability.
    """
    if samples < 10 ** 4:
        raise ValueError("need at least 1e4 samples for a meaningful check")
    x = sample_measure(ifs, samples, seed)
    checks = []
    for t in test_freqs:
        lhs_samples = np.exp(2j * np.pi * t * x)
        rhs_samples = np.zeros_like(lhs_samples)
        for b in ifs.digits:
            rhs_samples += np.exp(2j * np.pi * t * (x + b) / ifs.R)
        rhs_samples /= ifs.N
        diff = lhs_samples - rhs_samples
        gap = abs(diff.mean())
        var = np.mean(np.abs(diff - diff.mean()) ** 2)
        stat = 3.0 * math.sqrt(var / samples)
        checks.append(InvarianceCheck(
            frequency=float(t),
            lhs=complex(lhs_samples.mean()),
            rhs=complex(rhs_samples.mean()),
            gap=float(gap),
            stat_error=float(stat),
        ))
    return InvarianceReport(checks=tuple(checks), samples=samples, seed=seed)


# ----------------------------------------------------------------------
# config and dumps
# ----------------------------------------------------------------------

def load_system_config(path: str | Path) -> dict:
    """Parse a TOML or JSON config file into a plain dict."""
    path = Path(path)
    data = path.read_bytes()
    if path.suffix.lower() == ".toml":
        try:
            import tomllib  # Python >= 3.11
        except ModuleNotFoundError:
            import tomli as tomllib
        return tomllib.loads(data.decode())
    return json.loads(data.decode())


def load_ifs_config(path: str | Path) -> tuple[AffineIFS1D, list[float] | None]:
    """Build the system (and optional candidate spectrum L) from a config file.

    Expected keys: ``R`` (number), ``B`` (array of numbers), optional ``L``.
    """
    cfg = load_system_config(path)
    if "R" not in cfg or "B" not in cfg:
        raise KeyError("config must define R and B")
    ifs = AffineIFS1D(cfg["R"], cfg["B"])
    L = [float(v) for v in cfg["L"]] if "L" in cfg else None
    return ifs, L


def dump_samples_csv(path: str | Path, samples: np.ndarray) -> None:
    """Write measure samples as CSV with header ``index,x``."""
    lines = ["# fractal-onb v1", "index,x"]
    lines += [f"{i},{x:.17g}" for i, x in enumerate(np.asarray(samples).ravel())]
    Path(path).write_text("\n".join(lines) + "\n")
