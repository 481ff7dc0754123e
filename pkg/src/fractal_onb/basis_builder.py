"""Construction of the orthonormal families.

Two kinds of bases are generated here:

* piecewise exponentials on a fractal measure: starting from the exponentials
  ``exp(-2*pi*i*c*x)`` attached to the extreme cycle points of ``(B, L)``, the
  family is closed under the isometries ``f -> exp(2*pi*i*l*x) * f(r(x))``
  for ``l in L``, up to a chosen operator-word length;

* generalized Walsh step functions on [0, 1]: the constant function closed
  under the isometries built from an NxN unitary matrix with constant first
  row, whose values are tensor-power entries of the matrix.

Both closures deduplicate structurally (several operator words can produce
the same function), so each basis element is counted once.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .errors import FirstRowNotConstant, IndexOutOfRange, NonIntegerInput
from .filters import QMFBasis, StepFilter, UnitaryMatrix
from .ifs_measure import AffineIFS1D

#: decimal places used when quantizing float data for structural equality
KEY_DECIMALS = 12


def _quantize(arr: np.ndarray) -> np.ndarray:
    # adding 0.0 maps -0.0 to +0.0 so byte-level keys are stable
    return np.round(arr, KEY_DECIMALS) + 0.0


# ----------------------------------------------------------------------
# piecewise exponentials
# ----------------------------------------------------------------------

class PiecewiseExp:
    """Function equal to ``coeffs[w] * exp(2*pi*i*freqs[w]*x)`` on cylinder ``w``.

    Cylinder words of length ``depth`` are ranked lexicographically with the
    first (coarsest) digit most significant.  Basis elements carry unimodular
    coefficients; adjoint images may not, so no modulus constraint is imposed
    here.  ``word`` and ``cycle_point`` record how the element was generated.
    """

    def __init__(self, ifs: AffineIFS1D, depth: int, coeffs, freqs,
                 word: tuple[float, ...] = (), cycle_point: float = 0.0):
        coeffs = np.asarray(coeffs, dtype=complex)
        freqs = np.asarray(freqs, dtype=float)
        if coeffs.shape != (ifs.N ** depth,) or freqs.shape != coeffs.shape:
            raise ValueError("coefficient/frequency tables must have N**depth entries")
        coeffs.setflags(write=False)
        freqs.setflags(write=False)
        self.ifs = ifs
        self.depth = depth
        self.coeffs = coeffs
        self.freqs = freqs
        self.word = tuple(word)
        self.cycle_point = float(cycle_point)

    def __repr__(self):
        return (f"PiecewiseExp(depth={self.depth}, word={self.word}, "
                f"cycle_point={self.cycle_point})")

    def __call__(self, x):
        """Evaluate at attractor points; raises OutsideAttractor elsewhere."""
        if np.ndim(x) > 0:
            flat = np.asarray(x, dtype=float).ravel()
            out = np.array([self(float(v)) for v in flat], dtype=complex)
            return out.reshape(np.shape(x))
        expansion = self.ifs.digit_expansion(float(x))
        rank = self.ifs.word_rank(expansion[:self.depth])
        return self.coeffs[rank] * np.exp(2j * np.pi * self.freqs[rank] * float(x))

    def eval_on_digits(self, x: np.ndarray, digit_rows: np.ndarray) -> np.ndarray:
        """Vectorized evaluation when the digit expansions are already known."""
        if self.depth == 0:
            rank = np.zeros(len(x), dtype=int)
        else:
            powers = self.ifs.N ** np.arange(self.depth - 1, -1, -1)
            rank = digit_rows[:, :self.depth].astype(int) @ powers
        return self.coeffs[rank] * np.exp(2j * np.pi * self.freqs[rank] * x)

    def refine(self, depth: int) -> "PiecewiseExp":
        """Equivalent representation on the finer cylinders of the given depth."""
        if depth < self.depth:
            raise ValueError("can only refine to a larger depth")
        reps = self.ifs.N ** (depth - self.depth)
        return PiecewiseExp(self.ifs, depth, np.repeat(self.coeffs, reps),
                            np.repeat(self.freqs, reps), self.word, self.cycle_point)

    def collapse(self) -> "PiecewiseExp":
        """Smallest-depth representation with the same quantized data."""
        coeffs, freqs, depth = self.coeffs, self.freqs, self.depth
        n = self.ifs.N
        while depth > 0:
            c = coeffs.reshape(-1, n)
            f = freqs.reshape(-1, n)
            qc, qf = _quantize(c), _quantize(f)
            if not (np.all(qc == qc[:, :1]) and np.all(qf == qf[:, :1])):
                break
            coeffs, freqs, depth = c[:, 0], f[:, 0], depth - 1
        return PiecewiseExp(self.ifs, depth, coeffs, freqs, self.word, self.cycle_point)

    def structural_key(self) -> tuple:
        p = self.collapse()
        return (p.depth,
                _quantize(p.freqs).tobytes(),
                _quantize(p.coeffs.real).tobytes(),
                _quantize(p.coeffs.imag).tobytes())


def pure_exponential(ifs: AffineIFS1D, frequency: float,
                     word: tuple[float, ...] = (), cycle_point: float = 0.0) -> PiecewiseExp:
    """Depth-0 element ``exp(2*pi*i*frequency*x)``."""
    return PiecewiseExp(ifs, 0, [1.0 + 0.0j], [float(frequency)], word, cycle_point)


def extend_by_isometry(pe: PiecewiseExp, l: float) -> PiecewiseExp:
    """Symbolic image under ``f -> exp(2*pi*i*l*x) * f(r(x))``; depth grows by 1.

    On the cylinder with first digit b the image of ``g * exp(2*pi*i*f*.)``
    picks up frequency ``l + R*f`` and coefficient ``g * exp(-2*pi*i*f*b)``.
    """
    ifs = pe.ifs
    freq_tail = float(l) + ifs.R * pe.freqs
    coeffs = np.concatenate([pe.coeffs * np.exp(-2j * np.pi * pe.freqs * b)
                             for b in ifs.digits])
    freqs = np.concatenate([freq_tail for _ in ifs.digits])
    return PiecewiseExp(ifs, pe.depth + 1, coeffs, freqs,
                        (float(l),) + pe.word, pe.cycle_point)


def adjoint_step(pe: PiecewiseExp, l: float) -> PiecewiseExp | None:
    """Symbolic image under the adjoint isometry, or None when not closed.

    Works whenever, within every cylinder one level up, the child frequencies
    agree (true for all generated basis elements); otherwise the adjoint is a
    sum of exponentials with different frequencies and the caller must fall
    back to pointwise evaluation.
    """
    ifs = pe.ifs
    p = pe.refine(1) if pe.depth == 0 else pe
    n = ifs.N
    c = p.coeffs.reshape(n, -1)
    f = p.freqs.reshape(n, -1)
    if np.any(_quantize(f) != _quantize(f[:1])):
        return None
    new_freqs = (f[0] - float(l)) / ifs.R
    phases = np.exp(2j * np.pi * np.outer(ifs.digit_array / ifs.R, f[0] - float(l)))
    new_coeffs = (c * phases).mean(axis=0)
    return PiecewiseExp(ifs, p.depth - 1, new_coeffs, new_freqs, (), pe.cycle_point)


def closed_form_phase(b_digits: Sequence[float], letters: Sequence[float],
                      c: float, R: float) -> float:
    """Phase exponent of a generated element on one cylinder.

    For the element built from operator letters ``l_1..l_n`` and cycle point
    ``c``, restricted to the cylinder with digit values ``b_1..b_n``, the
    coefficient is ``exp(2*pi*i*alpha)`` with::

        alpha = -[b_1*l_2 + (R*b_1 + b_2)*l_3 + ...
                  + (R**(n-2)*b_1 + ... + b_{n-1})*l_n]
                + (R**(n-1)*b_1 + ... + b_n) * c
    """
    if len(b_digits) != len(letters):
        raise ValueError("digit word and letter word must have equal length")
    alpha = 0.0
    prefix = 0.0
    for k, (b, l) in enumerate(zip(b_digits, letters)):
        if k >= 1:
            alpha -= prefix * l
        prefix = prefix * R + b
    return alpha + prefix * float(c)


def closed_form_frequency(letters: Sequence[float], c: float, R: float) -> float:
    """Frequency ``l_1 + R*l_2 + ... + R**(n-1)*l_n - R**n * c``."""
    f = 0.0
    for l in reversed(list(letters)):
        f = f * R + l
    return f - float(c) * R ** len(list(letters))


def closed_form_element(ifs: AffineIFS1D, letters: Sequence[float],
                        c: float) -> PiecewiseExp:
    """Element built directly from the closed-form phase and frequency.

    Independent of :func:`extend_by_isometry`; used to cross-check it.
    """
    letters = [float(l) for l in letters]
    n = len(letters)
    freq = closed_form_frequency(letters, c, ifs.R)
    count = ifs.N ** n
    coeffs = np.empty(count, dtype=complex)
    for rank in range(count):
        idxs = [(rank // ifs.N ** (n - 1 - k)) % ifs.N for k in range(n)]
        b_digits = [ifs.digits[j] for j in idxs]
        alpha = closed_form_phase(b_digits, letters, c, ifs.R)
        coeffs[rank] = np.exp(2j * np.pi * alpha)
    return PiecewiseExp(ifs, n, coeffs, np.full(count, freq), tuple(letters), c)


def gen_fractal_onb(ifs: AffineIFS1D, L: Sequence[float], cycles: Iterable,
                    max_len: int) -> list[PiecewiseExp]:
    """Breadth-first closure of the cycle exponentials under the isometries.

    ``cycles`` is an iterable of extreme cycles (anything exposing ``points``,
    or bare point sequences).  Words up to length ``max_len`` are applied and
    structurally equal elements are kept once; elements are returned in
    discovery order, collapsed to their smallest depth.
    """
    if max_len < 0:
        raise ValueError("max_len must be nonnegative")
    seen: dict[tuple, PiecewiseExp] = {}
    order: list[PiecewiseExp] = []

    def add(p: PiecewiseExp) -> PiecewiseExp | None:
        q = p.collapse()
        key = q.structural_key()
        if key in seen:
            return None
        seen[key] = q
        order.append(q)
        return q

    frontier = []
    for cyc in cycles:
        for c in getattr(cyc, "points", cyc):
            q = add(pure_exponential(ifs, -float(c) + 0.0, (), float(c)))
            if q is not None:
                frontier.append(q)
    for _ in range(max_len):
        next_frontier = []
        for p in frontier:
            for l in L:
                q = add(extend_by_isometry(p, float(l)))
                if q is not None:
                    next_frontier.append(q)
        frontier = next_frontier
    return order


def integer_spectrum(ifs: AffineIFS1D, L: Sequence[float], cycles: Iterable,
                     max_len: int) -> list[float]:
    """Frequency set of the generated basis when R, B, L are all integers.

    Every generated element is then a pure exponential (the coefficients are
    unimodular constants absorbed as phases), so the basis is described by its
    sorted frequency set.
    """
    if not float(ifs.R).is_integer() or any(not float(b).is_integer() for b in ifs.digits):
        raise NonIntegerInput("R and B must be integers")
    if any(not float(l).is_integer() for l in L):
        raise NonIntegerInput("L must consist of integers")
    freqs = []
    for el in gen_fractal_onb(ifs, L, cycles, max_len):
        if el.depth != 0:
            raise AssertionError("integer systems must generate pure exponentials")
        freqs.append(float(el.freqs[0]))
    out = sorted(freqs)
    if len(set(out)) != len(out):
        raise AssertionError("generated frequencies must be pairwise distinct")
    return out


# ----------------------------------------------------------------------
# generalized Walsh bases
# ----------------------------------------------------------------------

def unit_interval_ifs(N: int) -> AffineIFS1D:
    """The system with digits 0..N-1 and scale N; its attractor is [0, 1]."""
    return AffineIFS1D(N, range(N))


class StepWalsh:
    """Step function on [0, 1] constant on ``N**k`` equal subintervals.

    ``word`` records the generating word of filter indices; ``values`` may be
    stored at a smaller depth than ``len(word)`` when trailing blocks agree.
    """

    def __init__(self, N: int, values, word: tuple[int, ...] = ()):
        values = np.asarray(values, dtype=complex)
        depth = 0 if values.size == 1 else round(math.log(values.size, N))
        if N ** depth != values.size:
            raise ValueError(f"value table size {values.size} is not a power of {N}")
        values.setflags(write=False)
        self.N = int(N)
        self.values = values
        self.depth = depth
        self.word = tuple(int(i) for i in word)

    def __repr__(self):
        return f"StepWalsh(N={self.N}, depth={self.depth}, word={self.word})"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.clip(np.floor(x * self.values.size).astype(int), 0, self.values.size - 1)
        out = self.values[idx]
        return complex(out) if out.ndim == 0 else out

    def refine(self, depth: int) -> np.ndarray:
        """Value table on the ``N**depth`` grid."""
        if depth < self.depth:
            raise ValueError("can only refine to a larger depth")
        return np.repeat(self.values, self.N ** (depth - self.depth))

    def collapse(self) -> "StepWalsh":
        values = self.values
        while values.size > 1:
            v = values.reshape(-1, self.N)
            q = _quantize(v.real) + 1j * _quantize(v.imag)
            if not np.all(q == q[:, :1]):
                break
            values = v[:, 0]
        return StepWalsh(self.N, values, self.word)

    def structural_key(self) -> tuple:
        s = self.collapse()
        return (s.values.size,
                _quantize(s.values.real).tobytes(),
                _quantize(s.values.imag).tobytes())

    def to_piecewise_exp(self, ifs: AffineIFS1D | None = None) -> PiecewiseExp:
        """View as a piecewise exponential (frequency 0) over the digit system."""
        if ifs is None:
            ifs = unit_interval_ifs(self.N)
        return PiecewiseExp(ifs, self.depth, self.values,
                            np.zeros(self.values.size),
                            tuple(float(i) for i in self.word))


def walsh_filters(A: UnitaryMatrix) -> QMFBasis:
    """Step filters ``m_i = sqrt(N) * sum_j A[i, j] * chi_[j/N, (j+1)/N)``.

    The constant first row makes ``m_0 == 1``; the family is a QMF basis.
    """
    if not A.first_row_constant:
        raise FirstRowNotConstant("matrix first row must be constant 1/sqrt(N)")
    root_n = math.sqrt(A.N)
    return QMFBasis([StepFilter(root_n * A.entries[i]) for i in range(A.N)])


def walsh_extend(sw: StepWalsh, A: UnitaryMatrix, i: int) -> StepWalsh:
    """Symbolic image of a step function under the i-th Walsh isometry."""
    row = math.sqrt(A.N) * A.entries[i]
    return StepWalsh(A.N, np.kron(row, sw.values), (i,) + sw.word)


def walsh_adjoint_step(sw: StepWalsh, A: UnitaryMatrix, i: int) -> StepWalsh:
    """Symbolic image under the adjoint of the i-th Walsh isometry."""
    v = sw.values if sw.depth >= 1 else np.repeat(sw.values, A.N)
    blocks = v.reshape(A.N, -1)
    row = math.sqrt(A.N) * A.entries[i]
    return StepWalsh(A.N, np.conj(row) @ blocks / A.N, ())


def walsh_value(A: UnitaryMatrix, word: Sequence[int], k: int) -> complex:
    """Value of the word's step function on grid cell ``k`` of ``N**n``.

    ``k`` decomposes into base-N digits ``j_0..j_{n-1}`` (most significant
    first) and the value is ``sqrt(N**n) * a[i_0, j_0] * ... * a[i_{n-1},
    j_{n-1}]``, a scaled tensor-power entry of the matrix.
    """
    n = len(word)
    if not 0 <= k < A.N ** n:
        raise IndexOutOfRange(f"grid index {k} outside [0, {A.N ** n})")
    out = complex(math.sqrt(A.N ** n))
    rest = k
    for t, i in enumerate(word):
        j = (rest // A.N ** (n - 1 - t)) % A.N
        out *= A.entries[int(i), j]
    return out


def tensor_power(A: UnitaryMatrix | np.ndarray, n: int) -> np.ndarray:
    """n-fold tensor power; entry ``[sum i_t N^t, sum j_t N^t]`` is the product
    of the ``a[i_t, j_t]``."""
    entries = A.entries if isinstance(A, UnitaryMatrix) else np.asarray(A)
    out = np.ones((1, 1), dtype=complex)
    for _ in range(n):
        out = np.kron(out, entries)
    return out


def gen_walsh_basis(A: UnitaryMatrix, max_len: int) -> list[StepWalsh]:
    """All step functions generated by words up to ``max_len``, deduplicated.

    Since the 0-th isometry fixes the constant function, words differing by
    trailing zeros coincide; after deduplication a horizon of ``n`` yields
    exactly ``N**n`` functions.
    """
    if not A.first_row_constant:
        raise FirstRowNotConstant("matrix first row must be constant 1/sqrt(N)")
    if max_len < 0:
        raise ValueError("max_len must be nonnegative")
    seen: dict[tuple, StepWalsh] = {}
    order: list[StepWalsh] = []

    def add(s: StepWalsh) -> StepWalsh | None:
        q = s.collapse()
        key = q.structural_key()
        if key in seen:
            return None
        seen[key] = q
        order.append(q)
        return q

    frontier = [add(StepWalsh(A.N, [1.0 + 0.0j], ()))]
    for _ in range(max_len):
        next_frontier = []
        for s in frontier:
            for i in range(A.N):
                q = add(walsh_extend(s, A, i))
                if q is not None:
                    next_frontier.append(q)
        frontier = next_frontier
    return order
