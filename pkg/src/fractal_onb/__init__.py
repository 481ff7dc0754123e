"""Orthonormal bases from filter-bank isometries on self-similar measures.

The package builds and numerically verifies two families of orthonormal
bases: piecewise-exponential Fourier-type bases on Cantor-type fractal
measures, and generalized Walsh step-function bases on the unit interval.
"""

from .basis_builder import (
    PiecewiseExp,
    StepWalsh,
    closed_form_frequency,
    closed_form_phase,
    gen_fractal_onb,
    gen_walsh_basis,
    integer_spectrum,
    pure_exponential,
    tensor_power,
    unit_interval_ifs,
    walsh_filters,
    walsh_value,
)
from .cuntz_ops import (
    CuntzRep,
    apply_adjoint,
    apply_isometry,
    apply_word,
    exponential_rep,
    verify_cuntz,
    walsh_rep,
)
from .cycle_finder import (
    ExtremeCycle,
    candidate_interval,
    cycle_fixed_point,
    find_extreme_cycles,
)
from .errors import (
    FirstRowNotConstant,
    FractalONBError,
    GridTooCoarse,
    IndexOutOfRange,
    LengthMismatch,
    MixedSystems,
    NonIntegerInput,
    NotASpectrum,
    NotUnitary,
    OutsideAttractor,
    WrongArity,
)
from .filters import (
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
)
from .ifs_measure import (
    AffineIFS1D,
    MeasureFT,
    attractor_grid,
    check_strong_invariance,
    load_ifs_config,
    mask,
    sample_measure,
)
from .verifier import (
    GramReport,
    TransferGrid,
    dump_gram_csv,
    dump_transfer_csv,
    gram_matrix,
    inner_product,
    inner_product_mc,
    parseval_curve,
    parseval_h,
    transfer_grid,
    transfer_iterate,
)

__version__ = "0.1.0"
