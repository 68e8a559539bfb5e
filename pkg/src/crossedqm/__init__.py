"""Finite-truncation quantum-metric machinery for crossed products.

The package builds the algebraic crossed product of a finite-dimensional
base spectral triple by a polynomial-growth group, equips it with length
Dirac operators, Berezin averaging and the associated seminorms, and
verifies the resulting metric inequalities at explicit truncation radii.
"""

from .errors import (
    BallSizeError,
    CrossedQMError,
    DegenerateSeminormError,
    ModelMismatchError,
    ValidationError,
)
from .groups import (
    Ball,
    ElementSet,
    GroupElement,
    GroupModel,
    difference_set,
    finite_cyclic,
    folner_overlap,
    free_abelian,
    heisenberg3,
)
from .lengths import (
    MatrixLengthFunction,
    check_length_axioms,
    load_tabulated_length,
    tabulated_length,
    torus_length,
    word_length_function,
)
from .base import (
    FiniteMetricTriple,
    FiniteSpectralTriple,
    GroupAction,
    OperatorSystemSpec,
    inner_action,
    lip_triple,
    matrix_triple,
    permutation_action,
    scalar_triple,
    trivial_action,
)
from .crossed import (
    CrossedElement,
    CrossedProduct,
    SeminormReport,
    TruncatedOperator,
    norm_schedule,
)
from .linalg import hermitian_eigs, spectral_norm
from .seminorms import (
    TensorSumOperator,
    coefficient_seminorm,
    combined_seminorm,
    d_horizontal,
    d_length,
    d_vertical,
    dirac_truncation,
    horizontal_domination_check,
    parity_audit,
    represent_on_module,
    resolvent_decay_profile,
    sandwich_check,
    selfadjointness_blocks,
    tensor_commutator,
    tensor_seminorm,
    tensor_sum_dirac,
    vertical_seminorm,
)
from .berezin import (
    MKCertificate,
    MaxSpectralSeminorm,
    ScalarState,
    SearchSpace,
    VectorFunctional,
    approximation_bound_check,
    approximation_identity_check,
    averaging_state,
    averaging_vector,
    base_sector,
    berezin,
    berezin_contraction_check,
    berezin_positivity_check,
    chi_coefficient,
    coaction_slice,
    counit,
    cqms_finite_check,
    folner_convergence,
    mk_certificate,
    mk_lower,
    restricted_distance_upper,
    scalar_sector,
    seminorm_kernel_dim,
    slice_contraction_check,
    trace_state,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
