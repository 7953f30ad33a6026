"""Two-mode bosonic steering and entanglement witnesses."""
from .errors import (
    ConditioningOnNullEvent,
    InvalidArgument,
    SteeringError,
    TruncationTooSmall,
    UnsupportedBasis,
    VacuousTest,
)
from .fock import (
    BipartiteBasis,
    Operator,
    OperatorSet,
    build_operator_set,
    expectation,
    fock,
    make_basis,
    qudit,
    two_mode_quadrature,
    variance,
)
from .lhv import (
    BoundReport,
    Cat2MomentModel,
    Cat2Ranges,
    DiscreteLhvModel,
    cat1_model_from_separable,
    cat2_predicted_moments,
    lhs_conditional_state,
    lhv_joint_probability,
    no_signaling_check,
    sample_cat2_model,
    verify_cat2_bounds,
)
from .measurement import (
    ProbTable,
    SpectralDecomposition,
    conditional_state,
    joint_probability_table,
    reduce,
    spectral_decompose,
)
from .states import (
    Category,
    DensityOperator,
    SeparableSpec,
    WernerSpec,
    check_ssr,
    mixture,
    pure_state,
    random_separable_ssr_state,
    random_ssr_state,
    separable_state,
    two_mode_squeezed_vacuum,
    werner_classify,
    werner_state,
)
from .witnesses import (
    Moments,
    WitnessReport,
    bloch_vector_test,
    category_inequality_panel,
    correlation_tests,
    evaluate_all,
    generalized_hz_test,
    hz_test,
    moments,
    quad_squeeze_test,
    spin_squeezing_test,
)

__version__ = "0.1.0"
