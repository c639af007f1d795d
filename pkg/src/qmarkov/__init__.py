"""Verification and construction toolkit for trace-preserving quantum Markov maps.

Certificates of (non-)factorizability for channels on M_n, explicit
factorization witnesses for commuting self-adjoint Kraus families, Schur
multiplier semigroups with their small-time obstruction, square-channel
counterexample machinery, and a numerical lower-bound explorer for the
completely bounded norm of trace-coefficient maps.
"""

__version__ = "0.1.0"

from .numerics import (
    CompletePositivityError,
    DEFAULT_TOL,
    DimensionError,
    GeneratorError,
    MarkovViolationError,
    RankResult,
    ResourceLimitError,
    SearchFailureError,
    Tolerances,
    hermitian_eig,
    is_psd,
    op_norm,
    rank_of_set,
)
from .channel import (
    Channel,
    ChoiMatrix,
    MarkovReport,
    adjoint,
    choi_distance,
    choi_frobenius_distance,
    choi_of,
    compose,
    compress_check,
    kraus_canonical,
    tensor,
    tensor_power,
    verify_markov,
)
from .factorize import (
    Certificate,
    FactorizationWitness,
    Verdict,
    car_factorize,
    conv_aut_obstruction,
    jordan_wigner_involutions,
    non_factorizable_certificate,
    verify_conv_aut_combination,
    verify_witness,
    witness_residuals,
)
from .schur import (
    GramUnitaryCheck,
    SchurMatrix,
    diagonal_kraus,
    fifth_root_correlation,
    rank_two_family,
    real_commuting_kraus,
    schur_channel,
    verify_gram_unitaries,
)
from .semigroup import (
    ObstructionSample,
    SemigroupGenerator,
    cnd_check,
    cyclic_generator,
    evolve,
    obstruction_scan,
    survival_value,
)
from .rota import (
    CounterexampleResult,
    InvolutionFamily,
    SquareObstructionReport,
    build_counterexample,
    degree4_word_classes,
    involution_family,
    sphere_family,
    square_factorization_witness,
    square_hypotheses,
    squared_channel,
)
from .grothendieck import (
    Algebra,
    BesselReport,
    CbBoundResult,
    OHMap,
    cb_lower_bound,
    check_ct_one,
    frame_l4,
    frame_m3,
    frame_validate,
)
