"""Second-order cone programming by a short-step interior-point method,
with a simulated-readout noise model, an SVM front end, and a
scaling-experiment harness."""

from .jordan import (
    BlockVector,
    ConeDomainError,
    ConeStructure,
    SpectralDecomposition,
    StructureMismatchError,
    arw,
    cone_membership,
    identity,
    jordan_product,
    norms_and_extremes,
    power,
    quad_rep,
    spectral_decompose,
    t_rep,
)
from .socp import (
    Iterate,
    RankDeficientError,
    SocpInstance,
    central_path_distance,
    duality_gap,
    in_neighborhood,
    linear_residuals,
    scale_to_frame,
)
from .newton import (
    NewtonSystem,
    SingularSystemError,
    SolveReport,
    assemble,
    measure_kappa,
    measure_zeta,
    solve_exact,
    solve_inexact,
)
from .ipm import (
    InitialPointError,
    IpmConfig,
    IterationRecord,
    NonConvergenceError,
    SolveTrace,
    StepFailureError,
    cost_metric,
    initial_point,
    run,
    rxs_matrix,
    step,
    theta_bound,
    tomography_precision,
)
from .svm import Classifier, SvmDataset, accuracy, extract_classifier, generate, to_socp
from .experiment import (
    PowerLawFit,
    RunRecord,
    accuracy_cdf,
    fit_power_law,
    read_records_csv,
    report,
    sweep,
    write_records_csv,
)

__version__ = "0.1.0"
