"""Random-matrix model of random approximate unitary t-designs."""

__version__ = "0.1.0"

from .bounds import (
    B_CONSTANT,
    BoundResult,
    exponential_integral,
    global_bound,
    product_bound_delta_t,
    qubit_closed_form,
    spectral_gap_tail_sum,
    tail_bound_single,
    union_bound_delta_t,
)
from .errors import ConfigError, ResourceError
from .gt_irreps import AlgebraRep, build_algebra_rep, evaluate_irrep, weyl_character
from .moments import (
    ExperimentConfig,
    SampleTable,
    Scaling,
    design_delta,
    moment_block,
    run_empirical_experiment,
    run_model_experiment,
)
from .sampling import (
    EnsembleKind,
    GateSet,
    RngStream,
    Setting,
    haar_unitary,
    operator_norm,
    sample_ensemble,
    sample_gate_set,
    sample_model_block_norms,
)
from .spectra import DensityKind, SpectralDensity, delta_opt, density_at, kesten_moment
from .stats import conjecture_report, empirical_tail, fit_erf_tail, summarize
from .weights import (
    Weight,
    WeightClass,
    classify,
    conjugate,
    dimension_lower_bound,
    enumerate_weights,
    essential_weights,
    partition_counts,
    rep_count_by_norm,
    weyl_dimension,
)
