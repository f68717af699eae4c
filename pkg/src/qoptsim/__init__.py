"""Statevector-simulated, gradient-free optimizers over discrete loss
landscapes: mean-loss minimization via quantum minimum finding, and
sub-threshold-fraction maximization via a superposed swap test with
amplitude amplification, plus a verification and benchmarking harness."""

from .amplify import (
    AmplificationPlan,
    grover_iterate,
    plan_iterations,
    search_unknown_count,
)
from .average import average_search, dh_minimize
from .ledger import QueryLedger
from .oracles import (
    CutoffTable,
    average_loss,
    build_cutoff_table,
    build_sum_oracle,
    prepare_pstc_input,
    row_sum_fraction,
    state_overlaps,
)
from .problem import ProblemInstance, load_problem, save_problem
from .problems import (
    counterexample_instance,
    outlier_classifier_instance,
    synthetic_instance,
)
from .pstc import (
    EmptyRegionError,
    PstcConfig,
    RetryExhaustedError,
    ThetaCandidate,
    amplified_search,
    conditional_theta_distribution,
    pstc_search,
    run_swap_circuit,
    sample_candidate,
    swap_score,
)
from .report import RunReport, ScalingFit, fit_power_law
from .sim import (
    LayoutError,
    MeasurementOutcome,
    PstcLayout,
    Register,
    RegisterLayout,
    ResourceLimitError,
    StateVector,
    apply_bit_oracle,
    apply_controlled_swap,
    apply_hadamard,
    apply_phase_oracle,
    apply_reflect_zero,
    apply_value_oracle,
    apply_x,
    marginal_probability,
    measure,
    new_zero_state,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
