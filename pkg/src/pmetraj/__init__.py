"""pmetraj: Lagrangian trajectory solver for the 1-D porous medium equation.

Two fully discrete schemes for the particle-trajectory form of the equation
(a nonlinear entropy-energy scheme solved by damped Newton, and a linear
elastic-energy scheme), moving-interface tracking for compact supports,
waiting-time detection, two-support merging, closed-form references, and a
convergence/benchmark harness with CSV output.
"""
from ._backend import BACKEND
from .elastic_scheme import (
    ElasticPlan,
    assemble_elastic,
    elastic_energy,
    elastic_mass_coefficient,
    elastic_step,
    solve_tridiagonal,
)
from .entropy_scheme import (
    EntropyPlan,
    damped_step_size,
    energy_functional,
    entropy_energy,
    entropy_residual,
    entropy_step,
    mass_coefficient,
    newton_decrement,
    newton_system,
)
from .free_boundary import (
    SupportProblem,
    WaitingState,
    boundary_residuals,
    detect_meeting,
    detect_waiting_end,
    free_boundary_step,
    reconstruct_merged,
    run_waiting_time,
    waiting_ratio,
)
from .grid import (
    StaggeredGrid,
    boundary_one_sided_diff,
    density_error_weights,
    diff_edge_to_node,
    diff_node_to_edge,
    inner_edge,
    inner_node,
    node_derivative,
    norm_l2,
    norm_l2_weighted,
    norm_linf,
    trajectory_error_weights,
)
from .harness import (
    ExperimentConfig,
    SimulationRecord,
    StudyRow,
    default_ladder,
    run_convergence_study,
    run_simulation,
)
from .interp import MonotoneCubic
from .oracles import (
    barenblatt,
    barenblatt_interface,
    barenblatt_trajectory,
    exact_waiting_time,
    initial_data,
)
from .state import (
    LAMBDA_STAR,
    AdmissibilityError,
    ConfigError,
    InitialDensity,
    NewtonReport,
    SchemeConfig,
    SolverError,
    TrajectoryState,
    density_from_trajectory,
    is_admissible,
    sample_density,
)

__version__ = "0.1.0"
