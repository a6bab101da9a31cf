"""Collision-model cyclic quantum heat engine with finite-dimensional baths.

The library simulates a working substance shuttled between hot and cold
baths built from ensembles of finite-dimensional Gibbs particles, with
number-conserving collision unitaries.  It covers average and
stochastic thermodynamic quantities, pseudo-thermalization cost,
effective bath dimensions and multi-cycle degradation, plus a CLI that
reproduces the standard experiment datasets.
"""

from .blocks import (
    BlockUnitary,
    SubspaceIndexing,
    assemble_full,
    build_jaynes_cummings,
    build_swap,
    matrix_conserves_number,
    subspace_dimension,
    verify_number_conservation,
)
from .channels import (
    CollisionAudit,
    CollisionChannel,
    ConvergenceError,
    apply,
    channel_matrix,
    collide_with_audit,
    pseudo_thermalize,
)
from .cycles import (
    BoundInapplicableError,
    CarnotBoundAudit,
    CycleReport,
    EngineSpec,
    FrequencySchedule,
    MultiCycleReport,
    OptimizationPoint,
    OptimizationReport,
    SimulatedCycleReport,
    SingleEnsembleResult,
    analytic_cycle,
    carnot_bound_audit,
    frequency_schedule,
    optimize_particle_dimension,
    simulate_cycle,
    simulate_many_cycles,
    single_ensemble_closed_form,
)
from .states import (
    GibbsSpec,
    PopulationState,
    gibbs_populations,
    reeb_wolf_lower_bound,
    relative_entropy,
    shannon_entropy,
    trace_distance,
)
from .trajectories import (
    CarnotConditionGrid,
    EfficiencyDistribution,
    EnumerationCapError,
    ExpectationReport,
    Trajectory,
    TrajectoryQuantities,
    carnot_condition_grid,
    enumerate_distribution,
    most_likely_trajectory_efficiency,
    sample_distribution,
    trajectory_expectations,
    trajectory_probability,
    trajectory_quantities,
)

__version__ = "0.1.0"

__all__ = [
    "BlockUnitary",
    "BoundInapplicableError",
    "CarnotBoundAudit",
    "CarnotConditionGrid",
    "CollisionAudit",
    "CollisionChannel",
    "ConvergenceError",
    "CycleReport",
    "EfficiencyDistribution",
    "EngineSpec",
    "EnumerationCapError",
    "ExpectationReport",
    "FrequencySchedule",
    "GibbsSpec",
    "MultiCycleReport",
    "OptimizationPoint",
    "OptimizationReport",
    "PopulationState",
    "SimulatedCycleReport",
    "SingleEnsembleResult",
    "SubspaceIndexing",
    "Trajectory",
    "TrajectoryQuantities",
    "analytic_cycle",
    "apply",
    "assemble_full",
    "build_jaynes_cummings",
    "build_swap",
    "carnot_bound_audit",
    "carnot_condition_grid",
    "channel_matrix",
    "collide_with_audit",
    "enumerate_distribution",
    "frequency_schedule",
    "gibbs_populations",
    "matrix_conserves_number",
    "most_likely_trajectory_efficiency",
    "optimize_particle_dimension",
    "pseudo_thermalize",
    "reeb_wolf_lower_bound",
    "relative_entropy",
    "sample_distribution",
    "shannon_entropy",
    "simulate_cycle",
    "simulate_many_cycles",
    "single_ensemble_closed_form",
    "subspace_dimension",
    "trace_distance",
    "trajectory_expectations",
    "trajectory_probability",
    "trajectory_quantities",
    "verify_number_conservation",
]
