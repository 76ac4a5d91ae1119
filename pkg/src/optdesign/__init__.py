"""Weighted optimal designs for polynomial regression.

The package solves D-optimal design problems on compact subsets of R^d
and C^d, certifies them through the Kiefer-Wolfowitz equivalence, and
relates the resulting designs to weighted Fekete points, s-th order
diameters, and classical equilibrium measures.
"""

from .asymptotics import (
    ConvergenceReport,
    SweepRow,
    concavity_probe,
    convergence_sweep,
    f_of_t,
    first_derivative_residual,
    kolmogorov_distance,
    moment_distance,
)
from .basis import (
    ConditioningWarning,
    PolyBasis,
    VandermondeResult,
    degree_sum,
    eval_basis,
    eval_basis_many,
    monomial_basis,
    multi_indices,
    space_dimension,
    stabilized_basis,
    vandermonde,
)
from .equilibrium import (
    EquilibriumMeasure,
    arcsine,
    ball_measure,
    cube_measure,
    eq_cdf,
    eq_density,
    eq_moment,
    eq_moment_mixed,
    simplex_measure,
    weighted_ball_green,
    weighted_ball_measure,
)
from .fekete import FeketeResult, TfdRow, approx_fekete, sth_diameter, tfd_table, tfd_to_csv
from .gram import (
    ChristoffelEvaluator,
    MomentMatrix,
    SingularGramError,
    christoffel,
    christoffel_many,
    moment_matrix,
    orthonormal_factor,
)
from .measure import (
    AdmissibilityReport,
    DesignSpace,
    DiscreteDesign,
    PruneResult,
    WeightFunction,
    ball,
    basis_for_space,
    callable_weight,
    check_admissible,
    cube,
    custom_grid,
    design_from_json,
    design_to_json,
    disk,
    gaussian_weight,
    interval,
    make_design,
    prune_and_merge,
    simplex,
    table_weight,
    uniform_design,
    unit_weight,
    weight_from_json,
    weight_to_json,
)
from .optimal import (
    AdmissibilityError,
    GValue,
    OptimalResult,
    d_optimal,
    g_value,
    vdm_integral_christoffel,
    vdm_integral_det,
)
from .simulate import (
    ExperimentStats,
    PredictionRow,
    RegressionExperiment,
    VarianceCheck,
    apportion,
    simulate_regression,
    variance_identity_check,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # basis
    "ConditioningWarning",
    "PolyBasis",
    "VandermondeResult",
    "degree_sum",
    "eval_basis",
    "eval_basis_many",
    "monomial_basis",
    "multi_indices",
    "space_dimension",
    "stabilized_basis",
    "vandermonde",
    # spaces, weights, designs
    "AdmissibilityReport",
    "DesignSpace",
    "DiscreteDesign",
    "PruneResult",
    "WeightFunction",
    "ball",
    "basis_for_space",
    "callable_weight",
    "check_admissible",
    "cube",
    "custom_grid",
    "design_from_json",
    "design_to_json",
    "disk",
    "gaussian_weight",
    "interval",
    "make_design",
    "prune_and_merge",
    "simplex",
    "table_weight",
    "uniform_design",
    "unit_weight",
    "weight_from_json",
    "weight_to_json",
    # Gram / Christoffel
    "ChristoffelEvaluator",
    "MomentMatrix",
    "SingularGramError",
    "christoffel",
    "christoffel_many",
    "moment_matrix",
    "orthonormal_factor",
    # optimisation
    "AdmissibilityError",
    "GValue",
    "OptimalResult",
    "d_optimal",
    "g_value",
    "vdm_integral_christoffel",
    "vdm_integral_det",
    # Fekete points and diameters
    "FeketeResult",
    "TfdRow",
    "approx_fekete",
    "sth_diameter",
    "tfd_table",
    "tfd_to_csv",
    # equilibrium measures
    "EquilibriumMeasure",
    "arcsine",
    "ball_measure",
    "cube_measure",
    "eq_cdf",
    "eq_density",
    "eq_moment",
    "eq_moment_mixed",
    "simplex_measure",
    "weighted_ball_green",
    "weighted_ball_measure",
    # asymptotics
    "ConvergenceReport",
    "SweepRow",
    "concavity_probe",
    "convergence_sweep",
    "f_of_t",
    "first_derivative_residual",
    "kolmogorov_distance",
    "moment_distance",
    # simulation
    "ExperimentStats",
    "PredictionRow",
    "RegressionExperiment",
    "VarianceCheck",
    "apportion",
    "simulate_regression",
    "variance_identity_check",
]
