"""Two hydrodynamically coupled two-link scallops at zero Reynolds number.

Individually each scallop is barred from net motion by the reciprocity of
its single shape variable; coupled through the fluid, a pair driven with a
phase offset does swim. This package assembles the interaction-corrected
resistance system, integrates the shape-driven dynamics under prescribed
strokes, and checks the resulting displacements against their analytic
small-angle predictions.
"""

from ._kernels import available_backends, backend_name
from .dynamics import (
    ControlPair,
    ExpansionCoefficients,
    FDUnstable,
    LambdaBounds,
    SingularResistance,
    constant_C,
    constant_C_tilde,
    control_vector_field,
    estimate_lambda0,
    expansion_coefficients,
    lambda_bounds,
    lie_bracket_numeric,
    solve_rates,
    square_stroke_displacement_prediction,
    theoretical_midpoint_displacement,
)
from .experiments import (
    ConfigError,
    RunConfig,
    SweepRecord,
    lambda_study,
    null_tests,
    phase_sweep,
    theory_vs_numeric_report,
)
from .geometry import (
    ModelValidityWarning,
    ScallopPairParams,
    StateRates,
    SystemState,
    link_direction,
    paired_initial_state,
    perp,
    point_on_link,
    point_velocity,
)
from .hydrodynamics import (
    LinkBlocks,
    ResistanceAssembly,
    assemble,
    force_density,
    link_blocks,
    rft_operator,
    singularity_floor,
    torque_density,
)
from .integrator import (
    AreaReport,
    ControlStroke,
    StepTooCoarse,
    Trajectory,
    TrajectorySummary,
    control_at,
    initial_state,
    integrate,
    square_vs_smooth_area_report,
)

__version__ = "0.1.0"

__all__ = [
    "AreaReport",
    "ConfigError",
    "ControlPair",
    "ControlStroke",
    "ExpansionCoefficients",
    "FDUnstable",
    "LambdaBounds",
    "LinkBlocks",
    "ModelValidityWarning",
    "ResistanceAssembly",
    "RunConfig",
    "ScallopPairParams",
    "SingularResistance",
    "StateRates",
    "StepTooCoarse",
    "SweepRecord",
    "SystemState",
    "Trajectory",
    "TrajectorySummary",
    "assemble",
    "available_backends",
    "backend_name",
    "constant_C",
    "constant_C_tilde",
    "control_at",
    "control_vector_field",
    "estimate_lambda0",
    "expansion_coefficients",
    "force_density",
    "initial_state",
    "integrate",
    "lambda_bounds",
    "lambda_study",
    "lie_bracket_numeric",
    "link_blocks",
    "link_direction",
    "null_tests",
    "paired_initial_state",
    "perp",
    "phase_sweep",
    "point_on_link",
    "point_velocity",
    "rft_operator",
    "singularity_floor",
    "solve_rates",
    "square_stroke_displacement_prediction",
    "square_vs_smooth_area_report",
    "theoretical_midpoint_displacement",
    "theory_vs_numeric_report",
    "torque_density",
]
