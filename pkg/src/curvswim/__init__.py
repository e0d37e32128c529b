"""Swimming of deformable point-mass bodies on constant-curvature surfaces.

The library computes the net rigid displacement a body gains from one
closed shape stroke, both from the conservation-law holonomy formulas and
from an independent finite-stroke integrator that enforces zero momentum
at every instant.
"""

from .body import Body, Moments, balance, moments, principal_axes, scalar_product
from .deformation import (
    gauge_fixed_linear_deformation,
    gauge_residuals,
    linear_deformation,
    parse_field_spec,
    project_gauge,
    strain_of,
)
from .errors import (
    BalanceConvergenceError,
    ChartDomainError,
    ConfigError,
    CurvswimError,
    DegenerateMomentsError,
    GaugeConditionError,
    SingularGramError,
    StrokeError,
)
from .fields import VectorField, constant_field, linear_field
from .geometry import (
    CurvatureTensor,
    Isometry,
    KillingSet,
    Surface,
    apply_isometry,
    christoffel_at,
    compose,
    exp_rigid,
    gaussian_curvature,
    geodesic_distance,
    killing_fields,
    killing_one_form,
    killing_residual,
    killing_two_form,
    metric_at,
    numeric_exterior_derivative,
    translation_killing_approx,
)
from .holonomy import (
    HolonomyResult,
    gram_matrix,
    holonomy_general,
    holonomy_linear,
    holonomy_small_swimmer,
    two_form_bracket,
)
from .integrator import (
    Stroke,
    TrajectoryRecord,
    convergence_study,
    integrate_stroke,
    momentum,
    rectangle_stroke,
    sinusoid_stroke,
)
from .scenarios import (
    BaronCatReport,
    RingSpec,
    TriangleSpec,
    baron_cat_report,
    rectangle_stroke_distance,
    ring_displacement,
    ring_simulate,
    triangle_body,
    triangle_control_fields,
    triangle_optimal_mass,
    triangle_swim_coefficient,
)

__version__ = "0.1.0"
