"""laggraph: numerical geometry of Lagrangian graphs (x, grad u) in C^n.

Parses scalar functions, computes exact second-order jets, represents the
Gauss map in U(n)/SO(n) via canonical symmetric unitary matrices, evaluates
the det-fibration geometry, and checks Bernstein-type rigidity statements on
sampled box domains.
"""

from .expr import (
    DomainError,
    ExprError,
    ExprSyntaxError,
    Expression,
    JetValue,
    eval_jet,
    eval_value,
    fd_jet,
    parse,
    serialize,
)
from .grassmann import (
    BranchError,
    FiberPoint,
    GaussPoint,
    GeometryError,
    SelfTestCheck,
    SelfTestReport,
    component_index,
    coset_distance,
    det_fiber,
    is_lagrangian,
    plane_from_hessian,
    project_to_fiber0,
    sigma,
    submersion_selftest,
    tube_deviation,
)
from .fields import (
    FieldReport,
    GridDomain,
    JetGrid,
    PointAnalysis,
    analyze_point,
    cmf_residual,
    field_report,
    laplace_beltrami_residual,
    load_grid_csv,
    mean_curvature_norm,
    sample_domain,
    write_grid_csv,
)
from .bernstein import (
    CheckResult,
    ConfigError,
    TheoremVerdict,
    Tolerances,
    beta0_bound,
    check_chern,
    check_theorem1,
    check_theorem2,
    check_tube,
)
from .examples import EXAMPLE_IDS, GeneratedExample, generate_example

__version__ = "0.1.0"
