"""Fourier extension operators, k-plane transforms and the identities linking them."""

__version__ = "0.1.0"

from .errors import *  # noqa: E402,F401,F403
from .geometry import (  # noqa: E402
    AffinePlane,
    Subspace,
    coordinate_subspace,
    line,
    orthonormalize,
    project_onto,
    wedge_abs,
    wedge_abs_batch,
    wedge_gaussian_oracle,
)
from .quadrature import PRESET_N2, PRESET_N3, QuadratureRule  # noqa: E402
from .manifold import (  # noqa: E402
    FAMILIES,
    DisjointUnion,
    GraphChart,
    ParametrizedManifold,
    TransversalityResult,
    build_manifold,
    check_transversality_GT,
    check_transversality_T,
    graph_reparametrize,
    normal_frame,
    tangent_space,
)
from .density import SurfaceDensity, build_density, param_norm_sq, surface_norm_sq  # noqa: E402
from .transform import (  # noqa: E402
    DiscretePlaneMeasure,
    IdentityReport,
    PlaneIntegral,
    affine_plane,
    composed_adjoint_transform,
    extension_eval,
    plane_integral_squared,
    pushforward_measure,
    rhs_tangent_integral,
    verify_identity,
)
from .applications import (  # noqa: E402
    BLInstance,
    KPlaneWeight,
    bl_feasibility,
    convolution_identity_check,
    gt_violation_scan,
    multilinear_l2_ratio,
    product_wedge_factor,
    schrodinger_energy_scan,
    weighted_identity_check,
)
from .scenario import Scenario, emit_report, load_scenario, run_scenario  # noqa: E402
