"""Frame-level verification of nullity distributions on real hypersurfaces in CP^n and CH^n."""
from .errors import (
    CatalogError,
    ContractError,
    InconsistentCurvatureError,
    NotKappaMemberError,
    NullityLabError,
    StateError,
)
from .geometry import (
    AmbientSpace,
    FramePoint,
    canonical_phi,
    commutator_A_phi,
    curvature_on_xi,
    curvature_tensor,
    gauss_curvature,
    nabla_xi,
)
from .models import (
    Family,
    ModelSpec,
    PrincipalData,
    build_frame,
    hopf_relation_residual,
    phi_partner_curvature,
    principal_data,
)
from .nonhopf import (
    Box,
    DerivativeAssignment,
    NonHopfState,
    codazzi_residuals,
    feasibility_search,
    force_kappa_nullity,
    force_km_nullity,
    kappa_contradiction_residual,
)
from .nullity import (
    NullityFamily,
    NullityFit,
    classify_model,
    fit_nullity,
    kappa_of_model,
    membership_residual,
)

__version__ = "0.1.0"
