"""Numerical verification of mixed 3-Sasakian geometry.

Fields are evaluated through order-2 jets on explicit charts; curvature,
structure validators and model constructions are built on top, and a
command-line runner executes named verification suites.
"""

from .curvature import (
    CurvaturePack,
    christoffel,
    covariant_deriv_endo,
    covariant_deriv_vector,
    lemma31_residual,
    metric_compatibility,
    p_tensor,
    q_frame_sum,
    q_tensor,
    ricci,
    riemann,
    riemann_0_4,
    scalar_curvature,
    sectional,
)
from .errors import (
    BadSeedPoint,
    ConfigError,
    DegenerateMetric,
    DegeneratePlane,
    DegenerateValue,
    DegenerateVertical,
    DimensionError,
    GeometryError,
    NotSkewAdjoint,
    NullPivot,
    SamplingExhausted,
    StencilOutOfDomain,
)
from .jet_chart import Chart, Jet2, Point, ScalarField, SplitMix64, fd_oracle, jet_arith, jet_sqrt, sample_points
from .models import (
    AmbientModel,
    HypersurfaceModel,
    ProductModel,
    build_model,
    flat_mixed,
    flat_paraquaternionic,
    list_models,
    omega_wedge_check,
    perturb_structure,
    product_with_line,
    pseudo_sphere,
)
from .structures import (
    MixedThreeStructure,
    StructureReport,
    classify_contact_class,
    hv_split,
    validate_almost_paracontact_metric,
    validate_hyper_parahermitian,
    validate_mixed_3_contact,
    validate_mixed_3_sasakian,
    validate_mixed_3_structure,
)
from .suites import RunReport, SuiteSpec, emit_report, list_suites, run_suite
from .tensors import (
    EndoField,
    FormValue,
    Frame,
    MetricField,
    OneForm,
    TwoFormField,
    VectorField,
    d_oneform,
    d_twoform,
    fundamental_2form,
    lie_bracket,
    nijenhuis,
    orthonormal_frame,
    wedge_1_2,
)

__version__ = "0.1.0"
