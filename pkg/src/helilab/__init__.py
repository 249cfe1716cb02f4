"""Helicity laboratory: Biot-Savart operators, helicity functionals,
harmonic-knot bases on solid tori, and ideal transport diagnostics on
masked Cartesian grids."""
from .biot_savart import (
    BSOptions,
    CurlInverseReport,
    bs_field,
    bs_sampled,
    loop_integral,
    vector_potential,
    verify_curl_inverse,
)
from .errors import (
    ConfigError,
    CurlMismatchWarning,
    DegenerateGridError,
    GridMismatchError,
    HelilabError,
    IntersectingCurvesError,
    NotCurlFreeError,
    OpenCurveError,
    OverlapError,
    SingularFlowError,
    SolenoidalWarning,
)
from .fields import (
    AnalyticField,
    DensityField,
    GradientField,
    HarmonicTorusField,
    LinearCombination,
    SampledField,
    SpheromakField,
    TubeField,
    curl,
    divergence,
    field_energy,
    l2_inner,
    make_harmonic_torus_field,
    make_spheromak,
    make_tube_field,
    sample,
)
from .functionals import (
    EnergyRateReport,
    HelicityReport,
    delta_h_surface,
    delta_h_volume,
    energy_rate,
    helicity_bs,
    helicity_double_integral,
    helicity_physical,
    linking_number,
    mutual_helicity,
    writhe,
)
from .geometry import (
    AxisymTorus,
    Ball,
    Circle,
    CrossSection,
    Frame,
    MaskedGrid,
    PolylineCurve,
    SurfacePatchSet,
    UnionDomain,
    boundary_samples,
    build_grid,
    contains,
    core_loop,
    cross_section,
)
from .hodge_hk import (
    CurlFreeParts,
    HKBasis,
    HKCoordinates,
    build_hk_basis,
    circulation,
    decompose_curlfree,
    delta_h_flux_circulation,
    flux,
    gram_check,
    harmonic_from_circulations,
    harmonic_from_fluxes,
    hk_project,
    inner_product_flux_circ,
)
from .mhd import (
    GaugeChoice,
    HMRateReport,
    MagneticState,
    ThinTubeReport,
    cross_helicity,
    frozen_field_drift,
    helicity_difference_mhd,
    hm_rate,
    hm_rate_fd_check,
    magnetic_bs_helicity,
    make_magnetic_state,
    potential_helicity,
    thin_tube_check,
)
from .transport import (
    Composite,
    ContinuityReport,
    DifferentialTwist,
    FlowFamily,
    FlowSample,
    RadialCompress,
    RigidRotation,
    SweepResult,
    SweepRow,
    TransportedState,
    UniformPulsation,
    conservation_sweep,
    continuity_residual,
    evaluate_flow,
    transport_pde_residual,
    transported_field,
)

__version__ = "0.1.0"
