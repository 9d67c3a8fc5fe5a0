"""limspec: essential spectra of band-dominated lattice operators via their
localizations at infinity."""

__version__ = "0.1.0"

from .core_ops import (  # noqa: F401
    LatticeKernel,
    LocalProbe,
    Window,
    band_mollify,
    build_schrodinger,
    centered_window,
    compactness_profile,
    compress,
    default_probe,
    local_distance,
    translate,
    wall_operator,
)
from .limit_ops import (  # noqa: F401
    DirectionSequence,
    LimitOperator,
    LimitVerdict,
    directional_limit,
    explicit_sequence,
    modulated_power_sequence,
    numeric_limit,
    operator_spectrum_sample,
    plateau_centers,
    plateau_zero_centers,
    ray_sequence,
    symbolic_limit,
)
from .lower_norm import (  # noqa: F401
    SparseDecomposition,
    SupportRegion,
    box_region,
    concentrate_translate,
    nu_local,
    nu_theta,
    sparsify,
    verify_nuc,
)
from .resolvent_alg import (  # noqa: F401
    AssociatedOperator,
    PseudoResolvent,
    associated_operator,
    check_resolvent_identity,
    detect_infinity,
    is_regular,
    resolvent_of,
    resolvent_spectrum_map,
)
from .spectra import (  # noqa: F401
    ComplexGrid,
    FredholmVerdict,
    RealGrid,
    SpectrumEstimate,
    direct_essential_estimate,
    essential_spectrum_union,
    fredholm_test,
    hausdorff_distance,
    symbol_spectrum,
    window_spectrum,
)
from .gallery import (  # noqa: F401
    GALLERY,
    AssertionOutcome,
    Scenario,
    gallery_config,
    parse_scenario,
    run_gallery,
    run_scenario,
)
from .report import (  # noqa: F401
    Report,
    canonical_json,
    config_digest,
)
