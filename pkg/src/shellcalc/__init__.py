"""Numerical calculus of mass-shell distributions.

Two workflows share the kernels in this package.  The stability side
pairs regulated source splits against Kallen-Lehmann spectral data and
checks that the off-shell remainder collapses as the regulator sharpens.
The counterexample side evaluates truncated correlators of a two-field
model whose heavy particle decays, builds Gram matrices of one- and
two-particle states, and Monte-Carlo integrates the decay amplitude.

The command line entry point lives in :mod:`shellcalc.cli`; programmatic
use normally starts from :func:`run_stability`, :func:`gram_matrix`, or
:func:`decay_amplitude`.
"""

from .errors import (
    ConfigError,
    DegenerateMassesError,
    InsufficientNError,
    NonConvergedError,
    OnShellVanishingError,
    PoleProximityError,
    ShellCalcError,
    SmoothnessViolationError,
    UnsupportedOrderError,
    ZeroOverlapWarning,
)
from .kinematics import FourVector, Mass, minkowski_square, off_shellness, omega
from .distributions import (
    DensityPiece,
    LineFunction,
    SpectralMeasure,
    boundary_value_pairing,
    principal_value,
    shell_energy,
    smear_mass_shell,
    spectral_pairing,
)
from .testfunctions import (
    SpatialEnvelope,
    WavePacket,
    conjugate_flip,
    constant_line,
    gaussian_line,
    make_bump,
    make_regulator,
    odd_gaussian_line,
)
from .stability import (
    ModelCurrent,
    StabilityReport,
    StabilityRow,
    YangFeldmanDecomposition,
    dominating_integral,
    in_out_difference,
    kl_norm,
    onshell_nonzero_current,
    onshell_vanishing_current,
    regulated_pairing,
    run_stability,
)
from .counterexample import (
    DecayResult,
    FieldWord,
    GramResult,
    ModelParams,
    StateFamily,
    TruncatedCorrelator,
    VACUUM,
    decay_amplitude,
    decay_packets,
    full_wightman,
    gram_matrix,
    indefiniteness_witness,
    p_factor,
    single_field_family,
    truncated_2pt,
    truncated_3pt,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "ShellCalcError",
    "ConfigError",
    "NonConvergedError",
    "SmoothnessViolationError",
    "InsufficientNError",
    "OnShellVanishingError",
    "DegenerateMassesError",
    "PoleProximityError",
    "UnsupportedOrderError",
    "ZeroOverlapWarning",
    # kinematics
    "Mass",
    "FourVector",
    "omega",
    "minkowski_square",
    "off_shellness",
    # distributions
    "LineFunction",
    "DensityPiece",
    "SpectralMeasure",
    "shell_energy",
    "smear_mass_shell",
    "principal_value",
    "boundary_value_pairing",
    "spectral_pairing",
    # test functions
    "SpatialEnvelope",
    "WavePacket",
    "conjugate_flip",
    "constant_line",
    "gaussian_line",
    "odd_gaussian_line",
    "make_bump",
    "make_regulator",
    # stability
    "ModelCurrent",
    "onshell_nonzero_current",
    "onshell_vanishing_current",
    "regulated_pairing",
    "kl_norm",
    "dominating_integral",
    "in_out_difference",
    "YangFeldmanDecomposition",
    "StabilityRow",
    "StabilityReport",
    "run_stability",
    # counterexample
    "ModelParams",
    "p_factor",
    "truncated_2pt",
    "truncated_3pt",
    "full_wightman",
    "TruncatedCorrelator",
    "FieldWord",
    "VACUUM",
    "StateFamily",
    "GramResult",
    "gram_matrix",
    "indefiniteness_witness",
    "single_field_family",
    "decay_packets",
    "DecayResult",
    "decay_amplitude",
]
