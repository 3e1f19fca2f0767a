"""Loop-coupled cavity optomechanics with a balanced loss/gain resonator pair.

A single optical cavity couples to two mechanical resonators (one lossy,
one amplified) that are also coupled to each other, closing the
interaction loop.  The library solves the pumped steady state, evaluates
the closed-form weak-probe transmission, phase dispersion and group delay,
classifies dynamical stability, tracks the mechanical supermode loci
through their exceptional point, extracts transparency-window figures of
merit, and cross-checks the frequency-domain results against direct time
integration of the fluctuation equations.
"""

from .analysis import (
    BandMetrics,
    SweepTable,
    TransmissionMap,
    band_metrics,
    delay_bandwidth_sweep,
    find_band_peak,
    gain_bandwidth_sweep,
    hwhm,
    map2d,
)
from .errors import (
    BandBoundaryError,
    BandwidthUndefinedError,
    BracketError,
    ConfigError,
    InfeasibleSteadyStateError,
    InstabilityError,
    OmitloopError,
    PhysicsError,
    PoleError,
    SingularMechanicsError,
    StencilError,
    TrackSelectionError,
    TransientError,
)
from .linear_response import (
    ProbeResponse,
    SidebandFactors,
    Spectrum,
    alpha_f_terms,
    coupling_shift,
    gamma_of,
    group_delay,
    lambda_of,
    spectrum,
    spectrum_with_state,
    transmission,
    xi_mirror_of,
    xi_of,
)
from .oracle import (
    DemodResult,
    integrate_linearized,
    oracle_compare,
    sampled_trajectory,
)
from .params import (
    CONFIG_KEYS,
    DerivedDrive,
    SystemParams,
    default_params,
    drive_amplitude,
    from_config,
    photon_energy,
    to_config,
)
from .stability import (
    EPResult,
    RootLocus,
    StabilityReport,
    build_stability_matrix,
    classify,
    classify_params,
    eigenvalue_gap,
    locate_ep,
    mechanical_root_loci,
    stability_map,
    upper_mechanical_pair,
)
from .steady_state import (
    SteadyState,
    SteadyStateDiagnostics,
    effective_shift_coefficient,
    solve_steady_state,
    steady_residual,
)

__all__ = [name for name in dir() if not name.startswith("_")]
