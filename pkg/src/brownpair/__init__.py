"""Entanglement dynamics of two Brownian particles sharing a thermal bath.

The reduced two-particle state stays Gaussian, so the package propagates
covariance matrices exactly: bath kernel -> sector propagators -> Gaussian
integrals -> symplectic invariants and logarithmic negativity.
"""

from .bath import (
    BathSpec,
    DerivedParams,
    KernelTable,
    build_kernel_table,
    coupling_attenuation,
    derive_params,
    kernel_closed_form_zero_t,
    safe_t_min,
    spectral_weight,
    thermal_kernel,
)
from .cli import ScenarioConfig, load_config, parse_config, run_scenario, run_sweep, self_check
from .entanglement import (
    EntanglementResult,
    analyze,
    invariants,
    log_negativity,
    partial_transpose,
    pt_symplectic_eigenvalues,
    symplectic_eigenvalues,
)
from .errors import (
    BrownPairError,
    ConfigError,
    DegenerateTimeError,
    DomainError,
    InvalidPropagationError,
    NumericalError,
)
from .gaussian import (
    CovarianceMatrix,
    InitialStateSpec,
    assemble_covariance,
    evolve,
    initial_sectors,
    propagate_sector,
    sector_covariance,
)
from .propagator import (
    CausticError,
    SectorCoefficients,
    SectorForm,
    coefficients_cm,
    coefficients_rel,
    sector_form_cm,
    sector_form_rel,
)
from .quadrature import QuadratureConfig

__version__ = "0.1.0"
