"""Time-dependent three-body Casimir-Polder interaction energies.

Numerical library and CLI for the transient two- and three-body
Casimir-Polder energies of three ground-state atoms dressing themselves
in the vacuum field, with light-cone region classification and
brute-force oracles validating every analytic shortcut.
"""

from .errors import (
    CP3BodyError,
    CoincidentPoints,
    ConfigParseError,
    DegenerateGeometry,
    GeometryTooLarge,
    ImaginaryResidue,
    PoleOnAxis,
    RegionMismatch,
)
from .geometry import (
    AtomConfig,
    CausalRegion,
    TriangleGeometry,
    Window,
    classify_region,
    positions_from_distances,
    triangle_from_points,
    triangle_from_positions,
)
from .modesum import (
    BoxSpec,
    ShellRow,
    box_free_correlation,
    box_reduced_integrand_check,
    continuum_free_correlation,
    polarization_sum,
    shell_summary,
)
from .polarizability import (
    PolarizabilityModel,
    SingleResonance,
    Static,
    alpha_imag,
    alpha_real,
)
from .potentials import (
    PotentialResult,
    delta_E3_spacelike_AB,
    delta_E3_symmetrized,
    delta_E_C,
    delta_E_C_pair,
    static_three_body,
)
from .quadrature import (
    IntegralResult,
    QuadratureSpec,
    integrate_oscillatory_regularized,
    integrate_semi_infinite,
)
from .tensors import (
    DipoleTensor,
    Kernel,
    KernelKind,
    classical_dipole_tensor,
    cosine_standing,
    double_contract_with_projector,
    exponential_decay,
    exponential_grow,
    f_tensor,
    oscillatory_out,
    static_coulomb,
    triple_contract,
)

__version__ = "0.1.0"

# One documented conversion constant: energies are reported in hbar*c/L0.
# Multiply a reported value by HBAR_C_SI / L0[m] to obtain joules.
HBAR_C_SI = 3.1615267734966903e-26  # J * m
