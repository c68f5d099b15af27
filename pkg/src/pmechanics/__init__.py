"""Deformed brackets on the Heisenberg and Galilean groups.

Modules
    poly             exact sparse polynomials (the symbolic backend)
    groups           group laws, coadjoint orbits, Lie algebras
    clifford         Clifford algebras over diagonal metrics
    grid             sampled phase-space functions and group kernels
    representations  rho_hbar, derived operators, Fock-space test
    brackets         Poisson / star / ub brackets in symbol and kernel form
    dynamics         classical and deformed observable flows
    dw_field         covariant field equations, Dirac pairing, reductions
    checks           invariant checks used by ``pmech verify``
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .brackets import (
    FORMAL,
    HBAR_TO_LAMBDA,
    GaussianSymbol,
    antiderivative,
    lam_from_hbar,
    poisson_bracket,
    star_product,
    twisted_convolution,
    ub_bracket_grid,
    ub_bracket_poly,
)
from .clifford import Metric, MetricMismatchError, Multivector, generator
from .dw_field import (
    DWHamiltonian,
    DWState,
    LagrangianSpec,
    clifford_field_bracket,
    dirac_pairing,
    dw_legendre,
    dw_rhs,
    galilean_antiderivative,
    integrate_dw,
    verify_field_reduction,
)
from .dynamics import HamiltonianSpec, TrajectoryRecord, evolve_classical, evolve_observable_moyal, moyal_vs_poisson_gap
from .grid import Axis, KernelOnGroup, PhaseGrid, TwistedKernel, kernel_to_symbol, symbol_to_kernel
from .groups import (
    CoadjointPoint,
    DimensionMismatchError,
    GalileanElement,
    HeisenbergElement,
    classify_orbit,
    coadjoint,
    g_multiply,
    h_multiply,
    symplectic_form,
)
from .poly import Poly, PolyParseError, parse_observable
from .representations import dbar, derived_ops, fock_residual, rho_classical, rho_h, rho_of_kernel

__version__ = "0.1.0"

__all__ = [
    "Axis",
    "CoadjointPoint",
    "DWHamiltonian",
    "DWState",
    "DimensionMismatchError",
    "FORMAL",
    "GalileanElement",
    "GaussianSymbol",
    "HBAR_TO_LAMBDA",
    "HamiltonianSpec",
    "HeisenbergElement",
    "KERNEL_BACKEND",
    "KernelOnGroup",
    "LagrangianSpec",
    "Metric",
    "MetricMismatchError",
    "Multivector",
    "PhaseGrid",
    "Poly",
    "PolyParseError",
    "TrajectoryRecord",
    "TwistedKernel",
    "antiderivative",
    "classify_orbit",
    "clifford_field_bracket",
    "coadjoint",
    "dbar",
    "derived_ops",
    "dirac_pairing",
    "dw_legendre",
    "dw_rhs",
    "evolve_classical",
    "evolve_observable_moyal",
    "fock_residual",
    "g_multiply",
    "galilean_antiderivative",
    "generator",
    "h_multiply",
    "integrate_dw",
    "kernel_to_symbol",
    "lam_from_hbar",
    "moyal_vs_poisson_gap",
    "parse_observable",
    "poisson_bracket",
    "rho_classical",
    "rho_h",
    "rho_of_kernel",
    "star_product",
    "symbol_to_kernel",
    "symplectic_form",
    "twisted_convolution",
    "ub_bracket_grid",
    "ub_bracket_poly",
    "verify_field_reduction",
]
