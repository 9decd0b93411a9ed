"""Green functions of planar domains and their first-order variations.

Domain perturbations (boundary motion), operator perturbations (Helmholtz,
Schrodinger, conductivity) and convergence studies that check each
first-order formula against direct solves.
"""
from .kernels import BACKEND
from .domain import (
    BoundaryMesh,
    BoundaryPerturbation,
    Domain2D,
    DomainError,
    boundary_mesh,
    build_disk,
    build_star,
    perturb,
)
from .fields import Polynomial2D, ScalarFunction, constant, parse_polynomial, radial_square
from .pde_solver import (
    NumericGreen,
    ResonanceError,
    SolverError,
    green_beltrami_numeric,
    green_helmholtz_numeric,
    green_numeric,
    green_schrodinger_numeric,
    solve_dirichlet,
)
from .greenop import (
    KernelOperator,
    apply_T,
    estimate_T_norm,
    neumann_series_helmholtz,
    neumann_series_schrodinger,
    quadrature_mesh,
)
from .variation import (
    VariationResult,
    beltrami_delta_grad,
    beltrami_delta_lap,
    growth_dgdt,
    hadamard_delta,
    hadamard_delta_weighted,
    poisson_jensen_residual,
    sign_convention_adapter,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Polynomial2D",
    "ScalarFunction",
    "constant",
    "parse_polynomial",
    "radial_square",
    "BoundaryMesh",
    "BoundaryPerturbation",
    "Domain2D",
    "DomainError",
    "boundary_mesh",
    "build_disk",
    "build_star",
    "perturb",
    "NumericGreen",
    "ResonanceError",
    "SolverError",
    "green_beltrami_numeric",
    "green_helmholtz_numeric",
    "green_numeric",
    "green_schrodinger_numeric",
    "solve_dirichlet",
    "KernelOperator",
    "apply_T",
    "estimate_T_norm",
    "neumann_series_helmholtz",
    "neumann_series_schrodinger",
    "quadrature_mesh",
    "VariationResult",
    "beltrami_delta_grad",
    "beltrami_delta_lap",
    "growth_dgdt",
    "hadamard_delta",
    "hadamard_delta_weighted",
    "poisson_jensen_residual",
    "sign_convention_adapter",
]
