"""Wave functions and energies by quadratures along a single trajectory.

The package splits into exact-symbolic and grid-numeric halves that check
each other:

exactalg   rational scalars, sparse Laurent polynomials, the radial-polar
           differential operators, canonical rendering and its parser
oscpert    exact ε-series for the harmonic oscillator with a monomial
           perturbation (the Γ/γ recursion tables)
coulomb    closed-form recursion for the perturbed Coulomb ground state,
           including the uniform-field (Stark) chain
trajectory classical-action grids for 1-D and separable potentials
gexpand    the g⁻¹ hierarchy S₁..S₃, E₀..E₃ by quadrature
greens     single-trajectory Green's operators and their identity checks
excited    excited-state classification and first corrections
oracle     brute-force tridiagonal eigensolver used only for validation
cli        batch front end (``trajquad`` console script)
"""

__version__ = "0.1.0"

from .exactalg import (  # noqa: F401
    MultiPoly,
    Rational,
    angular_average,
    differentiate,
    grad_dot,
    integrate_r,
    laplacian,
    parse_poly,
    poly_arith,
)
from .trajectory import (  # noqa: F401
    AxisBundle,
    Potential1D,
    TrajectoryGrid,
    build_grid,
    separable_compose,
)
from .gexpand import SeriesSolution, assemble_energy, e0, hierarchy  # noqa: F401
from .greens import (  # noqa: F401
    WaveProfile,
    apply_C,
    apply_Dbar,
    harmonic_profile,
    identity_report,
    irregular_solution,
    shift_from_boundary,
)
from .oscpert import (  # noqa: F401
    GammaTable,
    PerturbSeries,
    gamma_even,
    gamma_odd,
    solve_even,
    solve_odd,
)
from .coulomb import (  # noqa: F401
    CoulombSolution,
    assemble,
    integral_shift_check,
    solve_isotropic,
    solve_stark,
)
from .excited import (  # noqa: F401
    ExcitedSpec,
    chi0_e0,
    chi1_harmonic,
    excited_e1_numeric,
)
from .oracle import EigenResult, solve_1d, solve_radial  # noqa: F401
