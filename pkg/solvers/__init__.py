"""
Solvers for the radial ODE and the mode-expansion oracle
"""

from .radial_ode import RadialSolution, asymptotic_ratio, finite_energy, ode_residual, solve_Z, z_linear_bound
from .oracle import BoundaryData, Mode, ModeKind, comparison_check, lipschitz_probe, mode_reconstruction, solve_mode
from .fd2d import Fd2dSolution, fd2d_solve

__all__ = [
    'RadialSolution',
    'solve_Z',
    'ode_residual',
    'finite_energy',
    'asymptotic_ratio',
    'z_linear_bound',
    'ModeKind',
    'Mode',
    'BoundaryData',
    'solve_mode',
    'comparison_check',
    'mode_reconstruction',
    'lipschitz_probe',
    'Fd2dSolution',
    'fd2d_solve',
]
