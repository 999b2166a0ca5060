"""
Direct finite-difference oracle in the plane
Conservative 5-point scheme for (h u_t)_t + u_thetatheta = 0 on [t_min, t_cut] x [0, 2pi)
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import pandas as pd
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from regularity.errors import OutOfDomain, SingularSystem, UnsupportedDimension
from regularity.profiles import RadialProfile, eval_g

from .oracle import BoundaryData

logger = logging.getLogger(__name__)

DEFAULT_T_CUT = 12.0
MAX_T_CUT = 20.0
RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class Fd2dSolution:
    """Grid values u[i, j] at (t_i, theta_j), boundary rows included"""
    t: np.ndarray
    theta: np.ndarray
    u: np.ndarray
    residual: float

    def angular_mean(self) -> np.ndarray:
        return self.u.mean(axis=1)

    def angular_rms(self) -> np.ndarray:
        return np.sqrt((self.u ** 2).mean(axis=1))

    def relative_l2(self, reference: np.ndarray) -> float:
        """Relative L2 distance in the area measure r^2 dt dtheta"""
        weight = np.exp(-2.0 * self.t)[:, None]
        num = np.sum(weight * (self.u - reference) ** 2)
        den = np.sum(weight * reference ** 2)
        return float(np.sqrt(num / den))

    def to_frame(self) -> pd.DataFrame:
        tt, th = np.meshgrid(self.t, self.theta, indexing="ij")
        return pd.DataFrame({"t": tt.ravel(), "theta": th.ravel(), "u": self.u.ravel()})


def _radial_operator(h_half: np.ndarray, dt: float) -> sp.csr_matrix:
    """(h u_t)_t on interior nodes with h at half nodes"""
    inner = h_half[1:-1] / dt ** 2
    main = -(h_half[:-1] + h_half[1:]) / dt ** 2
    return sp.diags([inner, main, inner], [-1, 0, 1], format="csr")


def _angular_operator(n_theta: int, dtheta: float) -> sp.csr_matrix:
    """Periodic second difference in theta"""
    ones = np.ones(n_theta)
    D = sp.diags([ones[:-1], -2.0 * ones, ones[:-1]], [-1, 0, 1], format="lil")
    D[0, n_theta - 1] = 1.0
    D[n_theta - 1, 0] = 1.0
    return (D / dtheta ** 2).tocsr()


def fd2d_solve(p: RadialProfile, bd: BoundaryData, grid: Tuple[int, int] = (128, 64),
               t_cut: float = DEFAULT_T_CUT) -> Fd2dSolution:
    """Dirichlet data bd at t_min, the angular mean of bd at t_cut

    Args:
        grid: (N_r, N_theta), N_r counting both boundary rows

    Raises:
        SingularSystem: when the sparse solve fails or leaves a large residual
    """
    if bd.n != 2 or p.n != 2:
        raise UnsupportedDimension("fd2d solves the planar problem only")
    n_r, n_theta = grid
    if n_r < 64 or n_theta < 32:
        raise ValueError(f"grid {grid} below the 64 x 32 minimum")
    if not p.t_min < t_cut <= min(MAX_T_CUT, p.t_max):
        raise OutOfDomain(f"t_cut={t_cut} outside ({p.t_min:.4g}, {min(MAX_T_CUT, p.t_max)}]")

    t = np.linspace(p.t_min, t_cut, n_r)
    dt = t[1] - t[0]
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    dtheta = theta[1]
    h_half = 1.0 + np.asarray(eval_g(p, 0.5 * (t[:-1] + t[1:])))
    interior = n_r - 2

    L = (sp.kron(sp.identity(n_theta), _radial_operator(h_half, dt))
         + sp.kron(_angular_operator(n_theta, dtheta), sp.identity(interior))).tocsc()

    inner_edge = bd.evaluate(theta)
    outer_edge = bd.mean
    rhs = np.zeros((n_theta, interior))
    rhs[:, 0] -= h_half[0] * inner_edge / dt ** 2
    rhs[:, -1] -= h_half[-1] * outer_edge / dt ** 2
    rhs = rhs.ravel()

    logger.debug(f"🔧 fd2d assembled {L.shape[0]} unknowns ({n_r} x {n_theta}, t_cut={t_cut})")
    try:
        solution = spsolve(L, rhs)
    except (RuntimeError, ValueError, np.linalg.LinAlgError) as e:
        logger.error(f"❌ fd2d sparse solve failed: {e}")
        raise SingularSystem(str(e)) from e
    if not np.all(np.isfinite(solution)):
        raise SingularSystem("fd2d solve returned non-finite values")

    scale = np.linalg.norm(rhs) or 1.0
    residual = float(np.linalg.norm(L @ solution - rhs) / scale)
    if residual > RESIDUAL_TOL:
        raise SingularSystem(f"fd2d relative residual {residual:.3e} exceeds {RESIDUAL_TOL}")

    u = np.empty((n_r, n_theta))
    u[0] = inner_edge
    u[-1] = outer_edge
    u[1:-1] = solution.reshape(n_theta, interior).T
    return Fd2dSolution(t=t, theta=theta, u=u, residual=residual)
