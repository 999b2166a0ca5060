"""
Mean oscillation of Gilbarg-Serrin coefficients at the origin
Ball means of g, the matrix oscillation omega_A(r) and the Dini-mean-oscillation verdict
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import simpson

from .errors import OutOfDomain, TailTooLarge
from .moduli import LAST_DECADE
from .profiles import Family, RadialProfile, eval_g
from .quadrature import adaptive_simpson, gauss_panels, sphere_rule
from .verdicts import Rule, Status, Verdict, window_divergence

logger = logging.getLogger(__name__)

# ball-mean weights n e^{-n s} are cut at s = SPAN / n
SCALAR_SPAN = 60.0
CURVE_SPAN = 36.0
TAIL_RTOL = 1e-10
PERIOD = 2.0 * math.pi


class MatrixNorm(Enum):
    SPECTRAL = "spectral"
    FROBENIUS = "frobenius"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class OscillationCurve:
    n: int
    t_grid: np.ndarray
    gtilde: np.ndarray
    g_minus_gtilde: np.ndarray
    omega_A: np.ndarray
    matrix_norm: MatrixNorm
    tail_bound: float

    @property
    def r_grid(self) -> np.ndarray:
        return np.exp(-self.t_grid)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "t": self.t_grid,
            "r": self.r_grid,
            "gtilde": self.gtilde,
            "g_minus_gtilde": self.g_minus_gtilde,
            "omega_A": self.omega_A,
        })


def theta_mean_norm(n: int, norm: MatrixNorm = MatrixNorm.SPECTRAL) -> float:
    """|| theta theta^T - I/n || (the same for every direction)"""
    if norm is MatrixNorm.SPECTRAL:
        return max(1.0 - 1.0 / n, 1.0 / n)
    return math.sqrt((n - 1) / n)


def _matrix_norms(M: np.ndarray, norm: MatrixNorm) -> np.ndarray:
    if norm is MatrixNorm.SPECTRAL:
        return np.max(np.abs(np.linalg.eigvalsh(M)), axis=-1)
    return np.linalg.norm(M, ord="fro", axis=(-2, -1))


def _radius_to_t(p: RadialProfile, r: float) -> float:
    if not r > 0:
        raise OutOfDomain(f"radius must be positive, got {r}")
    t_r = -math.log(r)
    if not p.t_min - 1e-9 <= t_r < p.t_max:
        raise OutOfDomain(f"r={r:.6g} outside (e^-{p.t_max:.4g}, e^-{p.t_min:.4g}]")
    return max(t_r, p.t_min)


def ball_mean(p: RadialProfile, n: Optional[int], r: float) -> float:
    """n e^{n t_r} * integral over [t_r, inf) of g e^{-n tau}

    Raises:
        TailTooLarge: when sup|g| e^{-n (t_end - t_r)} exceeds 1e-10 |result|
    """
    n = p.n if n is None else n
    t_r = _radius_to_t(p, r)
    t_end = min(p.t_max, t_r + SCALAR_SPAN / n)
    body = adaptive_simpson(lambda tau: n * eval_g(p, tau) * math.exp(-n * (tau - t_r)), t_r, t_end).value
    tail_weight = math.exp(-n * (t_end - t_r))
    result = body + eval_g(p, t_end) * tail_weight
    bound = p.sup_abs * tail_weight
    if bound > TAIL_RTOL * abs(result):
        raise TailTooLarge(f"tail bound {bound:.3e} vs ball mean {result:.3e} at r={r:.6g}")
    return result


def _sphere(n: int) -> Tuple[np.ndarray, np.ndarray]:
    # the norm is rotation invariant in theta, so a coarse rule is exact
    return sphere_rule(n, n_polar=4, n_azimuth=8)


def _shell_norms(g_values: np.ndarray, gtilde: np.ndarray, n: int, norm: MatrixNorm) -> np.ndarray:
    """Sphere mean of ||g Theta - gtilde I/n|| for matching leading shapes"""
    theta, weights = _sphere(n)
    Theta = theta[:, :, None] * theta[:, None, :]
    M = (g_values[..., None, None, None] * Theta
         - (gtilde[..., None, None, None] / n) * np.eye(n))
    return _matrix_norms(M, norm) @ weights


def matrix_mean_oscillation_at_zero(p: RadialProfile, n: Optional[int], r: float,
                                    norm: MatrixNorm = MatrixNorm.SPECTRAL) -> float:
    """Ball average of ||g(rho) Theta - gtilde(r) I/n|| over B_r(0)"""
    n = p.n if n is None else n
    gt = ball_mean(p, n, r)
    t_r = _radius_to_t(p, r)
    t_end = min(p.t_max, t_r + SCALAR_SPAN / n)
    nodes, weights = gauss_panels(t_r, t_end, width=0.5, order=8)
    radial = n * np.exp(-n * (nodes - t_r)) * weights
    g_nodes = np.asarray(eval_g(p, nodes))
    shells = _shell_norms(g_nodes, np.full(nodes.shape, gt), n, norm)
    tail_weight = math.exp(-n * (t_end - t_r))
    edge = _shell_norms(np.array([eval_g(p, t_end)]), np.array([gt]), n, norm)[0]
    omega = float(radial @ shells) + edge * tail_weight
    bound = (p.sup_abs + abs(gt)) * tail_weight
    if bound > TAIL_RTOL * abs(omega):
        raise TailTooLarge(f"oscillation tail bound {bound:.3e} vs {omega:.3e}")
    return omega


def _curve_offsets(n: int) -> Tuple[np.ndarray, np.ndarray, float]:
    span = CURVE_SPAN / n
    s, w = gauss_panels(0.0, span, width=0.5, order=8)
    return s, n * np.exp(-n * s) * w, span


def ball_means(p: RadialProfile, n: int, t: np.ndarray) -> np.ndarray:
    """Vectorized ball means on a t-array (needs t + 36/n <= t_max)"""
    s, ws, span = _curve_offsets(n)
    t = np.asarray(t, dtype=float)
    g = np.asarray(eval_g(p, t[..., None] + s))
    return g @ ws + np.asarray(eval_g(p, t + span)) * math.exp(-n * span)


def oscillation_curve(p: RadialProfile, n: Optional[int] = None, t_grid: Optional[np.ndarray] = None,
                      norm: MatrixNorm = MatrixNorm.SPECTRAL, points: int = 64) -> OscillationCurve:
    """gtilde, g - gtilde and omega_A on a t-grid, all radii at once"""
    n = p.n if n is None else n
    s, ws, span = _curve_offsets(n)
    if t_grid is None:
        t_hi = p.t_max - span
        if t_hi <= p.t_min:
            raise OutOfDomain(f"window too short for oscillation curve (needs > {span:.4g} in t)")
        t_grid = np.linspace(p.t_min, t_hi, points)
    t = np.asarray(t_grid, dtype=float)

    g_inner = np.asarray(eval_g(p, t[:, None] + s))
    g_edge = np.asarray(eval_g(p, t + span))
    tail_weight = math.exp(-n * span)
    gtilde = g_inner @ ws + g_edge * tail_weight

    shells = _shell_norms(g_inner, np.repeat(gtilde[:, None], s.size, axis=1), n, norm)
    edge = _shell_norms(g_edge, gtilde, n, norm)
    omega = shells @ ws + edge * tail_weight

    logger.debug(f"📊 Oscillation curve {p.family}: {t.size} radii, max omega {omega.max():.4g}")
    return OscillationCurve(
        n=n,
        t_grid=t,
        gtilde=gtilde,
        g_minus_gtilde=np.asarray(eval_g(p, t)) - gtilde,
        omega_A=omega,
        matrix_norm=norm,
        tail_bound=float(p.sup_abs * tail_weight),
    )


def oscillation_lower_bound(p: RadialProfile, n: Optional[int], t: np.ndarray,
                            norm: MatrixNorm = MatrixNorm.SPECTRAL) -> np.ndarray:
    """Ball average of |g| ||Theta - I/n|| - |g - gtilde| ||I/n|| (a lower bound for omega_A)"""
    n = p.n if n is None else n
    s, ws, span = _curve_offsets(n)
    t = np.asarray(t, dtype=float)
    g_inner = np.asarray(eval_g(p, t[:, None] + s))
    gtilde = ball_means(p, n, t)
    identity_norm = (1.0 / n) if norm is MatrixNorm.SPECTRAL else 1.0 / math.sqrt(n)
    pointwise = np.abs(g_inner) * theta_mean_norm(n, norm) - np.abs(g_inner - gtilde[:, None]) * identity_norm
    return pointwise @ ws


def _dmo_holds(p: RadialProfile) -> Optional[bool]:
    f = p.family
    if f is Family.ZERO:
        return True
    if f is Family.CONST:
        return p.c == 0.0
    if f in (Family.EX1_POS, Family.EX1_NEG):
        return p.gamma > 1.0
    if f is Family.EX2:
        return p.beta > 1.0
    if f is Family.EX3:
        return False
    return None


def dmo_test(p: RadialProfile, n: Optional[int] = None, norm: MatrixNorm = MatrixNorm.SPECTRAL,
             curve: Optional[OscillationCurve] = None) -> Verdict:
    """Dini mean oscillation at 0: integral of omega_A in t"""
    n = p.n if n is None else n
    analytic = _dmo_holds(p)
    try:
        curve = curve or oscillation_curve(p, n, norm=norm)
    except OutOfDomain as e:
        logger.warning(f"⚠️ No oscillation window: {e}")
        if analytic is None:
            return Verdict(Status.INCONCLUSIVE, {}, Rule.MEAN_OSCILLATION)
        return Verdict(Status.from_bool(analytic), {}, Rule.MEAN_OSCILLATION)

    t = curve.t_grid
    partial = float(simpson(curve.omega_A, x=t))
    decade = t >= t[-1] - LAST_DECADE
    tail = float(simpson(curve.omega_A[decade], x=t[decade])) if decade.sum() >= 2 else 0.0
    evidence = {"omega_integral": partial, "last_decade_increment": tail, "t_end": float(t[-1])}
    if analytic is None:
        status = window_divergence(partial, trend=tail, cauchy=abs(tail))
    else:
        status = Status.from_bool(analytic)
    return Verdict(status, evidence, Rule.MEAN_OSCILLATION)


def _ex2_profile(beta: float, n: int, t: float) -> RadialProfile:
    return RadialProfile.ex2(beta, n=n, t_max=max(t + (SCALAR_SPAN + 10.0) / n, 40.0))


def _ex2_remainder(beta: float, n: int, t: float) -> float:
    """Integration-by-parts remainder of the log-sine ball mean"""
    span = SCALAR_SPAN / n
    integral = adaptive_simpson(
        lambda tau: n * (math.cos(tau) + n * math.sin(tau)) * tau ** (-beta - 1.0) * math.exp(-n * (tau - t)),
        t, t + span,
    ).value
    return beta * integral / (n ** 2 + 1)


def _ex2_gap(beta: float, n: int, t: float) -> Tuple[float, float]:
    p = _ex2_profile(beta, n, t)
    if t < p.t_min:
        raise OutOfDomain(f"t={t} below the window start {p.t_min:.4g}")
    quadrature = eval_g(p, t) - ball_mean(p, n, math.exp(-t))
    leading = (math.sin(t) - n * math.cos(t)) / ((n ** 2 + 1) * t ** beta)
    return quadrature, leading


def ex2_identity_residual(beta: float, n: int, t: float) -> float:
    """|(g - gtilde) by quadrature - closed form| for g = sin t / t^beta

    The closed form is the leading term (sin t - n cos t)/((n^2+1) t^beta)
    plus the exact remainder (beta/(n^2+1)) * ball mean of
    (cos + n sin) tau^{-beta-1}.
    """
    quadrature, leading = _ex2_gap(beta, n, t)
    return abs(quadrature - leading - _ex2_remainder(beta, n, t))


def ex2_leading_gap(beta: float, n: int, t: float) -> float:
    """Deviation of g - gtilde from its leading term alone, O(t^{-beta-1})"""
    quadrature, leading = _ex2_gap(beta, n, t)
    return abs(quadrature - leading)


def period_oscillation_integrals(p: RadialProfile, n: Optional[int] = None, periods: int = 10,
                                 start: Optional[float] = None) -> np.ndarray:
    """Integral of |g - gtilde| over consecutive periods of length 2 pi"""
    n = p.n if n is None else n
    start = p.t_min if start is None else start
    if start + periods * PERIOD + CURVE_SPAN / n > p.t_max:
        raise OutOfDomain(f"window too short for {periods} periods from t={start:.4g}")
    values = []
    for k in range(periods):
        nodes, weights = gauss_panels(start + k * PERIOD, start + (k + 1) * PERIOD, width=0.25, order=10)
        diff = np.asarray(eval_g(p, nodes)) - ball_means(p, n, nodes)
        values.append(float(np.abs(diff) @ weights))
    return np.array(values)
