"""
Comparison ODE in log coordinates
(h v_t)_t - (n-2) h v_t - lambda v = 0 with h = 1 + g, integrated as a 2x2 linear system by RK4
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Literal, Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy.integrate import cumulative_simpson, simpson

from regularity.errors import HypothesisUnmet, SignChange, UnsupportedDimension
from regularity.moduli import total_variation
from regularity.profiles import RadialProfile, eval_dg_dt, eval_g, log_grid
from regularity.verdicts import Rule, Status, Verdict

logger = logging.getLogger(__name__)

MAX_STEP = 1e-3
GROWTH_TOL = 1e-3
TREND_TOL = 1e-3
LOG_RATIO_CEILING = 10.0
# the frozen-coefficient seed leaves an error decaying like e^{-2 (t_max - t)}
SEED_LAYER = 6.0


@dataclass(frozen=True)
class RadialSolution:
    """Grid solution: v, w = h dv/dt, and h = 1 + g at the nodes"""
    n: int
    eigenvalue: float
    t_grid: np.ndarray
    v: np.ndarray
    w: np.ndarray
    h: np.ndarray
    normalization: float = 1.0

    @property
    def r(self) -> np.ndarray:
        return np.exp(-self.t_grid)

    @property
    def v_over_r(self) -> np.ndarray:
        return self.v * np.exp(self.t_grid)

    @property
    def dv_dt(self) -> np.ndarray:
        return self.w / self.h

    def scaled(self, factor: float) -> "RadialSolution":
        return RadialSolution(self.n, self.eigenvalue, self.t_grid, self.v * factor, self.w * factor,
                              self.h, self.normalization * factor)

    def at(self, t: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        """Linear interpolation of v"""
        values = np.interp(t, self.t_grid, self.v)
        return float(values) if np.ndim(t) == 0 else values

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "t": self.t_grid,
            "r": self.r,
            "v": self.v,
            "w": self.w,
            "v_over_r": self.v_over_r,
        })


@dataclass(frozen=True)
class ClosedFormCandidate:
    """Candidate v(t) with analytic first and second t-derivatives"""
    value: Callable[[np.ndarray], np.ndarray]
    first: Callable[[np.ndarray], np.ndarray]
    second: Callable[[np.ndarray], np.ndarray]
    eigenvalue: Optional[float] = None

    @classmethod
    def power(cls, alpha: float) -> "ClosedFormCandidate":
        """v = r^alpha = e^{-alpha t}"""
        return cls(
            value=lambda t: np.exp(-alpha * t),
            first=lambda t: -alpha * np.exp(-alpha * t),
            second=lambda t: alpha ** 2 * np.exp(-alpha * t),
        )

    @classmethod
    def linear(cls) -> "ClosedFormCandidate":
        return cls.power(1.0)

    @classmethod
    def periodic_linear(cls, A: float) -> "ClosedFormCandidate":
        """v = r (A + sin|log r|)"""
        return cls(
            value=lambda t: np.exp(-t) * (A + np.sin(t)),
            first=lambda t: np.exp(-t) * (np.cos(t) - A - np.sin(t)),
            second=lambda t: np.exp(-t) * (A - 2.0 * np.cos(t)),
        )


@dataclass(frozen=True)
class AsymptoticModel:
    """Fitted c * exp(log-law) against a radial solution"""
    c_fit: float
    fit_t: float
    drift: float
    exponent: str
    t_grid: np.ndarray
    model: np.ndarray


@dataclass(frozen=True)
class ZBound:
    sup_ratio: float
    trend: float
    growth: float
    tail_spread: float
    vanishing: bool
    verdict: Verdict


def eigenvalues(g: Union[float, np.ndarray], n: int, eigenvalue: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Decaying and growing exponents of the frozen-coefficient system

    For v ~ e^{mu t} with h = 1 + g constant: h mu^2 - (n-2) h mu - lambda = 0.
    At g = 0 and lambda = n - 1 the pair is (-1, n - 1); d mu_1/dg = (n-1)/n.
    """
    lam = (n - 1) if eigenvalue is None else eigenvalue
    h = 1.0 + np.asarray(g, dtype=float)
    root = np.sqrt((n - 2) ** 2 + 4.0 * lam / h)
    return ((n - 2) - root) / 2.0, ((n - 2) + root) / 2.0


def _system_matrices(h: np.ndarray, eigenvalue: float, n: int) -> np.ndarray:
    M = np.zeros((h.size, 2, 2))
    M[:, 0, 1] = 1.0 / h
    M[:, 1, 0] = eigenvalue
    M[:, 1, 1] = n - 2
    return M


def _rk4_propagators(M_start: np.ndarray, M_mid: np.ndarray, M_end: np.ndarray, dt: float) -> np.ndarray:
    """One classical RK4 step of y' = M(t) y written as a 2x2 matrix per step"""
    eye = np.eye(2)
    K1 = M_start
    K2 = M_mid @ (eye + 0.5 * dt * K1)
    K3 = M_mid @ (eye + 0.5 * dt * K2)
    K4 = M_end @ (eye + dt * K3)
    return eye + (dt / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4)


def _march(P: np.ndarray, y0: Tuple[float, float], backward: bool) -> Tuple[np.ndarray, np.ndarray]:
    count = P.shape[0] + 1
    a, b = P[:, 0, 0].tolist(), P[:, 0, 1].tolist()
    c, d = P[:, 1, 0].tolist(), P[:, 1, 1].tolist()
    v = [0.0] * count
    w = [0.0] * count
    order = range(count - 2, -1, -1) if backward else range(count - 1)
    vi, wi = y0
    if backward:
        v[-1], w[-1] = vi, wi
    else:
        v[0], w[0] = vi, wi
    for i in order:
        vi, wi = a[i] * vi + b[i] * wi, c[i] * vi + d[i] * wi
        j = i if backward else i + 1
        v[j], w[j] = vi, wi
    return np.array(v), np.array(w)


def _grid(t_start: float, t_end: float, step: float) -> np.ndarray:
    count = int(math.ceil(abs(t_end - t_start) / step)) + 1
    return np.linspace(min(t_start, t_end), max(t_start, t_end), max(count, 2))


def _propagators(p: RadialProfile, t: np.ndarray, n: int, eigenvalue: float, backward: bool) -> Tuple[np.ndarray, np.ndarray]:
    h = 1.0 + np.asarray(eval_g(p, t))
    h_mid = 1.0 + np.asarray(eval_g(p, 0.5 * (t[:-1] + t[1:])))
    M_nodes = _system_matrices(h, eigenvalue, n)
    M_mid = _system_matrices(h_mid, eigenvalue, n)
    dt = float(t[1] - t[0])
    if backward:
        return _rk4_propagators(M_nodes[1:], M_mid, M_nodes[:-1], -dt), h
    return _rk4_propagators(M_nodes[:-1], M_mid, M_nodes[1:], dt), h


def shoot(p: RadialProfile, n: int, t_start: float, v0: float, w0: float, t_end: float,
          step: float = MAX_STEP, eigenvalue: Optional[float] = None) -> RadialSolution:
    """Integrate from (v0, w0) at t_start to t_end in either direction"""
    lam = float(n - 1 if eigenvalue is None else eigenvalue)
    t = _grid(t_start, t_end, step)
    backward = t_end < t_start
    P, h = _propagators(p, t, n, lam, backward)
    v, w = _march(P, (v0, w0), backward)
    return RadialSolution(n=n, eigenvalue=lam, t_grid=t, v=v, w=w, h=h)


def integrate_backward(p: RadialProfile, n: int, step: float = MAX_STEP,
                       eigenvalue: Optional[float] = None) -> RadialSolution:
    """Finite-energy solution, unnormalized, seeded on the decaying eigenvector at t_max

    The seed uses the frozen-coefficient eigenvector at t_max, which reduces
    to (v, w) = (v, -(1 + g) v) when g(t_max) = 0 and lambda = n - 1.
    """
    lam = float(n - 1 if eigenvalue is None else eigenvalue)
    g_end = float(eval_g(p, p.t_max))
    mu, _ = eigenvalues(g_end, n, lam)
    # keep v inside the float range across the whole window
    v0 = math.exp(0.5 * float(mu) * (p.t_max - p.t_min))
    w0 = (1.0 + g_end) * float(mu) * v0
    return shoot(p, n, p.t_max, v0, w0, p.t_min, step, lam)


def _check_dimension(n: int) -> None:
    if n < 2:
        raise UnsupportedDimension(f"comparison ODE needs n >= 2, got {n}")


def solve_Z(p: RadialProfile, n: Optional[int] = None, step: float = MAX_STEP) -> RadialSolution:
    """Positive finite-energy solution normalized so that Z(r_max) = r_max

    Raises:
        SignChange: if v changes sign on the grid
    """
    n = p.n if n is None else n
    _check_dimension(n)
    if not 0 < step <= MAX_STEP:
        raise ValueError(f"step must lie in (0, {MAX_STEP}], got {step}")
    raw = integrate_backward(p, n, step)
    if not (np.all(raw.v > 0) or np.all(raw.v < 0)):
        raise SignChange(f"Z changes sign for {p.family} (n={n}, step={step})")
    sol = raw.scaled(math.exp(-p.t_min) / raw.v[0])
    logger.debug(f"✅ solve_Z {p.family}: {sol.t_grid.size} nodes, Z/r in "
                 f"[{sol.v_over_r.min():.6g}, {sol.v_over_r.max():.6g}]")
    return sol


def ode_residual(p: RadialProfile, candidate: Union[RadialSolution, ClosedFormCandidate],
                 n: Optional[int] = None, window: Optional[Tuple[float, float]] = None) -> float:
    """Relative residual sup |(h v_t)_t - (n-2) h v_t - lambda v| / |v|

    Grid solutions are checked on staggered midpoints with second-order
    differences of v and w; g is never differentiated. Closed forms use their
    analytic derivatives on a 1e-2 grid.
    """
    n = p.n if n is None else n
    lo, hi = window if window else (p.t_min, p.t_max)

    if isinstance(candidate, ClosedFormCandidate):
        lam = n - 1 if candidate.eigenvalue is None else candidate.eigenvalue
        t = log_grid(p, 1e-2)
        t = t[(t >= lo) & (t <= hi)]
        h = 1.0 + np.asarray(eval_g(p, t))
        dh = np.asarray(eval_dg_dt(p, t))
        v, dv, d2v = candidate.value(t), candidate.first(t), candidate.second(t)
        residual = dh * dv + h * d2v - (n - 2) * h * dv - lam * v
        return float(np.max(np.abs(residual) / np.abs(v)))

    t = candidate.t_grid
    dt = np.diff(t)
    t_mid = 0.5 * (t[:-1] + t[1:])
    keep = (t_mid >= lo) & (t_mid <= hi)
    h_mid = 1.0 + np.asarray(eval_g(p, t_mid))
    v_mid = 0.5 * (candidate.v[:-1] + candidate.v[1:])
    w_mid = 0.5 * (candidate.w[:-1] + candidate.w[1:])
    res_v = np.diff(candidate.v) / dt - w_mid / h_mid
    res_w = np.diff(candidate.w) / dt - candidate.eigenvalue * v_mid - (candidate.n - 2) * w_mid
    residual = np.maximum(np.abs(res_v), np.abs(res_w)) / np.abs(v_mid)
    return float(np.max(residual[keep]))


def finite_energy(sol: RadialSolution, n: Optional[int] = None) -> Tuple[float, Verdict]:
    """Energy of Z on the window: integral of e^{(2-n)t} ((v_t)^2 + v^2) dt

    The tail beyond the window is extrapolated from the fitted decay rate of
    the integrand over the last unit of t.
    """
    n = sol.n if n is None else n
    t = sol.t_grid
    integrand = np.exp((2 - n) * t) * (sol.dv_dt ** 2 + sol.v ** 2)
    window = float(simpson(integrand, x=t))
    last = t >= t[-1] - 1.0
    decay = -float(np.polyfit(t[last], np.log(integrand[last]), 1)[0])
    sup_ratio = float(np.max(np.abs(sol.v_over_r)))
    evidence = {"window_energy": window, "decay_rate": decay, "sup_ratio": sup_ratio}
    if decay > 1e-3 and math.isfinite(sup_ratio):
        value = window + float(integrand[-1]) / decay
        status = Status.HOLDS_NUMERIC_WINDOW
    else:
        value = math.inf if decay < 0 else window
        status = Status.FAILS_NUMERIC_WINDOW
        logger.warning(f"⚠️ Energy integrand does not decay (rate {decay:.6g})")
    evidence["energy"] = value
    return value, Verdict(status, evidence, Rule.COMPARISON)


def asymptotic_ratio(sol: RadialSolution, p: RadialProfile, n: Optional[int] = None, fit_t: float = 25.0,
                     exponent: Literal["linear", "eigenvalue"] = "linear") -> AsymptoticModel:
    """Fit c at fit_t and measure sup |log v - log model| on [fit_t, t_max]

    linear: model = c exp(-t + ((n-1)/n) * integral of g)
    eigenvalue: model = c exp(integral of the frozen decaying exponent)

    Raises:
        HypothesisUnmet: when the profile has infinite total variation
    """
    n = sol.n if n is None else n
    _, tv_verdict = total_variation(p)
    if tv_verdict.fails:
        raise HypothesisUnmet(f"{p.family} has infinite total variation; the asymptotic law does not apply")

    t = sol.t_grid
    g = np.asarray(eval_g(p, t))
    if exponent == "linear":
        log_law = -t + ((n - 1) / n) * cumulative_simpson(g, x=t, initial=0.0)
    elif exponent == "eigenvalue":
        mu, _ = eigenvalues(g, n, sol.eigenvalue)
        log_law = cumulative_simpson(mu, x=t, initial=0.0)
    else:
        raise ValueError(f"unknown exponent model {exponent!r}")

    log_v = np.log(sol.v)
    gap = log_v - log_law
    log_c = float(np.interp(fit_t, t, gap))
    span = t >= fit_t
    drift = float(np.max(np.abs(gap[span] - log_c)))
    logger.debug(f"📊 asymptotic drift ({exponent}) on [{fit_t}, {t[-1]:.4g}]: {drift:.6g}")
    return AsymptoticModel(
        c_fit=math.exp(log_c),
        fit_t=fit_t,
        drift=drift,
        exponent=exponent,
        t_grid=t,
        model=np.exp(log_law + log_c),
    )


def z_linear_bound(sol: RadialSolution) -> ZBound:
    """Windowed reading of Z(r) <= c r

    The last units of t next to the seed are skipped. growth compares the
    maximum of log(Z/r) on the tail window with its maximum before the
    tail; trend is the least-squares slope on the tail.
    """
    t_all = sol.t_grid
    layer = min(SEED_LAYER, 0.25 * (t_all[-1] - t_all[0]))
    trusted = t_all <= t_all[-1] - layer
    t = t_all[trusted]
    log_ratio = np.log(sol.v[trusted]) + t
    tail_len = min(10.0, 0.25 * (t[-1] - t[0]))
    tail = t >= t[-1] - tail_len
    head = ~tail
    growth = float(log_ratio[tail].max() - (log_ratio[head].max() if head.any() else log_ratio[0]))
    trend = float(np.polyfit(t[tail], log_ratio[tail], 1)[0])
    spread = float(np.ptp(log_ratio[tail]))
    sup_ratio = float(np.exp(log_ratio.max()))
    evidence = {"sup_ratio": sup_ratio, "trend": trend, "growth": growth, "tail_spread": spread,
                "t_end": float(t[-1])}

    if growth <= GROWTH_TOL and math.isfinite(sup_ratio):
        status = Status.HOLDS_NUMERIC_WINDOW
    elif (growth > GROWTH_TOL and trend > TREND_TOL) or log_ratio.max() > LOG_RATIO_CEILING:
        status = Status.FAILS_NUMERIC_WINDOW
    else:
        status = Status.INCONCLUSIVE
    return ZBound(
        sup_ratio=sup_ratio,
        trend=trend,
        growth=growth,
        tail_spread=spread,
        vanishing=status.holds and trend < -TREND_TOL and growth < -GROWTH_TOL,
        verdict=Verdict(status, evidence, Rule.COMPARISON),
    )
