"""
Dynamical-system criteria for Gilbarg-Serrin coefficients
R-matrix, cumulative exponent S(t), stability verdicts and the final classification
"""

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy.integrate import cumulative_simpson

from .errors import UnsupportedDimension
from .moduli import LAST_DECADE, modulus_report
from .profiles import ArrayLike, Family, RadialProfile, eval_g, log_grid
from .quadrature import adaptive_simpson, sphere_rule
from .verdicts import ModulusReport, RegularityVerdict, Rule, Status, Verdict, inconclusive

if TYPE_CHECKING:
    from solvers.radial_ode import ZBound

logger = logging.getLogger(__name__)

CoefficientField = Callable[[np.ndarray], np.ndarray]

S_GRID_STEP = 1e-2
PERIOD = 2.0 * math.pi


def gilbarg_serrin_field(g: Union[float, Callable[[ArrayLike], ArrayLike]]) -> CoefficientField:
    """A(x) = I + g(|x|) theta theta^T as a batched coefficient field

    Args:
        g: constant or callable of r

    Returns:
        Callable mapping points of shape (m, n) to matrices of shape (m, n, n)
    """
    def field(x: np.ndarray) -> np.ndarray:
        r = np.linalg.norm(x, axis=-1)
        theta = x / r[..., None]
        values = np.asarray(g(r), dtype=float) if callable(g) else np.full(r.shape, float(g))
        eye = np.eye(x.shape[-1])
        return eye + values[..., None, None] * theta[..., :, None] * theta[..., None, :]
    return field


def compute_R_matrix(coeff: CoefficientField, n: int, r: float,
                     n_polar: int = 64, n_azimuth: Optional[int] = None) -> np.ndarray:
    """Spherical mean of A - n (A theta) theta^T at radius r"""
    if n not in (2, 3):
        raise UnsupportedDimension(f"R-matrix needs n in (2, 3), got {n}")
    if n_azimuth is None:
        n_azimuth = 512 if n == 2 else 128
    theta, weights = sphere_rule(n, n_polar=n_polar, n_azimuth=n_azimuth)
    A = coeff(r * theta)
    a_theta = np.einsum("mij,mj->mi", A, theta)
    integrand = A - n * a_theta[:, :, None] * theta[:, None, :]
    return np.einsum("m,mij->ij", weights, integrand)


def gs_R_matrix(g: float, n: int) -> np.ndarray:
    """Closed-form R-matrix of Gilbarg-Serrin coefficients"""
    return -((n - 1) / n) * g * np.eye(n)


@dataclass(frozen=True)
class StabilityReport:
    """Cumulative exponent S(t) = ((n-1)/n) * integral of g, and its verdicts"""
    n: int
    t_grid: np.ndarray
    S_grid: np.ndarray
    running_min: np.ndarray
    sup_increment: float
    uniform_stable: Verdict
    asympt_constant: Verdict
    limsup_divergent: Verdict
    to_minus_infinity: Verdict

    @property
    def threshold(self) -> float:
        return 1e3 * (self.n - 1) / self.n

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"t": self.t_grid, "S": self.S_grid, "running_min": self.running_min})

    def verdicts(self) -> List[Tuple[str, Verdict]]:
        return [
            ("uniform_stable", self.uniform_stable),
            ("asympt_constant", self.asympt_constant),
            ("limsup_divergent", self.limsup_divergent),
            ("s_to_minus_infinity", self.to_minus_infinity),
        ]


def periodic_increments(p: RadialProfile, periods: Optional[int] = None,
                        start: Optional[float] = None, period: float = PERIOD) -> np.ndarray:
    """Integral of g over consecutive periods inside the window"""
    start = p.t_min if start is None else start
    available = int((p.t_max - start) // period)
    periods = available if periods is None else min(periods, available)
    return np.array([
        adaptive_simpson(lambda t: eval_g(p, t), start + k * period, start + (k + 1) * period).value
        for k in range(periods)
    ])


def _per_period_integral(p: RadialProfile) -> float:
    return float(adaptive_simpson(lambda t: eval_g(p, t), p.t_min, p.t_min + PERIOD).value)


def _analytic_stability(p: RadialProfile) -> Optional[Dict[str, bool]]:
    """Closed-form verdicts: uniform stability, asymptotic constancy, limsup divergence, S -> -inf"""
    f = p.family
    if f is Family.ZERO:
        return dict(stable=True, constant=True, divergent=False, minus_inf=False)
    if f is Family.CONST:
        return dict(stable=p.c <= 0, constant=p.c <= 0, divergent=p.c > 0, minus_inf=p.c < 0)
    if f is Family.EX1_POS:
        return dict(stable=p.gamma > 1, constant=p.gamma > 1, divergent=p.gamma <= 1, minus_inf=False)
    if f is Family.EX1_NEG:
        return dict(stable=True, constant=True, divergent=False, minus_inf=p.gamma <= 1)
    if f is Family.EX2:
        # alternating series with decreasing terms
        return dict(stable=True, constant=True, divergent=False, minus_inf=False)
    if f is Family.EX3:
        drift = _per_period_integral(p)
        flat = abs(drift) < 1e-12
        return dict(stable=drift <= 0 or flat, constant=drift < 0 and not flat,
                    divergent=drift > 0 and not flat, minus_inf=drift < 0 and not flat)
    return None


def _numeric_stability(t: np.ndarray, S: np.ndarray, sup_increment: float,
                       increments: np.ndarray, threshold: float) -> Dict[str, Status]:
    decade = t >= t[-1] - LAST_DECADE
    before = ~decade
    decade_max = float(S[decade].max())
    earlier_max = float(S[before].max()) if before.any() else -math.inf
    change = float(S[-1] - S[decade][0])

    if decade_max > threshold:
        divergent = Status.HOLDS_NUMERIC_WINDOW
    elif decade_max <= earlier_max + 1e-6:
        divergent = Status.FAILS_NUMERIC_WINDOW
    else:
        divergent = Status.INCONCLUSIVE

    if sup_increment > threshold:
        stable = Status.FAILS_NUMERIC_WINDOW
    elif before.any() and increments[decade].max() <= increments[before].max() + 1e-6:
        stable = Status.HOLDS_NUMERIC_WINDOW
    else:
        stable = Status.INCONCLUSIVE

    if abs(change) < 1e-6 or S[-1] < -threshold:
        constant = Status.HOLDS_NUMERIC_WINDOW
    elif S[-1] > threshold:
        constant = Status.FAILS_NUMERIC_WINDOW
    else:
        constant = Status.INCONCLUSIVE

    if S[-1] < -threshold and change < 0:
        minus_inf = Status.HOLDS_NUMERIC_WINDOW
    elif abs(change) < 1e-6:
        minus_inf = Status.FAILS_NUMERIC_WINDOW
    else:
        minus_inf = Status.INCONCLUSIVE
    return dict(stable=stable, constant=constant, divergent=divergent, minus_inf=minus_inf)


def cumulative_S(p: RadialProfile, grid: Optional[np.ndarray] = None, n: Optional[int] = None) -> StabilityReport:
    """S(t) by composite Simpson with running minimum and sup increment

    Args:
        p: profile
        grid: uniform t-grid starting at t_min with spacing at most 1e-2
        n: dimension (defaults to the profile's)

    Returns:
        StabilityReport with S, running minimum and the four stability verdicts
    """
    n = p.n if n is None else n
    t = log_grid(p, S_GRID_STEP) if grid is None else np.asarray(grid, dtype=float)
    if np.max(np.diff(t)) > S_GRID_STEP * (1 + 1e-9):
        raise ValueError(f"S grid spacing must not exceed {S_GRID_STEP}")

    g = eval_g(p, t)
    S = ((n - 1) / n) * cumulative_simpson(g, x=t, initial=0.0)
    running_min = np.minimum.accumulate(S)
    increments = S - running_min
    sup_increment = float(increments.max())
    threshold = 1e3 * (n - 1) / n
    evidence = {"S_end": float(S[-1]), "sup_increment": sup_increment, "t_end": float(t[-1])}

    table = _analytic_stability(p)
    if table is not None:
        statuses = {k: Status.from_bool(v) for k, v in table.items()}
        if p.family is Family.EX3:
            evidence["per_period_integral"] = _per_period_integral(p)
    else:
        statuses = _numeric_stability(t, S, sup_increment, increments, threshold)
        logger.debug(f"📊 Numeric stability window: {statuses}")

    return StabilityReport(
        n=n,
        t_grid=t,
        S_grid=S,
        running_min=running_min,
        sup_increment=sup_increment,
        uniform_stable=Verdict(statuses["stable"], evidence, Rule.STABILITY),
        asympt_constant=Verdict(statuses["constant"], evidence, Rule.STABILITY),
        limsup_divergent=Verdict(statuses["divergent"], evidence, Rule.GROWTH),
        to_minus_infinity=Verdict(statuses["minus_inf"], evidence, Rule.STABILITY_VANISHING_GRADIENT),
    )


@dataclass(frozen=True)
class Classification:
    """Verdict together with the reports it was derived from"""
    verdict: RegularityVerdict
    modulus: ModulusReport
    stability: StabilityReport
    z_bound: Optional["ZBound"] = None


def _combined(value: bool, sources: Tuple[Verdict, ...], rule: Rule, evidence: Dict[str, float]) -> Verdict:
    analytic = all(v.status.analytic for v in sources)
    return Verdict(Status.from_bool(value, analytic), evidence, rule)


def classification(p: RadialProfile, n: Optional[int] = None, step: float = 1e-3) -> Classification:
    """Apply the stability, growth and comparison routes in order"""
    n = p.n if n is None else n
    logger.info(f"🧮 Classifying {p.family} profile (n={n})")
    modulus = modulus_report(p)
    stability = cumulative_S(p, n=n)
    square = modulus.square_dini
    stable = stability.uniform_stable
    z_bound = None

    if square.holds and stable.holds:
        sources = (square, stable)
        evidence = {
            "square_dini_integral": square.evidence["partial_integral"],
            "sup_increment": stability.sup_increment,
        }
        lipschitz = _combined(True, sources, Rule.STABILITY, evidence)
        non_lipschitz = _combined(False, sources, Rule.STABILITY, evidence)
        if stability.asympt_constant.holds:
            differentiable = _combined(True, sources + (stability.asympt_constant,), Rule.STABILITY, evidence)
        else:
            differentiable = inconclusive(**evidence).with_rule(Rule.STABILITY)
        if modulus.rgprime_bounded.holds:
            c1 = _combined(True, sources + (modulus.rgprime_bounded,), Rule.GRADIENT_BOUND,
                           dict(modulus.rgprime_bounded.evidence))
        else:
            c1 = inconclusive().with_rule(Rule.GRADIENT_BOUND)
        if stability.to_minus_infinity.holds:
            grad_zero = _combined(True, sources + (stability.to_minus_infinity,),
                                  Rule.STABILITY_VANISHING_GRADIENT, {"S_end": float(stability.S_grid[-1])})
        else:
            grad_zero = inconclusive(S_end=float(stability.S_grid[-1])).with_rule(Rule.STABILITY_VANISHING_GRADIENT)
        route = Rule.STABILITY

    elif (stability.limsup_divergent.holds and modulus.total_variation_verdict.holds
          and (square.holds or modulus.positive_near_zero.holds)):
        sources = (stability.limsup_divergent, modulus.total_variation_verdict,
                   square if square.holds else modulus.positive_near_zero)
        evidence = {"S_end": float(stability.S_grid[-1]), "total_variation": modulus.total_variation}
        non_lipschitz = _combined(True, sources, Rule.GROWTH, evidence)
        lipschitz = _combined(False, sources, Rule.GROWTH, evidence)
        differentiable = _combined(False, sources, Rule.GROWTH, evidence)
        c1 = _combined(False, sources, Rule.GROWTH, evidence)
        grad_zero = _combined(False, sources, Rule.GROWTH, evidence)
        route = Rule.GROWTH

    else:
        from solvers.radial_ode import solve_Z, z_linear_bound

        logger.info("🔄 Falling back to the comparison solution Z")
        z_bound = z_linear_bound(solve_Z(p, n, step))
        evidence = {"sup_ratio": z_bound.sup_ratio, "trend": z_bound.trend, "growth": z_bound.growth}
        status = z_bound.verdict.status
        if status.holds:
            lipschitz = Verdict(Status.HOLDS_NUMERIC_WINDOW, evidence, Rule.COMPARISON)
            non_lipschitz = Verdict(Status.FAILS_NUMERIC_WINDOW, evidence, Rule.COMPARISON)
            settled = z_bound.vanishing or z_bound.tail_spread < 1e-3
            differentiable = (Verdict(Status.HOLDS_NUMERIC_WINDOW, evidence, Rule.COMPARISON) if settled
                              else inconclusive(**evidence).with_rule(Rule.COMPARISON))
            grad_zero = (Verdict(Status.HOLDS_NUMERIC_WINDOW, evidence, Rule.COMPARISON) if z_bound.vanishing
                         else inconclusive(**evidence).with_rule(Rule.COMPARISON))
            c1 = inconclusive().with_rule(Rule.GRADIENT_BOUND)
        elif status.fails:
            non_lipschitz = Verdict(Status.HOLDS_NUMERIC_WINDOW, evidence, Rule.COMPARISON)
            lipschitz = differentiable = c1 = grad_zero = Verdict(Status.FAILS_NUMERIC_WINDOW, evidence, Rule.COMPARISON)
        else:
            logger.warning("⚠️ Comparison solution is inconclusive on this window")
            lipschitz = differentiable = c1 = non_lipschitz = grad_zero = inconclusive(**evidence).with_rule(Rule.COMPARISON)
        route = Rule.COMPARISON

    verdict = RegularityVerdict(
        lipschitz_at_0=lipschitz,
        differentiable_at_0=differentiable,
        c1_neighborhood=c1,
        non_lipschitz_exists=non_lipschitz,
        grad_zero_at_0=grad_zero,
        rationale=tuple((name, v.rule or route) for name, v in (
            ("lipschitz_at_0", lipschitz),
            ("differentiable_at_0", differentiable),
            ("c1_neighborhood", c1),
            ("non_lipschitz_exists", non_lipschitz),
            ("grad_zero_at_0", grad_zero),
        )),
    )
    logger.info(f"✅ {p.family}: lipschitz={lipschitz.status}, non_lipschitz={non_lipschitz.status} via {route}")
    return Classification(verdict=verdict, modulus=modulus, stability=stability, z_bound=z_bound)


def classify(p: RadialProfile, n: Optional[int] = None, step: float = 1e-3) -> RegularityVerdict:
    return classification(p, n, step).verdict
