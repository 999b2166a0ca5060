"""
Separated-variable oracle for the Gilbarg-Serrin equation
Mode solutions, the comparison ratio ||u(rho)||/Z(rho) and the Lipschitz probe
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import cumulative_simpson
from scipy.special import eval_legendre

from regularity.errors import SignChange, UnsupportedDimension
from regularity.profiles import RadialProfile, eval_g
from regularity.verdicts import RegularityVerdict

from .radial_ode import MAX_STEP, RadialSolution, integrate_backward, solve_Z

logger = logging.getLogger(__name__)

MONOTONE_TOL = 1e-6
MODE_WORKERS = 4


class ModeKind(Enum):
    COS = "cos"
    SIN = "sin"
    ZONAL = "zonal"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Mode:
    """One angular harmonic of degree k with its boundary amplitude"""
    k: int
    amplitude: float
    kind: ModeKind = ModeKind.COS

    def weight(self, n: int) -> float:
        """Angular mean of the squared harmonic"""
        if self.k == 0:
            return 1.0
        return 0.5 if n == 2 else 1.0 / (2 * self.k + 1)

    def angular(self, theta: np.ndarray) -> np.ndarray:
        """Harmonic on the circle (angle) or zonal harmonic (polar angle)"""
        if self.kind is ModeKind.SIN:
            return np.sin(self.k * theta)
        if self.kind is ModeKind.ZONAL:
            return eval_legendre(self.k, np.cos(theta))
        return np.cos(self.k * theta)


@dataclass(frozen=True)
class BoundaryData:
    """Boundary values at r_max as a finite harmonic sum"""
    n: int
    modes: Tuple[Mode, ...]

    def __post_init__(self):
        if self.n not in (2, 3):
            raise UnsupportedDimension(f"boundary data needs n in (2, 3), got {self.n}")
        for mode in self.modes:
            if mode.k < 0:
                raise ValueError(f"mode index must be nonnegative, got {mode.k}")
            if self.n == 3 and mode.k > 0 and mode.kind is not ModeKind.ZONAL:
                raise ValueError("only zonal harmonics are supported for n = 3")
            if self.n == 2 and mode.kind is ModeKind.ZONAL:
                raise ValueError("zonal harmonics need n = 3")
        merged: Dict[Tuple[int, ModeKind], float] = {}
        for mode in self.modes:
            kind = ModeKind.COS if mode.k == 0 else mode.kind
            merged[(mode.k, kind)] = merged.get((mode.k, kind), 0.0) + mode.amplitude
        object.__setattr__(self, "modes", tuple(Mode(k, a, kind) for (k, kind), a in sorted(
            merged.items(), key=lambda item: (item[0][0], item[0][1].value))))

    @classmethod
    def from_amplitudes(cls, n: int, amplitudes: Mapping[int, float], kind: Optional[ModeKind] = None) -> "BoundaryData":
        kind = kind or (ModeKind.COS if n == 2 else ModeKind.ZONAL)
        return cls(n, tuple(Mode(int(k), float(a), kind) for k, a in amplitudes.items()))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BoundaryData":
        n = int(data.get("n", 2))
        default_kind = "cos" if n == 2 else "zonal"
        modes = tuple(
            Mode(int(m["k"]), float(m["amplitude"]), ModeKind(m.get("kind", default_kind)))
            for m in data.get("modes", [])
        )
        return cls(n, modes)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, n_modes: int = 5, max_k: int = 5) -> "BoundaryData":
        """Zero-mean data on n_modes distinct harmonics with normal amplitudes"""
        if n == 2:
            pool = [(k, kind) for k in range(1, max_k + 1) for kind in (ModeKind.COS, ModeKind.SIN)]
        else:
            pool = [(k, ModeKind.ZONAL) for k in range(1, max_k + 1)]
        picks = rng.choice(len(pool), size=min(n_modes, len(pool)), replace=False)
        amplitudes = rng.normal(size=picks.size)
        return cls(n, tuple(Mode(pool[i][0], float(a), pool[i][1]) for i, a in zip(picks, amplitudes)))

    def to_dict(self) -> Dict[str, Any]:
        return {"n": self.n, "modes": [{"k": m.k, "amplitude": m.amplitude, "kind": str(m.kind)} for m in self.modes]}

    @property
    def mean(self) -> float:
        return float(sum(m.amplitude for m in self.modes if m.k == 0))

    @property
    def zero_mean(self) -> bool:
        return self.mean == 0.0

    @property
    def degrees(self) -> List[int]:
        return sorted({m.k for m in self.modes if m.k > 0})

    def evaluate(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        return sum((m.amplitude * m.angular(theta) for m in self.modes), np.zeros_like(theta))


@dataclass(frozen=True)
class ModeSolution:
    k: int
    eigenvalue: float
    boundary_amp: float
    solution: RadialSolution

    @property
    def t_grid(self) -> np.ndarray:
        return self.solution.t_grid

    @property
    def v_k(self) -> np.ndarray:
        return self.solution.v


def mode_eigenvalue(n: int, k: int) -> float:
    return float(k * (k + n - 2))


@lru_cache(maxsize=64)
def _unit_mode(p: RadialProfile, n: int, k: int, step: float) -> RadialSolution:
    raw = integrate_backward(p, n, step, eigenvalue=mode_eigenvalue(n, k))
    if not (np.all(raw.v > 0) or np.all(raw.v < 0)):
        raise SignChange(f"mode k={k} changes sign for {p.family}")
    return raw.scaled(1.0 / raw.v[0])


def solve_mode(p: RadialProfile, n: Optional[int], k: int, boundary_amp: float = 1.0,
               step: float = MAX_STEP) -> ModeSolution:
    """Finite-energy mode solution with v_k(r_max) = boundary_amp"""
    n = p.n if n is None else n
    if k < 1:
        raise ValueError(f"mode index must be >= 1, got {k}")
    if not 0 < step <= MAX_STEP:
        raise ValueError(f"step must lie in (0, {MAX_STEP}], got {step}")
    unit = _unit_mode(p, n, k, step)
    return ModeSolution(k=k, eigenvalue=mode_eigenvalue(n, k), boundary_amp=boundary_amp,
                        solution=unit.scaled(boundary_amp))


def solve_modes(p: RadialProfile, n: int, degrees: Iterable[int], step: float = MAX_STEP) -> Dict[int, ModeSolution]:
    """Unit-amplitude mode solutions for several degrees, computed concurrently"""
    degrees = sorted(set(degrees))
    with ThreadPoolExecutor(max_workers=MODE_WORKERS) as pool:
        solutions = list(pool.map(lambda k: solve_mode(p, n, k, 1.0, step), degrees))
    return dict(zip(degrees, solutions))


def _angular_norm(bd: BoundaryData, units: Mapping[int, ModeSolution]) -> np.ndarray:
    """Angular RMS of u on the mode grid by Parseval"""
    grid = next(iter(units.values())).t_grid
    total = np.full(grid.shape, bd.mean ** 2, dtype=float)
    for mode in bd.modes:
        if mode.k == 0:
            continue
        total += mode.weight(bd.n) * (mode.amplitude * units[mode.k].v_k) ** 2
    return np.sqrt(total)


@dataclass(frozen=True)
class ComparisonReport:
    rho: np.ndarray
    ratios: np.ndarray
    monotone: bool
    max_violation: float

    def summary(self) -> Dict[str, Any]:
        return {
            "monotone": self.monotone,
            "max_violation": self.max_violation,
            "max_ratio": float(self.ratios.max()),
            "min_ratio": float(self.ratios.min()),
            "samples": int(self.ratios.size),
        }

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"rho": self.rho, "ratio": self.ratios})


def comparison_check(p: RadialProfile, n: Optional[int], bd: BoundaryData,
                     rho_grid: Optional[np.ndarray] = None, step: float = MAX_STEP,
                     tol: float = MONOTONE_TOL) -> ComparisonReport:
    """||u(rho)|| / Z(rho) must be nondecreasing in rho for zero-mean data"""
    n = p.n if n is None else n
    if not bd.zero_mean:
        raise ValueError("comparison check needs zero-mean boundary data")
    if bd.n != n:
        raise UnsupportedDimension(f"boundary data is for n={bd.n}, profile run uses n={n}")
    if not bd.degrees:
        raise ValueError("boundary data has no nonconstant modes")

    Z = solve_Z(p, n, step)
    units = solve_modes(p, n, bd.degrees, step)
    ratios = _angular_norm(bd, units) / Z.v
    t = Z.t_grid
    if rho_grid is not None:
        t_query = -np.log(np.asarray(rho_grid, dtype=float))
        ratios = np.interp(t_query, t, ratios)
        t = t_query

    order = np.argsort(-t)  # ascending rho
    rho = np.exp(-t[order])
    ordered = ratios[order]
    drops = ordered[:-1] - ordered[1:]
    max_violation = float(max(0.0, drops.max())) if drops.size else 0.0
    monotone = max_violation <= tol * float(ordered.max())
    if monotone:
        logger.info(f"✅ Comparison ratio nondecreasing for {p.family} ({len(bd.modes)} modes)")
    else:
        logger.error(f"❌ Comparison ratio decreases by {max_violation:.3e} for {p.family}")
    return ComparisonReport(rho=rho, ratios=ordered, monotone=monotone, max_violation=max_violation)


def mode_reconstruction(p: RadialProfile, bd: BoundaryData, t: np.ndarray, theta: np.ndarray,
                        step: float = MAX_STEP) -> np.ndarray:
    """Sum of a_k v_k(t) Y_k(theta) on a (t, theta) grid"""
    t = np.asarray(t, dtype=float)
    theta = np.asarray(theta, dtype=float)
    units = solve_modes(p, bd.n, bd.degrees, step) if bd.degrees else {}
    field = np.full((t.size, theta.size), bd.mean, dtype=float)
    for mode in bd.modes:
        if mode.k == 0:
            continue
        radial = np.interp(t, units[mode.k].t_grid, units[mode.k].v_k)
        field += mode.amplitude * radial[:, None] * mode.angular(theta)[None, :]
    return field


@dataclass(frozen=True)
class LipschitzProbe:
    sup_ratio: float
    growth_exponent: float
    observed_increment: float
    predicted_increment: float
    fit_window: Tuple[float, float]
    consistent: Optional[bool]
    t_grid: np.ndarray
    log_ratio: np.ndarray

    def summary(self) -> Dict[str, Any]:
        return {
            "sup_ratio": self.sup_ratio,
            "growth_exponent": self.growth_exponent,
            "observed_increment": self.observed_increment,
            "predicted_increment": self.predicted_increment,
            "fit_window": list(self.fit_window),
            "consistent": self.consistent,
        }


def lipschitz_probe(p: RadialProfile, n: Optional[int], bd: BoundaryData, step: float = MAX_STEP,
                    fit_window: Optional[Tuple[float, float]] = None,
                    verdict: Optional[RegularityVerdict] = None) -> LipschitzProbe:
    """sup ||u(r)||/r and the slope of log(||u||/r) against ((n-1)/n) * integral of g

    Args:
        fit_window: t-range of the fit, default the second half of the window
        verdict: classification to cross-check against

    Returns:
        LipschitzProbe; consistent is None when there is nothing to compare
    """
    n = p.n if n is None else n
    if not bd.zero_mean:
        raise ValueError("Lipschitz probe needs zero-mean boundary data")
    if not bd.degrees:
        raise ValueError("boundary data has no nonconstant modes")
    units = solve_modes(p, n, bd.degrees, step)
    t = next(iter(units.values())).t_grid
    log_ratio = np.log(_angular_norm(bd, units)) + t
    exponent = ((n - 1) / n) * cumulative_simpson(np.asarray(eval_g(p, t)), x=t, initial=0.0)

    lo, hi = fit_window or (p.t_min + 0.5 * (p.t_max - p.t_min), p.t_max)
    window = (t >= lo) & (t <= hi)
    if np.ptp(exponent[window]) > 1e-12:
        slope = float(np.polyfit(exponent[window], log_ratio[window], 1)[0])
    else:
        slope = 0.0
    first, last = np.flatnonzero(window)[[0, -1]]
    observed = float(log_ratio[last] - log_ratio[first])
    predicted = float(exponent[last] - exponent[first])

    consistent = None
    if verdict is not None:
        if verdict.lipschitz_at_0.holds:
            consistent = observed <= max(predicted, 0.0) + 1e-2
        elif verdict.non_lipschitz_exists.holds and 1 in bd.degrees:
            consistent = observed > 0.0
    result = LipschitzProbe(
        sup_ratio=float(np.exp(log_ratio.max())),
        growth_exponent=slope,
        observed_increment=observed,
        predicted_increment=predicted,
        fit_window=(float(lo), float(hi)),
        consistent=consistent,
        t_grid=t,
        log_ratio=log_ratio,
    )
    logger.debug(f"📊 Lipschitz probe {p.family}: sup={result.sup_ratio:.6g}, slope={slope:.4f}")
    return result
