"""
Radial coefficient profiles g(r) of Gilbarg-Serrin operators
Closed-form families and tabulated profiles, evaluated in t = -log r
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Tuple, Union

import numpy as np
import pandas as pd

from .errors import EllipticityViolation, OutOfDomain, UnsupportedDimension

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

SUPPORTED_DIMENSIONS = (2, 3)
DEFAULT_T_MIN = math.log(2.0)
DEFAULT_T_MAX = 40.0
DOMAIN_SLACK = 1e-9
ELLIPTICITY_SAMPLES = 10_000


class Family(Enum):
    """Profile families"""
    ZERO = "zero"
    CONST = "const"
    EX1_POS = "ex1_pos"
    EX1_NEG = "ex1_neg"
    EX2 = "ex2"
    EX3 = "ex3"
    TABLE = "table"

    def __str__(self) -> str:
        return self.value


def ex3_constants(n: int) -> Tuple[float, float]:
    """Coefficients making r(A + sin|log r|) an exact comparison solution"""
    d = (n - 1) ** 2 + 1
    c1 = 1.0 - (n - 1) ** 2 / d
    c2 = -(n - 1) / d - 1.0
    return c1, c2


@dataclass(frozen=True)
class RadialProfile:
    """Immutable description of g on the window [t_min, t_max]

    t_min = -log r_max, t_max = -log r_min. Construct through the class
    methods; every constructor validates ellipticity 1 + g >= eps_ell.
    """
    family: Family
    gamma: float = 0.0
    beta: float = 0.0
    A: float = 0.0
    c: float = 0.0
    scale: float = 1.0
    n: int = 2
    t_min: float = DEFAULT_T_MIN
    t_max: float = DEFAULT_T_MAX
    eps_ell: float = 1e-3
    table_t: Tuple[float, ...] = field(default=(), repr=False)
    table_g: Tuple[float, ...] = field(default=(), repr=False)

    def __post_init__(self):
        if self.n not in SUPPORTED_DIMENSIONS:
            raise UnsupportedDimension(f"n={self.n} not in {SUPPORTED_DIMENSIONS}")
        self._validate_parameters()
        if not self.t_max > self.t_min:
            raise OutOfDomain(f"empty window [{self.t_min}, {self.t_max}]")
        self._check_ellipticity()

    # Constructors

    @classmethod
    def zero(cls, **window) -> "RadialProfile":
        return cls(Family.ZERO, **window)

    @classmethod
    def const(cls, c: float, **window) -> "RadialProfile":
        return cls(Family.CONST, c=c, **window)

    @classmethod
    def ex1(cls, gamma: float, negative: bool = False, scale: float = 1.0, **window) -> "RadialProfile":
        """g = ±scale·t^{-gamma}

        The negative branch shrinks the outer radius until 1 + g >= 1/2,
        since (log 2)^{-gamma} > 1 for every gamma > 0.
        """
        family = Family.EX1_NEG if negative else Family.EX1_POS
        if negative and "t_min" not in window and gamma > 0:
            window["t_min"] = max(DEFAULT_T_MIN, (2.0 * scale) ** (1.0 / gamma))
        return cls(family, gamma=gamma, scale=scale, **window)

    @classmethod
    def ex2(cls, beta: float, scale: float = 1.0, **window) -> "RadialProfile":
        return cls(Family.EX2, beta=beta, scale=scale, **window)

    @classmethod
    def ex3(cls, A: float, n: int = 2, **window) -> "RadialProfile":
        return cls(Family.EX3, A=A, n=n, **window)

    @classmethod
    def from_table(cls, t: np.ndarray, g: np.ndarray, n: int = 2, eps_ell: float = 1e-3) -> "RadialProfile":
        t = np.asarray(t, dtype=float)
        g = np.asarray(g, dtype=float)
        if t.ndim != 1 or t.shape != g.shape or t.size < 2:
            raise ValueError("table needs matching 1-D arrays with at least two samples")
        if np.any(np.diff(t) <= 0):
            raise ValueError("table t values must be strictly increasing")
        return cls(Family.TABLE, n=n, t_min=float(t[0]), t_max=float(t[-1]), eps_ell=eps_ell,
                   table_t=tuple(t.tolist()), table_g=tuple(g.tolist()))

    @classmethod
    def from_csv(cls, path: Union[str, Path], n: int = 2) -> "RadialProfile":
        """Load a two-column (t, g) CSV"""
        frame = pd.read_csv(path)
        if not {"t", "g"} <= set(frame.columns):
            frame.columns = ["t", "g"] + list(frame.columns[2:])
        logger.info(f"📋 Loaded table profile from {path} ({len(frame)} samples)")
        return cls.from_table(frame["t"].to_numpy(), frame["g"].to_numpy(), n=n)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RadialProfile":
        """Build from the JSON profile object"""
        data = dict(data)
        family = Family(str(data.pop("family")).lower())
        n = int(data.pop("n", 2))
        if family is Family.TABLE:
            if "path" in data:
                return cls.from_csv(data["path"], n=n)
            return cls.from_table(data["t"], data["g"], n=n, eps_ell=data.get("eps_ell", 1e-3))
        window = {k: float(data[k]) for k in ("t_min", "t_max", "eps_ell") if data.get(k) is not None}
        if family is Family.ZERO:
            return cls.zero(n=n, **window)
        if family is Family.CONST:
            return cls.const(float(data["c"]), n=n, **window)
        if family in (Family.EX1_POS, Family.EX1_NEG):
            return cls.ex1(float(data["gamma"]), negative=family is Family.EX1_NEG,
                           scale=float(data.get("scale", 1.0)), n=n, **window)
        if family is Family.EX2:
            return cls.ex2(float(data["beta"]), scale=float(data.get("scale", 1.0)), n=n, **window)
        return cls.ex3(float(data["A"]), n=n, **window)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["family"] = str(self.family)
        data.pop("table_t")
        data.pop("table_g")
        if self.family is Family.TABLE:
            data["samples"] = len(self.table_t)
        return data

    # Validation

    def _validate_parameters(self) -> None:
        if self.family in (Family.EX1_POS, Family.EX1_NEG) and not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.family is Family.EX2 and not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if self.family is Family.EX3 and not self.A > math.sqrt(2.0):
            raise ValueError(f"A must exceed sqrt(2), got {self.A}")
        if not self.scale > 0:
            raise ValueError(f"scale must be positive, got {self.scale}")
        if self.family is Family.TABLE and len(self.table_t) < 2:
            raise ValueError("table profile without samples")

    def _check_ellipticity(self) -> None:
        grid = np.linspace(self.t_min, self.t_max, ELLIPTICITY_SAMPLES)
        h = 1.0 + self._g(grid)
        lowest = float(h.min())
        if self.family is Family.EX1_NEG:
            lowest = min(lowest, 1.0 - self.scale * self.t_min ** (-self.gamma))
        if self.family is Family.TABLE:
            lowest = min(lowest, 1.0 + min(self.table_g))
        if not np.all(np.isfinite(h)) or lowest < self.eps_ell:
            raise EllipticityViolation(
                f"{self.family} profile: min(1 + g) = {lowest:.6g} < {self.eps_ell}"
            )
        if self.family is Family.EX3:
            # one period covers the whole range of g
            period = np.linspace(0.0, 2.0 * math.pi, ELLIPTICITY_SAMPLES)
            peak = float(np.max(np.abs(self._g(period))))
            if peak >= 1.0:
                raise EllipticityViolation(f"ex3 profile with A={self.A}: sup |g| = {peak:.6g} >= 1")

    # Closed forms

    def _g(self, t: np.ndarray) -> np.ndarray:
        f = self.family
        if f is Family.ZERO:
            return np.zeros_like(t)
        if f is Family.CONST:
            return np.full_like(t, self.c)
        if f is Family.EX1_POS:
            return self.scale * t ** (-self.gamma)
        if f is Family.EX1_NEG:
            return -self.scale * t ** (-self.gamma)
        if f is Family.EX2:
            return self.scale * np.sin(t) * t ** (-self.beta)
        if f is Family.EX3:
            c1, c2 = ex3_constants(self.n)
            s, co = np.sin(t), np.cos(t)
            return (-c1 * s - c2 * co) / (self.A + s - co)
        return np.interp(t, np.asarray(self.table_t), np.asarray(self.table_g))

    def _dg(self, t: np.ndarray) -> np.ndarray:
        f = self.family
        if f in (Family.ZERO, Family.CONST):
            return np.zeros_like(t)
        if f is Family.EX1_POS:
            return -self.scale * self.gamma * t ** (-self.gamma - 1.0)
        if f is Family.EX1_NEG:
            return self.scale * self.gamma * t ** (-self.gamma - 1.0)
        if f is Family.EX2:
            return self.scale * (np.cos(t) * t ** (-self.beta) - self.beta * np.sin(t) * t ** (-self.beta - 1.0))
        if f is Family.EX3:
            c1, c2 = ex3_constants(self.n)
            s, co = np.sin(t), np.cos(t)
            num, den = -c1 * s - c2 * co, self.A + s - co
            dnum, dden = -c1 * co + c2 * s, co + s
            return (dnum * den - num * dden) / den ** 2
        # centered differences on the table nodes
        nodes = np.asarray(self.table_t)
        slopes = np.gradient(np.asarray(self.table_g), nodes)
        return np.interp(t, nodes, slopes)

    @property
    def is_closed_form(self) -> bool:
        return self.family is not Family.TABLE

    @property
    def sup_abs(self) -> float:
        """Upper bound for sup |g| on the window"""
        f = self.family
        if f is Family.ZERO:
            return 0.0
        if f is Family.CONST:
            return abs(self.c)
        if f in (Family.EX1_POS, Family.EX1_NEG):
            return self.scale * self.t_min ** (-self.gamma)
        if f is Family.EX2:
            return self.scale * self.t_min ** (-self.beta)
        if f is Family.EX3:
            c1, c2 = ex3_constants(self.n)
            return math.hypot(c1, c2) / (self.A - math.sqrt(2.0))
        return float(np.max(np.abs(self.table_g)))


def _checked(p: RadialProfile, t: ArrayLike) -> np.ndarray:
    arr = np.asarray(t, dtype=float)
    if arr.size and (arr.min() < p.t_min - DOMAIN_SLACK or arr.max() > p.t_max + DOMAIN_SLACK):
        raise OutOfDomain(
            f"t outside [{p.t_min:.6g}, {p.t_max:.6g}]: [{arr.min():.6g}, {arr.max():.6g}]"
        )
    return arr


def _unwrap(values: np.ndarray, t: ArrayLike) -> ArrayLike:
    return float(values) if np.ndim(t) == 0 else values


def eval_g(p: RadialProfile, t: ArrayLike) -> ArrayLike:
    """g at t = -log r (scalar or array)"""
    arr = _checked(p, t)
    values = p._g(arr)
    if p.family is Family.TABLE and np.any(1.0 + values < p.eps_ell):
        raise EllipticityViolation("interpolated table leaves the elliptic range")
    return _unwrap(values, t)


def eval_g_of_r(p: RadialProfile, r: ArrayLike) -> ArrayLike:
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= 0):
        raise OutOfDomain("r must be positive")
    values = eval_g(p, -np.log(r_arr))
    return _unwrap(np.asarray(values), r)


def eval_dg_dt(p: RadialProfile, t: ArrayLike) -> ArrayLike:
    """dg/dt = -r g'(r); tables use centered differences"""
    arr = _checked(p, t)
    return _unwrap(p._dg(arr), t)


def log_grid(p: RadialProfile, step: float = 1e-2) -> np.ndarray:
    """Uniform t-grid covering the window with spacing at most `step`"""
    count = int(math.ceil((p.t_max - p.t_min) / step)) + 1
    return np.linspace(p.t_min, p.t_max, max(count, 3))
