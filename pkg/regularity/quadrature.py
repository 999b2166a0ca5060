"""
Quadrature helpers
Adaptive Simpson for scalar integrals, Gauss-Legendre panels and sphere rules for batched ones
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np

from .errors import UnsupportedDimension


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float
    evaluations: int


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-12,
    max_depth: int = 50,
    panel: float = 1.0,
) -> QuadratureResult:
    """Adaptive Simpson's rule with Richardson correction

    The interval is first split into panels no wider than `panel` so that
    oscillatory integrands cannot fool the first three-point estimate.

    Args:
        f: scalar integrand
        a: lower bound
        b: upper bound
        rel_tol: relative tolerance against the coarse estimate
        abs_tol: absolute tolerance floor
        max_depth: recursion limit per panel

    Returns:
        QuadratureResult with value, accumulated error estimate and the
        number of integrand evaluations
    """
    if a == b:
        return QuadratureResult(0.0, 0.0, 0)
    if a > b:
        res = adaptive_simpson(f, b, a, rel_tol, abs_tol, max_depth, panel)
        return QuadratureResult(-res.value, res.error, res.evaluations)

    calls = 0

    def _f(x: float) -> float:
        nonlocal calls
        calls += 1
        return float(f(x))

    def _simpson(fa: float, fm: float, fb: float, h: float) -> float:
        return h / 3.0 * (fa + 4.0 * fm + fb)

    def _adaptive(a: float, b: float, fa: float, fm: float, fb: float,
                  s_whole: float, depth: int, tol: float) -> Tuple[float, float]:
        m = (a + b) / 2.0
        h = (b - a) / 2.0
        flm = _f((a + m) / 2.0)
        frm = _f((m + b) / 2.0)

        s_left = _simpson(fa, flm, fm, h / 2.0)
        s_right = _simpson(fm, frm, fb, h / 2.0)
        s_combined = s_left + s_right
        error_estimate = (s_combined - s_whole) / 15.0

        if depth >= max_depth or abs(error_estimate) < tol:
            return s_combined + error_estimate, abs(error_estimate)

        left, left_err = _adaptive(a, m, fa, flm, fm, s_left, depth + 1, tol / 2.0)
        right, right_err = _adaptive(m, b, fm, frm, fb, s_right, depth + 1, tol / 2.0)
        return left + right, left_err + right_err

    n_panels = max(1, math.ceil((b - a) / panel))
    edges = np.linspace(a, b, n_panels + 1)
    samples = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        lo, hi = float(lo), float(hi)
        fa, fm, fb = _f(lo), _f((lo + hi) / 2.0), _f(hi)
        samples.append((lo, hi, fa, fm, fb, _simpson(fa, fm, fb, (hi - lo) / 2.0)))

    coarse = sum(s[-1] for s in samples)
    tol = max(abs_tol, rel_tol * abs(coarse)) / n_panels

    total, error = 0.0, 0.0
    for lo, hi, fa, fm, fb, s_whole in samples:
        value, err = _adaptive(lo, hi, fa, fm, fb, s_whole, 0, tol)
        total += value
        error += err
    return QuadratureResult(total, error, calls)


@lru_cache(maxsize=16)
def _legendre_rule(order: int) -> Tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def gauss_panels(a: float, b: float, width: float = 0.25, order: int = 10) -> Tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on [a, b]"""
    if b <= a:
        return np.empty(0), np.empty(0)
    x, w = _legendre_rule(order)
    n_panels = max(1, math.ceil((b - a) / width))
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def sphere_rule(n: int, n_polar: int = 64, n_azimuth: int = 128) -> Tuple[np.ndarray, np.ndarray]:
    """Unit vectors and weights of a normalized quadrature on S^{n-1}

    n = 2 uses the trapezoid rule on the circle (n_azimuth points). n = 3 uses
    Gauss-Legendre in cos(polar) times trapezoid in azimuth. Weights sum to 1.
    """
    if n == 2:
        phi = 2.0 * np.pi * np.arange(n_azimuth) / n_azimuth
        points = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
        return points, np.full(n_azimuth, 1.0 / n_azimuth)
    if n == 3:
        mu, wmu = _legendre_rule(n_polar)
        phi = 2.0 * np.pi * np.arange(n_azimuth) / n_azimuth
        s = np.sqrt(1.0 - mu ** 2)
        points = np.stack([
            (s[:, None] * np.cos(phi)[None, :]).ravel(),
            (s[:, None] * np.sin(phi)[None, :]).ravel(),
            np.repeat(mu, n_azimuth),
        ], axis=-1)
        weights = np.repeat(wmu, n_azimuth) / (2.0 * n_azimuth)
        return points, weights
    raise UnsupportedDimension(f"sphere rule not available for n={n}")
