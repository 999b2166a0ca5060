"""
Continuity moduli of a radial profile
Dini, square-Dini, total variation and |r g'(r)| bounds with analytic tables per family
"""

import logging
import math
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import OutOfDomain
from .profiles import Family, RadialProfile, eval_dg_dt, eval_g, log_grid
from .quadrature import adaptive_simpson
from .verdicts import ModulusReport, Rule, Status, Verdict, window_divergence

logger = logging.getLogger(__name__)

# one decade of r, measured in t
LAST_DECADE = math.log(10.0)


def _dini_holds(p: RadialProfile) -> Optional[bool]:
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


def _square_dini_holds(p: RadialProfile) -> Optional[bool]:
    f = p.family
    if f in (Family.EX1_POS, Family.EX1_NEG):
        return p.gamma > 0.5
    if f is Family.EX2:
        return p.beta > 0.5
    return _dini_holds(p)


def _variation_finite(p: RadialProfile) -> Optional[bool]:
    f = p.family
    if f in (Family.ZERO, Family.CONST, Family.EX1_POS, Family.EX1_NEG):
        return True
    if f is Family.EX2:
        return p.beta > 1.0
    if f is Family.EX3:
        return False
    return None


def _window_verdict(p: RadialProfile, integrand: Callable[[float], float],
                    analytic: Optional[bool], rule: Rule) -> Verdict:
    """Partial integral over the window with last-decade increment as evidence"""
    split = max(p.t_min, p.t_max - LAST_DECADE)
    head = adaptive_simpson(integrand, p.t_min, split).value
    tail = adaptive_simpson(integrand, split, p.t_max).value
    partial = head + tail
    evidence = {"partial_integral": partial, "last_decade_increment": tail, "t_end": p.t_max}
    if analytic is None:
        status = window_divergence(partial, trend=tail, cauchy=abs(tail))
        if status is Status.INCONCLUSIVE:
            logger.warning(f"⚠️ {p.family} window integral {partial:.6g} is inconclusive")
    else:
        status = Status.from_bool(analytic)
    return Verdict(status, evidence, rule)


def dini_test(p: RadialProfile) -> Verdict:
    """Dini condition for omega(r) = |g(r)|, i.e. the integral of |g| in t"""
    return _window_verdict(p, lambda t: abs(eval_g(p, t)), _dini_holds(p), Rule.MEAN_OSCILLATION)


def square_dini_test(p: RadialProfile) -> Verdict:
    return _window_verdict(p, lambda t: eval_g(p, t) ** 2, _square_dini_holds(p), Rule.STABILITY)


def _table_variation(p: RadialProfile, t_end: float) -> float:
    t = np.asarray(p.table_t)
    g = np.asarray(p.table_g)
    inside = t <= t_end
    nodes = np.append(t[inside], t_end) if t[inside][-1] < t_end else t[inside]
    values = np.interp(nodes, t, g)
    return float(np.abs(np.diff(values)).sum())


def total_variation(p: RadialProfile, T_test: float = math.inf) -> Tuple[float, Verdict]:
    """Integral of |dg/dt| over [t_min, T_test] plus a finiteness verdict

    T_test = inf asks for the whole tail: closed forms with a finite known
    total return it, infinite ones return math.inf.

    Returns:
        (value, verdict)
    """
    t_end = p.t_max if math.isinf(T_test) else float(T_test)
    if not p.t_min <= t_end <= p.t_max + 1e-9:
        raise OutOfDomain(f"T_test={T_test} outside the profile window")

    if p.family is Family.TABLE:
        window = _table_variation(p, t_end)
    else:
        window = adaptive_simpson(lambda t: abs(eval_dg_dt(p, t)), p.t_min, t_end).value

    finite = _variation_finite(p)
    evidence = {"window_variation": window, "t_end": t_end}
    if p.family is Family.EX3:
        period = 2.0 * math.pi
        count = int((p.t_max - p.t_min) // period)
        per_period = [
            adaptive_simpson(lambda t: abs(eval_dg_dt(p, t)), p.t_min + k * period, p.t_min + (k + 1) * period).value
            for k in range(count)
        ]
        if per_period:
            evidence["min_period_variation"] = min(per_period)
    if p.family is Family.EX2 and finite:
        evidence["tail_bound"] = p.scale * (t_end ** (1.0 - p.beta) / (p.beta - 1.0) + t_end ** (-p.beta))

    if finite is None:
        # piecewise-linear tables always have finite window variation
        status = Status.HOLDS_NUMERIC_WINDOW if math.isfinite(window) else Status.FAILS_NUMERIC_WINDOW
        return window, Verdict(status, evidence, Rule.GROWTH)

    value = window
    if math.isinf(T_test):
        if not finite:
            value = math.inf
        elif p.family in (Family.EX1_POS, Family.EX1_NEG):
            # monotone, so the variation is the drop from the outer edge to 0
            value = p.scale * p.t_min ** (-p.gamma)
        elif p.family in (Family.ZERO, Family.CONST):
            value = 0.0
    return value, Verdict(Status.from_bool(finite), evidence, Rule.GROWTH)


def rgprime_bounded(p: RadialProfile) -> Verdict:
    """sup |r g'(r)| = sup |dg/dt| on the window"""
    grid = log_grid(p, step=1e-2)
    sup = float(np.max(np.abs(eval_dg_dt(p, grid))))
    status = Status.HOLDS_ANALYTIC if p.is_closed_form else Status.HOLDS_NUMERIC_WINDOW
    return Verdict(status, {"sup_abs_dg_dt": sup}, Rule.GRADIENT_BOUND)


def positive_near_zero(p: RadialProfile) -> Verdict:
    f = p.family
    if f is Family.TABLE:
        tail = np.asarray(p.table_t) >= p.t_max - LAST_DECADE
        lowest = float(np.min(np.asarray(p.table_g)[tail]))
        return Verdict(Status.from_bool(lowest > 0, analytic=False), {"min_tail_g": lowest}, Rule.GROWTH)
    positive = f is Family.EX1_POS or (f is Family.CONST and p.c > 0)
    return Verdict(Status.from_bool(positive), {}, Rule.GROWTH)


def modulus_report(p: RadialProfile) -> ModulusReport:
    logger.debug(f"🔍 Modulus report for {p.family}")
    dini = dini_test(p)
    square = square_dini_test(p)
    tv, tv_verdict = total_variation(p)
    return ModulusReport(
        dini=dini,
        square_dini=square,
        total_variation=tv,
        total_variation_verdict=tv_verdict,
        rgprime_bounded=rgprime_bounded(p),
        positive_near_zero=positive_near_zero(p),
        sup_window_values={
            "dini": dini.evidence["partial_integral"],
            "square_dini": square.evidence["partial_integral"],
            "total_variation": tv_verdict.evidence["window_variation"],
        },
    )
