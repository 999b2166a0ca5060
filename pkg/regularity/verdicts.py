"""
Verdict types shared by every analysis stage
Status, rule tags and the aggregated regularity verdict
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Mapping, Optional, Tuple

from .errors import ContradictoryVerdicts


class Status(Enum):
    """Outcome of a single criterion"""
    HOLDS_ANALYTIC = "HOLDS_ANALYTIC"
    FAILS_ANALYTIC = "FAILS_ANALYTIC"
    HOLDS_NUMERIC_WINDOW = "HOLDS_NUMERIC_WINDOW"
    FAILS_NUMERIC_WINDOW = "FAILS_NUMERIC_WINDOW"
    INCONCLUSIVE = "INCONCLUSIVE"

    def __str__(self) -> str:
        return self.value

    @property
    def holds(self) -> bool:
        return self in (Status.HOLDS_ANALYTIC, Status.HOLDS_NUMERIC_WINDOW)

    @property
    def fails(self) -> bool:
        return self in (Status.FAILS_ANALYTIC, Status.FAILS_NUMERIC_WINDOW)

    @property
    def analytic(self) -> bool:
        return self in (Status.HOLDS_ANALYTIC, Status.FAILS_ANALYTIC)

    @classmethod
    def from_bool(cls, value: bool, analytic: bool = True) -> "Status":
        """Map a decided boolean to the analytic or numeric pair"""
        if analytic:
            return cls.HOLDS_ANALYTIC if value else cls.FAILS_ANALYTIC
        return cls.HOLDS_NUMERIC_WINDOW if value else cls.FAILS_NUMERIC_WINDOW


class Rule(Enum):
    """Which result a verdict was derived from"""
    STABILITY = "stability"
    STABILITY_VANISHING_GRADIENT = "stability-vanishing-gradient"
    COMPARISON = "comparison"
    GROWTH = "growth"
    GRADIENT_BOUND = "gradient-bound"
    MEAN_OSCILLATION = "mean-oscillation"

    def __str__(self) -> str:
        return self.value

    @property
    def tag(self) -> str:
        """Citation tag written to reports"""
        return CITATION_TAGS[self]


CITATION_TAGS = {
    Rule.STABILITY: "Prop1",
    Rule.STABILITY_VANISHING_GRADIENT: "Prop1-Corollary",
    Rule.COMPARISON: "Prop2",
    Rule.GROWTH: "Prop3",
    Rule.GRADIENT_BOUND: "Thm2",
    Rule.MEAN_OSCILLATION: "Appendix",
}


@dataclass(frozen=True)
class Verdict:
    """A status plus the numbers that justify it"""
    status: Status
    evidence: Mapping[str, float] = field(default_factory=dict)
    rule: Optional[Rule] = None

    @property
    def holds(self) -> bool:
        return self.status.holds

    @property
    def fails(self) -> bool:
        return self.status.fails

    def with_rule(self, rule: Rule) -> "Verdict":
        return Verdict(self.status, dict(self.evidence), rule)

    def to_record(self, criterion: str) -> Dict[str, Any]:
        """Serialize in the fixed report field order"""
        return {
            "criterion": criterion,
            "status": str(self.status),
            "evidence": {k: float(v) for k, v in self.evidence.items()},
            "paper_tag": self.rule.tag if self.rule else None,
        }


def inconclusive(**evidence: float) -> Verdict:
    return Verdict(Status.INCONCLUSIVE, evidence)


@dataclass(frozen=True)
class ModulusReport:
    """Profile-level modulus verdicts and window partial integrals"""
    dini: Verdict
    square_dini: Verdict
    total_variation: float
    total_variation_verdict: Verdict
    rgprime_bounded: Verdict
    positive_near_zero: Verdict
    sup_window_values: Mapping[str, float]


@dataclass(frozen=True)
class RegularityVerdict:
    """Aggregated regularity classification at the origin"""
    lipschitz_at_0: Verdict
    differentiable_at_0: Verdict
    c1_neighborhood: Verdict
    non_lipschitz_exists: Verdict
    grad_zero_at_0: Verdict
    rationale: Tuple[Tuple[str, Rule], ...] = ()

    CRITERIA = (
        "lipschitz_at_0",
        "differentiable_at_0",
        "c1_neighborhood",
        "non_lipschitz_exists",
        "grad_zero_at_0",
    )

    def __post_init__(self):
        if self.lipschitz_at_0.holds and self.non_lipschitz_exists.holds:
            raise ContradictoryVerdicts("lipschitz_at_0 and non_lipschitz_exists both hold")
        for name in ("differentiable_at_0", "c1_neighborhood"):
            if getattr(self, name).holds and not self.lipschitz_at_0.holds:
                raise ContradictoryVerdicts(f"{name} holds while lipschitz_at_0 does not")

    def items(self) -> List[Tuple[str, Verdict]]:
        return [(name, getattr(self, name)) for name in self.CRITERIA]

    def to_records(self) -> List[Dict[str, Any]]:
        return [verdict.to_record(name) for name, verdict in self.items()]

    @property
    def all_inconclusive(self) -> bool:
        return all(v.status is Status.INCONCLUSIVE for _, v in self.items())


def window_divergence(partial: float, trend: float, cauchy: float,
                      threshold: float = 1e3, cauchy_tol: float = 1e-6) -> Status:
    """Numeric-window reading of a partial integral

    Args:
        partial: integral value at the window edge
        trend: increment over the last decade of t
        cauchy: absolute increment over the last decade of t

    Returns:
        FAILS_NUMERIC_WINDOW on blow-up, HOLDS_NUMERIC_WINDOW on a settled
        tail, INCONCLUSIVE otherwise
    """
    if not math.isfinite(partial) or (partial > threshold and trend > 0):
        return Status.FAILS_NUMERIC_WINDOW
    if partial < threshold and cauchy < cauchy_tol:
        return Status.HOLDS_NUMERIC_WINDOW
    return Status.INCONCLUSIVE
