"""
Regularity analysis of Gilbarg-Serrin operators
Profiles, moduli of continuity, mean oscillation and the dynamical-system classifier
"""

from .errors import (
    ConfigInvalid,
    ContradictoryVerdicts,
    EllipticityViolation,
    GSLabError,
    HypothesisUnmet,
    OutOfDomain,
    SignChange,
    SingularSystem,
    TailTooLarge,
    UnsupportedDimension,
)
from .verdicts import ModulusReport, RegularityVerdict, Rule, Status, Verdict
from .profiles import Family, RadialProfile, eval_dg_dt, eval_g, eval_g_of_r
from .moduli import dini_test, modulus_report, square_dini_test, total_variation
from .oscillation import MatrixNorm, ball_mean, dmo_test, matrix_mean_oscillation_at_zero, oscillation_curve
from .dynsys import classification, classify, compute_R_matrix, cumulative_S, gs_R_matrix

__all__ = [
    'GSLabError',
    'OutOfDomain',
    'EllipticityViolation',
    'UnsupportedDimension',
    'ContradictoryVerdicts',
    'SignChange',
    'HypothesisUnmet',
    'TailTooLarge',
    'SingularSystem',
    'ConfigInvalid',
    'Status',
    'Rule',
    'Verdict',
    'ModulusReport',
    'RegularityVerdict',
    'Family',
    'RadialProfile',
    'eval_g',
    'eval_g_of_r',
    'eval_dg_dt',
    'dini_test',
    'square_dini_test',
    'total_variation',
    'modulus_report',
    'MatrixNorm',
    'ball_mean',
    'matrix_mean_oscillation_at_zero',
    'oscillation_curve',
    'dmo_test',
    'compute_R_matrix',
    'gs_R_matrix',
    'cumulative_S',
    'classification',
    'classify',
]
