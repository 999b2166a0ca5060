"""
Error hierarchy for gslab
Every domain failure derives from GSLabError and from the closest builtin
"""


class GSLabError(Exception):
    """Base class for all gslab errors"""


class OutOfDomain(GSLabError, ValueError):
    """Evaluation point outside the profile window"""


class EllipticityViolation(GSLabError, ValueError):
    """1 + g dropped below the ellipticity floor"""


class UnsupportedDimension(GSLabError, ValueError):
    """Dimension outside the supported set"""


class ContradictoryVerdicts(GSLabError, RuntimeError):
    """Two mutually exclusive regularity verdicts both hold"""


class SignChange(GSLabError, ArithmeticError):
    """Radial solution lost positivity"""


class HypothesisUnmet(GSLabError):
    """A theorem was invoked outside its hypotheses"""


class TailTooLarge(GSLabError, ArithmeticError):
    """Truncated quadrature tail exceeds tolerance"""


class SingularSystem(GSLabError, ArithmeticError):
    """Sparse solve failed or returned a bad residual"""


class ConfigInvalid(GSLabError, ValueError):
    """Run configuration failed validation"""
