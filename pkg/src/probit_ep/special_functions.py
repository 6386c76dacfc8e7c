"""Scalar normal-distribution helpers used by every EP site update.

All functions take and return Python floats.  The delicate case is the
lower tail: the site update evaluates ``zeta1`` at arguments that can be
strongly negative for misclassified observations, where the naive ratio
``phi(x) / Phi(x)`` is 0/0 in double precision.  There the ratio is
computed in log space instead.
"""

import math

from scipy.special import log_ndtr

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_SQRT1_2 = math.sqrt(0.5)

# Below this point the direct ratio phi/Phi starts losing accuracy;
# well above the ~ -37 underflow of Phi itself, so both branches are
# safe in a neighbourhood of the switch.
_TAIL_SWITCH = -5.0

__all__ = ["norm_pdf", "norm_cdf", "norm_logcdf", "zeta1", "zeta2"]


def norm_pdf(x: float) -> float:
    """Standard normal density phi(x)."""
    return math.exp(-0.5 * x * x - _LOG_SQRT_2PI)


def norm_cdf(x: float) -> float:
    """Standard normal distribution function Phi(x).

    Computed via erfc so the lower tail keeps full relative accuracy
    down to the underflow threshold of double precision.
    """
    return 0.5 * math.erfc(-x * _SQRT1_2)


def norm_logcdf(x: float) -> float:
    """log Phi(x), finite for any finite x."""
    return float(log_ndtr(x))


def zeta1(x: float) -> float:
    """Inverse Mills ratio phi(x) / Phi(x).

    Strictly positive and strictly decreasing; behaves like -x for
    x -> -inf and decays like phi(x) for x -> +inf.
    """
    if x > _TAIL_SWITCH:
        return norm_pdf(x) / norm_cdf(x)
    # log-space evaluation: phi underflows near x = -38 and Phi well
    # before that, but log phi - log Phi stays moderate.
    return math.exp(-0.5 * x * x - _LOG_SQRT_2PI - float(log_ndtr(x)))


def zeta2(x: float) -> float:
    """The second Mills-ratio function -zeta1(x)^2 - x*zeta1(x).

    Always in (-1, 0) mathematically; for large positive x the value
    underflows to -0.0/0.0, which callers must treat as "no update".
    Written as -zeta1*(zeta1 + x) so the algebraic relation between the
    two functions holds exactly in floating point.
    """
    z1 = zeta1(x)
    return -z1 * (z1 + x)
