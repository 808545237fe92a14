"""Statistical machinery: Student's t distribution, Welch's unequal-variance
t-test, and Spearman rank correlation with average-rank ties.

The t distribution is evaluated through the regularized incomplete beta
function I_x(a, b), computed with the modified Lentz continued fraction.
For t >= 0 with df degrees of freedom,

    two-sided p = I_x(df/2, 1/2)   where x = df / (df + t^2)
    CDF(t)      = 1 - p / 2        (and p / 2 for t < 0)

which makes CDF(0) exactly 0.5 and p(t=0) exactly 1 with no cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import GameError

_MAX_ITERATIONS = 500
_EPS = 3.0e-16
_FPMIN = 1.0e-300


# --------------------------------------------------------------------------
# Regularized incomplete beta
# --------------------------------------------------------------------------

def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz method)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITERATIONS + 1):
        m2 = 2 * m
        # Even step of the recurrence.
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        # Odd step.
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise RuntimeError(f"incomplete beta did not converge for a={a} b={b} x={x}")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if a <= 0 or b <= 0:
        raise ValueError("shape parameters must be positive")
    if x < 0.0 or x > 1.0:
        raise ValueError("x must be in [0, 1]")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    # Use the continued fraction on whichever side converges fast.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


# --------------------------------------------------------------------------
# Student's t
# --------------------------------------------------------------------------

def student_t_two_sided_p(t: float, df: float) -> float:
    """P(|T| >= |t|) for T ~ Student's t with df degrees of freedom."""
    if df <= 0:
        raise ValueError("degrees of freedom must be positive")
    if t == 0.0:
        return 1.0
    x = df / (df + t * t)
    return regularized_incomplete_beta(df / 2.0, 0.5, x)


def student_t_cdf(t: float, df: float) -> float:
    """P(T <= t) for T ~ Student's t with df degrees of freedom."""
    p = student_t_two_sided_p(t, df)
    if t >= 0.0:
        return 1.0 - p / 2.0
    return p / 2.0


# --------------------------------------------------------------------------
# Welch's t-test
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TTestResult:
    t_statistic: float
    degrees_freedom: float
    p_value: float
    mean_a: float
    mean_b: float
    n_a: int
    n_b: int

    def to_dict(self) -> dict:
        """JSON-friendly view using the report field names."""
        return {
            "tStatistic": self.t_statistic,
            "degreesFreedom": self.degrees_freedom,
            "pValue": self.p_value,
            "meanA": self.mean_a,
            "meanB": self.mean_b,
            "nA": self.n_a,
            "nB": self.n_b,
        }


def _mean_and_variance(sample: Sequence[float]) -> tuple[float, float]:
    n = len(sample)
    mean = sum(sample) / n
    variance = sum((x - mean) ** 2 for x in sample) / (n - 1)
    return mean, variance


def welch_t_test(sample_a: Sequence[float], sample_b: Sequence[float]) -> TTestResult:
    """Unequal-variance t-test with Welch-Satterthwaite degrees of freedom.

    Two-sided p. Identical samples give t == 0 and p == 1 exactly.
    Raises SAMPLE_TOO_SMALL below 2 observations per side and
    ZERO_VARIANCE_BOTH when neither side varies (t undefined).
    """
    n_a, n_b = len(sample_a), len(sample_b)
    if n_a < 2 or n_b < 2:
        raise GameError("SAMPLE_TOO_SMALL", f"need >= 2 per side, got {n_a} and {n_b}")
    mean_a, var_a = _mean_and_variance(sample_a)
    mean_b, var_b = _mean_and_variance(sample_b)
    if var_a == 0.0 and var_b == 0.0:
        raise GameError("ZERO_VARIANCE_BOTH", "both samples are constant")
    se_a, se_b = var_a / n_a, var_b / n_b
    se2 = se_a + se_b
    t = (mean_a - mean_b) / math.sqrt(se2)
    df = se2 * se2 / (se_a * se_a / (n_a - 1) + se_b * se_b / (n_b - 1))
    return TTestResult(
        t_statistic=t,
        degrees_freedom=df,
        p_value=student_t_two_sided_p(t, df),
        mean_a=mean_a,
        mean_b=mean_b,
        n_a=n_a,
        n_b=n_b,
    )


# --------------------------------------------------------------------------
# Spearman rank correlation
# --------------------------------------------------------------------------

def average_ranks(values: Sequence[float]) -> list[float]:
    """1-based ranks; tied values share the average of their positions."""
    n = len(values)
    order = sorted(range(n), key=lambda i: values[i])
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[order[j + 1]] == values[order[i]]:
            j += 1
        # Positions i..j (0-based) average to (i + j) / 2; ranks are 1-based.
        shared = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = shared
        i = j + 1
    return ranks


def spearman_rho(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Pearson correlation of the average ranks. Result lies in [-1, 1]."""
    if len(xs) != len(ys):
        raise ValueError("paired samples must have equal length")
    if len(xs) < 2:
        raise GameError("SAMPLE_TOO_SMALL", "need >= 2 pairs")
    rx, ry = average_ranks(xs), average_ranks(ys)
    n = len(rx)
    mx, my = sum(rx) / n, sum(ry) / n
    cov = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    var_x = sum((a - mx) ** 2 for a in rx)
    var_y = sum((b - my) ** 2 for b in ry)
    if var_x == 0.0 or var_y == 0.0:
        raise GameError("CONSTANT_INPUT", "rank correlation undefined for a constant side")
    rho = cov / math.sqrt(var_x * var_y)
    # Clamp float jitter only; the math keeps rho in [-1, 1].
    return max(-1.0, min(1.0, rho))
