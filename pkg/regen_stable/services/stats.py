"""
Statistics helpers shared by the experiment runners.
"""
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from regen_stable.errors import InvalidInputError
from regen_stable.models import CheckResult

QUANTILE_LEVELS = (0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95)


def mean_and_se(samples: Sequence[float]) -> Tuple[float, float]:
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise InvalidInputError("no samples")
    if x.size == 1:
        return float(x[0]), 0.0
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size))


def quantile_pairs(
    samples: Sequence[float], levels: Sequence[float] = QUANTILE_LEVELS
) -> List[Tuple[float, float]]:
    levels = sorted(levels)
    values = np.quantile(np.asarray(samples, dtype=float), levels)
    return [(float(q), float(v)) for q, v in zip(levels, values)]


def binomial_se(prob: float, n: int) -> float:
    return math.sqrt(max(prob * (1.0 - prob), 0.0) / n)


def combined_z(a: float, se_a: float, b: float, se_b: float) -> float:
    """(a - b) / sqrt(se_a² + se_b²); 0 for two exact equal values, inf for exact unequal ones."""
    se = math.hypot(se_a, se_b)
    if se == 0:
        return 0.0 if a == b else math.inf
    return (a - b) / se


def rel_error(value: float, target: float) -> float:
    """|value - target| / |target|; 0 when both vanish, inf for a nonzero value against 0."""
    if target == 0:
        return 0.0 if value == 0 else math.inf
    return abs(value - target) / abs(target)


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> Tuple[float, float]:
    """Two-sample Kolmogorov–Smirnov statistic and p-value."""
    result = stats.ks_2samp(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    return float(result.statistic), float(result.pvalue)


def bootstrap_ks(
    a: Sequence[float], b: Sequence[float], n_boot: int, rng: np.random.Generator
) -> Tuple[float, float]:
    """KS distance of (a, b) and its bootstrap standard error (both samples resampled)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ks, _ = ks_two_sample(a, b)
    boot = np.empty(n_boot)
    for k in range(n_boot):
        ra = a[rng.integers(0, a.size, a.size)]
        rb = b[rng.integers(0, b.size, b.size)]
        boot[k] = stats.ks_2samp(ra, rb).statistic
    return ks, float(boot.std(ddof=1))


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    fit = stats.linregress(np.log(np.asarray(x, dtype=float)), np.log(np.asarray(y, dtype=float)))
    return float(fit.slope)


def quantile_asymmetry(samples: Sequence[float], q: float) -> Tuple[float, float]:
    """q-quantile plus (1-q)-quantile, and a bootstrap-free scale for it (the IQR over sqrt N)."""
    x = np.asarray(samples, dtype=float)
    lo, hi = np.quantile(x, [q, 1.0 - q])
    iqr = float(np.subtract(*np.quantile(x, [0.75, 0.25])))
    return float(lo + hi), iqr / math.sqrt(x.size)


def nonincreasing(values: Sequence[float], errors: Sequence[float], k_se: float, allowed: int = 1) -> bool:
    """True when values never increase by more than k_se combined errors, with up to `allowed`
    smaller inversions tolerated.
    """
    inversions = 0
    for (a, se_a), (b, se_b) in zip(zip(values, errors), zip(values[1:], errors[1:])):
        if b <= a:
            continue
        if b - a > k_se * math.hypot(se_a, se_b):
            return False
        inversions += 1
    return inversions <= allowed


def check(
    name: str,
    statistic: float,
    threshold: float,
    passed: Optional[bool] = None,
    detail: Optional[str] = None,
) -> CheckResult:
    """A check passes by default when |statistic| <= threshold."""
    if passed is None:
        passed = bool(abs(statistic) <= threshold)
    return CheckResult(
        name=name, statistic=float(statistic), threshold=float(threshold), passed=bool(passed), detail=detail
    )
