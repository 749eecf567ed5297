"""Order-statistic quantiles, the DKW gap term and Clopper-Pearson intervals."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import kernels
from .errors import EmptySamples, InvalidParams

# absorbs representation error in level * n (e.g. 0.9 * 1e4 = 9000.000000000002)
_RANK_EPS = 1e-9


def order_rank(level: float, n: int) -> int:
    """1-based rank of the conservative (ceiling) empirical quantile."""
    if not 0.0 <= level <= 1.0:
        raise InvalidParams(f"quantile level must be in [0, 1], got {level}")
    return min(n, max(1, math.ceil(level * n - _RANK_EPS)))


def empirical_quantile(samples, level: float) -> float:
    """Smallest sample value with at least ``ceil(level * n)`` samples at or below it.

    No interpolation: the result is always one of the samples.  ``-inf``
    entries sort below every real; ``+inf`` and NaN are rejected.
    """
    x = np.asarray(samples, dtype=np.float64).ravel()
    if x.size == 0:
        raise EmptySamples("cannot take a quantile of an empty sample set")
    if np.isnan(x).any() or np.isposinf(x).any():
        raise InvalidParams("samples must not contain NaN or +inf")
    return float(kernels.kth_smallest(x, order_rank(level, x.size)))


def dkw_gamma(num_vertices: int, n: int, d: int, delta: float) -> float:
    """Coverage slack of the bucketed estimate that holds with probability 1 - delta.

    ``|V| * sqrt(ln(2 (d+1)^2 |V|^2 / delta) / (2 n))``: a DKW band per
    quantile estimate, union-bounded over ``(d+1)^2 |V|^2`` estimates and
    summed over at most ``|V|`` edges of the returned path.
    """
    if num_vertices < 1 or n < 1 or d < 1 or not 0.0 < delta < 1.0:
        raise InvalidParams(f"dkw_gamma needs |V|>=1, n>=1, d>=1, delta in (0,1); "
                            f"got {num_vertices}, {n}, {d}, {delta}")
    v = float(num_vertices)
    return v * math.sqrt(math.log(2.0 * (d + 1) ** 2 * v**2 / delta) / (2.0 * n))


@dataclass(frozen=True)
class TheoremBounds:
    gamma: float
    delta: float
    lower_level: float
    upper_level: float

    @classmethod
    def compute(cls, alpha: float, num_vertices: int, n: int, d: int, delta: float) -> "TheoremBounds":
        g = dkw_gamma(num_vertices, n, d, delta)
        lower = min(1.0, max(0.0, 1.0 - alpha - g))
        upper = min(1.0, max(0.0, 1.0 - alpha + alpha**2 / 2.0))
        return cls(g, delta, lower, upper)


def _bisect(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    # f(lo) is True, f(hi) is False
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid):
            lo = mid
        else:
            hi = mid
    return lo, hi


def clopper_pearson(successes: int, trials: int, confidence: float = 0.95,
                    tol: float = 1e-10) -> tuple[float, float]:
    """Exact two-sided binomial interval by bisection on the binomial tails."""
    k, N = int(successes), int(trials)
    if N < 1 or not 0 <= k <= N or not 0.0 < confidence < 1.0:
        raise InvalidParams(f"clopper_pearson needs 0 <= k <= N, N >= 1, conf in (0,1); "
                            f"got {successes}, {trials}, {confidence}")
    tail = (1.0 - confidence) / 2.0
    if k == 0:
        lo = 0.0
    else:
        # P(X >= k; p) increases in p
        lo, _ = _bisect(lambda p: stats.binom.sf(k - 1, N, p) <= tail, 0.0, 1.0, tol)
    if k == N:
        hi = 1.0
    else:
        # P(X <= k; p) decreases in p
        _, hi = _bisect(lambda p: stats.binom.cdf(k, N, p) > tail, 0.0, 1.0, tol)
    return lo, hi
