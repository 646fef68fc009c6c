"""Boys function F_m(x) = int_0^1 t^(2m) exp(-x t^2) dt."""
from __future__ import annotations

import math

from scipy.special import gamma, gammainc

_SERIES_LIMIT = 12.0


def boys(m: int, x: float) -> float:
    """Boys function of order ``m`` at ``x`` (relative error ~1e-14).

    Uses the convergent positive series for small ``x`` and the regularized
    lower incomplete gamma function otherwise.
    """
    if m < 0 or x < 0:
        raise ValueError(f"boys needs m >= 0 and x >= 0, got m={m}, x={x}")
    if x < _SERIES_LIMIT:
        # F_m(x) = exp(-x) sum_k (2x)^k / ((2m+1)(2m+3)...(2m+2k+1))
        term = 1.0 / (2 * m + 1)
        total = term
        k = 0
        while True:
            k += 1
            term *= 2.0 * x / (2 * m + 2 * k + 1)
            total += term
            if term < 1e-17 * total:
                break
        return math.exp(-x) * total
    a = m + 0.5
    return float(gamma(a) * gammainc(a, x) / (2.0 * x ** a))


def boys_array(m_max: int, x: float) -> list[float]:
    """F_0..F_m_max at ``x``; top order computed directly, the rest by downward recursion."""
    out = [0.0] * (m_max + 1)
    out[m_max] = boys(m_max, x)
    ex = math.exp(-x)
    for m in range(m_max - 1, -1, -1):
        out[m] = (2.0 * x * out[m + 1] + ex) / (2 * m + 1)
    return out
