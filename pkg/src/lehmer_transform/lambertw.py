"""Principal branch of the Lambert W function on the real line."""
from __future__ import annotations

import math

from .errors import BelowBranchPointError

BRANCH_POINT = -math.exp(-1.0)
_MAX_ITER = 64


def _initial_guess(x: float) -> float:
    if x < -0.25:
        # series about the branch point in p = sqrt(2 (e x + 1))
        p = math.sqrt(max(0.0, 2.0 * (math.e * x + 1.0)))
        return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p**3
    return math.log1p(x)


def lambert_w0(x: float) -> float:
    """Real ``w >= -1`` with ``w * exp(w) = x``, for ``x >= -1/e``.

    Halley iteration from ``log(1 + x)`` (or the branch-point series for
    ``x`` near ``-1/e``).

    >>> lambert_w0(0.0)
    0.0
    >>> round(lambert_w0(1.0), 12)
    0.567143290410
    """
    x = float(x)
    if math.isnan(x):
        raise ValueError("lambert_w0 of NaN")
    if x < BRANCH_POINT:
        # the float nearest -1/e rounds just below it; let that one through
        if x < BRANCH_POINT - 4 * math.ulp(BRANCH_POINT):
            raise BelowBranchPointError(f"W0 is not real for x={x!r} < -1/e")
        return -1.0
    if x == 0.0:
        return 0.0
    if x == math.inf:
        return math.inf
    w = _initial_guess(x)
    for _ in range(_MAX_ITER):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        if denom == 0.0:
            break
        dw = f / denom
        w -= dw
        if abs(dw) <= 4e-16 * (1.0 + abs(w)):
            break
    return max(w, -1.0)
