"""Inverse transform: recover the breve moment that produces a given statistic."""
from __future__ import annotations

import math
from dataclasses import dataclass
from math import factorial

import numpy as np

from .errors import ConstantSampleError, SeriesDivergingError, TargetOutOfRangeError
from .normalization import PositiveSample
from .transform import lehmer, lehmer_derivative, log_lehmer_taylor

BRACKET_CAP = 512.0
BISECTION_WIDTH = 1e-3
# targets this close (relatively) to an extreme are snapped onto it
ENDPOINT_SNAP = 1e-15
MAX_NEWTON = 60

SERIES_STEP = 1e-3
# half-integer offsets keep the removable singularity at s0 off the stencil
_STENCIL = np.array([-2.5, -1.5, -0.5, 0.5, 1.5, 2.5])


@dataclass(frozen=True)
class InversionResult:
    moment: float
    residual: float
    iterations: int
    method: str

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.moment)


def _require_increasing(h: PositiveSample):
    if h.is_constant:
        raise ConstantSampleError(
            "sample is constant after normalization; its transform has no inverse"
        )


def _classify_target(h: PositiveSample, target: float) -> float | None:
    """Return ``±inf`` for endpoint targets, ``None`` for interior ones."""
    if not math.isfinite(target):
        raise TargetOutOfRangeError(f"target {target!r} is not finite")
    if target >= h.max * (1 - ENDPOINT_SNAP):
        if target > h.max * (1 + ENDPOINT_SNAP):
            raise TargetOutOfRangeError(f"target {target!r} exceeds max {h.max!r}")
        return math.inf
    if target <= h.min * (1 + ENDPOINT_SNAP):
        if target < h.min * (1 - ENDPOINT_SNAP):
            raise TargetOutOfRangeError(f"target {target!r} is below min {h.min!r}")
        return -math.inf
    return None


def _bracket(h, target):
    lo, hi = -1.0, 1.0
    steps = 0
    while lehmer(h, lo) > target:
        lo *= 2.0
        steps += 1
        if -lo > BRACKET_CAP:
            raise TargetOutOfRangeError(
                f"target {target!r} not reached for s >= {-BRACKET_CAP}",
                residual=abs(lehmer(h, -BRACKET_CAP) - target),
            )
    while lehmer(h, hi) < target:
        hi *= 2.0
        steps += 1
        if hi > BRACKET_CAP:
            raise TargetOutOfRangeError(
                f"target {target!r} not reached for s <= {BRACKET_CAP}",
                residual=abs(lehmer(h, BRACKET_CAP) - target),
            )
    return lo, hi, steps


def invert(h: PositiveSample, target: float, tol: float = 1e-12) -> InversionResult:
    """Breve moment ``s`` with ``L(s) = target``.

    The extremes map to ``±inf``.  Interior targets are bracketed by
    doubling outward from ``[-1, 1]``, narrowed by bisection to width 1e-3
    and polished with Newton steps on the analytic derivative; a Newton
    step that leaves the current bracket is replaced by a bisection step.

    ``tol`` bounds the residual ``|L(s) - target|`` relative to
    ``max(1, |target|)``.
    """
    _require_increasing(h)
    target = float(target)
    end = _classify_target(h, target)
    if end is not None:
        return InversionResult(end, abs(lehmer(h, end) - target), 0, "bisection+newton")

    lo, hi, iterations = _bracket(h, target)
    while hi - lo > BISECTION_WIDTH:
        mid = 0.5 * (lo + hi)
        if lehmer(h, mid) < target:
            lo = mid
        else:
            hi = mid
        iterations += 1

    s = 0.5 * (lo + hi)
    scale = max(1.0, abs(target))
    best_s, best_res = s, math.inf
    for _ in range(MAX_NEWTON):
        iterations += 1
        f = lehmer(h, s) - target
        if abs(f) < best_res:
            best_s, best_res = s, abs(f)
        if f == 0.0:
            break
        if f < 0:
            lo = s
        else:
            hi = s
        slope = lehmer_derivative(h, s)
        nxt = s - f / slope if slope > 0 else math.nan
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        if abs(nxt - s) <= 2 * math.ulp(s) or hi - lo <= 2 * math.ulp(max(abs(lo), abs(hi))):
            break
        s = nxt

    if best_res > tol * scale:
        raise TargetOutOfRangeError(
            f"inversion stalled with residual {best_res:.3e} > tolerance", residual=best_res
        )
    return InversionResult(best_s, best_res, iterations, "bisection+newton")


def _fornberg_weights(offsets: np.ndarray, order: int) -> np.ndarray:
    """Finite-difference weights for the ``order``-th derivative at 0."""
    n = offsets.size
    # solve the moment conditions sum w_j x_j^m / m! = [m == order]
    vander = np.vander(offsets, n, increasing=True).T
    rhs = np.zeros(n)
    rhs[order] = factorial(order)
    return np.linalg.solve(vander, rhs)


def _stencil_coefficients(h, s0, terms):
    l0 = lehmer(h, s0)
    x = SERIES_STEP * _STENCIL
    q = np.array([xi / (lehmer(h, s0 + xi) - l0) for xi in x])
    coeffs = []
    for k in range(1, terms + 1):
        w = _fornberg_weights(_STENCIL, k - 1)
        coeffs.append(float(np.dot(w, q**k)) / SERIES_STEP ** (k - 1))
    return coeffs


def _series_mul(a, b, n):
    return [sum(a[i] * b[m - i] for i in range(m + 1)) for m in range(n)]


def _taylor_coefficients(h, s0, terms):
    # Taylor coefficients of L about s0 from those of log L: L = exp(log L)
    lam = log_lehmer_taylor(h, s0, terms)
    c = [d / factorial(j) for j, d in enumerate(lam)]
    n = terms + 1
    e = [1.0] + [0.0] * terms
    # exp of a series via e' = c' e
    for m in range(1, n):
        e[m] = sum(j * c[j] * e[m - j] for j in range(1, m + 1)) / m
    l0 = math.exp(c[0])
    # (L(s) - L(s0)) / (s - s0) = l0 * (e1 + e2 t + ...)
    d = [l0 * e[m] for m in range(1, n)]
    # reciprocal series q = 1 / d
    q = [1.0 / d[0]] + [0.0] * (terms - 1)
    for m in range(1, terms):
        q[m] = -sum(d[j] * q[m - j] for j in range(1, m + 1)) / d[0]
    coeffs = []
    power = [1.0] + [0.0] * (terms - 1)
    for k in range(1, terms + 1):
        power = _series_mul(power, q, terms)
        coeffs.append(factorial(k - 1) * power[k - 1])
    return coeffs


def series_coefficients(h: PositiveSample, s0: float, terms: int, method: str = "taylor") -> list[float]:
    """Limits ``d^(k-1)/ds^(k-1) [((s - s0) / (L(s) - L(s0)))**k]`` at ``s0``, k = 1..terms.

    ``method="taylor"`` reads them off the exact Taylor expansion of the
    transform (built from cumulants of ``log h``).  ``method="stencil"``
    differences the quotient on a six-point stencil of half-integer multiples
    of 1e-3 around ``s0``, never touching the 0/0 point; its noise grows like
    ``1e-3 ** -(k - 1)``, so it is only usable for the first few terms.
    """
    if h.is_constant:
        raise ConstantSampleError("constant sample has no inverse series")
    if method == "taylor":
        return _taylor_coefficients(h, float(s0), terms)
    if method == "stencil":
        return _stencil_coefficients(h, float(s0), terms)
    raise ValueError(f"unknown coefficient method {method!r}")


def invert_series(
    h: PositiveSample, target: float, s0: float, terms: int = 4, method: str = "taylor"
) -> float:
    """Truncated Lagrange inversion series of the transform about ``s0``.

    Only reliable when ``target`` is close to ``L(s0)``; the series has an
    unknown radius of convergence.  Raises :class:`SeriesDivergingError` when
    the term magnitudes grow three times in a row.
    """
    _require_increasing(h)
    if not 1 <= terms <= 6:
        raise ValueError("terms must be between 1 and 6")
    target = float(target)
    if not h.min < target < h.max:
        raise TargetOutOfRangeError(f"target {target!r} must lie strictly inside ({h.min}, {h.max})")
    s0 = float(s0)
    offset = target - lehmer(h, s0)
    if offset == 0.0:
        return s0
    total = s0
    partial = [total]
    growth = 0
    prev = math.inf
    for k, c in enumerate(series_coefficients(h, s0, terms, method), start=1):
        term = offset**k / factorial(k) * c
        total += term
        partial.append(total)
        growth = growth + 1 if abs(term) > abs(prev) else 0
        if growth >= 3 or not math.isfinite(total):
            raise SeriesDivergingError(
                f"series about s0={s0} diverges for target {target!r}", partial_sums=partial
            )
        prev = term
    return total
