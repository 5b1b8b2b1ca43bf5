"""Distribution families built on the transform.

With ``L`` strictly increasing from ``min(h)`` to ``max(h)``, any increasing
map of ``L`` rescaled to run from 0 to 1 is a CDF over the breve-moment axis.
Two maps are provided:

* linear: ``F(s) = a + b L(s)``;
* nonlinear: ``F(s) = a + b G(L(s))`` with ``G(x) = x**(1/alpha) exp(beta x)``.

The Breve and Log-Breve families are the nonlinear map with ``a = 0`` once
the sample has been moved onto Lambert-W endpoint targets:

==========  ======================  ==================================
family      L(-inf)                 L(+inf)
==========  ======================  ==================================
Breve       ``eps * W0(ab)/(ab)``   ``W0(ab)/(ab)``
Log-Breve   ``1``                   ``exp(W0(ab)/(ab))``
==========  ======================  ==================================

where ``ab = alpha * beta``.  Breve's lower target is 0 in the limit; a
positive sample can only approach it, so a floor ``eps`` is used and the
leftover mass ``G(eps * W0(ab)/(ab))`` is reported by
:func:`breve_lower_residual`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConstantSampleError, NormalizationMismatchError, TargetOutOfRangeError
from .inversion import invert
from .lambertw import lambert_w0
from .normalization import PositiveSample
from .transform import breve_moment, lehmer, log_lehmer_derivative

MISMATCH_RTOL = 1e-9
MODE_TOL = 1e-8
_MODE_STEP = 1e-5


@dataclass(frozen=True)
class BreveParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha!r}")
        if not (self.beta > 0.0 and math.isfinite(self.beta)):
            raise ValueError(f"beta must be a finite positive number, got {self.beta!r}")

    @property
    def product(self) -> float:
        return self.alpha * self.beta

    def log_g(self, x):
        """``log G(x) = log(x)/alpha + beta x``."""
        return np.log(x) / self.alpha + self.beta * np.asarray(x, dtype=float)


@dataclass(frozen=True)
class LinearFamilyCoeffs:
    a: float
    b: float

    def __post_init__(self):
        if not self.b > 0:
            raise ValueError(f"slope b must be positive, got {self.b!r}")


@dataclass(frozen=True)
class DensityCurve:
    grid: np.ndarray
    density: np.ndarray
    mass: float


def density_curve(pdf: Callable[[float], float], grid) -> DensityCurve:
    """Evaluate ``pdf`` on an ascending grid and integrate it by trapezoids."""
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size < 2 or np.any(np.diff(g) <= 0) or not np.all(np.isfinite(g)):
        raise ValueError("density grid must be finite and strictly ascending with >= 2 points")
    f = np.array([pdf(s) for s in g])
    mass = float(np.sum(0.5 * (f[1:] + f[:-1]) * np.diff(g)))
    return DensityCurve(g, f, mass)


def _require_increasing(h: PositiveSample):
    if h.is_constant:
        raise ConstantSampleError("sample is constant after normalization; no distribution exists")


def _unit_coeffs(lo: float, hi: float) -> LinearFamilyCoeffs:
    width = hi - lo
    return LinearFamilyCoeffs(-lo / width, 1.0 / width)


# -- linear family ----------------------------------------------------------


def linear_cdf_coeffs(h: PositiveSample) -> LinearFamilyCoeffs:
    """The unique ``(a, b)`` making ``a + b L`` run from 0 at ``-inf`` to 1 at ``+inf``."""
    _require_increasing(h)
    return _unit_coeffs(h.min, h.max)


def empirical_cdf(h: PositiveSample, coeffs: LinearFamilyCoeffs, s) -> float:
    value = coeffs.a + coeffs.b * lehmer(h, s)
    return min(1.0, max(0.0, value))


def empirical_pdf(h: PositiveSample, coeffs: LinearFamilyCoeffs, s: float) -> float:
    """``b * dL/ds``; with unit endpoints (``b = 1``) this is ``dL/ds`` itself."""
    return math.exp(math.log(coeffs.b) + log_lehmer_derivative(h, s))


def _moment_at_level(h: PositiveSample, level: float) -> float:
    level = min(max(level, h.min), h.max)
    return invert(h, level).moment


def _check_probability(q):
    if not 0.0 <= q <= 1.0:
        raise TargetOutOfRangeError(f"probability {q!r} outside [0, 1]")


def linear_quantile(h: PositiveSample, coeffs: LinearFamilyCoeffs, q: float) -> float:
    """Breve moment at which :func:`empirical_cdf` reaches ``q``."""
    _check_probability(q)
    return _moment_at_level(h, (q - coeffs.a) / coeffs.b)


def _g_inverse(p: "BreveParams", log_y: float) -> float:
    # x^(1/alpha) e^(beta x) = y  <=>  ab x e^(ab x) = ab y^alpha
    return lambert_w0(p.product * math.exp(p.alpha * log_y)) / p.product


# -- nonlinear family -------------------------------------------------------


def nonlinear_coeffs(h: PositiveSample, p: BreveParams) -> LinearFamilyCoeffs:
    """``(a, b)`` making ``a + b G(L)`` a CDF for any non-constant sample."""
    _require_increasing(h)
    g_lo, g_hi = np.exp(p.log_g(np.array([h.min, h.max])))
    if not np.isfinite(g_hi):
        raise OverflowError("G(max) overflows; rescale the sample or lower beta")
    return _unit_coeffs(float(g_lo), float(g_hi))


def nonlinear_cdf(h: PositiveSample, p: BreveParams, coeffs: LinearFamilyCoeffs, s) -> float:
    value = coeffs.a + coeffs.b * math.exp(float(p.log_g(lehmer(h, s))))
    return min(1.0, max(0.0, value))


def _log_g_prime_times_derivative(h: PositiveSample, p: BreveParams, s: float) -> float:
    # log of G'(L) L' = L' (1/alpha) e^{beta L} (1 + alpha beta L) L^{1/alpha - 1}
    s = float(s)
    L = lehmer(h, s)
    return (
        log_lehmer_derivative(h, s)
        + math.log1p(p.product * L)
        - math.log(p.alpha)
        + (1.0 / p.alpha - 1.0) * math.log(L)
        + p.beta * L
    )


def nonlinear_pdf(h: PositiveSample, p: BreveParams, coeffs: LinearFamilyCoeffs, s: float) -> float:
    return math.exp(math.log(coeffs.b) + _log_g_prime_times_derivative(h, p, s))


# -- Breve ------------------------------------------------------------------


def breve_upper_target(p: BreveParams) -> float:
    """``W0(alpha beta) / (alpha beta)``, where ``G`` equals one."""
    return lambert_w0(p.product) / p.product


def breve_lower_residual(p: BreveParams, eps: float = 1e-9) -> float:
    """CDF value left at ``s = -inf`` by the ``eps`` floor."""
    return math.exp(float(p.log_g(eps * breve_upper_target(p))))


def _affine_onto(h: PositiveSample, lo: float, hi: float) -> PositiveSample:
    _require_increasing(h)
    v = lo + (h.values - h.min) * ((hi - lo) / (h.max - h.min))
    # pin the extremes so the targets hold exactly
    v[h.values == h.max] = hi
    v[h.values == h.min] = lo
    return PositiveSample.from_values(v)


def breve_normalize(h: PositiveSample, p: BreveParams, eps: float = 1e-9) -> PositiveSample:
    """Affine map of ``h`` onto ``[eps * t, t]`` with ``t = W0(ab)/(ab)``."""
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    top = breve_upper_target(p)
    return _affine_onto(h, eps * top, top)


def _check_breve(h: PositiveSample, p: BreveParams):
    top = breve_upper_target(p)
    if abs(h.max - top) > MISMATCH_RTOL * top:
        raise NormalizationMismatchError(
            f"max {h.max!r} differs from the Breve upper target {top!r}; use breve_normalize"
        )


def breve_cdf(h: PositiveSample, p: BreveParams, s) -> float:
    """``L**(1/alpha) * exp(beta L)`` on a Breve-normalized sample."""
    _check_breve(h, p)
    return min(1.0, math.exp(float(p.log_g(lehmer(h, s)))))


def breve_pdf(h: PositiveSample, p: BreveParams, s: float) -> float:
    _check_breve(h, p)
    return math.exp(_log_g_prime_times_derivative(h, p, s))


def breve_quantile(h: PositiveSample, p: BreveParams, q: float) -> float:
    """Breve moment at which :func:`breve_cdf` reaches ``q``.

    Probabilities below :func:`breve_lower_residual` map to ``-inf``.
    """
    _check_breve(h, p)
    _check_probability(q)
    if q == 0.0:
        return -math.inf
    return _moment_at_level(h, _g_inverse(p, math.log(q)))


def _numeric_slope(f, s, step=_MODE_STEP):
    return (f(s + step) - f(s - step)) / (2.0 * step)


def find_modes(h: PositiveSample, p: BreveParams, grid) -> list[float]:
    """Extreme points of :func:`breve_pdf` inside ``grid``.

    Scans the central-difference slope of the density over the grid and
    bisects every sign change down to a bracket of width 1e-8.  Both maxima
    and minima are returned, in ascending order.
    """
    _check_breve(h, p)
    g = np.asarray(grid, dtype=float)
    if g.size < 2 or np.any(np.diff(g) <= 0) or not np.all(np.isfinite(g)):
        raise ValueError("mode grid must be finite and strictly ascending")

    def slope(s):
        return _numeric_slope(lambda x: breve_pdf(h, p, x), s)

    d = np.array([slope(s) for s in g])
    nz = np.flatnonzero(d != 0.0)
    modes = []
    for a, b in zip(nz[:-1], nz[1:]):
        if np.sign(d[a]) == np.sign(d[b]):
            continue
        lo, hi, d_lo = g[a], g[b], d[a]
        while hi - lo > MODE_TOL:
            mid = 0.5 * (lo + hi)
            d_mid = slope(mid)
            if d_mid == 0.0:
                lo = hi = mid
                break
            if np.sign(d_mid) == np.sign(d_lo):
                lo, d_lo = mid, d_mid
            else:
                hi = mid
        modes.append(0.5 * (lo + hi))
    return modes


def mode_relation(s, p: BreveParams, c1: float, c2: float):
    """``W0(ab * (c1/alpha * (s + c2))**alpha) / (ab)``.

    The transform's shape at an extreme point of the Breve density, where
    ``G(L(s))`` is locally linear in ``s``.
    """
    arg = p.product * (c1 / p.alpha * (np.asarray(s, dtype=float) + c2)) ** p.alpha
    return np.vectorize(lambda z: lambert_w0(float(z)) / p.product)(arg)


def mode_relation_constants(h: PositiveSample, p: BreveParams, mode: float) -> tuple[float, float]:
    """``(c1, c2)`` for which :func:`mode_relation` is tangent to ``L`` at ``mode``.

    ``G(L)`` is matched by the line ``(c1/alpha)(s + c2)`` through its value
    and slope at the mode.
    """
    slope = breve_pdf(h, p, mode)
    level = math.exp(float(p.log_g(lehmer(h, mode))))
    return p.alpha * slope, level / slope - mode


# -- Log-Breve --------------------------------------------------------------


def log_breve_targets(p: BreveParams) -> tuple[float, float]:
    return 1.0, math.exp(breve_upper_target(p))


def log_breve_normalize(h: PositiveSample, p: BreveParams) -> PositiveSample:
    """Affine map of ``h`` onto ``[1, exp(W0(ab)/(ab))]``."""
    lo, hi = log_breve_targets(p)
    return _affine_onto(h, lo, hi)


def log_breve_log_normalizer(p: BreveParams) -> float:
    """Log of ``exp(W0(ab)/(a^2 b) + beta exp(W0(ab)/(ab))) - exp(beta)``."""
    w = lambert_w0(p.product)
    upper = w / (p.alpha * p.product) + p.beta * math.exp(w / p.product)
    return upper + math.log(-math.expm1(p.beta - upper))


def _log_g_span(p: BreveParams, lo: float, hi: float) -> float:
    g_lo, g_hi = (float(v) for v in p.log_g(np.array([lo, hi])))
    return g_hi + math.log(-math.expm1(g_lo - g_hi))


def _log_breve_log_c(h: PositiveSample, p: BreveParams) -> float:
    lo, hi = log_breve_targets(p)
    if abs(h.max - hi) > MISMATCH_RTOL * hi or abs(h.min - lo) > MISMATCH_RTOL:
        raise NormalizationMismatchError(
            f"sample range [{h.min!r}, {h.max!r}] misses the Log-Breve targets [1, {hi!r}]; "
            "use log_breve_normalize"
        )
    closed = log_breve_log_normalizer(p)
    direct = _log_g_span(p, h.min, h.max)
    if abs(math.expm1(closed - direct)) > MISMATCH_RTOL:
        raise NormalizationMismatchError(
            f"closed-form normalizer disagrees with G(max) - G(min): log {closed!r} vs {direct!r}"
        )
    return closed


def log_breve_pdf(h: PositiveSample, p: BreveParams, s: float) -> float:
    log_c = _log_breve_log_c(h, p)
    return math.exp(_log_g_prime_times_derivative(h, p, s) - log_c)


def log_breve_cdf(h: PositiveSample, p: BreveParams, s) -> float:
    """``(G(L(s)) - exp(beta)) / C``: the CDF whose density is :func:`log_breve_pdf`."""
    log_c = _log_breve_log_c(h, p)
    s = breve_moment(s)
    if s == -math.inf:
        return 0.0
    if s == math.inf:
        return 1.0
    g = float(p.log_g(lehmer(h, s)))
    # G(L) - e^beta = e^beta * expm1(log G - beta)
    value = math.exp(p.beta - log_c) * math.expm1(g - p.beta)
    return min(1.0, max(0.0, value))


def log_breve_quantile(h: PositiveSample, p: BreveParams, q: float) -> float:
    """Breve moment at which :func:`log_breve_cdf` reaches ``q``."""
    log_c = _log_breve_log_c(h, p)
    _check_probability(q)
    if q == 0.0:
        return -math.inf
    # G(L) = e^beta + q C
    log_y = float(np.logaddexp(p.beta, math.log(q) + log_c))
    return _moment_at_level(h, _g_inverse(p, log_y))
