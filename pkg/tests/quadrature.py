"""Unit-mass checks: trapezoid over a window plus the CDF mass outside it."""
import numpy as np

from lehmer_transform import TargetOutOfRangeError
from lehmer_transform.inversion import BRACKET_CAP


def _moment(quantile, q, fallback):
    try:
        s = quantile(q)
    except TargetOutOfRangeError:
        return fallback
    return min(max(s, -BRACKET_CAP), BRACKET_CAP)


def window(quantile, q_lo=1e-6):
    """[quantile(q_lo), quantile(1 - q_lo)], clamped to the inversion's bracket cap."""
    return _moment(quantile, q_lo, -BRACKET_CAP), _moment(quantile, 1 - q_lo, BRACKET_CAP)


def refined_grid(pdf, lo, hi, points=1001, tol=1e-8, rounds=30):
    """Uniform grid on [lo, hi], bisected until every interval's trapezoid is locally resolved.

    An interval is split while its midpoint density differs from the chord
    by more than ``tol / width``.
    """
    g = np.linspace(lo, hi, points)
    f = np.array([pdf(s) for s in g])
    pending = np.ones(g.size - 1, dtype=bool)
    for _ in range(rounds):
        idx = np.flatnonzero(pending)
        if idx.size == 0:
            break
        a, b = g[idx], g[idx + 1]
        mids = 0.5 * (a + b)
        fm = np.array([pdf(s) for s in mids])
        bad = np.abs(fm - 0.5 * (f[idx] + f[idx + 1])) * (b - a) > tol
        g = np.concatenate([g, mids])
        f = np.concatenate([f, fm])
        order = np.argsort(g)
        g, f = g[order], f[order]
        # next round: both halves of every interval that was not resolved
        k = np.searchsorted(g, mids[bad])
        pending = np.zeros(g.size - 1, dtype=bool)
        pending[k - 1] = True
        pending[k] = True
    return g, f


def unit_mass(pdf, cdf, quantile, q_lo=1e-6):
    """Trapezoid integral of ``pdf`` over the central window plus both tail masses."""
    lo, hi = window(quantile, q_lo)
    g, f = refined_grid(pdf, lo, hi)
    inside = float(np.sum(0.5 * (f[1:] + f[:-1]) * np.diff(g)))
    return inside + cdf(lo) + (1.0 - cdf(hi))
