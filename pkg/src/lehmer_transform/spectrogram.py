"""Sliding-window transform of time series ("breve spectrograms").

Each window is normalized on its own by default, so a row spans that
window's own extremes; ``global_normalization=True`` normalizes the whole
series once and slices afterwards, which keeps rows comparable across
windows.  No taper is applied: the transform works on order statistics,
which a taper would distort.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import PipelineYieldsNonPositiveError, SeriesTooShortError
from .normalization import NormalizationPipeline, PositiveSample, as_sample, normalize
from .transform import check_grid, lehmer_values

DROP_PARTIAL = "drop_partial"


@dataclass(frozen=True, eq=False)
class TimeSeries:
    values: np.ndarray
    timestamps: Optional[np.ndarray] = None
    sample_rate: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "values", as_sample(self.values))
        if self.timestamps is not None:
            t = np.asarray(self.timestamps, dtype=float)
            if t.shape != self.values.shape:
                raise ValueError("timestamps and values differ in length")
            if not np.all(np.isfinite(t)) or np.any(np.diff(t) <= 0):
                raise ValueError("timestamps must be finite and strictly increasing")
            object.__setattr__(self, "timestamps", t)
        if self.sample_rate is not None and not self.sample_rate > 0:
            raise ValueError("sample_rate must be positive")

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class WindowPlan:
    """Window ``width`` and ``hop`` in samples.

    ``pad=DROP_PARTIAL`` (the default) keeps only full windows.  ``pad=None``
    additionally keeps one shorter trailing window over samples the full
    windows did not reach.
    """

    width: int
    hop: int
    pad: Optional[str] = DROP_PARTIAL

    def __post_init__(self):
        if int(self.width) != self.width or self.width < 2:
            raise ValueError(f"window width must be an integer >= 2, got {self.width!r}")
        if int(self.hop) != self.hop or self.hop < 1:
            raise ValueError(f"hop must be an integer >= 1, got {self.hop!r}")
        if self.pad not in (None, DROP_PARTIAL):
            raise ValueError(f"pad must be None or {DROP_PARTIAL!r}")

    def starts(self, n: int) -> list[int]:
        if n < self.width:
            if self.pad == DROP_PARTIAL:
                raise SeriesTooShortError(f"series of length {n} is shorter than window width {self.width}")
            return [0]
        count = (n - self.width) // self.hop + 1
        starts = [i * self.hop for i in range(count)]
        if self.pad is None and starts[-1] + self.width < n:
            starts.append(starts[-1] + self.hop)
        return starts


@dataclass(frozen=True, eq=False)
class BreveSpectrogram:
    window_starts: np.ndarray
    s_grid: np.ndarray
    values: np.ndarray

    def rows(self):
        """Yield ``(window_start, s, value)`` in row-major order."""
        for start, row in zip(self.window_starts.tolist(), self.values):
            for s, v in zip(self.s_grid.tolist(), row.tolist()):
                yield start, s, v


def _values_of(ts) -> np.ndarray:
    return ts.values if isinstance(ts, TimeSeries) else as_sample(ts)


def sliding_windows(ts, plan: WindowPlan) -> list[np.ndarray]:
    x = _values_of(ts)
    return [x[start:start + plan.width] for start in plan.starts(x.size)]


def breve_spectrogram(
    ts,
    plan: WindowPlan,
    pipeline: NormalizationPipeline,
    grid: Sequence,
    global_normalization: bool = False,
    workers: int = 1,
) -> BreveSpectrogram:
    """Transform of every window over ``grid``.

    Row ``w`` holds ``lehmer(normalize(window_w, pipeline), grid[j])``.  With
    ``workers > 1`` windows are evaluated on a thread pool; each result goes
    to its own row, so the matrix is identical to the serial one.
    """
    x = _values_of(ts)
    g = check_grid(grid)
    starts = plan.starts(x.size)
    source = normalize(x, pipeline).values if global_normalization else x

    def row(w: int) -> np.ndarray:
        window = source[starts[w]:starts[w] + plan.width]
        if global_normalization:
            return lehmer_values(PositiveSample.from_values(window), g)
        try:
            h = normalize(window, pipeline)
        except PipelineYieldsNonPositiveError as err:
            raise PipelineYieldsNonPositiveError(
                f"window {w} (start {starts[w]}): {err}", step=err.step, index=err.index, window=w
            ) from err
        return lehmer_values(h, g)

    out = np.empty((len(starts), g.size))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for w, values in enumerate(pool.map(row, range(len(starts)))):
                out[w] = values
    else:
        for w in range(len(starts)):
            out[w] = row(w)
    return BreveSpectrogram(np.asarray(starts), g, out)


def feature_names(n: int) -> list[str]:
    names = ["min", "harmonic", "arithmetic", "contraharmonic", "max"]
    if n == 2:
        names.insert(2, "geometric")
    return names


_FEATURE_MOMENTS = {
    "min": -math.inf,
    "harmonic": 0.0,
    "geometric": 0.5,
    "arithmetic": 1.0,
    "contraharmonic": 2.0,
    "max": math.inf,
}


def breve_features(sample, pipeline: NormalizationPipeline) -> dict[str, float]:
    """Transform at the landmark moments -inf, 0, (1/2 when n = 2), 1, 2, +inf."""
    h = normalize(sample, pipeline)
    names = feature_names(len(h))
    values = lehmer_values(h, np.array([_FEATURE_MOMENTS[k] for k in names]))
    return dict(zip(names, values.tolist()))
