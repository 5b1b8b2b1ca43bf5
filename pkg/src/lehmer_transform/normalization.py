"""Maps that send a raw sample to strictly positive values.

A pipeline is an ordered composition of steps ``h_m o ... o h_1``.  Each
step sees the output of the previous one, so data-dependent steps (those
that look at the current min or max) are re-fitted on whatever reaches them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import PipelineYieldsNonPositiveError


def as_sample(values) -> np.ndarray:
    """Validate raw observations: 1-d, non-empty, all finite."""
    x = np.asarray(values, dtype=float)
    if x.ndim == 0:
        x = x.reshape(1)
    if x.ndim != 1:
        raise ValueError(f"sample must be one-dimensional, got shape {x.shape}")
    if x.size == 0:
        raise ValueError("sample must contain at least one value")
    bad = np.flatnonzero(~np.isfinite(x))
    if bad.size:
        raise ValueError(f"sample has non-finite value at index {int(bad[0])}")
    return x


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PositiveSample:
    """Strictly positive values with their logs and extremes cached.

    Build one with :meth:`from_values` (or :func:`normalize`); the
    constructor itself does no validation.
    """

    values: np.ndarray
    log_values: np.ndarray
    min: float
    max: float

    @classmethod
    def from_values(cls, values) -> "PositiveSample":
        h = np.asarray(values, dtype=float)
        if h.ndim == 0:
            h = h.reshape(1)
        if h.ndim != 1 or h.size == 0:
            raise ValueError("positive sample must be a non-empty 1-d sequence")
        bad = np.flatnonzero(~(np.isfinite(h) & (h > 0)))
        if bad.size:
            i = int(bad[0])
            raise PipelineYieldsNonPositiveError(
                f"value {h[i]!r} at index {i} is not a finite positive number", index=i
            )
        h = _readonly(h)
        return cls(h, _readonly(np.log(h)), float(h.min()), float(h.max()))

    def __len__(self) -> int:
        return self.values.size

    @property
    def log_max(self) -> float:
        return float(self.log_values.max())

    @property
    def is_constant(self) -> bool:
        # exact comparison on purpose: ties are detected as produced
        return self.min == self.max

    def scaled(self, c: float) -> "PositiveSample":
        return PositiveSample.from_values(self.values * c)

    def __repr__(self) -> str:
        return f"PositiveSample(n={len(self)}, min={self.min!r}, max={self.max!r})"


# -- steps ------------------------------------------------------------------


def _check_positive_param(name, value):
    if not value > 0 or not np.isfinite(value):
        raise ValueError(f"{name} must be a finite positive number, got {value!r}")


@dataclass(frozen=True)
class Identity:
    """Pass values through unchanged; positivity is checked by the pipeline."""

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return x


@dataclass(frozen=True)
class AbsShift:
    """``|x| + eps``."""

    eps: float = 1e-6

    def __post_init__(self):
        _check_positive_param("eps", self.eps)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return np.abs(x) + self.eps


@dataclass(frozen=True)
class AffineToUnitInterval:
    """Map ``[min, max]`` onto ``[eps, 1 + eps]``.

    A constant input has no spread to rescale and maps to ``eps``.
    """

    eps: float = 1e-6

    def __post_init__(self):
        _check_positive_param("eps", self.eps)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        lo, hi = x.min(), x.max()
        if hi == lo:
            return np.full_like(x, self.eps)
        return (x - lo) / (hi - lo) + self.eps


@dataclass(frozen=True)
class ScaleToMax:
    """Divide by the maximum so it lands on ``target``."""

    target: float = 1.0

    def __post_init__(self):
        _check_positive_param("target", self.target)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        top = x.max()
        if not top > 0:
            raise PipelineYieldsNonPositiveError(
                f"ScaleToMax needs a positive maximum, got {top!r}", step=self
            )
        return x * (self.target / top)


@dataclass(frozen=True)
class Softplus:
    """``log(1 + exp(x))``, evaluated without overflow."""

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return np.logaddexp(0.0, x)


@dataclass(frozen=True)
class ExpMap:
    def __call__(self, x: np.ndarray) -> np.ndarray:
        return np.exp(x)


@dataclass(frozen=True)
class AffineShiftMin:
    """``x - min(x) + eps``: the smallest value becomes ``eps``."""

    eps: float = 1e-6

    def __post_init__(self):
        _check_positive_param("eps", self.eps)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return x - x.min() + self.eps


STEP_NAMES = {
    "identity": Identity,
    "abs-shift": AbsShift,
    "affine-unit": AffineToUnitInterval,
    "scale-to-max": ScaleToMax,
    "softplus": Softplus,
    "exp": ExpMap,
    "shift-min": AffineShiftMin,
}


@dataclass(frozen=True)
class NormalizationPipeline:
    steps: tuple = field(default_factory=tuple)

    def __init__(self, steps: Iterable = ()):
        object.__setattr__(self, "steps", tuple(steps))

    def __call__(self, sample) -> PositiveSample:
        return normalize(sample, self)

    @classmethod
    def parse(cls, text: str) -> "NormalizationPipeline":
        """Build a pipeline from ``"name[:param],name[:param],..."``.

        >>> NormalizationPipeline.parse("abs-shift:0.5,scale-to-max:1")
        NormalizationPipeline(steps=(AbsShift(eps=0.5), ScaleToMax(target=1.0)))
        """
        steps = []
        for chunk in text.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            name, _, arg = chunk.partition(":")
            try:
                step_cls = STEP_NAMES[name.strip().lower()]
            except KeyError:
                known = ", ".join(sorted(STEP_NAMES))
                raise ValueError(f"unknown normalization step {name!r} (known: {known})") from None
            steps.append(step_cls(float(arg)) if arg else step_cls())
        if not steps:
            raise ValueError("normalization spec names no steps")
        return cls(steps)


IDENTITY = NormalizationPipeline([Identity()])


def normalize(sample, pipeline: NormalizationPipeline | Sequence) -> PositiveSample:
    """Apply ``pipeline`` to ``sample`` and validate the positive image.

    Raises
    ------
    PipelineYieldsNonPositiveError
        If any step leaves a value that is not finite and strictly positive.
    """
    steps = pipeline.steps if isinstance(pipeline, NormalizationPipeline) else tuple(pipeline)
    if not steps:
        raise ValueError("normalization pipeline is empty")
    x = as_sample(sample)
    for step in steps:
        with np.errstate(over="ignore", invalid="ignore"):
            x = np.asarray(step(x), dtype=float)
        bad = np.flatnonzero(~np.isfinite(x))
        if bad.size:
            i = int(bad[0])
            raise PipelineYieldsNonPositiveError(
                f"{step!r} produced non-finite value {x[i]!r} at index {i}", step=step, index=i
            )
    # intermediate steps may go negative; only the final image must be positive
    bad = np.flatnonzero(~(np.isfinite(x) & (x > 0)))
    if bad.size:
        i = int(bad[0])
        raise PipelineYieldsNonPositiveError(
            f"pipeline produced {x[i]!r} at index {i}; every normalized value must be > 0",
            step=steps[-1],
            index=i,
        )
    return PositiveSample.from_values(x)
