"""Discrete Lehmer transform over breve moments, its inverse, the
distribution families built on it, and sliding-window spectrograms."""

from .distributions import (
    BreveParams,
    DensityCurve,
    LinearFamilyCoeffs,
    breve_cdf,
    breve_lower_residual,
    breve_normalize,
    breve_pdf,
    breve_quantile,
    breve_upper_target,
    density_curve,
    empirical_cdf,
    empirical_pdf,
    find_modes,
    linear_cdf_coeffs,
    linear_quantile,
    log_breve_cdf,
    log_breve_log_normalizer,
    log_breve_normalize,
    log_breve_pdf,
    log_breve_quantile,
    nonlinear_cdf,
    nonlinear_coeffs,
    nonlinear_pdf,
)
from .errors import (
    BelowBranchPointError,
    ConstantSampleError,
    DomainError,
    EmptyInputError,
    GridNotSortedError,
    LehmerError,
    NormalizationMismatchError,
    OrderZeroError,
    ParseError,
    PipelineYieldsNonPositiveError,
    SeriesDivergingError,
    SeriesTooShortError,
    TargetOutOfRangeError,
)
from .inversion import InversionResult, invert, invert_series, series_coefficients
from .lambertw import lambert_w0
from .normalization import (
    IDENTITY,
    AbsShift,
    AffineShiftMin,
    AffineToUnitInterval,
    ExpMap,
    Identity,
    NormalizationPipeline,
    PositiveSample,
    ScaleToMax,
    Softplus,
    normalize,
)
from .spectrogram import (
    BreveSpectrogram,
    TimeSeries,
    WindowPlan,
    breve_features,
    breve_spectrogram,
    sliding_windows,
)
from .transform import (
    MonotonicityClass,
    lehmer,
    lehmer_derivative,
    lehmer_nth_derivative,
    lehmer_spectrum,
    lehmer_values,
    log_expansion_derivative,
    monotonicity_class,
)

__version__ = "0.1.0"
