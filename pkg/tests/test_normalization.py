import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lehmer_transform import (
    IDENTITY,
    AbsShift,
    AffineShiftMin,
    AffineToUnitInterval,
    ExpMap,
    NormalizationPipeline,
    PipelineYieldsNonPositiveError,
    PositiveSample,
    ScaleToMax,
    Softplus,
    normalize,
)

finite = st.floats(-1e6, 1e6, allow_nan=False)
raw_samples = st.lists(finite, min_size=1, max_size=40)


def test_affine_unit_maps_extremes():
    h = normalize([-1, 0, 1], [AffineToUnitInterval(eps=0.01)])
    np.testing.assert_allclose(h.values, [0.01, 0.51, 1.01])
    assert h.min == 0.01
    assert h.max == 1.01


def test_shift_min_on_constant():
    h = normalize([5, 5, 5], [AffineShiftMin(eps=1)])
    assert h.values.tolist() == [1.0, 1.0, 1.0]
    assert h.is_constant


def test_scale_to_max():
    h = normalize([1, 2, 4], [ScaleToMax(target=1)])
    assert h.values.tolist() == [0.25, 0.5, 1.0]


def test_affine_unit_on_constant_gives_eps():
    h = normalize([3.0, 3.0], [AffineToUnitInterval(eps=0.5)])
    assert h.values.tolist() == [0.5, 0.5]


def test_identity_rejects_non_positive():
    with pytest.raises(PipelineYieldsNonPositiveError) as info:
        normalize([1.0, 0.0, 2.0], IDENTITY)
    assert info.value.index == 1


def test_scale_to_max_rejects_non_positive_max():
    with pytest.raises(PipelineYieldsNonPositiveError):
        normalize([-3.0, -1.0], [ScaleToMax()])


def test_exp_overflow_is_reported():
    with pytest.raises(PipelineYieldsNonPositiveError):
        normalize([1.0, 1000.0], [ExpMap()])


def test_softplus_stays_finite_for_large_inputs():
    h = normalize([-30.0, 0.0, 800.0], [Softplus()])
    assert h.values[2] == 800.0
    assert h.values[1] == pytest.approx(np.log(2.0))
    assert h.values[0] > 0


def test_softplus_underflow_is_reported():
    with pytest.raises(PipelineYieldsNonPositiveError):
        normalize([-800.0, 1.0], [Softplus()])


def test_steps_compose_in_order():
    # |x| + 0.5 = [2.5, 1.5], then scaled so the max is 2
    h = normalize([-2.0, 1.0], [AbsShift(0.5), ScaleToMax(2.0)])
    np.testing.assert_allclose(h.values, [2.0, 1.2])


def test_parse_spec():
    pipe = NormalizationPipeline.parse("abs-shift:0.5, scale-to-max:1")
    assert pipe.steps == (AbsShift(0.5), ScaleToMax(1.0))
    assert NormalizationPipeline.parse("softplus").steps == (Softplus(),)


@pytest.mark.parametrize("spec", ["", "warp:2", "abs-shift:-1"])
def test_parse_rejects_bad_spec(spec):
    with pytest.raises(ValueError):
        NormalizationPipeline.parse(spec)


@pytest.mark.parametrize("raw", [[], [1.0, float("nan")], [[1.0, 2.0]]])
def test_raw_sample_validation(raw):
    with pytest.raises(ValueError):
        normalize(raw, IDENTITY)


def test_positive_sample_is_read_only():
    h = PositiveSample.from_values([1.0, 2.0])
    with pytest.raises(ValueError):
        h.values[0] = 5.0
    np.testing.assert_allclose(h.log_values, np.log([1.0, 2.0]))


@given(raw_samples, st.floats(1e-6, 10))
def test_affine_unit_always_positive(raw, eps):
    h = normalize(raw, [AffineToUnitInterval(eps)])
    assert h.min == pytest.approx(eps)
    assert np.all(h.values > 0)
    if max(raw) > min(raw):
        assert h.max == pytest.approx(1 + eps)


@given(raw_samples, st.floats(1e-6, 10))
def test_shift_min_puts_minimum_at_eps(raw, eps):
    h = normalize(raw, [AffineShiftMin(eps)])
    assert h.min == pytest.approx(eps, abs=1e-9 * max(1.0, max(abs(x) for x in raw)))
    assert np.all(h.values > 0)


@given(raw_samples)
def test_abs_shift_then_scale(raw):
    h = normalize(raw, NormalizationPipeline.parse("abs-shift:1e-3,scale-to-max:1"))
    assert h.max == pytest.approx(1.0)
    assert np.all(h.values > 0)
