import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from lehmer_transform import (
    GridNotSortedError,
    MonotonicityClass,
    OrderZeroError,
    PositiveSample,
    lehmer,
    lehmer_derivative,
    lehmer_nth_derivative,
    lehmer_spectrum,
    lehmer_values,
    log_expansion_derivative,
    monotonicity_class,
)
from lehmer_transform.transform import breve_moment, log_lehmer_derivative
from oracles import fd_lehmer_derivative, mp_lehmer, rel_err

H124 = PositiveSample.from_values([1, 2, 4])

positive = st.floats(1e-3, 1e3)
samples = st.lists(positive, min_size=1, max_size=64)


@st.composite
def separated(draw, max_size=64):
    """Distinct values, sorted neighbours at least 5% apart, in random order."""
    base = draw(st.floats(0.01, 100))
    steps = draw(st.lists(st.floats(1.05, 2.0), min_size=1, max_size=max_size - 1))
    values = [base]
    for r in steps:
        values.append(values[-1] * r)
    return draw(st.permutations(values))


def exact_lehmer(values, s):
    return Fraction(sum(Fraction(v) ** s for v in values), sum(Fraction(v) ** (s - 1) for v in values))


# -- examples ---------------------------------------------------------------


@pytest.mark.parametrize(
    "values, s, expected",
    [
        ([1, 2, 4], 0, 12 / 7),
        ([1, 4], 0.5, 2.0),
        ([1, 2, 4], 2, 3.0),
        ([1, 2, 4], 1, 7 / 3),
        ([1, 2, 4], math.inf, 4.0),
        ([1, 2, 4], -math.inf, 1.0),
    ],
)
def test_landmark_values(values, s, expected):
    assert lehmer(PositiveSample.from_values(values), s) == pytest.approx(expected, rel=1e-15)


def test_arithmetic_mean_is_correctly_rounded():
    assert lehmer(H124, 1) == 2.3333333333333335


@pytest.mark.parametrize("s", [-1e6, -40, -1, 0, 0.3, 1, 7, 1e6, math.inf, -math.inf])
def test_constant_sample(s):
    h = PositiveSample.from_values([2.5, 2.5, 2.5])
    assert lehmer(h, s) == 2.5
    assert lehmer_derivative(h, 0.0) == 0.0


def test_string_moments():
    assert lehmer(H124, "inf") == 4.0
    assert lehmer(H124, "-inf") == 1.0
    with pytest.raises(ValueError):
        breve_moment("nan")


def test_spectrum_landmarks():
    spec = lehmer_spectrum(H124, [-math.inf, 0, 1, 2, math.inf])
    assert [s for s, _ in spec] == [-math.inf, 0, 1, 2, math.inf]
    np.testing.assert_allclose([v for _, v in spec], [1, 12 / 7, 7 / 3, 3, 4], rtol=1e-15)


def test_spectrum_of_constant():
    h = PositiveSample.from_values([0.7, 0.7])
    assert [v for _, v in lehmer_spectrum(h, [-math.inf, -3, 0, 9, math.inf])] == [0.7] * 5


def test_spectrum_matches_scalar_calls_bitwise():
    grid = np.linspace(-700, 700, 281)
    spec = lehmer_spectrum(H124, grid)
    assert [v for _, v in spec] == [lehmer(H124, s) for s in grid]


def test_unsorted_grid_rejected():
    with pytest.raises(GridNotSortedError):
        lehmer_spectrum(H124, [0, 1, -1])


def test_exact_rational_values():
    for s in range(-6, 7):
        assert rel_err(lehmer(H124, s), exact_lehmer([1, 2, 4], s)) <= 2e-16


def test_derivative_hand_value():
    h = PositiveSample.from_values([1, 2])
    expected = math.log(2) * 0.5 / 2.25
    assert lehmer_derivative(h, 0) == pytest.approx(expected, rel=1e-15)


def test_derivative_float_difference_oracle():
    d = 1e-5
    fd = (lehmer(H124, 1 + d) - lehmer(H124, 1 - d)) / (2 * d)
    assert rel_err(lehmer_derivative(H124, 1), fd) <= 1e-6


@pytest.mark.parametrize("s", [-300.0, -20.0, 0.0, 0.5, 1.0, 20.0, 300.0])
def test_derivative_high_precision_oracle(s):
    values = [0.3, 1.0, 1.7, 4.0, 9.5]
    h = PositiveSample.from_values(values)
    assert rel_err(lehmer_derivative(h, s), fd_lehmer_derivative(values, s)) <= 1e-13


def test_derivative_rejects_infinite_moment():
    with pytest.raises(ValueError):
        lehmer_derivative(H124, math.inf)


def test_nth_derivative_second_difference_oracle():
    d = 1e-4
    sd = (lehmer(H124, 1 + d) - 2 * lehmer(H124, 1) + lehmer(H124, 1 - d)) / d**2
    assert rel_err(lehmer_nth_derivative(H124, 1, 2), sd) <= 1e-4


# rounding of the difference stencil grows like eps / step**(order - 1)
RICHARDSON_RTOL = {2: 1e-10, 3: 1e-7, 4: 1e-3}


def mp_nth_derivative(values, s, order):
    with mpmath.workdps(50):
        return float(mpmath.diff(lambda x: mp_lehmer(values, x), s, order))


@pytest.mark.parametrize("order", [2, 3, 4])
@pytest.mark.parametrize("s", [-2.0, 0.0, 1.0, 3.0])
def test_nth_derivative_high_precision_oracle(order, s):
    expected = mp_nth_derivative([1, 2, 4], s, order)
    scale = max(1.0, abs(expected))
    assert abs(lehmer_nth_derivative(H124, s, order) - expected) <= RICHARDSON_RTOL[order] * scale
    assert abs(lehmer_nth_derivative(H124, s, order, method="cumulant") - expected) <= 1e-13 * scale


@pytest.mark.parametrize("order", [1, 2, 3, 4, 5])
def test_log_expansion_against_oracle(order):
    values = [0.5, 1.0, 3.0, 3.5]
    h = PositiveSample.from_values(values)
    for s in (-1.5, 0.0, 2.0):
        expected = mp_nth_derivative(values, s, order)
        assert abs(log_expansion_derivative(h, s, order) - expected) <= 1e-13 * max(1.0, abs(expected))


def test_cumulant_method_with_large_values():
    # log L near 18: the literal binomial form cancels, the collapsed one does not
    values = [1e7, 3e7, 8e7]
    h = PositiveSample.from_values(values)
    for order in (2, 3, 4):
        expected = mp_nth_derivative(values, 0.7, order)
        assert rel_err(lehmer_nth_derivative(h, 0.7, order, method="cumulant"), expected) <= 1e-12


def test_unknown_derivative_method():
    with pytest.raises(ValueError):
        lehmer_nth_derivative(H124, 0.0, 2, method="spline")


def test_first_order_delegates():
    assert lehmer_nth_derivative(H124, 0, 1) == lehmer_derivative(H124, 0)


def test_nth_derivative_of_constant_is_zero():
    h = PositiveSample.from_values([3.0, 3.0])
    assert [lehmer_nth_derivative(h, 0.2, k) for k in (1, 2, 3)] == [0.0, 0.0, 0.0]


def test_order_zero_rejected():
    with pytest.raises(OrderZeroError):
        lehmer_nth_derivative(H124, 0, 0)


def test_monotonicity_classes():
    assert monotonicity_class(PositiveSample.from_values([3, 3, 3])) is MonotonicityClass.CONSTANT
    assert monotonicity_class(H124) is MonotonicityClass.STRICTLY_INCREASING
    tie = PositiveSample.from_values([1, 1, 2])
    assert monotonicity_class(tie) is MonotonicityClass.STRICTLY_INCREASING
    for s in (-5, 0, 5):
        assert fd_lehmer_derivative([1, 1, 2], s) > 0
        assert lehmer_derivative(tie, s) > 0


def test_extreme_moments_saturate():
    h = PositiveSample.from_values([0.5, 0.9, 1.3])
    assert lehmer(h, 1e300) == 1.3
    assert lehmer(h, -1e300) == 0.5


def test_large_spread_far_tail():
    values = [1e-8, 3e-3, 1.0, 7e4, 1e8]
    h = PositiveSample.from_values(values)
    for s in (-300, -137.5, -2, 0.5, 3, 211, 300):
        assert rel_err(lehmer(h, s), mp_lehmer(values, s)) <= 1e-14


# -- invariants ---------------------------------------------------------------


@given(samples, st.floats(-1e4, 1e4))
def test_bounds(values, s):
    h = PositiveSample.from_values(values)
    v = lehmer(h, s)
    assert h.min <= v <= h.max


@given(separated(), st.lists(st.floats(-25, 25), min_size=2, max_size=100, unique=True))
def test_strictly_increasing_on_random_grids(values, grid):
    grid = sorted(grid)
    assume(min(np.diff(grid)) >= 1e-3)
    v = lehmer_values(PositiveSample.from_values(values), grid)
    assert np.all(np.diff(v) > 0)


@given(separated(), st.sampled_from([-1, 1]))
def test_endpoint_limits_at_500(values, sign):
    h = PositiveSample.from_values(values)
    target = h.max if sign > 0 else h.min
    assert abs(lehmer(h, 500 * sign) - target) <= 1e-9 * (h.max - h.min)


@given(samples, st.floats(-25, 25), st.floats(-6, 6))
def test_homogeneity(values, s, log10_c):
    c = 10.0**log10_c
    h = PositiveSample.from_values(values)
    assert rel_err(lehmer(h.scaled(c), s), c * lehmer(h, s)) <= 1e-12


@given(samples, st.floats(-50, 50), st.randoms(use_true_random=False))
def test_permutation_invariance(values, s, rnd):
    shuffled = list(values)
    rnd.shuffle(shuffled)
    a = lehmer(PositiveSample.from_values(values), s)
    b = lehmer(PositiveSample.from_values(shuffled), s)
    assert rel_err(a, b) <= 1e-14


@given(samples, st.floats(-300, 300))
def test_derivative_nonnegative_and_zero_only_when_constant(values, s):
    h = PositiveSample.from_values(values)
    assert lehmer_derivative(h, s) >= 0
    if h.is_constant:
        assert lehmer_derivative(h, s) == 0
    else:
        assert math.isfinite(log_lehmer_derivative(h, s))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(1e-8, 1e8), min_size=2, max_size=16), st.floats(-300, 300))
def test_wide_range_stability(values, s):
    v = lehmer(PositiveSample.from_values(values), s)
    assert math.isfinite(v) and v > 0
    assert rel_err(v, mp_lehmer(values, s)) <= 1e-13
