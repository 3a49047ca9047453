import math
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morreyseq.norms import (
    MAX_BRUTE_WIDTH,
    brute_force_norm,
    centered_norm,
    prefix_profile,
    starred_norm,
    window_value,
)
from morreyseq.sequences import NewSeqSpec, generate_new_sequence
from morreyseq.typing import (
    MAX_EXACT_SUPPORT,
    CenteredWindow,
    InfeasibleEnumerationError,
    MorreyParams,
    ParameterError,
    SparseSequence,
    SpanWindow,
    SupportTooLargeError,
)

SQRT2 = math.sqrt(2)
TWO_OVER_SQRT3 = 2 / math.sqrt(3)


@st.composite
def sequences(draw, low=-20, high=20, max_size=8):
    entries = draw(
        st.dictionaries(
            st.integers(low, high),
            st.floats(-5, 5, allow_nan=False).filter(lambda value: abs(value) > 1e-3),
            min_size=1,
            max_size=max_size,
        )
    )
    return SparseSequence.from_pairs(entries.items())


@st.composite
def exponents(draw):
    p = draw(st.floats(1, 4))
    q = draw(st.floats(p, 8))
    return MorreyParams(p, q)


def test_window_value():
    seq = SparseSequence.indicator([0, 2])
    assert window_value(seq, SpanWindow(0, 2), MorreyParams(1, 2)).linear_value == pytest.approx(
        TWO_OVER_SQRT3
    )
    assert window_value(seq, SpanWindow(0, 2), MorreyParams(2, 4)).linear_value == pytest.approx(
        1.074570, abs=1e-6
    )
    assert window_value(seq, SpanWindow(3, 4), MorreyParams(1, 2)).is_zero()


def test_starred_norm_examples():
    result = starred_norm(SparseSequence.indicator([0, 1]), MorreyParams(1, 2))
    assert result.value.linear_value == pytest.approx(SQRT2)
    assert result.argmax == SpanWindow(0, 1)
    assert starred_norm(SparseSequence(), MorreyParams(1, 2)).value.is_zero()
    assert starred_norm(SparseSequence(), MorreyParams(1, 2)).argmax is None


def test_centered_norm_examples():
    params = MorreyParams(1, 2)
    result = centered_norm(SparseSequence.indicator([0, 1]), params)
    assert result.value.linear_value == pytest.approx(TWO_OVER_SQRT3)
    assert result.argmax == CenteredWindow(0, 1)
    result = centered_norm(SparseSequence.indicator([0, 2]), params)
    assert result.value.linear_value == pytest.approx(TWO_OVER_SQRT3)
    assert result.argmax == CenteredWindow(1, 1)


def test_brute_force_examples():
    seq = SparseSequence.indicator([0, 1])
    result = brute_force_norm(seq, MorreyParams(1, 2), "span", 5)
    assert result.value.linear_value == pytest.approx(SQRT2)
    assert result.argmax == SpanWindow(0, 1)
    with pytest.raises(ParameterError):
        brute_force_norm(seq, MorreyParams(1, 2), "ball", 5)
    with pytest.raises(InfeasibleEnumerationError):
        brute_force_norm(SparseSequence.indicator([0, MAX_BRUTE_WIDTH]), MorreyParams(1, 2), "span", 0)


def test_prefix_profile_of_new_sequence():
    params = MorreyParams(2, 4)
    first = prefix_profile(generate_new_sequence(NewSeqSpec(3, 1, 1)), params, [SpanWindow(0, 9)])
    assert (first[0].cardinality, first[0].mass) == (10, 6.0)
    assert first[0].value.linear_value == pytest.approx(1.37740, abs=1e-5)
    second = prefix_profile(generate_new_sequence(NewSeqSpec(3, 1, 2)), params, [SpanWindow(0, 73)])
    assert (second[0].cardinality, second[0].mass) == (74, 22.0)
    assert second[0].value.linear_value == pytest.approx(1.59937, abs=1e-5)
    assert prefix_profile(SparseSequence.indicator([0]), params, []) == []


def test_indices_beyond_int64():
    seq = SparseSequence.indicator([0, 1, 2**70])
    params = MorreyParams(1, 2)
    result = starred_norm(seq, params)
    assert result.value.linear_value == pytest.approx(SQRT2)
    assert result.argmax == SpanWindow(0, 1)
    assert centered_norm(seq, params).value.linear_value == pytest.approx(TWO_OVER_SQRT3)
    shifted = seq.shift(-(2**126))
    assert starred_norm(shifted, params).argmax == SpanWindow(-(2**126), 1)


def test_support_guard():
    seq = SparseSequence.indicator(range(MAX_EXACT_SUPPORT + 1))
    with pytest.raises(SupportTooLargeError):
        starred_norm(seq, MorreyParams(1, 2))


@given(sequences(), exponents())
@settings(max_examples=200, deadline=None)
def test_exact_engines_match_brute_force(seq, params):
    for kind, engine in (("span", starred_norm), ("centered", centered_norm)):
        exact = engine(seq, params)
        brute = brute_force_norm(seq, params, kind, 3)
        assert exact.value.log2_value == pytest.approx(brute.value.log2_value, abs=1e-9)


@given(sequences(), exponents())
@settings(max_examples=200, deadline=None)
def test_centered_and_span_ordering(seq, params):
    centered = centered_norm(seq, params).value.log2_value
    starred = starred_norm(seq, params).value.log2_value
    assert centered <= starred + 1e-12
    assert starred <= centered + params.gap * math.log2(1.5) + 1e-10


@given(sequences(), exponents(), st.floats(0.01, 100), st.integers(-(2**40), 2**40))
@settings(max_examples=100, deadline=None)
def test_homogeneity_translation_reflection(seq, params, factor, offset):
    for engine in (starred_norm, centered_norm):
        base = engine(seq, params).value.log2_value
        assert engine(seq.scale(-factor), params).value.log2_value == pytest.approx(
            base + math.log2(factor), abs=1e-9
        )
        assert engine(seq.shift(offset), params).value.log2_value == pytest.approx(base, abs=1e-12)
        assert engine(seq.reflect(), params).value.log2_value == pytest.approx(base, abs=1e-10)


@given(sequences(), st.floats(1, 6))
@settings(max_examples=100, deadline=None)
def test_equal_exponents_give_total_mass(seq, p):
    params = MorreyParams(p, p)
    total = math.log2(math.fsum(abs(value) ** p for value in seq.values)) / p
    assert starred_norm(seq, params).value.log2_value == pytest.approx(total, abs=1e-9)
    assert centered_norm(seq, params).value.log2_value == pytest.approx(total, abs=1e-9)


@given(sequences(max_size=12), exponents())
@settings(max_examples=100, deadline=None)
def test_argmax_attains_norm(seq, params):
    for engine in (starred_norm, centered_norm):
        result = engine(seq, params)
        assert window_value(seq, result.argmax, params).log2_value == pytest.approx(
            result.value.log2_value, abs=1e-12
        )


@given(sequences(max_size=12), exponents())
@settings(max_examples=50, deadline=None)
def test_workers_do_not_change_result(seq, params):
    for engine in (starred_norm, centered_norm):
        single = engine(seq, params)
        parallel = engine(seq, params, workers=3)
        assert single.value == parallel.value
        assert single.argmax == parallel.argmax


def test_seeded_corpus_matches_brute_force():
    rng = np.random.default_rng(20240611)
    for _ in range(100):
        size = int(rng.integers(1, 11))
        indices = rng.choice(np.arange(-30, 31), size=size, replace=False)
        values = rng.uniform(0.1, 3.0, size=size) * rng.choice([-1.0, 1.0], size=size)
        seq = SparseSequence.from_pairs(zip(indices.tolist(), values.tolist()))
        p = float(rng.uniform(1, 4))
        params = MorreyParams(p, float(rng.uniform(p, 8)))
        for kind, engine in (("span", starred_norm), ("centered", centered_norm)):
            exact = engine(seq, params).value.log2_value
            brute = brute_force_norm(seq, params, kind, 2).value.log2_value
            assert exact == pytest.approx(brute, abs=1e-9)


def test_acceptance_corpus_matches_brute_force():
    rng = np.random.default_rng(500)
    for _ in range(500):
        size = int(rng.integers(1, 31))
        indices = rng.choice(np.arange(-50, 51), size=size, replace=False)
        values = rng.integers(1, 6, size=size).astype(float)
        seq = SparseSequence.from_pairs(zip(indices.tolist(), values.tolist()))
        p = float(rng.uniform(1, 8))
        params = MorreyParams(p, float(rng.uniform(p, 8)))
        # windows sticking out of the support hull matter for the centered kind
        margin = seq.max_index - seq.min_index
        for kind, engine in (("span", starred_norm), ("centered", centered_norm)):
            exact = engine(seq, params).value.linear_value
            brute = brute_force_norm(seq, params, kind, margin).value.linear_value
            assert exact == pytest.approx(brute, rel=1e-12)


@given(sequences(), exponents())
@settings(max_examples=200, deadline=None)
def test_sup_norm_bound(seq, params):
    largest = max(abs(value) for value in seq.values)
    assert math.log2(largest) <= centered_norm(seq, params).value.log2_value + 1e-12


@st.composite
def increasing_exponents(draw):
    first = draw(st.floats(1, 4))
    second = draw(st.floats(first, 6))
    return first, second, draw(st.floats(second, 8))


@given(sequences(), increasing_exponents())
@settings(max_examples=200, deadline=None)
def test_norms_are_nondecreasing_in_p(seq, exponents):
    first, second, q = exponents
    for engine in (starred_norm, centered_norm):
        smaller = engine(seq, MorreyParams(first, q)).value.log2_value
        larger = engine(seq, MorreyParams(second, q)).value.log2_value
        assert smaller <= larger + 1e-10


@pytest.mark.parametrize("p, q", [(1, 2), (2, 3), (2, 4)])
def test_pair_attains_span_over_centered_constant(p, q):
    params = MorreyParams(p, q)
    seq = SparseSequence.indicator([0, 1])
    starred = starred_norm(seq, params).value
    centered = centered_norm(seq, params).value
    assert starred.linear_value == pytest.approx(2 ** (1 / q), rel=1e-12)
    assert centered.linear_value == pytest.approx(3 ** (1 / q - 1 / p) * 2 ** (1 / p), rel=1e-12)
    assert starred.ratio(centered).linear_value == pytest.approx(1.5 ** params.gap, rel=1e-12)


def test_pair_below_span_over_centered_constant_when_single_point_dominates():
    params = MorreyParams(1, 4)
    seq = SparseSequence.indicator([0, 1])
    centered = centered_norm(seq, params)
    assert centered.value.linear_value == pytest.approx(1.0)
    assert centered.argmax == CenteredWindow(0, 0)
    ratio = starred_norm(seq, params).value.ratio(centered.value).linear_value
    assert ratio == pytest.approx(2**0.25, rel=1e-12)
    assert ratio < 1.5**params.gap


def test_starred_norm_on_five_thousand_points():
    rng = np.random.default_rng(5000)
    indices = rng.choice(np.arange(-(10**6), 10**6), size=5000, replace=False)
    values = rng.uniform(0.5, 5.0, size=5000)
    seq = SparseSequence.from_pairs(zip(indices.tolist(), values.tolist()))
    started = time.perf_counter()
    result = starred_norm(seq, MorreyParams(1.5, 4))
    assert time.perf_counter() - started <= 5.0
    assert result.candidates_evaluated >= 5000 * 4999 // 2
