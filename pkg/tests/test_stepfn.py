import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morreyseq.norms import centered_norm, starred_norm
from morreyseq.stepfn import (
    StepFunction,
    continuous_norm,
    embed,
    equivalence_report,
    grid_search_norm,
    interval_mass,
)
from morreyseq.typing import (
    InfeasibleEnumerationError,
    MorreyParams,
    ParameterError,
    SparseSequence,
)

SQRT2 = math.sqrt(2)
TWO_OVER_SQRT3 = 2 / math.sqrt(3)


@st.composite
def sequences(draw, high=12, max_size=6):
    entries = draw(
        st.dictionaries(
            st.integers(0, high),
            st.floats(-4, 4, allow_nan=False).filter(lambda value: abs(value) > 1e-2),
            min_size=1,
            max_size=max_size,
        )
    )
    return SparseSequence.from_pairs(entries.items())


@st.composite
def exponents(draw, high=8):
    p = draw(st.floats(1, 4))
    q = draw(st.floats(p, high))
    return MorreyParams(p, q)


def test_embed():
    f = embed(SparseSequence.indicator([0, 1]))
    assert f.cells == (0, 1)
    assert f(0.5) == 1.0
    assert f(2.0) == 0.0
    assert f.hull == (0, 2)
    assert embed(SparseSequence()).is_zero()


def test_interval_mass():
    assert interval_mass(embed(SparseSequence.indicator([0, 1])), 0.5, 1.5, 1) == 1.0
    assert interval_mass(embed(SparseSequence.indicator([0, 2])), 0.5, 2.5, 1) == 1.0
    assert interval_mass(embed(SparseSequence((0,), (2.0,))), 0, 1, 2) == 4.0
    with pytest.raises(ParameterError):
        interval_mass(embed(SparseSequence.indicator([0])), 1, 0, 1)


def test_continuous_norm_examples():
    params = MorreyParams(1, 2)
    result = continuous_norm(embed(SparseSequence.indicator([0])), params)
    assert result.value.linear_value == pytest.approx(1.0)
    assert (result.left, result.right) == (0.0, 1.0)
    result = continuous_norm(embed(SparseSequence.indicator([0, 1])), params)
    assert result.value.linear_value == pytest.approx(SQRT2)
    assert (result.left, result.right) == (0.0, 2.0)
    result = continuous_norm(embed(SparseSequence.indicator([0, 2])), params)
    assert result.value.linear_value == pytest.approx(TWO_OVER_SQRT3)
    assert (result.left, result.right) == (0.0, 3.0)


def test_continuous_norm_conventions():
    zero = continuous_norm(StepFunction(), MorreyParams(1, 2))
    assert zero.value.is_zero()
    assert zero.left is None and zero.right is None
    result = continuous_norm(embed(SparseSequence((-2, 5), (1.0, 2.0))), MorreyParams(2, 2))
    assert result.value.linear_value == pytest.approx(math.sqrt(5))
    assert (result.left, result.right) == (-2.0, 6.0)


def test_grid_search_examples():
    params = MorreyParams(1, 2)
    result = grid_search_norm(embed(SparseSequence.indicator([0, 2])), params)
    assert result.value.linear_value == pytest.approx(TWO_OVER_SQRT3, rel=1e-6)
    with pytest.raises(InfeasibleEnumerationError):
        grid_search_norm(embed(SparseSequence.indicator([0, 300])), params)


def test_grid_search_covers_the_widest_corpus_hull():
    f = embed(SparseSequence.indicator([0, 12]))
    result = grid_search_norm(f, MorreyParams(1, 2), step=1e-3)
    assert result.value.linear_value == pytest.approx(
        continuous_norm(f, MorreyParams(1, 2)).value.linear_value, rel=1e-6
    )


def test_exact_norm_matches_grid_oracle_on_corpus():
    rng = np.random.default_rng(100)
    for _ in range(100):
        size = int(rng.integers(1, 7))
        cells = rng.choice(np.arange(0, 12), size=size, replace=False)
        heights = rng.uniform(0.2, 4.0, size=size) * rng.choice([-1.0, 1.0], size=size)
        f = embed(SparseSequence.from_pairs(zip(cells.tolist(), heights.tolist())))
        p = float(rng.uniform(1, 4))
        params = MorreyParams(p, float(rng.uniform(p, 8)))
        exact = continuous_norm(f, params)
        grid = grid_search_norm(f, params, step=1e-3)
        assert grid.value.log2_value <= exact.value.log2_value + 1e-9
        assert grid.value.linear_value == pytest.approx(exact.value.linear_value, rel=1e-6)
        starred = starred_norm(f.as_sequence(), params).value.log2_value
        centered = centered_norm(f.as_sequence(), params).value.log2_value
        assert starred <= exact.value.log2_value + 1e-10
        assert exact.value.log2_value <= starred + params.gap + 1e-10
        assert centered <= exact.value.log2_value + 1e-10
        assert exact.value.log2_value <= centered + params.gap * math.log2(3) + 1e-10


@given(sequences(high=30, max_size=10), exponents())
@settings(max_examples=200, deadline=None)
def test_continuous_norm_is_tight_and_sandwiched(seq, params):
    f = embed(seq)
    result = continuous_norm(f, params)
    assert result.left < result.right
    mass = interval_mass(f, result.left, result.right, params.p)
    recomputed = params.alpha * math.log2(result.right - result.left) + math.log2(mass) / params.p
    assert recomputed == pytest.approx(result.value.log2_value, abs=1e-10)

    starred = starred_norm(seq, params).value.log2_value
    assert starred <= result.value.log2_value + 1e-10
    assert result.value.log2_value <= starred + params.gap + 1e-10


def test_equivalence_report_examples():
    params = MorreyParams(1, 2)
    report = equivalence_report(SparseSequence.indicator([0, 1]), params)
    ratios = {check.name: check.ratio.linear_value for check in report.checks}
    assert ratios["span/centered"] == pytest.approx(math.sqrt(1.5))
    assert ratios["continuous/span"] == pytest.approx(1.0)
    assert ratios["continuous/centered"] == pytest.approx(math.sqrt(1.5))
    assert report.passed
    single = equivalence_report(SparseSequence.indicator([0]), params)
    assert all(check.ratio.linear_value == pytest.approx(1.0) for check in single.checks)
    assert single.to_dict()["passed"] is True
    with pytest.raises(ParameterError):
        equivalence_report(SparseSequence(), params)


@given(sequences(high=40, max_size=10), exponents())
@settings(max_examples=200, deadline=None)
def test_equivalence_constants_hold(seq, params):
    report = equivalence_report(seq, params)
    assert report.passed, [check.to_dict() for check in report.checks]
