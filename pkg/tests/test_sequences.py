import pytest

from morreyseq import sequences
from morreyseq.sequences import (
    LegacySeqSpec,
    NewSeqSpec,
    beta,
    choose_vw_legacy,
    cross_counterexample,
    default_block_count,
    default_legacy_depth,
    generate_legacy_sequence,
    generate_new_sequence,
    legacy_block_windows,
    new_sequence_blocks,
)
from morreyseq.typing import (
    INDEX_LIMIT,
    MAX_EXACT_SUPPORT,
    ParameterError,
    ParameterOverflowError,
    SearchExhaustedError,
    SpanWindow,
)


def test_new_sequence_examples():
    assert generate_new_sequence(NewSeqSpec(3, 1, 1)).indices == (0, 1, 3, 5, 7, 9)
    seq = generate_new_sequence(NewSeqSpec(3, 1, 2))
    assert seq.indices == (0, 1, 3, 5, 7, 9) + tuple(range(13, 74, 4))
    assert len(seq) == 22
    assert seq.max_index == beta(2, 3) == 73
    assert set(seq.values) == {1.0}
    assert generate_new_sequence(NewSeqSpec(2, 1, 0)).indices == (0, 1)


@pytest.mark.parametrize("v, w, n_max", [(3, 1, 4), (5, 2, 3), (4, 3, 5), (2, 1, 8)])
def test_new_sequence_blocks(v, w, n_max):
    spec = NewSeqSpec(v, w, n_max)
    blocks = new_sequence_blocks(spec)
    seen = {0, 1}
    for n, block in enumerate(blocks, start=1):
        assert len(block) == 2 ** (n * (v - w))
        assert block[0] - beta(n - 1, v) == 2 ** (n * w)
        assert block[-1] == beta(n, v)
        assert block.step == 2 ** (n * w)
        assert seen.isdisjoint(block)
        seen.update(block)
    assert len(generate_new_sequence(spec)) == spec.support_size == len(seen)


def test_new_spec_validation():
    with pytest.raises(ParameterError):
        NewSeqSpec(2, 2, 1)
    with pytest.raises(ParameterError):
        NewSeqSpec(3, 0, 1)
    with pytest.raises(ParameterOverflowError):
        NewSeqSpec(3, 1, 43)
    assert NewSeqSpec(3, 1, 42).largest_index < INDEX_LIMIT


def test_legacy_sequence_examples():
    first = generate_legacy_sequence(LegacySeqSpec(7, 2, 1))
    assert LegacySeqSpec(7, 2, 1).k0 == 1
    assert first.indices == tuple(range(-512, 513))
    second = generate_legacy_sequence(LegacySeqSpec(7, 2, 2))
    assert len(second) == 3075
    outer = [index for index in second.indices if index > 512]
    assert outer == list(range(245760, 262145, 16))
    assert second.indices == tuple(-index for index in reversed(second.indices))
    with pytest.raises(ParameterError):
        LegacySeqSpec(3, 1, 0)
    with pytest.raises(ParameterError):
        LegacySeqSpec(1, 1, 1)


def test_legacy_block_windows():
    windows = legacy_block_windows(LegacySeqSpec(7, 2, 2))
    assert windows == [SpanWindow(384, 128), SpanWindow(245760, 16384)]


def test_choose_vw_legacy():
    assert choose_vw_legacy(1, 2, 4) == (7, 2)
    assert choose_vw_legacy(1, 2, 2) == (3, 2)
    with pytest.raises(ParameterError):
        choose_vw_legacy(2, 2, 4)


def test_choose_vw_legacy_exhausted(monkeypatch):
    monkeypatch.setattr(sequences, "LEGACY_SEARCH_LIMIT", 10)
    with pytest.raises(SearchExhaustedError):
        choose_vw_legacy(1, 1.0000001, 1.0000001)


def test_default_depths():
    n_max = default_block_count(3, 1)
    assert NewSeqSpec(3, 1, n_max).support_size <= MAX_EXACT_SUPPORT
    assert NewSeqSpec(3, 1, n_max + 1).support_size > MAX_EXACT_SUPPORT
    assert default_block_count(2, 1) == 8
    assert default_legacy_depth(7, 2) == 2


def test_cross_counterexample():
    spec = cross_counterexample(2, 2, 1, 2)
    assert (spec.v, spec.w) == (3, 2)
    assert 1 <= spec.n_max <= 8
    assert cross_counterexample(1, 2, 2, 2) is None
    assert cross_counterexample(1, 4, 2, 4) is None
