"""Counterexample sequences for the proper inclusion of discrete Morrey spaces"""

__all__ = [
    "NewSeqSpec",
    "LegacySeqSpec",
    "beta",
    "new_sequence_blocks",
    "generate_new_sequence",
    "generate_legacy_sequence",
    "legacy_block_windows",
    "choose_vw_legacy",
    "default_block_count",
    "default_legacy_depth",
    "cross_counterexample",
]

import logging
import typing as tp
from dataclasses import dataclass, field
from fractions import Fraction

from .rational import as_fraction, choose_vw
from .typing import (
    INDEX_LIMIT,
    MAX_EXACT_SUPPORT,
    MorreyParams,
    ParameterError,
    ParameterOverflowError,
    SearchExhaustedError,
    SparseSequence,
    SpanWindow,
    SupportTooLargeError,
)

MAX_GENERATED_SUPPORT = 10_000_000
DEFAULT_MAX_BLOCKS = 8
LEGACY_SEARCH_LIMIT = 10**6


def beta(n: int, v: int) -> int:
    """Block endpoint ``1 + 2^v + ... + 2^{nv}``."""
    return sum(2 ** (i * v) for i in range(n + 1))


def _check_positive(name: str, value: int, minimum: int = 1) -> int:
    if isinstance(value, bool) or int(value) != value or value < minimum:
        raise ParameterError(f"{name} must be an integer >= {minimum}, got {value}")
    return int(value)


@dataclass(frozen=True)
class NewSeqSpec:
    v: int
    w: int
    n_max: int

    def __post_init__(self):
        object.__setattr__(self, "v", _check_positive("v", self.v))
        object.__setattr__(self, "w", _check_positive("w", self.w))
        object.__setattr__(self, "n_max", _check_positive("n_max", self.n_max, 0))
        if self.v <= self.w:
            raise ParameterError(f"expected v > w, got v={self.v}, w={self.w}")
        if self.largest_index >= INDEX_LIMIT:
            raise ParameterOverflowError(
                f"beta_{self.n_max} = {self.largest_index} overflows signed 128-bit indices"
            )

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.v, self.w)

    @property
    def largest_index(self) -> int:
        return beta(self.n_max, self.v)

    @property
    def support_size(self) -> int:
        return 2 + sum(2 ** (n * (self.v - self.w)) for n in range(1, self.n_max + 1))

    def metadata(self) -> tp.Dict[str, tp.Any]:
        return dict(family="new", v=self.v, w=self.w, n_max=self.n_max)


def _first_k0(v: int, w: int) -> int:
    threshold = Fraction(1, 2 ** (w + v - 1))
    k0 = 1
    while 1 - Fraction(1, 2 ** (2 * k0)) <= threshold:
        k0 += 1
    return k0


@dataclass(frozen=True)
class LegacySeqSpec:
    v: int
    w: int
    k_max: int
    k0: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "v", _check_positive("v", self.v, 2))
        object.__setattr__(self, "w", _check_positive("w", self.w))
        object.__setattr__(self, "k_max", _check_positive("k_max", self.k_max))
        object.__setattr__(self, "k0", _first_k0(self.v, self.w))
        if self.largest_index >= INDEX_LIMIT:
            raise ParameterOverflowError(
                f"2^{self.k_max * (self.w + self.v)} overflows signed 128-bit indices"
            )

    @property
    def largest_index(self) -> int:
        return max(2 ** (self.w + self.v), 2 ** (self.k_max * (self.w + self.v)))

    @property
    def blocks(self) -> tp.List[range]:
        """Positive outer blocks ``2^{k(w+v)} - i 2^{kw}``, ``k = k0..k_max``."""
        result = []
        for k in range(self.k0, self.k_max + 1):
            top = 2 ** (k * (self.w + self.v))
            depth = 2 ** (k * (self.w + self.v - 2))
            result.append(range(top - depth, top + 1, 2 ** (k * self.w)))
        return result

    @property
    def support_bound(self) -> int:
        return 2 ** (self.w + self.v + 1) + 1 + 2 * sum(len(block) for block in self.blocks)

    def metadata(self) -> tp.Dict[str, tp.Any]:
        return dict(family="legacy", v=self.v, w=self.w, k_max=self.k_max, k0=self.k0)


def new_sequence_blocks(spec: NewSeqSpec) -> tp.List[range]:
    """Blocks ``S_1 .. S_{n_max}``: ``2^{n(v-w)}`` points spaced ``2^{nw}``, up to ``beta_n``."""
    blocks = []
    for n in range(1, spec.n_max + 1):
        step = 2 ** (n * spec.w)
        blocks.append(range(beta(n - 1, spec.v) + step, beta(n, spec.v) + 1, step))
    return blocks


def _check_generated_support(size: int):
    if size > MAX_GENERATED_SUPPORT:
        logging.warning("refusing to materialize %s support points", size)
        raise SupportTooLargeError(
            f"sequence would have {size} support points, limit is {MAX_GENERATED_SUPPORT}"
        )


def generate_new_sequence(spec: NewSeqSpec) -> SparseSequence:
    _check_generated_support(spec.support_size)
    indices: tp.List[int] = [0, 1]
    for block in new_sequence_blocks(spec):
        indices.extend(block)
    logging.info(
        "new sequence v=%s w=%s n_max=%s: %s points", spec.v, spec.w, spec.n_max, len(indices)
    )
    return SparseSequence(tuple(indices), (1.0,) * len(indices))


def generate_legacy_sequence(spec: LegacySeqSpec) -> SparseSequence:
    """Symmetric 0/1 sequence; outer blocks falling inside the dense core are merged."""
    _check_generated_support(spec.support_bound)
    core = 2 ** (spec.w + spec.v)
    support = set(range(-core, core + 1))
    for block in spec.blocks:
        support.update(block)
        support.update(-index for index in block)
    indices = tuple(sorted(support))
    logging.info(
        "legacy sequence v=%s w=%s k0=%s k_max=%s: %s points",
        spec.v,
        spec.w,
        spec.k0,
        spec.k_max,
        len(indices),
    )
    return SparseSequence(indices, (1.0,) * len(indices))


def legacy_block_windows(spec: LegacySeqSpec) -> tp.List[SpanWindow]:
    """Windows exactly covering the positive outer blocks, ``k = k0..k_max``."""
    return [SpanWindow(block.start, block.stop - 1 - block.start) for block in spec.blocks]


def choose_vw_legacy(p1: float, p2: float, q: float) -> tp.Tuple[int, int]:
    """Smallest ``w`` (then ``v``) with ``(q/p2 - 1)w + 2q/p2 < v < (q/p1 - 1)w + 2``."""
    p1_, p2_, q_ = as_fraction(p1), as_fraction(p2), as_fraction(q)
    if not 1 <= p1_ < p2_ <= q_:
        raise ParameterError(f"expected 1 <= p1 < p2 <= q, got p1={p1}, p2={p2}, q={q}")
    for w in range(1, LEGACY_SEARCH_LIMIT + 1):
        lower = (q_ / p2_ - 1) * w + 2 * q_ / p2_
        upper = (q_ / p1_ - 1) * w + 2
        v = lower.numerator // lower.denominator + 1
        if v < upper:
            return v, w
    raise SearchExhaustedError(f"no w <= {LEGACY_SEARCH_LIMIT} opens the legacy interval")


def default_block_count(
    v: int,
    w: int,
    *,
    cap: int = DEFAULT_MAX_BLOCKS,
    support_budget: int = MAX_EXACT_SUPPORT,
) -> int:
    """Largest ``n_max <= cap`` whose sequence fits the index range and the support budget."""
    n_max = 0
    support = 2
    for n in range(1, cap + 1):
        support += 2 ** (n * (v - w))
        if beta(n, v) >= INDEX_LIMIT or support > support_budget:
            break
        n_max = n
    return n_max


def default_legacy_depth(
    v: int,
    w: int,
    *,
    cap: int = DEFAULT_MAX_BLOCKS,
    support_budget: int = MAX_EXACT_SUPPORT,
) -> int:
    """Largest ``k_max <= cap`` (at least 1) within the index range and the support budget."""
    k_max = 1
    for k in range(2, cap + 1):
        try:
            spec = LegacySeqSpec(v, w, k)
        except ParameterOverflowError:
            break
        if spec.support_bound > support_budget:
            break
        k_max = k
    return k_max


def cross_counterexample(p1: float, q1: float, p2: float, q2: float) -> tp.Optional[NewSeqSpec]:
    """Sequence in ``l^{p2}_{q2}`` but not in ``l^{p1}_{q1}``, when ``p1/q1 > p2/q2``."""
    first, second = MorreyParams(p1, q1), MorreyParams(p2, q2)
    if Fraction(first.p) / Fraction(first.q) <= Fraction(second.p) / Fraction(second.q):
        return None
    v, w = choose_vw(first.ratio, second.ratio)
    return NewSeqSpec(v, w, default_block_count(v, w))
