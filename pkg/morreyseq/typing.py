__all__ = [
    "LikePath",
    "INDEX_LIMIT",
    "MAX_EXACT_SUPPORT",
    "MorreyError",
    "ParameterError",
    "ParameterOverflowError",
    "SupportTooLargeError",
    "EmptyIntervalError",
    "SearchExhaustedError",
    "InfeasibleEnumerationError",
    "SequenceFormatError",
    "MorreyParams",
    "SparseSequence",
    "SpanWindow",
    "CenteredWindow",
    "Window",
    "LogValue",
    "check_index",
]

import math
import typing as tp
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

LikePath = tp.Union[str, Path]

INDEX_BITS = 128
INDEX_LIMIT = 2 ** (INDEX_BITS - 1)

# the O(s^2) engines refuse larger supports
MAX_EXACT_SUPPORT = 20_000


class MorreyError(ValueError):
    pass


class ParameterError(MorreyError):
    pass


class ParameterOverflowError(ParameterError):
    pass


class SupportTooLargeError(ParameterError):
    pass


class EmptyIntervalError(ParameterError):
    pass


class SearchExhaustedError(MorreyError):
    pass


class InfeasibleEnumerationError(MorreyError):
    pass


class SequenceFormatError(MorreyError):
    pass


def check_index(index: int) -> int:
    if not -INDEX_LIMIT <= index < INDEX_LIMIT:
        raise ParameterOverflowError(f"index {index} does not fit in {INDEX_BITS} bits")
    return index


@dataclass(frozen=True)
class MorreyParams:
    """Exponent pair with ``1 <= p <= q < inf``."""

    p: float
    q: float

    def __post_init__(self):
        p, q = float(self.p), float(self.q)
        if not (math.isfinite(p) and math.isfinite(q)):
            raise ParameterError(f"exponents must be finite, got p={p}, q={q}")
        if not 1 <= p <= q:
            raise ParameterError(f"expected 1 <= p <= q, got p={p}, q={q}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def alpha(self) -> float:
        """Width exponent ``1/q - 1/p``, always in ``(-1, 0]``."""
        return 1 / self.q - 1 / self.p

    @property
    def gap(self) -> float:
        """Exponent ``1/p - 1/q`` of the equivalence constants."""
        return 1 / self.p - 1 / self.q

    @property
    def ratio(self) -> Fraction:
        """Exact ``q/p``."""
        return Fraction(self.q) / Fraction(self.p)

    def to_dict(self) -> tp.Dict[str, float]:
        return dict(p=self.p, q=self.q)


@dataclass(frozen=True)
class SparseSequence:
    """Finitely supported real sequence on Z, stored as sorted nonzero entries."""

    indices: tp.Tuple[int, ...] = ()
    values: tp.Tuple[float, ...] = ()

    def __post_init__(self):
        indices = tuple(int(i) for i in self.indices)
        values = tuple(float(v) for v in self.values)
        if len(indices) != len(values):
            raise ParameterError("indices and values differ in length")
        for position, (index, value) in enumerate(zip(indices, values)):
            check_index(index)
            if value == 0 or not math.isfinite(value):
                raise ParameterError(f"entry {position}: stored values must be finite and nonzero")
            if position and indices[position - 1] >= index:
                raise ParameterError(f"entry {position}: indices must be strictly increasing")
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_pairs(cls, pairs: tp.Iterable[tp.Tuple[int, float]]) -> "SparseSequence":
        """Sort, drop zeros and merge repeated indices carrying the same value."""
        merged: tp.Dict[int, float] = {}
        for index, value in pairs:
            try:
                integral = int(index)
            except (OverflowError, ValueError) as exc:
                raise ParameterError(f"index {index!r} is not an integer") from exc
            if integral != index:
                raise ParameterError(f"index {index!r} is not an integer")
            index, value = check_index(integral), float(value)
            if index in merged and merged[index] != value:
                raise ParameterError(
                    f"index {index} given with conflicting values {merged[index]} and {value}"
                )
            merged[index] = value
        ordered = sorted((i, v) for i, v in merged.items() if v != 0)
        return cls(tuple(i for i, _ in ordered), tuple(v for _, v in ordered))

    @classmethod
    def indicator(cls, indices: tp.Iterable[int]) -> "SparseSequence":
        return cls.from_pairs((index, 1.0) for index in indices)

    @property
    def entries(self) -> tp.List[tp.Tuple[int, float]]:
        return list(zip(self.indices, self.values))

    @property
    def size(self) -> int:
        return len(self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def is_empty(self) -> bool:
        return not self.indices

    @property
    def min_index(self) -> int:
        return self.indices[0]

    @property
    def max_index(self) -> int:
        return self.indices[-1]

    def locate(self, first: int, last: int) -> tp.Tuple[int, int]:
        """Positions ``[start, stop)`` of the entries with index in ``[first, last]``."""
        return bisect_left(self.indices, first), bisect_right(self.indices, last)

    def shift(self, offset: int) -> "SparseSequence":
        return SparseSequence(tuple(i + offset for i in self.indices), self.values)

    def reflect(self) -> "SparseSequence":
        return SparseSequence(
            tuple(-i for i in reversed(self.indices)), tuple(reversed(self.values))
        )

    def scale(self, factor: float) -> "SparseSequence":
        if factor == 0:
            return SparseSequence()
        return SparseSequence(self.indices, tuple(v * factor for v in self.values))

    def truncate(self, first: int, last: int) -> "SparseSequence":
        start, stop = self.locate(first, last)
        return SparseSequence(self.indices[start:stop], self.values[start:stop])


@dataclass(frozen=True)
class SpanWindow:
    """Window ``{start, ..., start + extent}`` of cardinality ``extent + 1``."""

    start: int
    extent: int

    kind: tp.ClassVar[str] = "span"

    def __post_init__(self):
        if self.extent < 0:
            raise ParameterError(f"span extent must be nonnegative, got {self.extent}")

    @property
    def first(self) -> int:
        return self.start

    @property
    def last(self) -> int:
        return self.start + self.extent

    @property
    def cardinality(self) -> int:
        return self.extent + 1

    @property
    def key(self) -> tp.Tuple[int, int]:
        return self.start, self.extent

    def to_dict(self) -> tp.Dict[str, str]:
        return dict(kind=self.kind, start=str(self.start), extent=str(self.extent))


@dataclass(frozen=True)
class CenteredWindow:
    """Window ``{center - radius, ..., center + radius}`` of odd cardinality."""

    center: int
    radius: int

    kind: tp.ClassVar[str] = "centered"

    def __post_init__(self):
        if self.radius < 0:
            raise ParameterError(f"centered radius must be nonnegative, got {self.radius}")

    @property
    def first(self) -> int:
        return self.center - self.radius

    @property
    def last(self) -> int:
        return self.center + self.radius

    @property
    def cardinality(self) -> int:
        return 2 * self.radius + 1

    @property
    def key(self) -> tp.Tuple[int, int]:
        return self.center, self.radius

    def to_dict(self) -> tp.Dict[str, str]:
        return dict(kind=self.kind, center=str(self.center), radius=str(self.radius))


Window = tp.Union[SpanWindow, CenteredWindow]


@dataclass(frozen=True, order=True)
class LogValue:
    """Nonnegative quantity kept as its base-2 logarithm; ``-inf`` marks exact zero."""

    log2_value: float
    linear_value: float = field(init=False, compare=False)

    def __post_init__(self):
        log2_value = float(self.log2_value)
        if math.isnan(log2_value):
            raise ParameterError("log2 value is NaN")
        object.__setattr__(self, "log2_value", log2_value)
        try:
            linear = 2.0**log2_value
        except OverflowError:
            linear = math.inf
        object.__setattr__(self, "linear_value", linear)

    @classmethod
    def zero(cls) -> "LogValue":
        return cls(-math.inf)

    @classmethod
    def from_linear(cls, value: float) -> "LogValue":
        if value < 0:
            raise ParameterError(f"negative quantity {value}")
        return cls(math.log2(value) if value > 0 else -math.inf)

    def is_zero(self) -> bool:
        return self.log2_value == -math.inf

    def ratio(self, other: "LogValue") -> "LogValue":
        """``self / other`` for positive ``other``."""
        return LogValue(self.log2_value - other.log2_value)

    def __float__(self) -> float:
        return self.linear_value
