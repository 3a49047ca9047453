"""Discrete Morrey norms over centered and span windows"""

__all__ = [
    "NormResult",
    "ProfilePoint",
    "window_value",
    "starred_norm",
    "centered_norm",
    "brute_force_norm",
    "prefix_profile",
]

import logging
import typing as tp
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .tools import Best, PrefixMasses, check_support, log2_power_value, reduce_rows, rounded
from .typing import (
    CenteredWindow,
    InfeasibleEnumerationError,
    LogValue,
    MorreyParams,
    ParameterError,
    SparseSequence,
    SpanWindow,
    Window,
)

MAX_BRUTE_WIDTH = 10_000

WindowKind = tp.Literal["span", "centered"]


@dataclass(frozen=True)
class NormResult:
    value: LogValue
    argmax: tp.Optional[Window]
    candidates_evaluated: int

    @classmethod
    def zero(cls, candidates_evaluated: int = 0) -> "NormResult":
        return cls(LogValue.zero(), None, candidates_evaluated)

    def to_dict(self) -> tp.Dict[str, tp.Any]:
        return rounded(
            dict(
                log2_value=self.value.log2_value,
                value=self.value.linear_value,
                argmax=None if self.argmax is None else self.argmax.to_dict(),
                candidates=self.candidates_evaluated,
            )
        )


@dataclass(frozen=True)
class ProfilePoint:
    window: Window
    cardinality: int
    mass: float
    value: LogValue

    def to_dict(self) -> tp.Dict[str, tp.Any]:
        return rounded(
            dict(
                window=self.window.to_dict(),
                cardinality=str(self.cardinality),
                mass=self.mass,
                value=self.value.linear_value,
                log2_value=self.value.log2_value,
            )
        )


def _window_log2(prefix: PrefixMasses, window: Window, params: MorreyParams) -> float:
    mass = prefix.in_window(window)
    return log2_power_value(window.cardinality, mass, params.alpha, params.p)


def window_value(sequence: SparseSequence, window: Window, params: MorreyParams) -> LogValue:
    prefix = PrefixMasses.build(sequence, params.p)
    return LogValue(_window_log2(prefix, window, params))


def _starred_rows(prefix: PrefixMasses, params: MorreyParams, rows: range) -> Best:
    best = Best()
    offsets = prefix.offsets
    size = prefix.size
    for i in rows:
        cardinality = (offsets[i:] - offsets[i] + 1).astype(float)
        mass = prefix.between(i, np.arange(i + 1, size + 1))
        values = log2_power_value(cardinality, mass, params.alpha, params.p)
        best.candidates += len(values)
        j = int(np.argmax(values))
        # first maximum is the smallest extent
        best.offer(float(values[j]), (i, j))
    return best


def _centered_rows(prefix: PrefixMasses, params: MorreyParams, rows: range) -> Best:
    best = Best()
    offsets = prefix.offsets
    for i in rows:
        left = offsets[i]
        right = offsets[i:]
        total = left + right
        floor_center = total // 2
        for center in (floor_center, floor_center + total % 2):
            radius = np.maximum(center - left, right - center)
            start = np.searchsorted(offsets, center - radius, side="left")
            stop = np.searchsorted(offsets, center + radius, side="right")
            mass = prefix.between(start, stop)
            cardinality = (2 * radius + 1).astype(float)
            values = log2_power_value(cardinality, mass, params.alpha, params.p)
            best.candidates += len(values)
            top = float(np.max(values))
            if top < best.log2_value:
                continue
            for j in np.flatnonzero(values == top).tolist():
                best.offer(top, (int(center[j]), int(radius[j])))
    return best


def starred_norm(
    sequence: SparseSequence,
    params: MorreyParams,
    *,
    workers: int = 1,
    progress: bool = False,
) -> NormResult:
    """Supremum over span windows.

    With ``1/q - 1/p <= 0`` trimming empty ends never lowers a window's value,
    so only spans with support points at both ends are candidates.
    """
    if sequence.is_empty():
        return NormResult.zero()
    check_support(sequence)
    prefix = PrefixMasses.build(sequence, params.p)
    best = reduce_rows(_starred_rows, prefix, params, workers=workers, progress=progress)
    if best.key is None:
        return NormResult.zero(best.candidates)
    i, j = best.key
    first, last = sequence.indices[i], sequence.indices[i + j]
    argmax = SpanWindow(first, last - first)
    logging.debug("starred norm: %s candidates, argmax %s", best.candidates, argmax)
    return NormResult(LogValue(best.log2_value), argmax, best.candidates)


def centered_norm(
    sequence: SparseSequence,
    params: MorreyParams,
    *,
    workers: int = 1,
    progress: bool = False,
) -> NormResult:
    """Supremum over centered windows.

    Every centered window is dominated by the minimal centered window around
    its outermost contained support pair; both integer midpoints are tried.
    """
    if sequence.is_empty():
        return NormResult.zero()
    check_support(sequence)
    prefix = PrefixMasses.build(sequence, params.p)
    best = reduce_rows(_centered_rows, prefix, params, workers=workers, progress=progress)
    if best.key is None:
        return NormResult.zero(best.candidates)
    center, radius = best.key
    argmax = CenteredWindow(prefix.origin + center, radius)
    logging.debug("centered norm: %s candidates, argmax %s", best.candidates, argmax)
    return NormResult(LogValue(best.log2_value), argmax, best.candidates)


def brute_force_norm(
    sequence: SparseSequence,
    params: MorreyParams,
    kind: WindowKind,
    index_margin: int,
) -> NormResult:
    """Evaluate every window inside the support hull widened by ``index_margin``."""
    if kind not in ("span", "centered"):
        raise ParameterError(f"unknown window kind {kind!r}")
    if index_margin < 0:
        raise ParameterError(f"index margin must be nonnegative, got {index_margin}")
    if sequence.is_empty():
        return NormResult.zero()

    low = sequence.min_index - index_margin
    width = sequence.max_index + index_margin - low + 1
    if width > MAX_BRUTE_WIDTH:
        raise InfeasibleEnumerationError(
            f"box of width {width} needs more than {MAX_BRUTE_WIDTH} window sizes"
        )
    dense = np.zeros(width)
    for index, value in sequence.entries:
        dense[index - low] = abs(value) ** params.p

    best = Best()
    if kind == "span":
        sizes = range(1, width + 1)
    else:
        sizes = range(1, width + 1, 2)
    for size in sizes:
        masses = sliding_window_view(dense, size).sum(axis=1)
        values = log2_power_value(float(size), masses, params.alpha, params.p)
        best.candidates += len(values)
        position = int(np.argmax(values))
        if kind == "span":
            key = (low + position, size - 1)
        else:
            radius = (size - 1) // 2
            key = (low + position + radius, radius)
        best.offer(float(values[position]), key)

    if best.key is None:
        return NormResult.zero(best.candidates)
    window: Window
    if kind == "span":
        window = SpanWindow(*best.key)
    else:
        window = CenteredWindow(*best.key)
    return NormResult(LogValue(best.log2_value), window, best.candidates)


def prefix_profile(
    sequence: SparseSequence,
    params: MorreyParams,
    windows: tp.Sequence[Window],
) -> tp.List[ProfilePoint]:
    if not windows:
        return []
    prefix = PrefixMasses.build(sequence, params.p)
    points = []
    for window in windows:
        mass = prefix.in_window(window)
        value = log2_power_value(window.cardinality, mass, params.alpha, params.p)
        points.append(ProfilePoint(window, window.cardinality, mass, LogValue(value)))
    return points
