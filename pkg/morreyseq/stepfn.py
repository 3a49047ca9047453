"""Step functions induced by sequences and their continuous Morrey norm"""

__all__ = [
    "StepFunction",
    "IntervalNormResult",
    "EquivalenceCheck",
    "EquivalenceReport",
    "embed",
    "interval_mass",
    "continuous_norm",
    "grid_search_norm",
    "equivalence_report",
]

import logging
import math
import typing as tp
from dataclasses import dataclass

import numpy as np
from scipy import optimize  # type: ignore

from .norms import NormResult, centered_norm, starred_norm
from .tools import Best, PrefixMasses, check_support, log2_power_value, reduce_rows, rounded
from .typing import (
    InfeasibleEnumerationError,
    LogValue,
    MorreyParams,
    ParameterError,
    SparseSequence,
)

EQUIVALENCE_SLACK = 1e-10
MAX_GRID_POINTS = 20_001
GRID_CHUNK_ROWS = 256
GRID_PENALTY = 1e300


@dataclass(frozen=True)
class StepFunction:
    """``sum_j h_j chi_[c_j, c_j + 1)`` over strictly increasing cells."""

    cells: tp.Tuple[int, ...] = ()
    heights: tp.Tuple[float, ...] = ()

    def __post_init__(self):
        # same invariants as a sparse sequence
        sequence = SparseSequence(self.cells, self.heights)
        object.__setattr__(self, "cells", sequence.indices)
        object.__setattr__(self, "heights", sequence.values)

    def as_sequence(self) -> SparseSequence:
        return SparseSequence(self.cells, self.heights)

    def is_zero(self) -> bool:
        return not self.cells

    @property
    def hull(self) -> tp.Tuple[int, int]:
        return self.cells[0], self.cells[-1] + 1

    def __call__(self, t: float) -> float:
        cell = math.floor(t)
        start, stop = self.as_sequence().locate(cell, cell)
        return self.heights[start] if start < stop else 0.0


@dataclass(frozen=True)
class IntervalNormResult:
    value: LogValue
    left: tp.Optional[float]
    right: tp.Optional[float]
    candidates_evaluated: int

    @classmethod
    def zero(cls) -> "IntervalNormResult":
        return cls(LogValue.zero(), None, None, 0)

    def to_dict(self) -> tp.Dict[str, tp.Any]:
        interval = None if self.left is None else [self.left, self.right]
        return rounded(
            dict(
                value=self.value.linear_value,
                log2_value=self.value.log2_value,
                interval=interval,
                candidates=self.candidates_evaluated,
            )
        )


def embed(sequence: SparseSequence) -> StepFunction:
    return StepFunction(sequence.indices, sequence.values)


def interval_mass(function: StepFunction, left: float, right: float, p: float) -> float:
    """``integral_left^right |f|^p``."""
    if right < left:
        raise ParameterError(f"expected left <= right, got [{left}, {right}]")
    start, stop = function.as_sequence().locate(math.floor(left), math.ceil(right))
    pieces = []
    for cell, height in zip(function.cells[start:stop], function.heights[start:stop]):
        overlap = min(right, cell + 1) - max(left, cell)
        if overlap > 0:
            pieces.append(abs(height) ** p * overlap)
    return math.fsum(pieces)


def _objective(gap, ell, rho, w_left, between, w_right, params: MorreyParams):
    # L = c_i + ell, R = c_j + rho
    width = gap + rho - ell
    mass = w_left * (1 - ell) + between + w_right * rho
    with np.errstate(divide="ignore", invalid="ignore"):
        values = log2_power_value(width, mass, params.alpha, params.p)
    return np.where(width > 0, values, -np.inf)


def _interval_rows(prefix: PrefixMasses, params: MorreyParams, rows: range) -> Best:
    """Closed-form candidates with the left end in cell ``i``.

    On the rectangle ``L in [c_i, c_i+1]``, ``R in [c_j, c_j+1]`` the mass is
    affine, so the maximum sits at a corner, at an edge point where
    ``M = h^p (R - L) q / (q - p)``, or (equal heights only) on an interior ridge.
    """
    best = Best()
    kappa = params.q / (params.q - params.p)
    size = prefix.size
    for i in rows:
        w_left = prefix.powers[i]
        # the whole cell alone
        best.candidates += 1
        best.offer(math.log2(w_left) / params.p if w_left > 0 else -math.inf, (i, 0.0, i, 1.0))
        if i + 1 >= size:
            continue

        gap = (prefix.offsets[i + 1 :] - prefix.offsets[i]).astype(float)
        w_right = prefix.powers[i + 1 :]
        between = prefix.between(i + 1, np.arange(i + 1, size))
        ones = np.ones_like(gap)

        ells, rhos, masks = [], [], []
        for ell, rho in ((0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)):
            ells.append(ell * ones)
            rhos.append(rho * ones)
            masks.append(ones > 0)
        for ell in (0.0, 1.0):
            fixed = w_left * (1 - ell) + between
            rho = (fixed - w_right * kappa * (gap - ell)) / (w_right * (kappa - 1))
            ells.append(ell * ones)
            rhos.append(rho)
            masks.append((rho > 0) & (rho < 1))
        for rho in (0.0, 1.0):
            fixed = between + w_right * rho
            ell = (w_left * kappa * (gap + rho) - w_left - fixed) / (w_left * (kappa - 1))
            ells.append(ell)
            rhos.append(rho * ones)
            masks.append((ell > 0) & (ell < 1))
        with np.errstate(divide="ignore", invalid="ignore"):
            shift = (between + w_left * (1 - gap)) / (w_left * (kappa - 1)) - gap
        ells.append((1 - shift) / 2)
        rhos.append((1 + shift) / 2)
        masks.append((w_right == w_left) & (shift > -1) & (shift < 1))

        ell_grid = np.stack(ells)
        rho_grid = np.stack(rhos)
        mask = np.stack(masks)
        values = _objective(gap, ell_grid, rho_grid, w_left, between, w_right, params)
        values = np.where(mask, values, -np.inf)
        best.candidates += int(mask.sum())

        top = float(np.max(values))
        if top == -math.inf or top < best.log2_value:
            continue
        for kind, j in zip(*np.nonzero(values == top)):
            best.offer(top, (i, float(ell_grid[kind, j]), i + 1 + int(j), float(rho_grid[kind, j])))
    return best


def continuous_norm(
    function: StepFunction,
    params: MorreyParams,
    *,
    workers: int = 1,
    progress: bool = False,
) -> IntervalNormResult:
    """Exact ``sup_{a, r} (2r)^{1/q-1/p} (int_{a-r}^{a+r} |f|^p)^{1/p}``.

    Ends lying in empty cells can be pulled onto the support without losing
    mass, so only rectangles spanned by support cells are searched.
    """
    if function.is_zero():
        return IntervalNormResult.zero()
    sequence = function.as_sequence()
    check_support(sequence)
    prefix = PrefixMasses.build(sequence, params.p)

    if params.p == params.q:
        left, right = function.hull
        value = LogValue(math.log2(prefix.total) / params.p)
        return IntervalNormResult(value, float(left), float(right), 1)

    best = reduce_rows(_interval_rows, prefix, params, workers=workers, progress=progress)
    if best.key is None:
        return IntervalNormResult.zero()
    i, ell, j, rho = best.key
    left, right = function.cells[i] + ell, function.cells[j] + rho
    logging.debug("continuous norm: %s candidates, interval [%s, %s]", best.candidates, left, right)
    return IntervalNormResult(LogValue(best.log2_value), left, right, best.candidates)


def grid_search_norm(
    function: StepFunction,
    params: MorreyParams,
    *,
    step: float = 1e-2,
    tolerance: float = 1e-7,
    starts: int = 5,
) -> IntervalNormResult:
    """Dense grid over ``L < R`` aligned to the integers, then Nelder-Mead from the best points.

    The grid is scanned in row chunks, so only the antiderivative on the grid
    and one chunk of the value matrix are held at a time.
    """
    if function.is_zero():
        return IntervalNormResult.zero()
    per_unit = int(round(1 / step))
    if per_unit < 1:
        raise ParameterError(f"grid step must be at most 1, got {step}")
    origin, end = function.hull
    count = (end - origin) * per_unit + 1
    if count > MAX_GRID_POINTS:
        raise InfeasibleEnumerationError(
            f"grid of {count} points per axis exceeds {MAX_GRID_POINTS}"
        )

    offsets = np.array([cell - origin for cell in function.cells], dtype=float)
    weights = np.abs(np.array(function.heights)) ** params.p

    def antiderivative(t: np.ndarray) -> np.ndarray:
        return (weights * np.clip(t[..., None] - offsets, 0.0, 1.0)).sum(axis=-1)

    def log2_values(width: np.ndarray, mass: np.ndarray) -> np.ndarray:
        values = log2_power_value(np.where(width > 0, width, 1.0), mass, params.alpha, params.p)
        return np.where((width > 0) & (mass > 0), values, -np.inf)

    grid = np.arange(count) / per_unit
    masses = antiderivative(grid)
    width_terms = params.alpha * np.log2(np.arange(1, count) / per_unit)
    top_values = np.full(0, -np.inf)
    top_points = np.zeros((0, 2), dtype=int)
    evaluated = 0
    for first in range(0, count - 1, GRID_CHUNK_ROWS):
        rows = np.arange(first, min(first + GRID_CHUNK_ROWS, count - 1))
        # right ends strictly after the chunk's first left end
        cols = np.arange(first + 1, count)
        steps = cols[None, :] - rows[:, None]
        mass = masses[None, cols] - masses[rows, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            values = width_terms[np.maximum(steps, 1) - 1] + np.log2(mass) / params.p
        values = np.where((steps > 0) & (mass > 0), values, -np.inf)
        flat = values.ravel()
        evaluated += flat.size
        keep = np.argpartition(flat, -min(starts, flat.size))[-starts:]
        top_values = np.concatenate([top_values, flat[keep]])
        top_points = np.concatenate(
            [top_points, np.stack([rows[keep // cols.size], cols[keep % cols.size]], axis=1)]
        )
        order = np.argsort(top_values, kind="stable")[::-1][:starts]
        top_values, top_points = top_values[order], top_points[order]

    def negative(point: np.ndarray) -> float:
        left, right = point
        mass = np.diff(antiderivative(np.array([left, right])))[0]
        value = float(log2_values(np.array(right - left), mass))
        # empty interval or zero mass
        return -value if value > -math.inf else GRID_PENALTY

    best_value, best_left, best_right = -math.inf, 0.0, 0.0
    for value, (row, col) in zip(top_values.tolist(), top_points.tolist()):
        if value == -math.inf:
            continue
        left, right = grid[row], grid[col]
        refined = optimize.minimize(
            negative,
            np.array([left, right]),
            method="Nelder-Mead",
            options=dict(
                xatol=tolerance,
                fatol=1e-15,
                maxiter=4_000,
                initial_simplex=np.array(
                    [[left, right], [left - step, right], [left, right + step]]
                ),
            ),
        )
        evaluated += int(refined.nfev)
        if -refined.fun > value:
            value = -float(refined.fun)
            left, right = (float(x) for x in refined.x)
        if value > best_value:
            best_value, best_left, best_right = value, float(left), float(right)

    logging.debug(
        "grid search: %s evaluations, interval [%s, %s]", evaluated, best_left, best_right
    )
    return IntervalNormResult(
        LogValue(best_value), origin + best_left, origin + best_right, evaluated
    )


@dataclass(frozen=True)
class EquivalenceCheck:
    name: str
    ratio: LogValue
    upper: float
    lower: float
    passed: bool

    def to_dict(self) -> tp.Dict[str, tp.Any]:
        return rounded(
            dict(
                name=self.name,
                ratio=self.ratio.linear_value,
                log2_ratio=self.ratio.log2_value,
                lower=self.lower,
                upper=self.upper,
                passed=self.passed,
            )
        )


@dataclass(frozen=True)
class EquivalenceReport:
    params: MorreyParams
    centered: NormResult
    starred: NormResult
    continuous: IntervalNormResult
    checks: tp.Tuple[EquivalenceCheck, ...]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_dict(self) -> tp.Dict[str, tp.Any]:
        return dict(
            params=self.params.to_dict(),
            centered=self.centered.to_dict(),
            starred=self.starred.to_dict(),
            continuous=self.continuous.to_dict(),
            checks=[check.to_dict() for check in self.checks],
            passed=self.passed,
        )


def _check(name: str, ratio: LogValue, base: float, params: MorreyParams, lower: bool = True):
    bound_log2 = params.gap * math.log2(base)
    passed = ratio.log2_value <= bound_log2 + EQUIVALENCE_SLACK
    if lower:
        passed = passed and ratio.log2_value >= -EQUIVALENCE_SLACK
    return EquivalenceCheck(
        name=name,
        ratio=ratio,
        upper=2.0**bound_log2,
        lower=1.0 if lower else 0.0,
        passed=passed,
    )


def equivalence_report(
    sequence: SparseSequence,
    params: MorreyParams,
    *,
    workers: int = 1,
) -> EquivalenceReport:
    """Check the four equivalence constants between the three norms."""
    if sequence.is_empty():
        raise ParameterError("equivalence report needs a nonempty sequence")
    centered = centered_norm(sequence, params, workers=workers)
    starred = starred_norm(sequence, params, workers=workers)
    continuous = continuous_norm(embed(sequence), params, workers=workers)
    over_centered = continuous.value.ratio(centered.value)
    checks = (
        _check("span/centered", starred.value.ratio(centered.value), 3 / 2, params),
        _check("continuous/span", continuous.value.ratio(starred.value), 2, params),
        _check("continuous/centered", over_centered, 5, params),
        _check("continuous/centered sharp", over_centered, 3, params, lower=False),
    )
    for check in checks:
        if not check.passed:
            logging.warning("%s ratio %s exceeds its bounds", check.name, check.ratio.linear_value)
    return EquivalenceReport(params, centered, starred, continuous, checks)
