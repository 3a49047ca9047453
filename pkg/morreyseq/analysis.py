"""Certificates, growth rates and the inclusion criterion for discrete Morrey spaces"""

__all__ = [
    "CertificatePoint",
    "Certificate",
    "InclusionVerdict",
    "CrossEvidence",
    "beta",
    "sigma",
    "divergence_certificate",
    "boundedness_certificate",
    "growth_exponent",
    "inclusion_oracle",
    "cross_evidence",
    "divergence_profile",
    "legacy_profile",
    "embedded_profile",
    "profile_frame",
    "PROFILE_COLUMNS",
]

import logging
import math
import typing as tp
from dataclasses import dataclass
from fractions import Fraction

import pandas as pd  # type: ignore
from scipy import stats  # type: ignore

from .norms import NormResult, ProfilePoint, prefix_profile, starred_norm
from .sequences import (
    LegacySeqSpec,
    NewSeqSpec,
    beta,
    cross_counterexample,
    generate_legacy_sequence,
    generate_new_sequence,
    legacy_block_windows,
)
from .stepfn import IntervalNormResult, continuous_norm, embed
from .tools import rounded
from .typing import LogValue, MorreyParams, ParameterError, SpanWindow, Window

BOUND_SLACK = 1e-10
PROFILE_COLUMNS = ["n", "cardinality", "mass", "value", "log2_value", "bound_log2"]

CertificateKind = tp.Literal["divergence", "boundedness"]


def sigma(n: int, v: int, w: int) -> int:
    """Mass bookkeeping ``1 + 2^{v-w} + ... + 2^{n(v-w)}``.

    The support of ``[0, beta_n]`` holds one point more, since both 0 and 1 are in it.
    """
    return sum(2 ** (i * (v - w)) for i in range(n + 1))


@dataclass(frozen=True)
class CertificatePoint:
    n: int
    window: Window
    computed_value: LogValue
    bound: LogValue
    satisfied: bool

    def to_dict(self) -> tp.Dict[str, tp.Any]:
        return rounded(
            dict(
                n=self.n,
                window=self.window.to_dict(),
                value=self.computed_value.linear_value,
                log2_value=self.computed_value.log2_value,
                bound=self.bound.linear_value,
                bound_log2=self.bound.log2_value,
                satisfied=self.satisfied,
            )
        )


@dataclass(frozen=True)
class Certificate:
    kind: CertificateKind
    spec: NewSeqSpec
    params: MorreyParams
    points: tp.Tuple[CertificatePoint, ...]
    norm: tp.Optional[NormResult] = None

    @property
    def overall(self) -> bool:
        return all(point.satisfied for point in self.points)

    def to_dict(self) -> tp.Dict[str, tp.Any]:
        return dict(
            kind=self.kind,
            spec=self.spec.metadata(),
            params=self.params.to_dict(),
            norm=None if self.norm is None else self.norm.to_dict(),
            points=[point.to_dict() for point in self.points],
            overall=self.overall,
        )


def _prefix_windows(spec: NewSeqSpec) -> tp.List[SpanWindow]:
    return [SpanWindow(0, beta(n, spec.v)) for n in range(1, spec.n_max + 1)]


def divergence_certificate(spec: NewSeqSpec, p2: float, q: float) -> Certificate:
    """Check ``value(S*_{0,beta_n}) > 3^{1/q-1/p2} 2^{n(v/q - w/p2)}`` for ``n = 1..n_max``."""
    params = MorreyParams(p2, q)
    if not params.p < params.q:
        raise ParameterError(f"divergence needs p2 < q, got p2={p2}, q={q}")
    if not params.ratio < spec.ratio:
        raise ParameterError(
            f"v/w = {spec.ratio} must exceed q/p2 = {params.ratio} (v/q - w/p2 > 0)"
        )
    rate = spec.v / params.q - spec.w / params.p
    sequence = generate_new_sequence(spec)
    profile = prefix_profile(sequence, params, _prefix_windows(spec))
    points = []
    for n, point in enumerate(profile, start=1):
        bound = LogValue(params.alpha * math.log2(3) + n * rate)
        # the bound is strict, no slack
        satisfied = point.value.log2_value > bound.log2_value
        points.append(CertificatePoint(n, point.window, point.value, bound, satisfied))
    certificate = Certificate("divergence", spec, params, tuple(points))
    logging.info("divergence certificate for %s: %s", spec, certificate.overall)
    return certificate


def boundedness_certificate(
    spec: NewSeqSpec,
    p1: float,
    q: float,
    *,
    workers: int = 1,
    progress: bool = False,
) -> Certificate:
    """Check the truncated starred norm against ``max(1 + 2^{v-w}, 2^{(1+v-w)/p1})``."""
    params = MorreyParams(p1, q)
    if not spec.ratio < params.ratio:
        raise ParameterError(f"v/w = {spec.ratio} must stay below q/p1 = {params.ratio}")
    bound_value = max(1 + 2 ** (spec.v - spec.w), 2 ** ((1 + spec.v - spec.w) / params.p))
    bound = LogValue.from_linear(bound_value)
    limit = math.log2(bound_value + BOUND_SLACK)

    sequence = generate_new_sequence(spec)
    norm = starred_norm(sequence, params, workers=workers, progress=progress)
    points = [
        CertificatePoint(
            spec.n_max, norm.argmax, norm.value, bound, norm.value.log2_value <= limit
        )
    ]
    for n, point in enumerate(prefix_profile(sequence, params, _prefix_windows(spec)), start=1):
        points.append(
            CertificatePoint(n, point.window, point.value, bound, point.value.log2_value <= limit)
        )
    certificate = Certificate("boundedness", spec, params, tuple(points), norm)
    logging.info("boundedness certificate for %s: %s", spec, certificate.overall)
    return certificate


def growth_exponent(points: tp.Sequence[tp.Tuple[int, LogValue]]) -> float:
    """Least-squares slope of ``log2(value)`` against ``n``."""
    if len({n for n, _ in points}) < 2:
        raise ParameterError("growth exponent needs at least two distinct n")
    if any(value.is_zero() for _, value in points):
        raise ParameterError("growth exponent is undefined for zero values")
    fit = stats.linregress([n for n, _ in points], [value.log2_value for _, value in points])
    return float(fit.slope)


@dataclass(frozen=True)
class InclusionVerdict:
    included: bool
    reason: str
    counterexample: tp.Optional[NewSeqSpec]

    def to_dict(self) -> tp.Dict[str, tp.Any]:
        return dict(
            included=self.included,
            reason=self.reason,
            counterexample=None if self.counterexample is None else self.counterexample.metadata(),
        )


def inclusion_oracle(p1: float, q1: float, p2: float, q2: float) -> InclusionVerdict:
    """Decide ``l^{p2}_{q2} subset l^{p1}_{q1}``: iff ``q2 <= q1`` and ``p1/q1 <= p2/q2``."""
    first, second = MorreyParams(p1, q1), MorreyParams(p2, q2)
    order_first = Fraction(first.p) / Fraction(first.q)
    order_second = Fraction(second.p) / Fraction(second.q)
    counterexample = cross_counterexample(p1, q1, p2, q2)

    reasons = []
    if second.q > first.q:
        reasons.append(f"q2 = {second.q:g} > q1 = {first.q:g}")
    if order_first > order_second:
        reasons.append(f"p1/q1 = {order_first} > p2/q2 = {order_second}")
    included = not reasons
    if included:
        reason = "q2 <= q1 and p1/q1 <= p2/q2"
        if order_first < order_second:
            reason += "; the inclusion is proper since p1/q1 < p2/q2"
    else:
        reason = "; ".join(reasons)
    return InclusionVerdict(included, reason, counterexample)


def divergence_profile(
    spec: NewSeqSpec,
    params: MorreyParams,
    n_values: tp.Optional[tp.Iterable[int]] = None,
) -> tp.List[tp.Tuple[int, ProfilePoint]]:
    """Values at ``S*_{0,beta_n}`` for the requested ``n`` (default ``1..n_max``)."""
    n_values = range(1, spec.n_max + 1) if n_values is None else list(n_values)
    for n in n_values:
        if not 0 <= n <= spec.n_max:
            raise ParameterError(f"n = {n} outside 0..{spec.n_max}")
    windows = [SpanWindow(0, beta(n, spec.v)) for n in n_values]
    sequence = generate_new_sequence(spec)
    return list(zip(n_values, prefix_profile(sequence, params, windows)))


def legacy_profile(
    spec: LegacySeqSpec, params: MorreyParams
) -> tp.List[tp.Tuple[int, ProfilePoint]]:
    """Values of the generated sequence on the covering windows of its outer blocks.

    Blocks that start inside the dense core ``[-2^{w+v}, 2^{w+v}]`` are merged
    into it and skipped, so ``k`` starts at the first block clear of the core.
    """
    core = 2 ** (spec.w + spec.v)
    outer = [
        (k, window)
        for k, window in zip(range(spec.k0, spec.k_max + 1), legacy_block_windows(spec))
        if window.start > core
    ]
    if not outer:
        logging.warning("every outer block of %s lies inside the core", spec)
        return []
    sequence = generate_legacy_sequence(spec)
    points = prefix_profile(sequence, params, [window for _, window in outer])
    return [(k, point) for (k, _), point in zip(outer, points)]


def profile_frame(
    spec: NewSeqSpec,
    params: MorreyParams,
    n_values: tp.Optional[tp.Iterable[int]] = None,
) -> pd.DataFrame:
    """Plot-ready table: n, cardinality, mass, value, log2_value, bound_log2."""
    rate = spec.v / params.q - spec.w / params.p
    rows = []
    for n, point in divergence_profile(spec, params, n_values):
        rows.append(
            dict(
                n=n,
                cardinality=point.cardinality,
                mass=point.mass,
                value=point.value.linear_value,
                log2_value=point.value.log2_value,
                bound_log2=params.alpha * math.log2(3) + n * rate,
            )
        )
    return pd.DataFrame(rows, columns=PROFILE_COLUMNS)


@dataclass(frozen=True)
class CrossEvidence:
    """Truncated evidence that the counterexample is in ``l^{p2}_{q2}``, not ``l^{p1}_{q1}``."""

    spec: NewSeqSpec
    member: MorreyParams
    outsider: MorreyParams
    member_profile: tp.Tuple[tp.Tuple[int, LogValue], ...]
    outsider_profile: tp.Tuple[tp.Tuple[int, LogValue], ...]

    @property
    def member_growth(self) -> float:
        return growth_exponent(self.member_profile)

    @property
    def outsider_growth(self) -> float:
        return growth_exponent(self.outsider_profile)

    @property
    def member_ratio(self) -> float:
        """Last over first member value."""
        return 2.0 ** (self.member_profile[-1][1].log2_value - self.member_profile[0][1].log2_value)

    @property
    def outsider_ratio(self) -> float:
        return 2.0 ** (
            self.outsider_profile[-1][1].log2_value - self.outsider_profile[0][1].log2_value
        )

    def to_dict(self) -> tp.Dict[str, tp.Any]:
        return rounded(
            dict(
                spec=self.spec.metadata(),
                member=self.member.to_dict(),
                outsider=self.outsider.to_dict(),
                member_profile=[[n, v.log2_value] for n, v in self.member_profile],
                outsider_profile=[[n, v.log2_value] for n, v in self.outsider_profile],
                member_ratio=self.member_ratio,
                outsider_ratio=self.outsider_ratio,
                member_growth=self.member_growth,
                outsider_growth=self.outsider_growth,
            )
        )


def cross_evidence(
    p1: float,
    q1: float,
    p2: float,
    q2: float,
    n_values: tp.Iterable[int] = range(1, 5),
) -> tp.Optional[CrossEvidence]:
    """Prefix profiles of the cross-parameter counterexample, or None when none exists."""
    spec = cross_counterexample(p1, q1, p2, q2)
    if spec is None:
        return None
    n_values = list(n_values)
    if max(n_values) > spec.n_max:
        spec = NewSeqSpec(spec.v, spec.w, max(n_values))
    member, outsider = MorreyParams(p2, q2), MorreyParams(p1, q1)
    member_profile = tuple(
        (n, point.value) for n, point in divergence_profile(spec, member, n_values)
    )
    outsider_profile = tuple(
        (n, point.value) for n, point in divergence_profile(spec, outsider, n_values)
    )
    return CrossEvidence(spec, member, outsider, member_profile, outsider_profile)


def embedded_profile(
    spec: NewSeqSpec,
    params: MorreyParams,
    n_values: tp.Optional[tp.Iterable[int]] = None,
    *,
    workers: int = 1,
) -> tp.List[tp.Tuple[int, IntervalNormResult]]:
    """Continuous norms of the step functions of the truncations ``n = 1..n_max``.

    Growth at ``(p2, q)`` and a flat profile at ``(p1, q)`` carry the proper
    inclusion over to the continuous spaces of a single ``q``.
    """
    n_values = range(1, spec.n_max + 1) if n_values is None else list(n_values)
    profile = []
    for n in n_values:
        if not 1 <= n <= spec.n_max:
            raise ParameterError(f"n = {n} outside 1..{spec.n_max}")
        function = embed(generate_new_sequence(NewSeqSpec(spec.v, spec.w, n)))
        profile.append((n, continuous_norm(function, params, workers=workers)))
    logging.info("embedded profile for %s at %s: %s points", spec, params, len(profile))
    return profile
