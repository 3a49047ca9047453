""" """

__all__ = [
    "PrefixMasses",
    "Best",
    "check_support",
    "reduce_rows",
    "prefix_masses",
    "mass_in_window",
    "index_offsets",
    "log2_power_value",
    "sequence_summary",
    "round_significant",
    "rounded",
    "sequence_to_dict",
    "sequence_from_dict",
    "save_json_gz",
    "load_json_gz",
    "save_sequence",
    "load_sequence",
]

import gzip
import json
import logging
import math
import sys
import typing as tp
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import deli  # type: ignore
import numpy as np
from tqdm import tqdm  # type: ignore

from .typing import (
    MAX_EXACT_SUPPORT,
    LikePath,
    ParameterError,
    SequenceFormatError,
    SparseSequence,
    SupportTooLargeError,
    Window,
)

SIGNIFICANT_DIGITS = 12

# offsets from the smallest index stay in int64 below this span
_INT64_SPAN = 2**60


def index_offsets(indices: tp.Sequence[int]) -> tp.Tuple[int, np.ndarray]:
    """Offsets of ``indices`` from their minimum.

    ``int64`` when the span allows it, otherwise an object array of python ints,
    so differences between offsets are always exact.
    """
    if not indices:
        return 0, np.zeros(0, dtype=np.int64)
    origin = indices[0]
    if indices[-1] - origin < _INT64_SPAN:
        return origin, np.fromiter((i - origin for i in indices), np.int64, len(indices))
    return origin, np.array([i - origin for i in indices], dtype=object)


def _compensated_cumsum(terms: np.ndarray) -> tp.Tuple[np.ndarray, np.ndarray]:
    """Neumaier running sums: ``head[k] + tail[k]`` is the sum of the first ``k`` terms."""
    head = np.zeros(len(terms) + 1)
    tail = np.zeros(len(terms) + 1)
    total, compensation = 0.0, 0.0
    for position, term in enumerate(terms.tolist(), start=1):
        updated = total + term
        if abs(total) >= abs(term):
            compensation += (total - updated) + term
        else:
            compensation += (term - updated) + total
        total = updated
        head[position] = total
        tail[position] = compensation
    return head, tail


@dataclass(frozen=True)
class PrefixMasses:
    """Compensated prefix sums of ``|x_j|^p`` over the sorted support."""

    sequence: SparseSequence
    p: float
    origin: int
    offsets: np.ndarray
    powers: np.ndarray
    head: np.ndarray
    tail: np.ndarray

    @classmethod
    def build(cls, sequence: SparseSequence, p: float) -> "PrefixMasses":
        if p < 1:
            raise ParameterError(f"expected p >= 1, got {p}")
        origin, offsets = index_offsets(sequence.indices)
        powers = np.abs(np.asarray(sequence.values, dtype=float)) ** p
        head, tail = _compensated_cumsum(powers)
        return cls(sequence, float(p), origin, offsets, powers, head, tail)

    @property
    def size(self) -> int:
        return len(self.powers)

    @property
    def total(self) -> float:
        return float(self.head[-1] + self.tail[-1])

    def between(self, start, stop):
        """Mass of the entries at positions ``[start, stop)``; accepts arrays."""
        return (self.head[stop] - self.head[start]) + (self.tail[stop] - self.tail[start])

    def in_range(self, first: int, last: int) -> float:
        """Mass of the entries with index in ``[first, last]``."""
        if last < first:
            return 0.0
        start, stop = self.sequence.locate(first, last)
        if start >= stop:
            return 0.0
        return float(self.between(start, stop))

    def in_window(self, window: Window) -> float:
        return self.in_range(window.first, window.last)


class Best:
    """Running maximum with a lexicographic tie-break on the candidate key."""

    def __init__(self):
        self.log2_value = -math.inf
        self.key: tp.Optional[tp.Tuple] = None
        self.candidates = 0

    def offer(self, log2_value: float, key: tp.Tuple):
        if log2_value > self.log2_value or (
            log2_value == self.log2_value and log2_value > -math.inf and key < self.key
        ):
            self.log2_value = log2_value
            self.key = key

    def merge(self, other: "Best"):
        self.candidates += other.candidates
        if other.key is not None:
            self.offer(other.log2_value, other.key)


def check_support(sequence: SparseSequence):
    if sequence.size > MAX_EXACT_SUPPORT:
        logging.warning("support of %s points exceeds the exact engine guard", sequence.size)
        raise SupportTooLargeError(
            f"support size {sequence.size} exceeds {MAX_EXACT_SUPPORT}; exact search refused"
        )


def reduce_rows(
    row_fn: tp.Callable[[PrefixMasses, tp.Any, range], Best],
    prefix: PrefixMasses,
    params: tp.Any,
    *,
    workers: int = 1,
    progress: bool = False,
) -> Best:
    """Run ``row_fn`` over every support row and reduce to the best candidate.

    Rows are dealt to ``workers`` threads in interleaved order; the merge uses
    the same tie-break, so the result does not depend on ``workers``.
    """
    if workers < 1:
        raise ParameterError(f"workers must be positive, got {workers}")
    size = prefix.size
    best = Best()
    if workers == 1:
        rows = tqdm(range(size), desc="rows", disable=not progress, leave=False)
        for i in rows:
            best.merge(row_fn(prefix, params, range(i, i + 1)))
        return best
    chunks = [range(start, size, workers) for start in range(workers)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for partial in pool.map(lambda rows: row_fn(prefix, params, rows), chunks):
            best.merge(partial)
    return best


def prefix_masses(sequence: SparseSequence, p: float) -> tp.List[float]:
    prefix = PrefixMasses.build(sequence, p)
    return (prefix.head[1:] + prefix.tail[1:]).tolist()


def mass_in_window(sequence: SparseSequence, window: Window, p: float) -> float:
    return PrefixMasses.build(sequence, p).in_window(window)


def log2_power_value(cardinality, mass, alpha: float, p: float):
    """``log2(cardinality**alpha * mass**(1/p))``; zero mass maps to ``-inf``."""
    if np.isscalar(mass):
        if mass <= 0:
            return -math.inf
        return alpha * math.log2(cardinality) + math.log2(mass) / p
    with np.errstate(divide="ignore", invalid="ignore"):
        result = alpha * np.log2(cardinality) + np.log2(mass) / p
    return np.where(mass > 0, result, -np.inf)


def sequence_summary(sequence: SparseSequence, p: float = 1.0) -> tp.Dict[str, tp.Any]:
    if sequence.is_empty():
        return dict(support=0, first=None, last=None, sup=0.0, mass=0.0, p=p)
    return dict(
        support=sequence.size,
        first=str(sequence.min_index),
        last=str(sequence.max_index),
        sup=max(map(abs, sequence.values)),
        mass=PrefixMasses.build(sequence, p).total,
        p=p,
    )


def round_significant(value: float, digits: int = SIGNIFICANT_DIGITS) -> tp.Union[float, str]:
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return float(f"{value:.{digits}g}")


def rounded(data: tp.Any, digits: int = SIGNIFICANT_DIGITS) -> tp.Any:
    """Recursively round floats for deterministic, plot-ready artifacts."""
    if isinstance(data, bool) or data is None:
        return data
    if isinstance(data, (float, np.floating)):
        return round_significant(float(data), digits)
    if isinstance(data, (np.integer,)):
        return int(data)
    if isinstance(data, dict):
        return {key: rounded(value, digits) for key, value in data.items()}
    if isinstance(data, (list, tuple)):
        return [rounded(value, digits) for value in data]
    return data


def sequence_to_dict(
    sequence: SparseSequence, metadata: tp.Optional[tp.Dict[str, tp.Any]] = None
) -> tp.Dict[str, tp.Any]:
    state: tp.Dict[str, tp.Any] = dict(
        entries=[[str(index), value] for index, value in sequence.entries]
    )
    if metadata is not None:
        state["metadata"] = metadata
    return state


def sequence_from_dict(data: tp.Any) -> SparseSequence:
    if not isinstance(data, dict) or "entries" not in data:
        raise SequenceFormatError('expected a JSON object with an "entries" list')
    entries = data["entries"]
    if not isinstance(entries, list):
        raise SequenceFormatError('"entries" must be a list')
    pairs = []
    for position, entry in enumerate(entries):
        if not isinstance(entry, (list, tuple)) or len(entry) != 2:
            raise SequenceFormatError(f"entry {position}: expected [index, value], got {entry!r}")
        index, value = entry
        if isinstance(index, bool) or not isinstance(index, (str, int)):
            raise SequenceFormatError(f"entry {position}: index must be a decimal string")
        try:
            index = int(index)
        except ValueError as exc:
            raise SequenceFormatError(f"entry {position}: bad index {entry[0]!r}") from exc
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SequenceFormatError(f"entry {position}: value must be a number, got {value!r}")
        try:
            value = float(value)
        except OverflowError as exc:
            raise SequenceFormatError(f"entry {position}: value overflows a float") from exc
        if not math.isfinite(value):
            raise SequenceFormatError(f"entry {position}: value must be finite")
        pairs.append((index, value))
    try:
        return SparseSequence.from_pairs(pairs)
    except ParameterError as exc:
        raise SequenceFormatError(str(exc)) from exc


def save_json_gz(data: tp.Dict, path: LikePath, *, compression: int = 1):
    dumps = json.dumps(data).encode()
    gzdumps = gzip.compress(dumps, compresslevel=compression, mtime=0)
    with open(path, "wb") as file:
        file.write(gzdumps)


def load_json_gz(path: LikePath) -> tp.Dict:
    with open(path, "rb") as f:
        gzdumps = f.read()

    dumps = gzip.decompress(gzdumps)
    return json.loads(dumps.decode())


def save_sequence(
    sequence: SparseSequence,
    path: LikePath,
    metadata: tp.Optional[tp.Dict[str, tp.Any]] = None,
):
    data = sequence_to_dict(sequence, metadata)
    if str(path) == "-":
        sys.stdout.write(json.dumps(data) + "\n")
    elif str(path).endswith(".json.gz"):
        save_json_gz(data, path, compression=3)
    else:
        deli.save(data, Path(path))


def load_sequence(path: LikePath) -> SparseSequence:
    try:
        if str(path) == "-":
            data = json.loads(sys.stdin.read())
        elif str(path).endswith(".json.gz"):
            data = load_json_gz(path)
        else:
            data = deli.load(Path(path))
    except json.JSONDecodeError as exc:
        raise SequenceFormatError(f"{path}: malformed JSON ({exc})") from exc
    return sequence_from_dict(data)
