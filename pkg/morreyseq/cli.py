"""
Command-line interface for morreyseq.

Usage:
    morreyseq gen --family new --v 3 --w 1 --nmax 2      # counterexample sequence JSON
    morreyseq norm --p 1 --q 2 --kind span -i seq.json   # discrete Morrey norm
    morreyseq profile --v 3 --w 1 --nmax 6 --p 2 --q 4   # CSV prefix profile
    morreyseq certify --v 3 --w 1 --nmax 6 --p1 1 --p2 2 --q 4
    morreyseq equiv --p 1 --q 2 -i seq.json              # equivalence constants
    morreyseq include --p1 2 --q1 2 --p2 1 --q2 2        # inclusion criterion
    morreyseq embed-norm --p 1 --q 2 -i seq.json         # continuous norm of the step function
"""

__all__ = [
    "RunConfig",
    "run",
    "cli",
]

import json
import logging
import math
import sys
import typing as tp
from dataclasses import dataclass
from functools import wraps
from pathlib import Path

import click
import deli  # type: ignore
import pandas as pd  # type: ignore

from .__version__ import __version__
from .analysis import (
    PROFILE_COLUMNS,
    boundedness_certificate,
    cross_evidence,
    divergence_certificate,
    inclusion_oracle,
    legacy_profile,
    profile_frame,
)
from .norms import brute_force_norm, centered_norm, starred_norm
from .rational import as_fraction, choose_vw
from .sequences import (
    LegacySeqSpec,
    NewSeqSpec,
    choose_vw_legacy,
    default_block_count,
    default_legacy_depth,
    generate_legacy_sequence,
    generate_new_sequence,
)
from .stepfn import continuous_norm, embed, equivalence_report, grid_search_norm
from .tools import (
    SIGNIFICANT_DIGITS,
    load_sequence,
    rounded,
    save_sequence,
    sequence_summary,
    sequence_to_dict,
)
from .typing import MorreyParams, ParameterError

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

COMMANDS = ("gen", "norm", "profile", "certify", "equiv", "include", "embed-norm", "choose")


@dataclass(frozen=True)
class RunConfig:
    command: str
    p: tp.Optional[float] = None
    q: tp.Optional[float] = None
    p1: tp.Optional[float] = None
    q1: tp.Optional[float] = None
    p2: tp.Optional[float] = None
    q2: tp.Optional[float] = None
    family: str = "new"
    v: tp.Optional[int] = None
    w: tp.Optional[int] = None
    n_max: tp.Optional[int] = None
    k_max: tp.Optional[int] = None
    kind: str = "span"
    certificate: str = "both"
    engine: str = "exact"
    margin: int = 5
    step: float = 1e-2
    n_values: tp.Tuple[int, ...] = ()
    lo: tp.Optional[str] = None
    hi: tp.Optional[str] = None
    legacy: bool = False
    evidence: bool = False
    summary: bool = False
    input_path: str = "-"
    output_path: tp.Optional[str] = None
    workers: int = 1
    progress: bool = False

    def _require(self, *names: str):
        missing = [name for name in names if getattr(self, name) is None]
        if missing:
            raise ParameterError(f"{self.command}: missing --{', --'.join(missing)}")

    def params(self) -> MorreyParams:
        self._require("p", "q")
        return MorreyParams(self.p, self.q)

    def validate(self) -> "RunConfig":
        """Check every precondition before anything is computed."""
        if self.command not in COMMANDS:
            raise ParameterError(f"unknown command {self.command!r}")
        if self.workers < 1:
            raise ParameterError(f"--workers must be positive, got {self.workers}")
        if self.margin < 0:
            raise ParameterError(f"--margin must be nonnegative, got {self.margin}")
        if not 0 < self.step <= 1:
            raise ParameterError(f"--step must be in (0, 1], got {self.step}")
        if self.engine not in ("exact", "brute"):
            raise ParameterError(f"unknown engine {self.engine!r}")
        if self.command in ("norm", "equiv", "embed-norm"):
            self.params()
        if self.command == "profile":
            self.params()
            self.family_spec()
        if self.command == "gen":
            self.family_spec()
        if self.command == "certify":
            self._require("q")
            if self.certificate in ("divergence", "both"):
                self._require("p2")
            if self.certificate in ("boundedness", "both"):
                self._require("p1")
            self.new_spec()
        if self.command == "include":
            self._require("p1", "q1", "p2", "q2")
            MorreyParams(self.p1, self.q1)
            MorreyParams(self.p2, self.q2)
        if self.command == "choose":
            if self.lo is None and self.hi is None:
                self._require("p1", "p2", "q")
            else:
                self._require("lo", "hi")
        return self

    def _vw(self, legacy: bool) -> tp.Tuple[int, int]:
        if self.v is not None and self.w is not None:
            return self.v, self.w
        self._require("p1", "p2", "q")
        if legacy:
            return choose_vw_legacy(self.p1, self.p2, self.q)
        q = as_fraction(self.q)
        return choose_vw(q / as_fraction(self.p2), q / as_fraction(self.p1))

    def new_spec(self) -> NewSeqSpec:
        v, w = self._vw(legacy=False)
        n_max = default_block_count(v, w) if self.n_max is None else self.n_max
        return NewSeqSpec(v, w, n_max)

    def legacy_spec(self) -> LegacySeqSpec:
        v, w = self._vw(legacy=True)
        k_max = default_legacy_depth(v, w) if self.k_max is None else self.k_max
        return LegacySeqSpec(v, w, k_max)

    def family_spec(self) -> tp.Union[NewSeqSpec, LegacySeqSpec]:
        if self.family == "new":
            return self.new_spec()
        if self.family == "legacy":
            return self.legacy_spec()
        raise ParameterError(f"unknown family {self.family!r}")


def _emit_text(text: str, output_path: tp.Optional[str]):
    if output_path is None or output_path == "-":
        click.echo(text, nl=False)
    else:
        Path(output_path).write_text(text, encoding="utf-8")


def _emit_json(data: tp.Any, output_path: tp.Optional[str]):
    data = rounded(data)
    if output_path is None or output_path == "-":
        click.echo(json.dumps(data, indent=2))
    else:
        deli.save(data, Path(output_path))


def _csv(frame) -> str:
    return frame.to_csv(index=False, float_format=f"%.{SIGNIFICANT_DIGITS}g")


def _gen(config: RunConfig) -> int:
    spec = config.family_spec()
    if isinstance(spec, NewSeqSpec):
        sequence = generate_new_sequence(spec)
    else:
        sequence = generate_legacy_sequence(spec)
    if config.summary:
        click.echo(json.dumps(rounded(sequence_summary(sequence))), err=True)
    if config.output_path is None or config.output_path == "-":
        click.echo(json.dumps(sequence_to_dict(sequence, spec.metadata())))
    else:
        save_sequence(sequence, config.output_path, spec.metadata())
    return EXIT_OK


def _norm(config: RunConfig) -> int:
    params = config.params()
    sequence = load_sequence(config.input_path)
    if config.engine == "brute":
        result = brute_force_norm(sequence, params, config.kind, config.margin)
    elif config.kind == "span":
        result = starred_norm(sequence, params, workers=config.workers, progress=config.progress)
    elif config.kind == "centered":
        result = centered_norm(sequence, params, workers=config.workers, progress=config.progress)
    else:
        raise ParameterError(f"unknown window kind {config.kind!r}")
    _emit_json(result.to_dict(), config.output_path)
    return EXIT_OK


def _profile(config: RunConfig) -> int:
    params = config.params()
    spec = config.family_spec()
    n_values = config.n_values or None
    if isinstance(spec, NewSeqSpec):
        frame = profile_frame(spec, params, n_values)
    else:
        rows = [
            dict(
                n=k,
                cardinality=point.cardinality,
                mass=point.mass,
                value=point.value.linear_value,
                log2_value=point.value.log2_value,
                bound_log2=math.nan,
            )
            for k, point in legacy_profile(spec, params)
        ]
        frame = pd.DataFrame(rows, columns=PROFILE_COLUMNS)
    _emit_text(_csv(frame), config.output_path)
    return EXIT_OK


def _certify(config: RunConfig) -> int:
    spec = config.new_spec()
    certificates = []
    if config.certificate in ("divergence", "both"):
        certificates.append(divergence_certificate(spec, config.p2, config.q))
    if config.certificate in ("boundedness", "both"):
        certificates.append(
            boundedness_certificate(
                spec, config.p1, config.q, workers=config.workers, progress=config.progress
            )
        )
    overall = all(certificate.overall for certificate in certificates)
    _emit_json(
        dict(certificates=[c.to_dict() for c in certificates], overall=overall),
        config.output_path,
    )
    return EXIT_OK if overall else EXIT_FAIL


def _equiv(config: RunConfig) -> int:
    sequence = load_sequence(config.input_path)
    report = equivalence_report(sequence, config.params(), workers=config.workers)
    _emit_json(report.to_dict(), config.output_path)
    for check in report.checks:
        verdict = "PASS" if check.passed else "FAIL"
        ratio = check.ratio.linear_value
        click.echo(f"{verdict} {check.name}: {ratio:.12g} <= {check.upper:.12g}", err=True)
    return EXIT_OK if report.passed else EXIT_FAIL


def _include(config: RunConfig) -> int:
    verdict = inclusion_oracle(config.p1, config.q1, config.p2, config.q2)
    data = verdict.to_dict()
    if config.evidence and verdict.counterexample is not None:
        evidence = cross_evidence(config.p1, config.q1, config.p2, config.q2)
        data["evidence"] = None if evidence is None else evidence.to_dict()
    _emit_json(data, config.output_path)
    return EXIT_OK


def _embed_norm(config: RunConfig) -> int:
    params = config.params()
    function = embed(load_sequence(config.input_path))
    if config.engine == "brute":
        result = grid_search_norm(function, params, step=config.step)
    else:
        result = continuous_norm(function, params, workers=config.workers, progress=config.progress)
    _emit_json(result.to_dict(), config.output_path)
    return EXIT_OK


def _choose(config: RunConfig) -> int:
    if config.lo is not None:
        v, w = choose_vw(as_fraction(config.lo), as_fraction(config.hi))
    elif config.legacy:
        v, w = choose_vw_legacy(config.p1, config.p2, config.q)
    else:
        v, w = config._vw(legacy=False)
    _emit_json(dict(v=v, w=w), config.output_path)
    return EXIT_OK


_HANDLERS: tp.Dict[str, tp.Callable[[RunConfig], int]] = {
    "gen": _gen,
    "norm": _norm,
    "profile": _profile,
    "certify": _certify,
    "equiv": _equiv,
    "include": _include,
    "embed-norm": _embed_norm,
    "choose": _choose,
}


def run(config: RunConfig) -> int:
    """Dispatch ``config`` and return the exit status (0 ok/PASS, 1 FAIL, 2 usage)."""
    try:
        config.validate()
        return _HANDLERS[config.command](config)
    except (ValueError, FileNotFoundError) as exc:
        logging.debug("command %s failed", config.command, exc_info=True)
        click.echo(f"Error: {exc}", err=True)
        return EXIT_USAGE


def _exit_with_status(func: tp.Callable[..., RunConfig]):
    """Turn a command body that builds a ``RunConfig`` into one that runs it."""

    @wraps(func)
    def wrapper(**kwargs: tp.Any):
        sys.exit(run(func(**kwargs)))

    return wrapper


_exponent = dict(type=float, default=None)
_input = click.option(
    "--input", "-i", "input_path", default="-", show_default=True, help="Sequence JSON, - for stdin"
)
_output = click.option(
    "--output", "-o", "output_path", default=None, help="Write the artifact to this file"
)
_workers = click.option("--workers", default=1, show_default=True, help="Parallel row workers")
_progress = click.option("--progress", is_flag=True, help="Show a progress bar on stderr")


@click.group()
@click.version_option(version=__version__, prog_name="morreyseq")
@click.option("--verbose", "-v", count=True, help="Log INFO (-v) or DEBUG (-vv) to stderr")
def cli(verbose: int):
    """
    Discrete Morrey norms, counterexample sequences and inclusion checks.

    Examples:

        morreyseq gen --family new --v 3 --w 1 --nmax 2

        morreyseq include --p1 2 --q1 2 --p2 1 --q2 2
    """
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbose, logging.DEBUG)
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )


@cli.command()
@click.option("--family", type=click.Choice(["new", "legacy"]), default="new", show_default=True)
@click.option("--v", type=int, default=None)
@click.option("--w", type=int, default=None)
@click.option("--nmax", "n_max", type=int, default=None, help="Blocks of the new family")
@click.option("--kmax", "k_max", type=int, default=None, help="Outer blocks of the legacy family")
@click.option("--p1", **_exponent)
@click.option("--p2", **_exponent)
@click.option("--q", **_exponent)
@click.option("--summary", is_flag=True, help="Print support statistics to stderr")
@_output
@_exit_with_status
def gen(**options) -> RunConfig:
    """
    Generate a counterexample sequence.

    Without --v/--w the pair is chosen from --p1 --p2 --q.

    Examples:

        morreyseq gen --family new --v 3 --w 1 --nmax 2

        morreyseq gen --family legacy --p1 1 --p2 2 --q 4 --kmax 2
    """
    return RunConfig("gen", **options)


@cli.command()
@click.option("--p", **_exponent)
@click.option("--q", **_exponent)
@click.option("--kind", type=click.Choice(["span", "centered"]), default="span", show_default=True)
@click.option("--engine", type=click.Choice(["exact", "brute"]), default="exact", show_default=True)
@click.option("--margin", type=int, default=5, show_default=True, help="Brute-force box margin")
@_input
@_output
@_workers
@_progress
@_exit_with_status
def norm(**options) -> RunConfig:
    """
    Discrete Morrey norm of a sequence over span or centered windows.

    Examples:

        morreyseq norm --p 1 --q 2 --kind span -i seq.json

        morreyseq gen --v 3 --w 1 --nmax 2 | morreyseq norm --p 1 --q 4
    """
    return RunConfig("norm", **options)


@cli.command()
@click.option("--family", type=click.Choice(["new", "legacy"]), default="new", show_default=True)
@click.option("--v", type=int, default=None)
@click.option("--w", type=int, default=None)
@click.option("--nmax", "n_max", type=int, default=None)
@click.option("--kmax", "k_max", type=int, default=None)
@click.option("--p", **_exponent)
@click.option("--q", **_exponent)
@click.option("--p1", **_exponent)
@click.option("--p2", **_exponent)
@click.option("--n", "n_values", type=int, multiple=True, help="Block index to profile, repeatable")
@_output
@_exit_with_status
def profile(**options) -> RunConfig:
    """
    CSV profile of prefix windows S*_{0,beta_n} (or legacy outer blocks).

    Examples:

        morreyseq profile --v 3 --w 1 --nmax 6 --p 2 --q 4
    """
    return RunConfig("profile", **options)


@cli.command()
@click.option("--v", type=int, default=None)
@click.option("--w", type=int, default=None)
@click.option("--nmax", "n_max", type=int, default=None)
@click.option("--p1", **_exponent)
@click.option("--p2", **_exponent)
@click.option("--q", **_exponent)
@click.option(
    "--kind",
    "certificate",
    type=click.Choice(["divergence", "boundedness", "both"]),
    default="both",
    show_default=True,
)
@_output
@_workers
@_progress
@_exit_with_status
def certify(**options) -> RunConfig:
    """
    Divergence (at p2) and boundedness (at p1) certificates; exit 1 on FAIL.

    Examples:

        morreyseq certify --v 3 --w 1 --nmax 6 --p1 1 --p2 2 --q 4
    """
    return RunConfig("certify", **options)


@cli.command()
@click.option("--p", **_exponent)
@click.option("--q", **_exponent)
@_input
@_output
@_workers
@_exit_with_status
def equiv(**options) -> RunConfig:
    """
    Check the equivalence constants between centered, span and continuous norms.

    Examples:

        morreyseq equiv --p 1 --q 2 -i seq.json
    """
    return RunConfig("equiv", **options)


@cli.command()
@click.option("--p1", **_exponent)
@click.option("--q1", **_exponent)
@click.option("--p2", **_exponent)
@click.option("--q2", **_exponent)
@click.option("--evidence", is_flag=True, help="Attach truncated profiles of the counterexample")
@_output
@_exit_with_status
def include(**options) -> RunConfig:
    """
    Decide whether l^{p2}_{q2} is contained in l^{p1}_{q1}.

    Examples:

        morreyseq include --p1 2 --q1 2 --p2 1 --q2 2
    """
    return RunConfig("include", **options)


@cli.command("embed-norm")
@click.option("--p", **_exponent)
@click.option("--q", **_exponent)
@click.option("--engine", type=click.Choice(["exact", "brute"]), default="exact", show_default=True)
@click.option("--step", type=float, default=1e-2, show_default=True, help="Brute grid step")
@_input
@_output
@_workers
@_progress
@_exit_with_status
def embed_norm(**options) -> RunConfig:
    """
    Continuous Morrey norm of the step function induced by a sequence.

    Examples:

        morreyseq embed-norm --p 1 --q 2 -i seq.json
    """
    return RunConfig("embed-norm", **options)


@cli.command()
@click.option("--lo", default=None, help="Open interval lower end (e.g. 4/3)")
@click.option("--hi", default=None, help="Open interval upper end")
@click.option("--p1", **_exponent)
@click.option("--p2", **_exponent)
@click.option("--q", **_exponent)
@click.option("--legacy", is_flag=True, help="Use the legacy parameter condition")
@_output
@_exit_with_status
def choose(**options) -> RunConfig:
    """
    Pick integers v, w for a counterexample.

    Examples:

        morreyseq choose --lo 4/3 --hi 3/2

        morreyseq choose --p1 1 --p2 2 --q 4 --legacy
    """
    return RunConfig("choose", **options)


if __name__ == "__main__":
    cli()
