"""File formats and the fit report.

Three on-disk artifacts, all plain text and byte-deterministic for a fixed
(input, config, seed):

* returns file: one float per line, optional leading '#' header lines;
* chain file: CSV with header ``step,alpha,beta,omega,accepted``;
* fit report: a JSON document that round-trips losslessly through
  ``parse_report(serialize_report(r)) == r``.

Floats are written with ``repr``, the shortest form that parses back to the
identical double.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .diagnostics import ChainSummary, ParamSummary
from .errors import DataError, ParseError
from .model import PARAM_NAMES, validate_returns
from .samplers import Chain


def write_returns(path, values, header: str | None = None) -> None:
    lines = []
    if header is not None:
        lines.append(f"# {header}")
    lines.extend(repr(float(v)) for v in values)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_returns(path) -> np.ndarray:
    """Read and validate a returns file; parse failures name the line."""
    values = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                values.append(float(line))
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: not a number: {line!r}") from exc
    return validate_returns(values)


CHAIN_HEADER = "step,alpha,beta,omega,accepted"


def write_chain_csv(path, chain: Chain) -> None:
    if chain.dim != len(PARAM_NAMES):
        raise DataError(f"chain files hold 3-parameter chains, got dim {chain.dim}")
    rows = [CHAIN_HEADER]
    draws, flags = chain.draws, chain.accept_flags
    for i in range(len(chain)):
        a, b, o = (float(v) for v in draws[i])
        rows.append(f"{i},{a!r},{b!r},{o!r},{int(flags[i])}")
    with open(path, "w") as fh:
        fh.write("\n".join(rows) + "\n")


def read_chain_csv(path) -> Chain:
    """Read a chain file back; schedule bookkeeping is not round-tripped."""
    draws = []
    flags = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != CHAIN_HEADER:
            raise ParseError(f"{path}:1: expected header {CHAIN_HEADER!r}, got {header!r}")
        for lineno, raw in enumerate(fh, start=2):
            line = raw.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 5:
                raise ParseError(f"{path}:{lineno}: expected 5 fields, got {len(parts)}")
            try:
                draws.append((float(parts[1]), float(parts[2]), float(parts[3])))
                flags.append(bool(int(parts[4])))
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: malformed row: {line!r}") from exc
    if not draws:
        raise DataError(f"{path}: no draws")
    return Chain(draws=np.asarray(draws), accept_flags=np.asarray(flags, dtype=bool))


@dataclass
class FitReport:
    """Everything a fit produces besides the raw chain.

    ``schedule`` echoes the fully resolved run configuration; ``v_matrix`` is
    the converged second-moment matrix in (alpha, beta, omega) order.
    ``duration_seconds`` is None in files written by the CLI so that reruns
    are byte-identical; the measured value goes to stdout.
    """

    method: str
    seed: int
    schedule: dict
    summary: dict[str, dict]
    v_matrix: list[list[float]]
    acceptance_trace: list[float]
    acceptance_rate: float
    duration_seconds: float | None = None

    def param_summary(self, name: str) -> ParamSummary:
        return ParamSummary(**self.summary[name])


def summary_to_dict(summary: ChainSummary) -> dict[str, dict]:
    return {name: asdict(ps) for name, ps in summary.items()}


def serialize_report(report: FitReport) -> str:
    return json.dumps(asdict(report), indent=2) + "\n"


def parse_report(text: str) -> FitReport:
    data = json.loads(text)
    return FitReport(**data)


def write_report(path, report: FitReport) -> None:
    with open(path, "w") as fh:
        fh.write(serialize_report(report))


def read_report(path) -> FitReport:
    with open(path) as fh:
        return parse_report(fh.read())
