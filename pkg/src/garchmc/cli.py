"""Command-line front end: synthetic data generation, posterior fits,
chain diagnostics, and the degrees-of-freedom sweep.

Every option can come from a flag or from a ``key=value`` config file
(``--config``); flags win. All outputs are deterministic functions of the
input bytes, the resolved configuration and the seed. Exit codes: 0 success,
1 validation, 2 I/O, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from .diagnostics import acf, summarize
from .errors import (
    BlockCountError,
    DataError,
    DegenerateSeriesError,
    DimensionError,
    FactorizationError,
    InvalidParamsError,
    NuRangeError,
    ParseError,
)
from .model import PARAM_NAMES, GarchParams, simulate
from .report import (
    FitReport,
    read_chain_csv,
    read_returns,
    summary_to_dict,
    write_chain_csv,
    write_report,
    write_returns,
)
from .samplers import (
    AdaptiveConfig,
    MetropolisConfig,
    run_adaptive,
    run_metropolis,
    tune_step_widths,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_NUMERIC = 3

SIM_DEFAULTS = {"alpha": 0.1, "beta": 0.8, "omega": 0.1, "n": 2000, "seed": 0}
ADAPTIVE_DEFAULTS = {
    "burn_in": 3000,
    "pilot": 1000,
    "refresh_interval": 1000,
    "draws": 199000,
    "nu": 10.0,
}
METROPOLIS_DEFAULTS = {"burn_in": 3000, "draws": 600000}
DEFAULT_SEED = 0
DEFAULT_BLOCKS = 20
DEFAULT_LAGS = 1000


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


class _Parser(argparse.ArgumentParser):
    """argparse variant that reports usage problems as validation failures."""

    def error(self, message):
        raise CliError(EXIT_VALIDATION, message)


def _read_config_file(path) -> dict[str, str]:
    try:
        fh = open(path)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read config file: {exc}") from exc
    settings: dict[str, str] = {}
    with fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise CliError(EXIT_VALIDATION, f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            settings[key.strip().replace("-", "_")] = value.strip()
    return settings


class _Options:
    """Flag-over-config-file-over-default resolution for one invocation."""

    def __init__(self, args):
        self.args = args
        self.cfg = _read_config_file(args.config) if getattr(args, "config", None) else {}

    def get(self, key, default=None, conv=float):
        flag = getattr(self.args, key, None)
        if flag is not None:
            return flag
        if key in self.cfg:
            try:
                return conv(self.cfg[key])
            except ValueError as exc:
                raise CliError(
                    EXIT_VALIDATION, f"bad config value for {key}: {self.cfg[key]!r}"
                ) from exc
        return default

    def require(self, key, default=None, conv=float):
        value = self.get(key, default, conv)
        if value is None:
            raise CliError(EXIT_VALIDATION, f"missing required option --{key.replace('_', '-')}")
        return value


def _nu_list_from_string(text: str) -> list[float]:
    return [float(tok) for tok in text.replace(",", " ").split()]


def _require_params(alpha, beta, omega) -> GarchParams:
    params = GarchParams(omega=omega, alpha=alpha, beta=beta)
    if params.is_valid():
        return params
    if min(alpha, beta, omega) <= 0:
        raise CliError(EXIT_VALIDATION, "alpha, beta and omega must all be positive")
    raise CliError(
        EXIT_VALIDATION,
        f"stationarity requires alpha + beta < 1, got {alpha} + {beta} = {alpha + beta}",
    )


# ---------------------------------------------------------------- simulate


def cmd_simulate(args) -> int:
    opt = _Options(args)
    alpha = opt.get("alpha", SIM_DEFAULTS["alpha"])
    beta = opt.get("beta", SIM_DEFAULTS["beta"])
    omega = opt.get("omega", SIM_DEFAULTS["omega"])
    n = opt.get("n", SIM_DEFAULTS["n"], conv=int)
    seed = opt.get("seed", SIM_DEFAULTS["seed"], conv=int)
    out = opt.require("out", conv=str)
    params = _require_params(alpha, beta, omega)
    if n < 1:
        raise CliError(EXIT_VALIDATION, f"need n >= 1, got {n}")
    y = simulate(params, n, seed)
    header = f"garch11 returns n={n} seed={seed} alpha={alpha!r} beta={beta!r} omega={omega!r}"
    write_returns(out, y, header=header)
    print(f"simulate: wrote {n} returns to {out}")
    print(f"simulate: alpha={alpha!r} beta={beta!r} omega={omega!r} seed={seed}")
    return EXIT_OK


# --------------------------------------------------------------------- fit


def _initial_widths(y) -> MetropolisConfig:
    # omega's posterior scale follows the sample variance; alpha and beta are
    # fractions of unity regardless of the data units
    scale = max(float(np.var(y)), 1e-12)
    return MetropolisConfig((0.1, 0.1, 0.1 * scale))


def _fit_settings(opt: _Options, method: str) -> dict:
    base = ADAPTIVE_DEFAULTS if method == "adaptive" else METROPOLIS_DEFAULTS
    settings = {
        "burn_in": opt.get("burn_in", base["burn_in"], conv=int),
        "draws": opt.get("draws", base["draws"], conv=int),
        "blocks": opt.get("blocks", DEFAULT_BLOCKS, conv=int),
    }
    if method == "adaptive":
        settings["pilot"] = opt.get("pilot", base["pilot"], conv=int)
        settings["refresh_interval"] = opt.get("refresh_interval", base["refresh_interval"], conv=int)
        settings["nu"] = opt.get("nu", base["nu"])
    return settings


def _population_cov(draws: np.ndarray) -> np.ndarray:
    d = draws - draws.mean(axis=0)
    return d.T @ d / draws.shape[0]


def _run_fit(y, method: str, settings: dict, seed: int) -> tuple[FitReport, object]:
    """Shared fit pipeline: tune step widths, sample, summarize, report."""
    t0 = time.perf_counter()
    tuned = tune_step_widths(y, _initial_widths(y), seed)
    if method == "adaptive":
        acfg = AdaptiveConfig(
            burn_in=settings["burn_in"],
            pilot=settings["pilot"],
            refresh_interval=settings["refresh_interval"],
            analysis_draws=settings["draws"],
            nu=settings["nu"],
            seed=seed,
        )
        chain = run_adaptive(y, acfg, tuned.config)
        v = chain.final_cov
    else:
        chain = run_metropolis(y, tuned.config, settings["burn_in"], settings["draws"], seed)
        v = _population_cov(chain.draws)
    summary = summarize(chain, blocks=settings["blocks"])
    duration = time.perf_counter() - t0
    schedule = dict(settings)
    schedule["method"] = method
    schedule["step_widths"] = [float(w) for w in tuned.config.step_widths]
    schedule["tuning_converged"] = bool(tuned.converged)
    schedule["tuning_acceptance"] = float(tuned.acceptance)
    report = FitReport(
        method=method,
        seed=int(seed),
        schedule=schedule,
        summary=summary_to_dict(summary),
        v_matrix=[[float(x) for x in row] for row in v],
        acceptance_trace=[float(a) for a in chain.acceptance_trace],
        acceptance_rate=float(chain.acceptance_rate),
        duration_seconds=duration,
    )
    return report, chain


def _print_fit(report: FitReport) -> None:
    print(
        f"fit: method={report.method} seed={report.seed} "
        f"acceptance={report.acceptance_rate:.4f} duration={report.duration_seconds:.2f}s"
    )
    for name in PARAM_NAMES:
        ps = report.summary[name]
        if ps.get("degenerate"):
            print(f"  {name}: mean={ps['mean']:.6g} (degenerate chain, no error estimate)")
            continue
        print(
            f"  {name}: mean={ps['mean']:.6g} std={ps['std']:.3g} "
            f"stat_error={ps['stat_error']:.3g} "
            f"2tau={ps['two_tau']:.3g} +- {ps['two_tau_error']:.2g}"
        )


def _write_fit_outputs(report: FitReport, chain, out, chain_out) -> None:
    # duration is measured wall-clock; keep it off disk so reruns are
    # byte-identical, and report it on stdout instead
    on_disk = FitReport(**{**report.__dict__, "duration_seconds": None})
    write_report(out, on_disk)
    if chain_out:
        write_chain_csv(chain_out, chain)


def cmd_fit(args) -> int:
    opt = _Options(args)
    data = opt.require("data", conv=str)
    out = opt.require("out", conv=str)
    method = opt.get("method", "adaptive", conv=str)
    if method not in ("adaptive", "metropolis"):
        raise CliError(EXIT_VALIDATION, f"method must be adaptive or metropolis, got {method!r}")
    seed = opt.get("seed", DEFAULT_SEED, conv=int)
    settings = _fit_settings(opt, method)
    y = read_returns(data)
    report, chain = _run_fit(y, method, settings, seed)
    _print_fit(report)
    _write_fit_outputs(report, chain, out, opt.get("chain_out", conv=str))
    print(f"fit: report written to {out}")
    return EXIT_OK


# ---------------------------------------------------------------- diagnose


def _write_csv(path, header: str, rows) -> None:
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(repr(v) if isinstance(v, float) else str(v) for v in row) + "\n")


def cmd_diagnose(args) -> int:
    opt = _Options(args)
    chain_path = opt.require("chain", conv=str)
    out_dir = opt.require("out", conv=str)
    lags = opt.get("lags", DEFAULT_LAGS, conv=int)
    chain = read_chain_csv(chain_path)
    n = len(chain)
    if lags < 1:
        raise CliError(EXIT_VALIDATION, f"need lags >= 1, got {lags}")
    if n <= lags:
        raise CliError(EXIT_VALIDATION, f"chain of length {n} too short for {lags} lags")
    os.makedirs(out_dir, exist_ok=True)

    series = [acf(chain.draws[:, i], lags) for i in range(chain.dim)]
    _write_csv(
        os.path.join(out_dir, "acf.csv"),
        "lag," + ",".join(PARAM_NAMES),
        (
            (t, *(float(s.values[t]) for s in series))
            for t in range(lags + 1)
        ),
    )

    stride = max(1, n // 2000)
    _write_csv(
        os.path.join(out_dir, "history.csv"),
        "step," + ",".join(PARAM_NAMES),
        ((i, *(float(v) for v in chain.draws[i])) for i in range(0, n, stride)),
    )

    _write_csv(
        os.path.join(out_dir, "v_trace.csv"),
        "draws,v11,v22,v33,v12,v13,v23",
        _v_trace_rows(chain.draws),
    )

    stride = max(1, n // 5000)
    _write_csv(
        os.path.join(out_dir, "scatter.csv"),
        ",".join(PARAM_NAMES),
        (tuple(float(v) for v in chain.draws[i]) for i in range(0, n, stride)),
    )
    print(f"diagnose: wrote acf.csv, history.csv, v_trace.csv, scatter.csv to {out_dir}")
    return EXIT_OK


def _v_trace_rows(draws: np.ndarray):
    """Running second central moments at ~200 checkpoints along the chain."""
    n = draws.shape[0]
    s1 = np.cumsum(draws, axis=0)
    pairs = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)]
    s2 = {ij: np.cumsum(draws[:, ij[0]] * draws[:, ij[1]]) for ij in pairs}
    stride = max(1, n // 200)
    checkpoints = list(range(stride, n + 1, stride))
    if checkpoints[-1] != n:
        checkpoints.append(n)
    for k in checkpoints:
        m = s1[k - 1] / k
        row = [k]
        for i, j in pairs:
            row.append(float(s2[(i, j)][k - 1] / k - m[i] * m[j]))
        yield tuple(row)


# ---------------------------------------------------------------- sweep-nu


def cmd_sweep_nu(args) -> int:
    opt = _Options(args)
    data = opt.require("data", conv=str)
    out_dir = opt.require("out", conv=str)
    base_seed = opt.get("seed", DEFAULT_SEED, conv=int)
    nus = opt.get("nu", None, conv=_nu_list_from_string)
    if nus is None:
        raise CliError(EXIT_VALIDATION, "missing required option --nu (one or more values)")
    if isinstance(nus, (int, float)):
        nus = [float(nus)]
    nus = [float(v) for v in nus]
    if any(not v > 2 for v in nus):
        raise CliError(EXIT_VALIDATION, f"every nu must be > 2, got {nus}")

    y = read_returns(data)
    os.makedirs(out_dir, exist_ok=True)
    settings = _fit_settings(opt, "adaptive")

    failures: list[tuple[float, Exception]] = []
    summary_rows = []
    trace_rows = []
    for index, nu in enumerate(nus):
        seed = base_seed + index
        run_settings = {**settings, "nu": nu}
        try:
            report, _ = _run_fit(y, "adaptive", run_settings, seed)
        except Exception as exc:  # keep the remaining nu values running
            print(f"sweep-nu: nu={nu:g} failed: {exc}", file=sys.stderr)
            failures.append((nu, exc))
            continue
        on_disk = FitReport(**{**report.__dict__, "duration_seconds": None})
        write_report(os.path.join(out_dir, f"report_nu{nu:g}.json"), on_disk)
        row = [float(nu), seed, float(report.acceptance_trace[-1])]
        for name in PARAM_NAMES:
            ps = report.summary[name]
            row.extend(
                [ps["mean"], ps["stat_error"], ps["two_tau"], ps["two_tau_error"]]
            )
        summary_rows.append(tuple(row))
        for w, acc in enumerate(report.acceptance_trace):
            trace_rows.append((float(nu), w, float(acc)))
        print(f"sweep-nu: nu={nu:g} seed={seed} done ({report.duration_seconds:.2f}s)")

    header = "nu,seed,final_acceptance," + ",".join(
        f"{name}_{col}" for name in PARAM_NAMES for col in ("mean", "stat_error", "two_tau", "two_tau_error")
    )
    _write_csv(os.path.join(out_dir, "sweep_summary.csv"), header, summary_rows)
    _write_csv(os.path.join(out_dir, "acceptance_traces.csv"), "nu,window,acceptance", trace_rows)
    if failures:
        return _exit_code_for(failures[0][1])
    return EXIT_OK


# -------------------------------------------------------------- entry point


def _exit_code_for(exc: Exception) -> int:
    if isinstance(exc, CliError):
        return exc.code
    if isinstance(exc, (FactorizationError, DegenerateSeriesError, FloatingPointError)):
        return EXIT_NUMERIC
    if isinstance(exc, (ParseError, OSError)):
        return EXIT_IO
    if isinstance(
        exc,
        (
            DataError,
            InvalidParamsError,
            NuRangeError,
            BlockCountError,
            DimensionError,
            ValueError,
        ),
    ):
        return EXIT_VALIDATION
    raise exc


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="garchmc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_common(p):
        p.add_argument("--config", help="key=value config file; flags override it")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output path")

    p_sim = sub.add_parser("simulate", help="generate synthetic returns")
    add_common(p_sim)
    p_sim.add_argument("--alpha", type=float)
    p_sim.add_argument("--beta", type=float)
    p_sim.add_argument("--omega", type=float)
    p_sim.add_argument("--n", type=int)
    p_sim.set_defaults(func=cmd_simulate)

    p_fit = sub.add_parser("fit", help="fit the posterior by MCMC")
    add_common(p_fit)
    p_fit.add_argument("data", nargs="?", help="returns file")
    p_fit.add_argument("--method", choices=("adaptive", "metropolis"))
    p_fit.add_argument("--nu", type=float)
    p_fit.add_argument("--burn-in", type=int)
    p_fit.add_argument("--pilot", type=int)
    p_fit.add_argument("--refresh-interval", type=int)
    p_fit.add_argument("--draws", type=int)
    p_fit.add_argument("--blocks", type=int)
    p_fit.add_argument("--chain-out", help="also write the raw chain CSV here")
    p_fit.set_defaults(func=cmd_fit)

    p_diag = sub.add_parser("diagnose", help="export chain diagnostics as CSV")
    add_common(p_diag)
    p_diag.add_argument("chain", nargs="?", help="chain CSV file")
    p_diag.add_argument("--lags", type=int)
    p_diag.set_defaults(func=cmd_diagnose)

    p_sweep = sub.add_parser("sweep-nu", help="repeat the adaptive fit over several nu")
    add_common(p_sweep)
    p_sweep.add_argument("data", nargs="?", help="returns file")
    p_sweep.add_argument("--nu", type=float, nargs="+")
    p_sweep.add_argument("--burn-in", type=int)
    p_sweep.add_argument("--pilot", type=int)
    p_sweep.add_argument("--refresh-interval", type=int)
    p_sweep.add_argument("--draws", type=int)
    p_sweep.add_argument("--blocks", type=int)
    p_sweep.set_defaults(func=cmd_sweep_nu)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return exc.code
    except Exception as exc:
        try:
            code = _exit_code_for(exc)
        except Exception:
            raise exc
        print(f"error: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
