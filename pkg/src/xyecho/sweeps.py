"""Parameter sweeps that regenerate the figure data as flat tables.

A sweep is described by a nested key/value document (YAML or JSON)::

    experiment: le_time_lambda
    chain:
      gamma: [1.0]                # list of anisotropies
      lambda: [0.0, 2.0, 0.01]    # lo, hi, step
      n_sites: [100]              # "inf" selects the thermodynamic limit (Berry only)
    central_spin: {mu: 0.1, nu: 2.0, g: 0.5, delta: 0.05}
    grid:
      time: [0.0, 20.0, 0.01]
      bracket: [0.5, 1.0]         # dbeta_scaling peak search
      seeds: 100                  # oracle_check
    output: {path: out.csv, format: csv}
    threads: 0

Every row carries all parameters of its grid point.  Grid points are
independent and may be computed on a thread pool; rows are always emitted in
grid order, so the output does not depend on the number of threads.
"""

from __future__ import annotations

import copy
import csv
import itertools
import json
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Iterator, Sequence

import numpy as np

from .berry import (
    berry_phase_finite,
    berry_phase_thermodynamic,
    find_pseudocritical,
)
from .errors import ParameterError, XYEchoError
from .loschmidt import echo_series, loschmidt_echo
from .oracle import oracle_echo
from .spectrum import CentralSpinParams, ChainParams, derive_branch_params, mode_table

LE_EXPERIMENTS = ("le_time_lambda", "le_time_sizes", "le_time_gammas")
BERRY_EXPERIMENTS = ("berry_surface", "berry_xx_sizes")
EXPERIMENTS = LE_EXPERIMENTS + BERRY_EXPERIMENTS + ("dbeta_scaling", "oracle_check")

COLUMNS = ("experiment", "gamma", "lambda", "n_sites", "delta", "mu", "nu", "g",
           "t", "quantity", "value", "flag")

THERMODYNAMIC = "inf"
DEFAULT_DELTA = 0.05
DEFAULT_CENTRAL_SPIN = {"mu": 0.1, "nu": 2.0, "g": 0.5}
DEFAULT_TIME = [0.0, 20.0, 0.01]
FIG2_GAMMAS = [0.0, 0.01, 0.05, 0.1, 0.5, 1.0]
ORACLE_SIZES = (8, 10, 12)

_DEFAULTS: dict[str, dict[str, Any]] = {
    "le_time_lambda": {"gamma": [1.0], "lambda": [0.0, 2.0, 0.01], "n_sites": [100]},
    "le_time_sizes": {"gamma": [1.0], "lambda": [1.0, 1.0, 0.01], "n_sites": [50, 100, 200]},
    "le_time_gammas": {"gamma": FIG2_GAMMAS, "lambda": [1.0, 1.0, 0.01], "n_sites": [100]},
    "berry_surface": {"gamma": [round(0.1 * i, 1) for i in range(11)],
                      "lambda": [0.0, 2.0, 0.01], "n_sites": [THERMODYNAMIC]},
    "berry_xx_sizes": {"gamma": [0.0], "lambda": [0.0, 1.5, 0.001],
                       "n_sites": [10, 20, 50, 100, THERMODYNAMIC]},
    "dbeta_scaling": {"gamma": [1.0], "lambda": [0.5, 1.5, 0.001],
                      "n_sites": [15, 51, 251, 501, THERMODYNAMIC]},
    # instances are drawn per seed; the chain section is unused
    "oracle_check": {"n_sites": list(ORACLE_SIZES)},
}

_SCHEMA = {
    "experiment": None,
    "threads": None,
    "chain": {"gamma", "lambda", "n_sites"},
    "central_spin": {"mu", "nu", "g", "delta"},
    "grid": {"time", "bracket", "seeds"},
    "output": {"path", "format"},
}


class ConfigError(ParameterError):
    """Every problem found in a sweep document, reported together."""

    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("invalid sweep configuration:\n  - " + "\n  - ".join(self.problems))


class SweepError(XYEchoError):
    """A library error raised while evaluating one grid point."""

    def __init__(self, point: str, cause: XYEchoError):
        self.point = point
        self.cause = cause
        super().__init__(f"{cause} [at {point}]")


@dataclass(frozen=True)
class SweepConfig:
    experiment: str
    gammas: tuple[float, ...]
    lambdas: tuple[float, ...]
    sizes: tuple[int | str, ...]
    central_spin: CentralSpinParams
    delta: float | None
    times: tuple[float, ...]
    bracket: tuple[float, float] = (0.5, 1.0)
    seeds: int = 100
    output_path: str | None = None
    output_format: str = "csv"
    threads: int = 1
    warnings: tuple[str, ...] = field(default=(), compare=False)


@dataclass(frozen=True)
class ResultRow:
    experiment: str
    gamma: float | None
    lam: float | None
    n_sites: int | str | None
    delta: float | None
    mu: float | None
    nu: float | None
    g: float | None
    t: float | None
    quantity: str
    value: float
    flag: str = ""

    def as_tuple(self) -> tuple:
        return (self.experiment, self.gamma, self.lam, self.n_sites, self.delta,
                self.mu, self.nu, self.g, self.t, self.quantity, self.value, self.flag)

    def as_dict(self) -> dict[str, Any]:
        return dict(zip(COLUMNS, self.as_tuple()))


# -- validation -------------------------------------------------------------

def expand_range(bounds: Sequence[float]) -> np.ndarray:
    """``[lo, hi, step]`` to ``lo + i*step`` for every point up to ``hi``."""
    lo, hi, step = (float(v) for v in bounds)
    if lo == hi:
        return np.array([lo])
    n = int(math.floor((hi - lo) / step * (1 + 1e-12) + 1e-9)) + 1
    return lo + step * np.arange(n)


def _range_problems(name: str, bounds: Any) -> list[str]:
    if not isinstance(bounds, (list, tuple)) or len(bounds) != 3:
        return [f"{name} must be [lo, hi, step]"]
    try:
        lo, hi, step = (float(v) for v in bounds)
    except (TypeError, ValueError):
        return [f"{name} entries must be numbers"]
    problems = []
    if not all(map(math.isfinite, (lo, hi, step))):
        problems.append(f"{name} entries must be finite")
    elif hi < lo:
        problems.append(f"{name} is empty (hi < lo)")
    elif hi > lo and step <= 0:
        problems.append(f"{name} step must be > 0")
    return problems


def _number_list(name: str, value: Any, problems: list[str]) -> list:
    if not isinstance(value, (list, tuple)):
        value = [value]
    if not value:
        problems.append(f"{name} must not be empty")
    return list(value)


def validate_config(raw: dict | None) -> SweepConfig:
    """Resolve defaults and check a sweep document, collecting every violation.

    The figure parameters are the defaults: ``delta = 0.05``, ``N = 100``,
    time step 0.01 and ``(mu, nu, g) = (0.1, 2.0, 0.5)``.  An explicit
    ``delta`` takes precedence over the central-spin parameters, with a warning.
    """
    raw = copy.deepcopy(raw or {})
    problems: list[str] = []
    notes: list[str] = []
    if not isinstance(raw, dict):
        raise ConfigError(["configuration must be a key/value document"])

    for key, value in raw.items():
        if key not in _SCHEMA:
            problems.append(f"unknown key '{key}'")
        elif _SCHEMA[key] is not None:
            if not isinstance(value, dict):
                problems.append(f"section '{key}' must be a key/value mapping")
                continue
            problems.extend(f"unknown key '{key}.{sub}'" for sub in value if sub not in _SCHEMA[key])

    def section(name: str) -> dict:
        value = raw.get(name) or {}
        return value if isinstance(value, dict) else {}

    experiment = raw.get("experiment", "le_time_lambda")
    if experiment not in EXPERIMENTS:
        problems.append(f"unknown experiment '{experiment}' (choose from {', '.join(EXPERIMENTS)})")
        experiment = "le_time_lambda"
    defaults = _DEFAULTS[experiment]
    chain, spin, grid, output = (section(s) for s in ("chain", "central_spin", "grid", "output"))

    gammas = []
    if experiment != "oracle_check":
        gammas = _number_list("chain.gamma", chain.get("gamma", defaults["gamma"]), problems)
    for gm in gammas:
        if not isinstance(gm, (int, float)) or isinstance(gm, bool) or not math.isfinite(gm):
            problems.append(f"chain.gamma entries must be finite numbers, got {gm!r}")
        elif gm < 0:
            problems.append(f"chain.gamma must be >= 0, got {gm}")

    lam_bounds = chain.get("lambda", defaults.get("lambda"))
    lambdas: tuple[float, ...] = ()
    if experiment != "oracle_check":
        lam_problems = _range_problems("chain.lambda", lam_bounds)
        problems.extend(lam_problems)
        if not lam_problems:
            lambdas = tuple(float(x) for x in expand_range(lam_bounds))

    sizes = _number_list("chain.n_sites", chain.get("n_sites", defaults["n_sites"]), problems)
    finite_sizes = []
    for n in sizes:
        if n == THERMODYNAMIC:
            if experiment in LE_EXPERIMENTS or experiment == "oracle_check":
                problems.append("n_sites 'inf' is only meaningful for Berry phase experiments")
            continue
        if isinstance(n, bool) or not isinstance(n, int) or n < 2:
            problems.append(f"n_sites must be integers >= 2 or 'inf', got {n!r}")
            continue
        if n % 2 and experiment not in BERRY_EXPERIMENTS + ("dbeta_scaling",):
            problems.append(f"n_sites must be even, got {n}")
        finite_sizes.append(n)
    if experiment == "dbeta_scaling":
        if len(finite_sizes) < 4:
            problems.append("dbeta_scaling needs at least 4 finite n_sites")
        elif any(b <= a for a, b in zip(finite_sizes, finite_sizes[1:])):
            problems.append("dbeta_scaling n_sites must be strictly increasing")

    cs_given = [k for k in ("mu", "nu", "g") if k in spin]
    cs_values = {k: spin.get(k, DEFAULT_CENTRAL_SPIN[k]) for k in ("mu", "nu", "g")}
    for k, v in cs_values.items():
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
            problems.append(f"central_spin.{k} must be a finite number, got {v!r}")
            cs_values[k] = DEFAULT_CENTRAL_SPIN[k]
    if cs_values["mu"] == 0 and cs_values["nu"] == 0:
        problems.append("central spin eigenbasis undefined (mu = nu = 0)")
    delta = spin.get("delta")
    if delta is not None:
        if not isinstance(delta, (int, float)) or isinstance(delta, bool) or not math.isfinite(delta):
            problems.append(f"central_spin.delta must be a finite number, got {delta!r}")
            delta = None
        elif cs_given:
            msg = (f"both delta and central-spin parameters ({', '.join(cs_given)}) "
                   f"given; delta={delta} takes precedence for the chain backaction")
            notes.append(msg)
            warnings.warn(msg, stacklevel=2)
    if delta is None and experiment in LE_EXPERIMENTS and not cs_given:
        delta = DEFAULT_DELTA

    time_bounds = grid.get("time", DEFAULT_TIME)
    times: tuple[float, ...] = ()
    if experiment in LE_EXPERIMENTS:
        time_problems = _range_problems("grid.time", time_bounds)
        if not time_problems and float(time_bounds[0]) < 0:
            time_problems.append("grid.time must start at t >= 0")
        problems.extend(time_problems)
        if not time_problems:
            times = tuple(float(x) for x in expand_range(time_bounds))

    bracket = grid.get("bracket", [0.5, 1.0])
    if (not isinstance(bracket, (list, tuple)) or len(bracket) != 2
            or not all(isinstance(b, (int, float)) for b in bracket) or not bracket[0] < bracket[1]):
        problems.append(f"grid.bracket must be [lo, hi] with lo < hi, got {bracket!r}")
        bracket = [0.5, 1.0]

    seeds = grid.get("seeds", 100)
    if isinstance(seeds, bool) or not isinstance(seeds, int) or seeds < 1:
        problems.append(f"grid.seeds must be a positive integer, got {seeds!r}")
        seeds = 1

    fmt = output.get("format", "csv")
    if fmt not in ("csv", "json"):
        problems.append(f"output.format must be 'csv' or 'json', got {fmt!r}")
    path = output.get("path")
    if path is not None and not isinstance(path, str):
        problems.append("output.path must be a string")

    threads = raw.get("threads", 1)
    if isinstance(threads, bool) or not isinstance(threads, int) or threads < 0:
        problems.append(f"threads must be an integer >= 0, got {threads!r}")
        threads = 1

    if problems:
        raise ConfigError(problems)
    return SweepConfig(
        experiment=experiment,
        gammas=tuple(float(x) for x in gammas),
        lambdas=lambdas,
        sizes=tuple(sizes),
        central_spin=CentralSpinParams(**{k: float(v) for k, v in cs_values.items()}),
        delta=None if delta is None else float(delta),
        times=times,
        bracket=(float(bracket[0]), float(bracket[1])),
        seeds=seeds,
        output_path=path,
        output_format=fmt,
        threads=threads,
        warnings=tuple(notes),
    )


def resolve_threads(requested: int) -> int:
    """``ECHO_THREADS`` overrides ``requested``; 0 means one thread per CPU."""
    env = os.environ.get("ECHO_THREADS")
    if env is not None and env.strip():
        try:
            requested = int(env)
        except ValueError:
            raise ConfigError([f"ECHO_THREADS must be an integer, got {env!r}"]) from None
        if requested < 0:
            raise ConfigError([f"ECHO_THREADS must be >= 0, got {requested}"])
    return requested or (os.cpu_count() or 1)


# -- experiments ------------------------------------------------------------

def _delta_for(cfg: SweepConfig, n: int) -> float:
    if cfg.delta is not None:
        return cfg.delta
    return derive_branch_params(cfg.central_spin, n).delta


def _row(cfg: SweepConfig, **kw) -> ResultRow:
    cs = cfg.central_spin
    base = dict(experiment=cfg.experiment, gamma=None, lam=None, n_sites=None, delta=None,
                mu=cs.mu, nu=cs.nu, g=cs.g, t=None, flag="")
    base.update(kw)
    return ResultRow(**base)


def _le_item(cfg: SweepConfig, gamma: float, lam: float, n: int) -> list[ResultRow]:
    d = _delta_for(cfg, n)
    modes = mode_table(ChainParams(gamma, lam, n), d)
    series = echo_series(modes, cfg.times)
    flag = "degenerate_mode" if np.any(modes.degenerate) else ""
    return [_row(cfg, gamma=gamma, lam=lam, n_sites=n, delta=d, t=t, quantity="loschmidt_echo",
                 value=float(v), flag=flag)
            for t, v in zip(series.times.tolist(), series.values.tolist())]


def _berry_item(cfg: SweepConfig, gamma: float, lam: float, n: int | str,
                quantities: Sequence[str] = ("beta", "dbeta_dlambda")) -> list[ResultRow]:
    cs = cfg.central_spin
    if n == THERMODYNAMIC:
        res, d = berry_phase_thermodynamic(gamma, lam, cs), 0.0
    else:
        d = _delta_for(cfg, n)
        res = berry_phase_finite(ChainParams(gamma, lam, n), cs, delta=d)
    flag = ";".join(res.flags)
    values = {"beta": res.beta, "dbeta_dlambda": res.dbeta_dlambda, "f": res.f_value}
    return [_row(cfg, gamma=gamma, lam=lam, n_sites=n, delta=d, quantity=q, value=values[q],
                 flag=flag)
            for q in quantities]


def _peak_item(cfg: SweepConfig, gamma: float, n: int, target: str) -> list[ResultRow]:
    d = _delta_for(cfg, n) if target == "dbeta" else 0.0
    lam_m = find_pseudocritical(ChainParams(gamma, cfg.bracket[0], n), cfg.central_spin,
                                cfg.bracket, target=target, delta=d, tol=1e-10)
    return [_row(cfg, gamma=gamma, n_sites=n, delta=d, quantity=f"lambda_m_{target}",
                 value=lam_m)]


def oracle_instance(seed: int) -> tuple[ChainParams, float, float]:
    """Random ``(chain, delta, t)`` drawn reproducibly from ``seed``."""
    rng = np.random.default_rng(seed)
    n = int(rng.choice(ORACLE_SIZES))
    gamma, lam = rng.uniform(0, 1), rng.uniform(0, 2)
    delta, t = rng.uniform(0, 0.2), rng.uniform(0, 5)
    return ChainParams(float(gamma), float(lam), n), float(delta), float(t)


def _oracle_item(cfg: SweepConfig, seed: int) -> list[ResultRow]:
    chain, d, t = oracle_instance(seed)
    dev = abs(loschmidt_echo(mode_table(chain, d), t) - oracle_echo(chain, d, t))
    return [ResultRow(cfg.experiment, chain.gamma, chain.lam, chain.n_sites, d, None, None, None,
                      t, "abs_deviation", dev, f"seed={seed}")]


def _work_items(cfg: SweepConfig) -> list[tuple[str, Callable[[], list[ResultRow]]]]:
    """Grid points in emission order, each with a label for error messages."""
    items = []
    exp = cfg.experiment
    if exp in LE_EXPERIMENTS:
        for gamma, lam, n in itertools.product(cfg.gammas, cfg.lambdas, cfg.sizes):
            items.append((f"gamma={gamma}, lambda={lam}, n_sites={n}",
                          lambda gamma=gamma, lam=lam, n=n: _le_item(cfg, gamma, lam, n)))
    elif exp in BERRY_EXPERIMENTS:
        for gamma, lam, n in itertools.product(cfg.gammas, cfg.lambdas, cfg.sizes):
            items.append((f"gamma={gamma}, lambda={lam}, n_sites={n}",
                          lambda gamma=gamma, lam=lam, n=n: _berry_item(cfg, gamma, lam, n)))
    elif exp == "dbeta_scaling":
        for gamma, n, lam in itertools.product(cfg.gammas, cfg.sizes, cfg.lambdas):
            items.append((f"gamma={gamma}, lambda={lam}, n_sites={n}",
                          lambda gamma=gamma, lam=lam, n=n:
                          _berry_item(cfg, gamma, lam, n, ("dbeta_dlambda",))))
        finite = [n for n in cfg.sizes if n != THERMODYNAMIC]
        for gamma, target, n in itertools.product(cfg.gammas, ("dbeta", "df"), finite):
            items.append((f"gamma={gamma}, n_sites={n}, peak of {target}",
                          lambda gamma=gamma, n=n, target=target:
                          _peak_item(cfg, gamma, n, target)))
    elif exp == "oracle_check":
        for seed in range(cfg.seeds):
            items.append((f"seed={seed}", lambda seed=seed: _oracle_item(cfg, seed)))
    return items


def _guarded(label: str, func: Callable[[], list[ResultRow]]) -> list[ResultRow]:
    try:
        return func()
    except XYEchoError as exc:
        raise SweepError(label, exc) from exc


def _summary_rows(cfg: SweepConfig, rows: list[ResultRow]) -> list[ResultRow]:
    if cfg.experiment == "oracle_check":
        worst = max(r.value for r in rows)
        return [_row(cfg, mu=None, nu=None, g=None, quantity="max_abs_deviation", value=worst,
                     flag=f"seeds={cfg.seeds}")]
    if cfg.experiment == "dbeta_scaling":
        out = []
        for gamma in cfg.gammas:
            for target in ("dbeta", "df"):
                peaks = [r for r in rows
                         if r.quantity == f"lambda_m_{target}" and r.gamma == gamma]
                sizes = np.log([r.n_sites for r in peaks])
                slope = np.polyfit(sizes, np.log([1.0 - r.value for r in peaks]), 1)[0]
                out.append(_row(cfg, gamma=gamma, quantity=f"exponent_{target}",
                                value=-float(slope), flag="reference=1.803"))
        return out
    return []


_SUMMARISED = {"abs_deviation", "lambda_m_dbeta", "lambda_m_df"}


def run_experiment(cfg: SweepConfig, threads: int = 1) -> Iterator[ResultRow]:
    """Rows of one sweep, in grid order whatever the thread count."""
    items = _work_items(cfg)
    summary_source: list[ResultRow] = []
    needs_summary = cfg.experiment in ("oracle_check", "dbeta_scaling")

    def emit(batches: Iterable[list[ResultRow]]) -> Iterator[ResultRow]:
        for batch in batches:
            if needs_summary:
                summary_source.extend(r for r in batch if r.quantity in _SUMMARISED)
            yield from batch

    if threads <= 1:
        yield from emit(_guarded(label, f) for label, f in items)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            yield from emit(pool.map(lambda item: _guarded(*item), items))
    try:
        yield from _summary_rows(cfg, summary_source)
    except XYEchoError as exc:
        raise SweepError("summary", exc) from exc


# -- output -----------------------------------------------------------------

def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".17g")
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return format_value(value)
    return value


def write_rows(rows: Iterable[ResultRow], stream, fmt: str = "csv") -> int:
    """Write rows as CSV (fixed column order) or a JSON array; returns the count."""
    count = 0
    if fmt == "csv":
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(COLUMNS)
        for row in rows:
            writer.writerow([format_value(v) for v in row.as_tuple()])
            count += 1
    elif fmt == "json":
        stream.write("[")
        for row in rows:
            obj = {k: _json_value(v) for k, v in row.as_dict().items()}
            stream.write(("\n" if count == 0 else ",\n") + json.dumps(obj))
            count += 1
        stream.write("\n]\n")
    else:
        raise ParameterError(f"unknown output format {fmt!r}")
    return count
