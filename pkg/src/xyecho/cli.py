"""Command line entry point: ``xyecho {le,berry,scaling,oracle,run}``.

Exit status is 0 on success, 1 for configuration errors and 2 for numerical
failures (degenerate mode, pole, peak not bracketed, ...).
"""

from __future__ import annotations

import argparse
import logging
import sys
import warnings
from contextlib import nullcontext
from pathlib import Path

import yaml

from .errors import NumericalError, ParameterError
from .sweeps import (
    BERRY_EXPERIMENTS,
    LE_EXPERIMENTS,
    THERMODYNAMIC,
    ConfigError,
    SweepError,
    resolve_threads,
    run_experiment,
    validate_config,
    write_rows,
)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2

log = logging.getLogger("xyecho")


def _size(text: str) -> int | str:
    if text.lower() in ("inf", "infinity"):
        return THERMODYNAMIC
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"n_sites must be an integer or 'inf', got {text!r}")


def _common(p: argparse.ArgumentParser, chain: bool = True) -> None:
    if chain:
        p.add_argument("--gamma", type=float, nargs="+", help="anisotropy values")
        p.add_argument("--lambda", dest="lam", type=float, nargs=3,
                       metavar=("LO", "HI", "STEP"), help="transverse field grid")
        p.add_argument("--n-sites", type=_size, nargs="+", help="chain sizes")
        p.add_argument("--delta", type=float, help="field shift; overrides mu, nu, g")
        p.add_argument("--mu", type=float)
        p.add_argument("--nu", type=float)
        p.add_argument("--g", type=float, help="central spin coupling")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--output", help="output file (default: stdout)")
    p.add_argument("--threads", type=int, help="worker threads, 0 = one per CPU")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xyecho",
        description="Loschmidt echo and Berry phase of a central spin coupled to an XY chain.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    le = sub.add_parser("le", help="Loschmidt echo versus time")
    le.add_argument("--experiment", choices=LE_EXPERIMENTS, default="le_time_lambda")
    le.add_argument("--time", type=float, nargs=3, metavar=("LO", "HI", "STEP"))
    _common(le)

    berry = sub.add_parser("berry", help="central-spin Berry phase and its lambda-derivative")
    berry.add_argument("--experiment", choices=BERRY_EXPERIMENTS, default="berry_surface")
    _common(berry)

    scaling = sub.add_parser("scaling", help="pseudocritical peak positions and scaling fit")
    scaling.add_argument("--bracket", type=float, nargs=2, metavar=("LO", "HI"))
    _common(scaling)

    oracle = sub.add_parser("oracle", help="compare the echo with the 2x2 brute-force oracle")
    oracle.add_argument("--seeds", type=int, help="number of random instances")
    _common(oracle, chain=False)

    run = sub.add_parser("run", help="run a sweep described by a YAML/JSON document")
    run.add_argument("config", type=Path)
    _common(run, chain=False)
    return parser


def _set(doc: dict, section: str | None, key: str, value) -> None:
    if value is None:
        return
    target = doc if section is None else doc.setdefault(section, {})
    target[key] = value


def config_from_args(args: argparse.Namespace) -> dict:
    """Sweep document equivalent to the command-line flags."""
    if args.command == "run":
        text = args.config.read_text(encoding="utf-8")
        doc = yaml.safe_load(text) or {}
        if not isinstance(doc, dict):
            raise ConfigError([f"{args.config}: configuration must be a key/value document"])
    else:
        experiment = {"scaling": "dbeta_scaling", "oracle": "oracle_check"}.get(
            args.command, getattr(args, "experiment", None))
        doc = {"experiment": experiment}
        if args.command != "oracle":
            _set(doc, "chain", "gamma", args.gamma)
            _set(doc, "chain", "lambda", args.lam)
            _set(doc, "chain", "n_sites", args.n_sites)
            for key in ("mu", "nu", "g", "delta"):
                _set(doc, "central_spin", key, getattr(args, key))
        _set(doc, "grid", "time", getattr(args, "time", None))
        _set(doc, "grid", "bracket", getattr(args, "bracket", None))
        _set(doc, "grid", "seeds", getattr(args, "seeds", None))
    _set(doc, "output", "format", args.format)
    _set(doc, "output", "path", args.output)
    _set(doc, None, "threads", args.threads)
    return doc


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            cfg = validate_config(config_from_args(args))
        for w in caught:
            log.warning("%s", w.message)
        threads = resolve_threads(cfg.threads)
    except (ConfigError, ParameterError, OSError, yaml.YAMLError) as exc:
        print(f"xyecho: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    log.info("experiment %s on %d thread(s)", cfg.experiment, threads)
    path = Path(cfg.output_path) if cfg.output_path else None
    tmp = path.with_name(path.name + ".partial") if path else None
    try:
        with (open(tmp, "w", encoding="utf-8", newline="") if tmp else nullcontext(sys.stdout)) as out:
            count = write_rows(run_experiment(cfg, threads), out, cfg.output_format)
    except SweepError as exc:
        print(f"xyecho: {exc}", file=sys.stderr)
        if tmp:
            tmp.unlink(missing_ok=True)
        return EXIT_NUMERICAL if isinstance(exc.cause, NumericalError) else EXIT_CONFIG
    except OSError as exc:
        print(f"xyecho: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if tmp:
        tmp.replace(path)
    log.info("wrote %d rows", count)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
